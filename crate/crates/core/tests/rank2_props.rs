use proptest::prelude::*;
use ranktwo::numcore::random::{random_hermitian, random_matrix, random_unit_vector, random_vector, seeded};
use ranktwo::numcore::{eigenvalues_dense, match_roots, C64};
use ranktwo::rank2::{
    interlacing_condition, limit_polynomial_q, perturbed_char_poly, weyl_perturbed, Rank2Perturbation,
};
use ranktwo::singvals::{gram_eigenvalues, sv_limit_polynomial, SVPerturbation};
use ranktwo::weyl::Resolvent;

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn char_poly_matches_dense_spectrum(seed in any::<u64>(), n in 2usize..7, s in -2.0..2.0f64, t in -2.0..2.0f64) {
        let mut rng = seeded(seed);
        let a = random_matrix(&mut rng, n);
        let [u, w, g, h] = [0; 4].map(|_| random_vector(&mut rng, n));
        let p = Rank2Perturbation::general(&a, &u, &w, &g, &h, c(s), c(t)).unwrap();
        let roots = perturbed_char_poly(&p).unwrap().roots().unwrap();
        let dense = eigenvalues_dense(&p.matrix()).unwrap();
        prop_assert!(match_roots(&roots, &dense).unwrap() < 1e-7);
    }

    #[test]
    fn selfadjoint_weyl_is_herglotz(seed in any::<u64>(), n in 2usize..7, s in -0.9..0.9f64, x in -3.0..3.0f64, y in 0.05..3.0f64) {
        // s = t keeps the antidiagonal perturbation Hermitian
        let mut rng = seeded(seed);
        let a = random_hermitian(&mut rng, n);
        let u = random_unit_vector(&mut rng, n);
        let p = Rank2Perturbation::antidiagonal_au(&a, &u, c(s), c(s)).unwrap();
        let q = weyl_perturbed(&p, C64::new(x, y)).unwrap();
        prop_assert!(q.im <= 1e-12);
        let direct = Resolvent::new(&p.matrix(), C64::new(x, y)).unwrap().q(&u, &u);
        prop_assert!((q - direct).norm() <= 1e-9 * (1.0 + direct.norm()));
    }

    #[test]
    fn zero_parameters_leave_spectrum(seed in any::<u64>(), n in 2usize..7) {
        let mut rng = seeded(seed);
        let a = random_matrix(&mut rng, n);
        let u = random_vector(&mut rng, n);
        let p = Rank2Perturbation::antidiagonal_au(&a, &u, c(0.0), c(0.0)).unwrap();
        let roots = perturbed_char_poly(&p).unwrap().roots().unwrap();
        prop_assert!(match_roots(&roots, &eigenvalues_dense(&a).unwrap()).unwrap() < 1e-8);
    }

    #[test]
    fn interlacing_when_condition_applies(seed in any::<u64>(), n in 2usize..7, s in -3.0..3.0f64, t in -3.0..3.0f64) {
        let mut rng = seeded(seed);
        let a = random_hermitian(&mut rng, n);
        let u = random_unit_vector(&mut rng, n);
        let Ok(cond) = interlacing_condition(&a, &u, s, t) else { return Ok(()) };
        prop_assume!(cond.applies);
        let p = Rank2Perturbation::antidiagonal_au(&a, &u, c(s), c(t)).unwrap();
        let e = eigenvalues_dense(&p.matrix()).unwrap();
        prop_assert!(e.iter().all(|z| z.im.abs() < 1e-8));
    }
}

#[test]
fn finite_limits_approach_q_roots() {
    let mut rng = seeded(11);
    let n = 5;
    let a = random_matrix(&mut rng, n);
    let [u, w, g, h] = [0; 4].map(|_| random_vector(&mut rng, n));
    let p = Rank2Perturbation::general(&a, &u, &w, &g, &h, c(0.0), c(0.0)).unwrap();
    let q = limit_polynomial_q(&p).unwrap();
    assert_eq!(q.degree, n - 2);
    let mut prev = f64::INFINITY;
    for r in [1e2, 1e4, 1e6] {
        let e = eigenvalues_dense(&p.with_params(c(r), c(1.7 * r)).matrix()).unwrap();
        // the n - 2 eigenvalues closest to the roots of q
        let dist = q
            .roots
            .iter()
            .map(|z| e.iter().map(|x| (x - z).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max);
        assert!(dist < prev, "{dist} at r = {r}");
        prev = dist;
    }
    assert!(prev < 1e-4);
}

#[test]
fn sv_limits_match_large_tau() {
    let mut rng = seeded(12);
    let n = 4;
    let b = random_matrix(&mut rng, n);
    let u = random_unit_vector(&mut rng, n);
    let v = random_unit_vector(&mut rng, n);
    let p = SVPerturbation::new(&b, &u, &v, 0.0).unwrap();
    let lim = sv_limit_polynomial(&p).unwrap().limits;
    let far = p.singular_values_at(1e7).unwrap();
    for (l, s) in lim.iter().zip(&far[1..]) {
        assert!((l - s).abs() < 1e-5, "{lim:?} {far:?}");
    }
}

#[test]
fn gram_polynomial_at_dimension_ten() {
    let mut rng = seeded(13);
    let n = 10;
    let b = random_matrix(&mut rng, n);
    let u = random_unit_vector(&mut rng, n);
    let v = random_unit_vector(&mut rng, n);
    let p = SVPerturbation::new(&b, &u, &v, 3.0).unwrap();
    let sq: Vec<f64> = p.singular_values_at(3.0).unwrap().iter().map(|s| s * s).collect();
    let ev = gram_eigenvalues(&p).unwrap();
    for (x, y) in ev.iter().zip(&sq) {
        assert!((x - y).abs() < 1e-6 * (1.0 + y), "{ev:?} {sq:?}");
    }
    assert_eq!(sv_limit_polynomial(&p).unwrap().limits.len(), n - 1);
}

#[test]
fn phase_transition_verdict_matches_small_s_eigenvalues() {
    use ranktwo::rank2::{phase_transition_check, AxisVerdict, DEFAULT_EPS};
    use ranktwo::numcore::{CMatrix, CVector};
    let i = C64::new(0.0, 1.0);
    let z = c(0.0);
    // Jordan block at i plus simple eigenvalues -i and 2i
    let a = CMatrix::from_rows(&[
        vec![i, c(1.0), z, z],
        vec![z, i, z, z],
        vec![z, z, -i, z],
        vec![z, z, z, i * 2.0],
    ]);
    let u = CVector::from_real(&[0.3, 1.0, 0.2, -0.4]);
    let g = CVector::from_real(&[1.0, -0.5, 0.1, 0.3]);
    let s = 1e-4;
    // a_{-2} = conj(w1) u2 + conj(h1) g2, so the sign of w1 picks the verdict
    for (w1, expected) in [(3.0, AxisVerdict::Stays), (-3.0, AxisVerdict::Leaves)] {
        let w = CVector::from_real(&[w1, 0.5, 0.7, 0.1]);
        let h = CVector::from_real(&[1.0, 0.2, -0.3, 0.6]);
        let r = phase_transition_check(&a, &u, &w, &g, &h, i, &DEFAULT_EPS).unwrap();
        assert_eq!(r.verdict, expected, "{}", r.a_minus2);
        let p = Rank2Perturbation::general(&a, &u, &w, &g, &h, c(s), c(s)).unwrap();
        let e = eigenvalues_dense(&p.matrix()).unwrap();
        let mut pair: Vec<C64> = e.into_iter().filter(|x| (x - i).norm() < 0.1).collect();
        assert_eq!(pair.len(), 2);
        pair.sort_by(|x, y| x.re.total_cmp(&y.re));
        let spread = (pair[1] - pair[0]).norm();
        // both branches move by order sqrt(s); their real gap is of that order only when leaving
        let re_gap = (pair[1].re - pair[0].re).abs();
        match expected {
            AxisVerdict::Stays => assert!(re_gap < 1e-3 * spread, "{pair:?}"),
            AxisVerdict::Leaves => assert!(re_gap > 1e-3 * s.sqrt(), "{pair:?}"),
        }
    }
}
