use rand::Rng;
use ranktwo::meixner::{
    classify_atoms, phase_transition_0to1, phase_transition_0to2, phase_transition_1to2, predicted_atom_count,
    u_transform_params, ConicPosition, MeixnerParams, PhaseCase,
};
use ranktwo::numcore::random::seeded;

fn count_after(u: &MeixnerParams, s: f64) -> usize {
    classify_atoms(&u_transform_params(u, s, s).unwrap()).atom_count
}

fn params(g: f64, a: f64, b: f64, c: f64) -> MeixnerParams {
    MeixnerParams::new(g, a, b, c).unwrap()
}

#[test]
fn one_to_two_positions() {
    // inside: 4 gamma (gamma - a) + 4b < (gamma - a)^2
    let inside = params(1.0, 5.0, 1.0, 1.0);
    let r = phase_transition_1to2(&inside).unwrap();
    assert_eq!(r.case, PhaseCase::OneToTwo(ConicPosition::Inside));
    let outside = params(1.0, 0.0, 1.0, 1.0);
    let r = phase_transition_1to2(&outside).unwrap();
    assert_eq!(r.case, PhaseCase::OneToTwo(ConicPosition::Outside));
    for s in [-2.5, -0.3, 0.3, 0.7, 1.4, 2.6, 3.5] {
        assert_eq!(r.set.contains(s), count_after(&outside, s) == 2, "s = {s}");
    }
}

#[test]
fn zero_gamma_one_atom_case() {
    // the general rule covers gamma = 0; the range is not just s < 0 or s > 2
    let u = params(0.0, 1.0, 0.5, 1.0);
    let r = phase_transition_1to2(&u).unwrap();
    for s in [-1.0, 0.5, 1.5, 3.0] {
        assert_eq!(r.set.contains(s), count_after(&u, s) == 2, "s = {s}");
    }
}

#[test]
fn general_zero_to_one_points_give_one_atom() {
    let u = params(1.0, 0.8, 1.0, 0.75);
    for s in phase_transition_0to1(&u).unwrap().set.points {
        assert_eq!(count_after(&u, s), 1);
    }
}

#[test]
fn double_root_case() {
    // Delta_g = 0 and 2bc + gamma^2 - a gamma = 0
    let (g, c) = (1.0f64, 0.5f64);
    // b = (gamma - a)^2 / (4(1 - c)) and 2bc = a gamma - gamma^2
    let a = 1.0 + 2.0 * (1.0 - c) / c;
    let b = (g - a) * (g - a) / (4.0 * (1.0 - c));
    let u = params(g, a, b, c);
    let r = phase_transition_0to2(&u).unwrap();
    assert_eq!(r.case, PhaseCase::ZeroToTwoDoubleRoot);
    for s in [-0.7, 0.4, 2.9] {
        assert_eq!(r.set.contains(s), count_after(&u, s) == 2);
    }
}

#[test]
fn random_grid_agrees_with_classification() {
    let mut rng = seeded(21);
    let mut checked = 0;
    while checked < 3000 {
        let g: f64 = rng.gen_range(-3.0..3.0);
        let a: f64 = rng.gen_range(-3.0..3.0);
        let b: f64 = rng.gen_range(0.05..3.0);
        let c = if rng.gen_bool(0.4) { 1.0 } else { rng.gen_range(0.01..1.0) };
        let u = params(g, a, b, c);
        if classify_atoms(&u).atom_count > 1 {
            continue;
        }
        let s = rng.gen_range(-4.0..5.0);
        let p = predicted_atom_count(&u, s).unwrap();
        if !p.flagged {
            assert_eq!(p.count, count_after(&u, s), "{u:?} s = {s}");
        }
        checked += 1;
    }
}

#[test]
fn two_atom_laws_are_rejected() {
    let u = params(3.0, 0.0, 1.0, 0.5);
    assert_eq!(classify_atoms(&u).atom_count, 2);
    assert!(predicted_atom_count(&u, 0.3).is_err());
}
