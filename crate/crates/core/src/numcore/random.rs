//! Seeded random instances. Entries are uniform on `[-1, 1]` in each part.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{CMatrix, CVector, C64};

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex<R: Rng>(rng: &mut R) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_vector<R: Rng>(rng: &mut R, n: usize) -> CVector {
    CVector::new((0..n).map(|_| random_complex(rng)).collect())
}

pub fn random_unit_vector<R: Rng>(rng: &mut R, n: usize) -> CVector {
    random_vector(rng, n).normalized()
}

pub fn random_matrix<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    CMatrix::new(n, n, (0..n * n).map(|_| random_complex(rng)).collect()).expect("square")
}

/// `(M + M*) / 2`.
pub fn random_hermitian<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    let m = random_matrix(rng, n);
    (&m + &m.adjoint()).scale(C64::new(0.5, 0.0))
}
