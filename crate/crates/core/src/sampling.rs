//! Seeded random generators for searches and test fixtures.
//!
//! Every randomized routine in the crate draws from a ChaCha8 stream created
//! here from an explicit seed, so results are reproducible across runs and
//! platforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{c, orthonormalize, CMatrix, CVector, C64};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derive an independent stream for a named sub-task.
pub fn substream(seed: u64, tag: u64) -> SeededRng {
    seeded(seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Standard complex Gaussian (real and imaginary parts N(0, 1/2)).
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn random_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CVector {
    CVector::from_fn(n, |_, _| complex_gaussian(rng))
}

pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let a = random_matrix(rng, n, n);
    (&a + a.adjoint()).scale(0.5)
}

/// Haar-ish unitary from orthonormalizing a Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    loop {
        let q = orthonormalize(&random_matrix(rng, n, n));
        if q.ncols() == n {
            return q;
        }
    }
}

/// Random invertible matrix with bounded condition number (about 10 at most),
/// used as an invertible local operator.
pub fn random_ilo<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let u = random_unitary(rng, n);
    let v = random_unitary(rng, n);
    let d = CVector::from_fn(n, |_, _| c(rng.random_range(0.3..3.0), 0.0));
    u * CMatrix::from_diagonal(&d) * v
}

/// Point of the 256 × 256 polar grid in the closed unit disc.
pub fn unit_disc_grid_point<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let radius = (rng.random_range(0..256u32) as f64 + 1.0) / 256.0;
    let angle = rng.random_range(0..256u32) as f64 * std::f64::consts::TAU / 256.0;
    C64::from_polar(radius, angle)
}

/// Number of distinct values `unit_disc_grid_point` can return.
pub const UNIT_DISC_GRID_SIZE: f64 = 65536.0;

pub fn unit_disc_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CVector {
    CVector::from_fn(n, |_, _| unit_disc_grid_point(rng))
}

/// Random PSD matrix of the given rank (sum of `rank` Gaussian projectors).
pub fn random_psd<R: Rng + ?Sized>(rng: &mut R, n: usize, rank: usize) -> CMatrix {
    let g = random_matrix(rng, n, rank);
    &g * g.adjoint()
}
