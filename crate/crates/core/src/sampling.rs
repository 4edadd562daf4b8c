//! Seeded random states and operators for the randomized checks.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::lattice::{ComplexField, LatticeGrid};

/// Complex Gaussian vector normalized to one: Haar-distributed on the unit sphere.
pub fn haar_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let s = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / s).collect()
}

/// Haar-random unit orbital in the δ-weighted L² norm.
pub fn random_orbital<R: Rng + ?Sized>(rng: &mut R, grid: LatticeGrid) -> Result<ComplexField> {
    ComplexField::from_site_coefficients(grid, &haar_vector(rng, grid.sites()))
}

/// GUE-like hermitian matrix.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<Complex64> {
    let a = DMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    (&a + a.adjoint()).scale(0.5)
}

/// Uniform samples in `[lo, hi)`.
pub fn uniform_table<R: Rng + ?Sized>(rng: &mut R, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}
