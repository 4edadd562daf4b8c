//! Periodic lattice discretization shared by the Hartree and many-body codepaths.
//!
//! A [`LatticeGrid`] is a `dim`-dimensional torus with `points` sites per axis and
//! uniform spacing. Fields carry their grid; all pairings use the cell-volume
//! weight `spacing^dim`, so that with the default `spacing = 1` the lattice L² and
//! the plain ℓ² pairings coincide.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeGrid {
    dim: usize,
    points: usize,
    spacing: f64,
}

impl LatticeGrid {
    pub fn new(dim: usize, points: usize, spacing: f64) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::invalid("grid.dim", format!("{dim} not in 1..=3")));
        }
        if points < 1 {
            return Err(Error::invalid("grid.points", format!("{points} < 1")));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::invalid("grid.delta", format!("{spacing} must be positive")));
        }
        Ok(Self {
            dim,
            points,
            spacing,
        })
    }

    /// One-dimensional grid with unit spacing, the validator default.
    pub fn line(points: usize) -> Result<Self> {
        Self::new(1, points, 1.0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn sites(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(self.dim as i32)
    }

    /// Per-axis integer coordinates of a site; axis 0 varies slowest.
    pub fn coords(&self, site: usize) -> [usize; MAX_DIM] {
        let mut c = [0; MAX_DIM];
        let mut rest = site;
        for axis in (0..self.dim).rev() {
            c[axis] = rest % self.points;
            rest /= self.points;
        }
        c
    }

    pub fn site_index(&self, coords: &[usize]) -> usize {
        coords[..self.dim]
            .iter()
            .fold(0, |acc, &c| acc * self.points + c % self.points)
    }

    /// Site index of `a - b` with periodic wrap on every axis.
    pub fn difference(&self, a: usize, b: usize) -> usize {
        let (ca, cb) = (self.coords(a), self.coords(b));
        let mut d = [0; MAX_DIM];
        for axis in 0..self.dim {
            d[axis] = (ca[axis] + self.points - cb[axis]) % self.points;
        }
        self.site_index(&d)
    }

    /// Site index of the reflection `-a`.
    pub fn reflect(&self, a: usize) -> usize {
        self.difference(0, a)
    }

    /// Signed minimum-image offset of an integer coordinate, in lattice units.
    fn min_image(&self, c: usize) -> f64 {
        let c = c as f64;
        let m = self.points as f64;
        if c > m / 2.0 {
            c - m
        } else {
            c
        }
    }

    /// Minimum-image distance of `site` from the origin.
    pub fn radius(&self, site: usize) -> f64 {
        let c = self.coords(site);
        let r2: f64 = (0..self.dim)
            .map(|axis| self.min_image(c[axis]).powi(2))
            .sum();
        r2.sqrt() * self.spacing
    }

    /// Minimum-image distance between `site` and a (possibly fractional) point
    /// given in lattice units.
    pub fn distance_to(&self, site: usize, center: &[f64]) -> f64 {
        let c = self.coords(site);
        let m = self.points as f64;
        let r2: f64 = (0..self.dim)
            .map(|axis| {
                let mut d = (c[axis] as f64 - center.get(axis).copied().unwrap_or(0.0)) % m;
                if d < 0.0 {
                    d += m;
                }
                if d > m / 2.0 {
                    d -= m;
                }
                d * d
            })
            .sum();
        r2.sqrt() * self.spacing
    }

    fn check_same(&self, other: &LatticeGrid) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch(format!("{self:?} vs {other:?}")));
        }
        Ok(())
    }
}

/// Scalars a [`Field`] can hold.
pub trait Scalar: Copy + Send + Sync + std::fmt::Debug + 'static {
    fn modulus(self) -> f64;
    fn to_complex(self) -> Complex64;
}

impl Scalar for f64 {
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
}

impl Scalar for Complex64 {
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn to_complex(self) -> Complex64 {
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Field<T> {
    grid: LatticeGrid,
    values: Vec<T>,
}

pub type RealField = Field<f64>;
pub type ComplexField = Field<Complex64>;

impl<T: Scalar> Field<T> {
    pub fn from_values(grid: LatticeGrid, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.sites() {
            return Err(Error::GridMismatch(format!(
                "{} values for {} sites",
                values.len(),
                grid.sites()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: LatticeGrid, f: impl FnMut(usize) -> T) -> Self {
        Self {
            grid,
            values: (0..grid.sites()).map(f).collect(),
        }
    }

    pub fn grid(&self) -> &LatticeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> Field<U> {
        Field {
            grid: self.grid,
            values: self.values.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn to_complex(&self) -> ComplexField {
        self.map(Scalar::to_complex)
    }

    /// Pointwise `|f_a|²`.
    pub fn density(&self) -> RealField {
        self.map(|x| x.modulus().powi(2))
    }

    pub fn norm(&self) -> f64 {
        lp_norm(self, 2.0).expect("p = 2 is valid")
    }

    pub fn max_modulus(&self) -> f64 {
        self.values.iter().fold(0.0, |m, x| m.max(x.modulus()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|x| x.modulus().is_finite())
    }
}

impl RealField {
    pub fn zeros(grid: LatticeGrid) -> Self {
        Self::from_fn(grid, |_| 0.0)
    }

    /// Largest violation of `f(a) = f(-a)`.
    pub fn evenness_defect(&self) -> f64 {
        (0..self.len())
            .map(|a| (self.values[a] - self.values[self.grid.reflect(a)]).abs())
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, s: f64) -> RealField {
        self.map(|x| x * s)
    }

    pub fn add(&self, other: &RealField) -> Result<RealField> {
        self.grid.check_same(&other.grid)?;
        Ok(Field {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn add_scaled(&self, s: f64, other: &RealField) -> Result<RealField> {
        self.grid.check_same(&other.grid)?;
        Ok(Field {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + s * b)
                .collect(),
        })
    }
}

impl ComplexField {
    pub fn zeros(grid: LatticeGrid) -> Self {
        Self::from_fn(grid, |_| Complex64::new(0.0, 0.0))
    }

    /// Unit-norm field concentrated on one site.
    pub fn site_indicator(grid: LatticeGrid, site: usize) -> Self {
        let h = 1.0 / grid.cell_volume().sqrt();
        Self::from_fn(grid, |a| Complex64::new(if a == site { h } else { 0.0 }, 0.0))
    }

    pub fn normalized(&self) -> Result<ComplexField> {
        let n = self.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::Unnormalized {
                what: "orbital".into(),
                norm: n,
            });
        }
        Ok(self.map(|x| x / n))
    }

    /// Coefficients in the orthonormal site basis, `sqrt(cell_volume) * f_a`.
    pub fn site_coefficients(&self) -> Vec<Complex64> {
        let w = self.grid.cell_volume().sqrt();
        self.values.iter().map(|x| x * w).collect()
    }

    /// Inverse of [`site_coefficients`](Self::site_coefficients).
    pub fn from_site_coefficients(grid: LatticeGrid, coeffs: &[Complex64]) -> Result<Self> {
        let w = 1.0 / grid.cell_volume().sqrt();
        Self::from_values(grid, coeffs.iter().map(|x| x * w).collect())
    }

    pub fn check_normalized(&self, what: &str, tol: f64) -> Result<()> {
        let n = self.norm();
        if (n - 1.0).abs() > tol {
            return Err(Error::Unnormalized {
                what: what.into(),
                norm: n,
            });
        }
        Ok(())
    }

    pub fn axpy(&self, s: Complex64, other: &ComplexField) -> ComplexField {
        debug_assert_eq!(self.grid, other.grid);
        Field {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + s * b)
                .collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> ComplexField {
        self.map(|x| x * s)
    }

    /// Pointwise product with a real potential.
    pub fn multiply(&self, pot: &RealField) -> Result<ComplexField> {
        self.grid.check_same(&pot.grid)?;
        Ok(Field {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&pot.values)
                .map(|(a, w)| a * w)
                .collect(),
        })
    }

    pub fn max_abs_diff(&self, other: &ComplexField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// `cell_volume * Σ conj(f_a) g_a`.
pub fn inner(f: &ComplexField, g: &ComplexField) -> Result<Complex64> {
    f.grid.check_same(&g.grid)?;
    let s: Complex64 = f
        .values
        .iter()
        .zip(&g.values)
        .map(|(a, b)| a.conj() * b)
        .sum();
    Ok(s * f.grid.cell_volume())
}

/// Weighted lattice `L^p` norm; `p = ∞` gives the maximum modulus.
pub fn lp_norm<T: Scalar>(f: &Field<T>, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::invalid("p", format!("{p} < 1")));
    }
    if p.is_infinite() {
        return Ok(f.max_modulus());
    }
    let w = f.grid.cell_volume();
    if p == 2.0 {
        let s: f64 = f.values.iter().map(|x| x.modulus().powi(2)).sum();
        return Ok((w * s).sqrt());
    }
    // Scale by the maximum first so large p does not overflow.
    let mx = f.max_modulus();
    if mx == 0.0 {
        return Ok(0.0);
    }
    let s: f64 = f.values.iter().map(|x| (x.modulus() / mx).powf(p)).sum();
    Ok(mx * (w * s).powf(1.0 / p))
}

/// Forward/inverse FFT over every axis of a grid.
#[derive(Clone)]
pub struct Spectral {
    grid: LatticeGrid,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral").field("grid", &self.grid).finish()
    }
}

impl Spectral {
    pub fn new(grid: LatticeGrid) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            grid,
            forward: planner.plan_fft_forward(grid.points()),
            inverse: planner.plan_fft_inverse(grid.points()),
        }
    }

    pub fn grid(&self) -> &LatticeGrid {
        &self.grid
    }

    fn transform(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let m = self.grid.points();
        let dim = self.grid.dim();
        let mut line = vec![Complex64::new(0.0, 0.0); m];
        for axis in 0..dim {
            let stride = m.pow((dim - 1 - axis) as u32);
            let block = stride * m;
            for base in (0..data.len()).step_by(block) {
                for off in 0..stride {
                    for (k, slot) in line.iter_mut().enumerate() {
                        *slot = data[base + off + k * stride];
                    }
                    fft.process(&mut line);
                    for (k, slot) in line.iter().enumerate() {
                        data[base + off + k * stride] = *slot;
                    }
                }
            }
        }
    }

    /// Unnormalized forward transform in place.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, &self.forward);
    }

    /// Inverse transform in place, including the `1/sites` normalization.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, &self.inverse);
        let s = 1.0 / self.grid.sites() as f64;
        data.iter_mut().for_each(|x| *x *= s);
    }

    /// Eigenvalues of the discrete `-Δ` in FFT index order.
    pub fn laplacian_symbol(&self) -> Vec<f64> {
        let g = self.grid;
        let m = g.points() as f64;
        let h2 = g.spacing() * g.spacing();
        (0..g.sites())
            .map(|s| {
                let c = g.coords(s);
                (0..g.dim())
                    .map(|axis| 2.0 * (1.0 - (2.0 * PI * c[axis] as f64 / m).cos()) / h2)
                    .sum()
            })
            .collect()
    }
}

/// Periodic convolution with a fixed real kernel, evaluated by FFT.
#[derive(Clone, Debug)]
pub struct Convolver {
    spectral: Spectral,
    kernel_hat: Vec<Complex64>,
    is_zero: bool,
}

impl Convolver {
    pub fn new(kernel: &RealField) -> Self {
        let spectral = Spectral::new(*kernel.grid());
        let w = kernel.grid().cell_volume();
        let mut kernel_hat: Vec<Complex64> =
            kernel.values().iter().map(|&x| Complex64::new(x * w, 0.0)).collect();
        spectral.forward(&mut kernel_hat);
        Self {
            spectral,
            kernel_hat,
            is_zero: kernel.values().iter().all(|&x| x == 0.0),
        }
    }

    pub fn grid(&self) -> &LatticeGrid {
        self.spectral.grid()
    }

    pub fn is_zero(&self) -> bool {
        self.is_zero
    }

    pub fn apply(&self, density: &RealField) -> Result<RealField> {
        self.grid().check_same(density.grid())?;
        if self.is_zero {
            return Ok(RealField::zeros(*self.grid()));
        }
        let mut buf: Vec<Complex64> = density
            .values()
            .iter()
            .map(|&x| Complex64::new(x, 0.0))
            .collect();
        self.spectral.forward(&mut buf);
        buf.iter_mut()
            .zip(&self.kernel_hat)
            .for_each(|(x, k)| *x *= k);
        self.spectral.inverse(&mut buf);
        Field::from_values(*self.grid(), buf.into_iter().map(|x| x.re).collect())
    }
}

/// `(kernel ⋆ density)(a) = cell_volume * Σ_b kernel(a - b) density(b)`.
pub fn convolve(kernel: &RealField, density: &RealField) -> Result<RealField> {
    kernel.grid.check_same(&density.grid)?;
    Convolver::new(kernel).apply(density)
}

/// Discrete `-Δ f` with periodic wrap on every axis.
pub fn kinetic_apply(f: &ComplexField) -> ComplexField {
    let g = f.grid;
    let m = g.points();
    let h2 = g.spacing() * g.spacing();
    Field::from_fn(g, |a| {
        let c = g.coords(a);
        let mut acc = Complex64::new(0.0, 0.0);
        for axis in 0..g.dim() {
            let mut up = c;
            let mut down = c;
            up[axis] = (c[axis] + 1) % m;
            down[axis] = (c[axis] + m - 1) % m;
            acc += 2.0 * f.values[a] - f.values[g.site_index(&up)] - f.values[g.site_index(&down)];
        }
        acc / h2
    })
}

/// Dense one-body matrix of `-Δ + trap` in the orthonormal site basis.
pub fn one_body_matrix(trap: &RealField) -> Vec<Vec<f64>> {
    let g = *trap.grid();
    let n = g.sites();
    let mut h = vec![vec![0.0; n]; n];
    for b in 0..n {
        let col = kinetic_apply(&ComplexField::site_indicator(g, b));
        let w = g.cell_volume().sqrt();
        for a in 0..n {
            h[a][b] = col.values()[a].re * w;
        }
        h[b][b] += trap.values()[b];
    }
    h
}

/// Radial interaction profiles sampled at minimum-image distance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelProfile {
    Zero,
    Constant { value: f64 },
    Gaussian { amplitude: f64, sigma: f64 },
    Exponential { amplitude: f64, length: f64 },
    SoftCoulomb { amplitude: f64, epsilon: f64 },
    /// Value `height` at the origin and zero elsewhere.
    Spike { height: f64 },
    /// Piecewise-linear interpolation in the radius; constant beyond the ends.
    Tabulated { radii: Vec<f64>, values: Vec<f64> },
}

impl KernelProfile {
    pub fn validate(&self, path: &str) -> Result<()> {
        let bad = |field: &str, why: &str| Err(Error::config(format!("{path}.{field}"), why));
        match self {
            KernelProfile::Gaussian { sigma, .. } if !(*sigma > 0.0) => bad("sigma", "must be positive"),
            KernelProfile::Exponential { length, .. } if !(*length > 0.0) => {
                bad("length", "must be positive")
            }
            KernelProfile::SoftCoulomb { epsilon, .. } if !(*epsilon > 0.0) => {
                bad("epsilon", "must be positive")
            }
            KernelProfile::Tabulated { radii, values } => {
                if radii.is_empty() || radii.len() != values.len() {
                    return bad("values", "radii and values must be non-empty and equally long");
                }
                if radii.windows(2).any(|w| w[1] <= w[0]) {
                    return bad("radii", "must be strictly increasing");
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn at_radius(&self, r: f64) -> f64 {
        match self {
            KernelProfile::Zero => 0.0,
            KernelProfile::Constant { value } => *value,
            KernelProfile::Gaussian { amplitude, sigma } => {
                amplitude * (-r * r / (2.0 * sigma * sigma)).exp()
            }
            KernelProfile::Exponential { amplitude, length } => amplitude * (-r / length).exp(),
            KernelProfile::SoftCoulomb { amplitude, epsilon } => {
                amplitude / (r * r + epsilon * epsilon).sqrt()
            }
            KernelProfile::Spike { height } => {
                if r == 0.0 {
                    *height
                } else {
                    0.0
                }
            }
            KernelProfile::Tabulated { radii, values } => {
                if r <= radii[0] {
                    return values[0];
                }
                for i in 1..radii.len() {
                    if r <= radii[i] {
                        let s = (r - radii[i - 1]) / (radii[i] - radii[i - 1]);
                        return values[i - 1] + s * (values[i] - values[i - 1]);
                    }
                }
                values[values.len() - 1]
            }
        }
    }

    pub fn sample(&self, grid: LatticeGrid) -> RealField {
        Field::from_fn(grid, |a| self.at_radius(grid.radius(a)))
    }
}

/// External trap profiles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TrapProfile {
    Zero,
    Constant { value: f64 },
    /// `strength * |x - center|²` with minimum-image distance; center in lattice units.
    Harmonic {
        strength: f64,
        #[serde(default)]
        center: Vec<f64>,
    },
    Tabulated { values: Vec<f64> },
}

impl TrapProfile {
    pub fn sample(&self, grid: LatticeGrid) -> Result<RealField> {
        Ok(match self {
            TrapProfile::Zero => RealField::zeros(grid),
            TrapProfile::Constant { value } => Field::from_fn(grid, |_| *value),
            TrapProfile::Harmonic { strength, center } => {
                Field::from_fn(grid, |a| strength * grid.distance_to(a, center).powi(2))
            }
            TrapProfile::Tabulated { values } => Field::from_values(grid, values.clone())?,
        })
    }
}

/// Initial orbital shapes; every shape is normalized on sampling.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OrbitalShape {
    Uniform,
    PlaneWave { k: Vec<i64> },
    Gaussian {
        center: Vec<f64>,
        width: f64,
        #[serde(default)]
        momentum: Vec<f64>,
    },
    Site { index: usize },
    Tabulated { re: Vec<f64>, im: Vec<f64> },
}

impl OrbitalShape {
    pub fn sample(&self, grid: LatticeGrid) -> Result<ComplexField> {
        let m = grid.points() as f64;
        let raw = match self {
            OrbitalShape::Uniform => Field::from_fn(grid, |_| Complex64::new(1.0, 0.0)),
            OrbitalShape::PlaneWave { k } => Field::from_fn(grid, |a| {
                let c = grid.coords(a);
                let phase: f64 = (0..grid.dim())
                    .map(|axis| 2.0 * PI * k.get(axis).copied().unwrap_or(0) as f64 * c[axis] as f64 / m)
                    .sum();
                Complex64::from_polar(1.0, phase)
            }),
            OrbitalShape::Gaussian {
                center,
                width,
                momentum,
            } => {
                if !(*width > 0.0) {
                    return Err(Error::invalid("orbital.width", "must be positive"));
                }
                Field::from_fn(grid, |a| {
                    let r = grid.distance_to(a, center) / grid.spacing();
                    let c = grid.coords(a);
                    let phase: f64 = (0..grid.dim())
                        .map(|axis| momentum.get(axis).copied().unwrap_or(0.0) * c[axis] as f64)
                        .sum();
                    Complex64::from_polar((-r * r / (2.0 * width * width)).exp(), phase)
                })
            }
            OrbitalShape::Site { index } => {
                if *index >= grid.sites() {
                    return Err(Error::invalid("orbital.index", "outside the grid"));
                }
                ComplexField::site_indicator(grid, *index)
            }
            OrbitalShape::Tabulated { re, im } => {
                if re.len() != im.len() {
                    return Err(Error::invalid("orbital.im", "length differs from re"));
                }
                Field::from_values(
                    grid,
                    re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect(),
                )?
            }
        };
        raw.normalized()
    }
}
