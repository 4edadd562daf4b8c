//! Exact two-species many-body dynamics in occupation-number bases.
//!
//! The Hamiltonian is
//!
//! ```text
//! H = Σ (h1)_ab a†_a a_b + Σ (h2)_ab b†_a b_b
//!   + 1/(2N1) Σ V1(a-b) (n^A_a n^A_b - δ_ab n^A_a)
//!   + 1/(2N2) Σ V2(a-b) (n^B_a n^B_b - δ_ab n^B_a)
//!   + 1/(N1+N2) Σ V12(a-b) n^A_a n^B_b
//! ```
//!
//! in the orthonormal site basis. Two-species amplitudes are stored row-major,
//! index `ia * dim_b + ib`.

use std::collections::HashMap;
use std::io::Write;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hartree::{MixtureParams, NonlinearityMode};
use crate::lattice::{one_body_matrix, ComplexField, LatticeGrid};

/// Default bound on basis and Hilbert-space dimensions.
pub const DEFAULT_CAP: usize = 500_000;

/// Largest dimension propagated with a dense exponential.
pub const DENSE_LIMIT: usize = 512;

const KRYLOV_MAX_DIM: usize = 30;
const KRYLOV_TOL: f64 = 1e-12;
const KRYLOV_MAX_HALVINGS: u32 = 20;

/// `binomial(n + m - 1, m - 1)`, saturating.
pub fn sector_dimension(sites: usize, particles: usize) -> u128 {
    if sites == 0 {
        return if particles == 0 { 1 } else { 0 };
    }
    let (n, k) = ((particles + sites - 1) as u128, (sites - 1).min(particles) as u128);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul(n - i) {
            Some(x) => x / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Symmetric `N`-boson sector on `M` sites, ordered lexicographically descending.
#[derive(Clone, Debug)]
pub struct SectorBasis {
    sites: usize,
    particles: usize,
    states: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
}

impl SectorBasis {
    pub fn new(sites: usize, particles: usize, cap: usize) -> Result<Self> {
        if sites == 0 {
            return Err(Error::invalid("M", "need at least one site"));
        }
        let required = sector_dimension(sites, particles);
        if required > cap as u128 {
            return Err(Error::CapExceeded {
                required,
                cap: cap as u128,
            });
        }
        let mut states = Vec::with_capacity(required as usize);
        let mut cur = vec![0u32; sites];
        enumerate(&mut cur, 0, particles as u32, &mut states);
        let index = states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        Ok(Self {
            sites,
            particles,
            states,
            index,
        })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }
    pub fn particles(&self) -> usize {
        self.particles
    }
    pub fn len(&self) -> usize {
        self.states.len()
    }
    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
    pub fn states(&self) -> &[Vec<u32>] {
        &self.states
    }
    pub fn state(&self, i: usize) -> &[u32] {
        &self.states[i]
    }
    pub fn index_of(&self, occupation: &[u32]) -> Option<usize> {
        self.index.get(occupation).copied()
    }
}

fn enumerate(cur: &mut Vec<u32>, site: usize, left: u32, out: &mut Vec<Vec<u32>>) {
    if site + 1 == cur.len() {
        cur[site] = left;
        out.push(cur.clone());
        return;
    }
    for n in (0..=left).rev() {
        cur[site] = n;
        enumerate(cur, site + 1, left - n, out);
    }
    cur[site] = 0;
}

#[derive(Clone, Debug)]
pub struct TwoSpeciesState {
    pub basis_a: Arc<SectorBasis>,
    pub basis_b: Arc<SectorBasis>,
    pub amplitudes: Vec<Complex64>,
    pub time: f64,
}

impl TwoSpeciesState {
    pub fn new(basis_a: Arc<SectorBasis>, basis_b: Arc<SectorBasis>, amplitudes: Vec<Complex64>) -> Result<Self> {
        if basis_a.sites() != basis_b.sites() {
            return Err(Error::GridMismatch("species bases have different site counts".into()));
        }
        if amplitudes.len() != basis_a.len() * basis_b.len() {
            return Err(Error::invalid(
                "amplitudes",
                format!("length {} != {}", amplitudes.len(), basis_a.len() * basis_b.len()),
            ));
        }
        Ok(Self {
            basis_a,
            basis_b,
            amplitudes,
            time: 0.0,
        })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }
    pub fn sites(&self) -> usize {
        self.basis_a.sites()
    }
    pub fn n1(&self) -> usize {
        self.basis_a.particles()
    }
    pub fn n2(&self) -> usize {
        self.basis_b.particles()
    }
    pub fn norm(&self) -> f64 {
        vec_norm(&self.amplitudes)
    }
    pub fn is_finite(&self) -> bool {
        self.amplitudes.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

fn vec_norm(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn vdot(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

/// Real symmetric matrix in compressed sparse row layout.
#[derive(Clone, Debug)]
pub struct SparseHamiltonian {
    dim: usize,
    indptr: Vec<usize>,
    indices: Vec<u32>,
    values: Vec<f64>,
    hermitian: bool,
}

impl SparseHamiltonian {
    /// Build from per-row `(column, value)` lists; columns are sorted here.
    pub fn from_rows(mut rows: Vec<Vec<(u32, f64)>>) -> Result<Self> {
        let dim = rows.len();
        if dim > u32::MAX as usize {
            return Err(Error::CapExceeded {
                required: dim as u128,
                cap: u32::MAX as u128,
            });
        }
        let mut indptr = Vec::with_capacity(dim + 1);
        indptr.push(0);
        let nnz: usize = rows.iter().map(Vec::len).sum();
        let mut indices = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        for row in &mut rows {
            row.sort_by_key(|e| e.0);
            for &(c, v) in row.iter() {
                if c as usize >= dim {
                    return Err(Error::invalid("column", format!("{c} out of range {dim}")));
                }
                indices.push(c);
                values.push(v);
            }
            indptr.push(indices.len());
        }
        let mut h = Self {
            dim,
            indptr,
            indices,
            values,
            hermitian: false,
        };
        h.hermitian = h.max_asymmetry() == 0.0;
        Ok(h)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn nnz(&self) -> usize {
        self.values.len()
    }
    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let cols = &self.indices[self.indptr[r]..self.indptr[r + 1]];
        match cols.binary_search(&(c as u32)) {
            Ok(k) => self.values[self.indptr[r] + k],
            Err(_) => 0.0,
        }
    }

    /// `max |H_rc - H_cr|` over stored entries.
    pub fn max_asymmetry(&self) -> f64 {
        (0..self.dim)
            .into_par_iter()
            .map(|r| {
                (self.indptr[r]..self.indptr[r + 1])
                    .map(|k| (self.values[k] - self.get(self.indices[k] as usize, r)).abs())
                    .fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max)
    }

    pub fn apply_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        y.par_iter_mut().enumerate().for_each(|(r, out)| {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.indptr[r]..self.indptr[r + 1] {
                acc += x[self.indices[k] as usize] * self.values[k];
            }
            *out = acc;
        });
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::new(0.0, 0.0); self.dim];
        self.apply_into(x, &mut y);
        y
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for k in self.indptr[r]..self.indptr[r + 1] {
                m[(r, self.indices[k] as usize)] = self.values[k];
            }
        }
        m
    }
}

/// Two-body kernels as functions of the site difference, in the many-body normalization.
pub fn pair_tables(params: &MixtureParams) -> [Vec<f64>; 3] {
    match params.mode() {
        NonlinearityMode::Hartree => [
            params.v1().values().to_vec(),
            params.v2().values().to_vec(),
            params.v12().values().to_vec(),
        ],
        NonlinearityMode::LocalGp => {
            let g = params.grid();
            let gp = params.gp();
            let contact = |gamma: f64| {
                let mut t = vec![0.0; g.sites()];
                t[0] = gamma / g.cell_volume();
                t
            };
            [contact(gp.gamma1), contact(gp.gamma2), contact(gp.gamma12)]
        }
    }
}

struct SpeciesBlock {
    diag: Vec<f64>,
    hops: Vec<Vec<(u32, f64)>>,
}

fn species_block(basis: &SectorBasis, h: &[Vec<f64>], pair: &[f64], grid: &LatticeGrid) -> SpeciesBlock {
    let m = basis.sites();
    let n = basis.particles();
    let pref = if n > 0 { 0.5 / n as f64 } else { 0.0 };
    let rows: Vec<(f64, Vec<(u32, f64)>)> = (0..basis.len())
        .into_par_iter()
        .map(|i| {
            let occ = basis.state(i);
            let mut diag = 0.0;
            for a in 0..m {
                diag += h[a][a] * occ[a] as f64;
                for b in 0..m {
                    let self_term = if a == b { occ[a] as f64 } else { 0.0 };
                    diag += pref * pair[grid.difference(a, b)] * (occ[a] as f64 * occ[b] as f64 - self_term);
                }
            }
            // a†_a a_b maps column `i` onto row `j`; by symmetry of h we emit row i.
            let mut hops = Vec::new();
            let mut target = occ.to_vec();
            for b in 0..m {
                if occ[b] == 0 {
                    continue;
                }
                for a in 0..m {
                    if a == b || h[a][b] == 0.0 {
                        continue;
                    }
                    target[b] -= 1;
                    target[a] += 1;
                    let j = basis.index_of(&target).expect("hop stays in sector");
                    let amp = (occ[b] as f64 * (occ[a] + 1) as f64).sqrt();
                    hops.push((j as u32, h[a][b] * amp));
                    target[a] -= 1;
                    target[b] += 1;
                }
            }
            (diag, hops)
        })
        .collect();
    let (diag, hops) = rows.into_iter().unzip();
    SpeciesBlock { diag, hops }
}

/// Assemble the mixture Hamiltonian on the `(N1, N2)` sector.
pub fn assemble_hamiltonian(params: &MixtureParams, n1: usize, n2: usize, cap: usize) -> Result<(SparseHamiltonian, Arc<SectorBasis>, Arc<SectorBasis>)> {
    let grid = *params.grid();
    let m = grid.sites();
    let required = sector_dimension(m, n1).saturating_mul(sector_dimension(m, n2));
    if required > cap as u128 {
        return Err(Error::CapExceeded {
            required,
            cap: cap as u128,
        });
    }
    let basis_a = Arc::new(SectorBasis::new(m, n1, cap)?);
    let basis_b = Arc::new(SectorBasis::new(m, n2, cap)?);
    let [p1, p2, p12] = pair_tables(params);
    let block_a = species_block(&basis_a, &one_body_matrix(params.u1()), &p1, &grid);
    let block_b = species_block(&basis_b, &one_body_matrix(params.u2()), &p2, &grid);

    // w[ia][b] = Σ_a V12(a - b) n^A_a
    let inter = if n1 + n2 > 0 { 1.0 / (n1 + n2) as f64 } else { 0.0 };
    let w: Vec<Vec<f64>> = basis_a
        .states()
        .iter()
        .map(|occ| {
            (0..m)
                .map(|b| (0..m).map(|a| p12[grid.difference(a, b)] * occ[a] as f64).sum::<f64>() * inter)
                .collect()
        })
        .collect();

    let db = basis_b.len();
    let rows: Vec<Vec<(u32, f64)>> = (0..basis_a.len() * db)
        .into_par_iter()
        .map(|r| {
            let (ia, ib) = (r / db, r % db);
            let occ_b = basis_b.state(ib);
            let cross: f64 = (0..m).map(|b| w[ia][b] * occ_b[b] as f64).sum();
            let mut row = Vec::with_capacity(1 + block_a.hops[ia].len() + block_b.hops[ib].len());
            row.push((r as u32, block_a.diag[ia] + block_b.diag[ib] + cross));
            row.extend(block_a.hops[ia].iter().map(|&(ja, v)| ((ja as usize * db + ib) as u32, v)));
            row.extend(block_b.hops[ib].iter().map(|&(jb, v)| ((ia * db + jb as usize) as u32, v)));
            row
        })
        .collect();
    Ok((SparseHamiltonian::from_rows(rows)?, basis_a, basis_b))
}

/// `sqrt(N!/Π n_a!) Π c_a^{n_a}` over a sector, for site coefficients `c`.
pub fn species_condensate(basis: &SectorBasis, coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = basis.particles();
    let ln_fact: Vec<f64> = std::iter::once(0.0)
        .chain((1..=n).scan(0.0, |acc, k| {
            *acc += (k as f64).ln();
            Some(*acc)
        }))
        .collect();
    basis
        .states()
        .iter()
        .map(|occ| {
            let log_multinomial = ln_fact[n] - occ.iter().map(|&k| ln_fact[k as usize]).sum::<f64>();
            let mono: Complex64 = occ
                .iter()
                .zip(coeffs)
                .map(|(&k, c)| c.powu(k))
                .product();
            mono * (0.5 * log_multinomial).exp()
        })
        .collect()
}

/// Product state `u^{⊗N1} ⊗ v^{⊗N2}`.
pub fn condensate_state(u: &ComplexField, v: &ComplexField, n1: usize, n2: usize, cap: usize) -> Result<TwoSpeciesState> {
    if u.grid() != v.grid() {
        return Err(Error::GridMismatch("u and v".into()));
    }
    u.check_normalized("u", crate::hartree::NORM_TOLERANCE)?;
    v.check_normalized("v", crate::hartree::NORM_TOLERANCE)?;
    let m = u.grid().sites();
    let required = sector_dimension(m, n1).saturating_mul(sector_dimension(m, n2));
    if required > cap as u128 {
        return Err(Error::CapExceeded {
            required,
            cap: cap as u128,
        });
    }
    let ba = Arc::new(SectorBasis::new(m, n1, cap)?);
    let bb = Arc::new(SectorBasis::new(m, n2, cap)?);
    let ca = species_condensate(&ba, &u.normalized()?.site_coefficients());
    let cb = species_condensate(&bb, &v.normalized()?.site_coefficients());
    let amps = ca.iter().flat_map(|x| cb.iter().map(move |y| x * y)).collect();
    TwoSpeciesState::new(ba, bb, amps)
}

/// Real part of `⟨Ψ, H Ψ⟩`.
pub fn expectation(state: &TwoSpeciesState, h: &SparseHamiltonian) -> Result<f64> {
    if state.dim() != h.dim() {
        return Err(Error::invalid("state", format!("dimension {} != {}", state.dim(), h.dim())));
    }
    let e = vdot(&state.amplitudes, &h.apply(&state.amplitudes));
    if e.im.abs() > 1e-12 * e.re.abs().max(1.0) {
        return Err(Error::Symmetry { residual: e.im.abs() });
    }
    Ok(e.re)
}

enum Engine {
    Dense { q: DMatrix<f64>, lambda: DVector<f64> },
    Krylov,
}

/// Applies `exp(-i H dt)`, densely for small dimensions and by Lanczos otherwise.
pub struct Propagator<'a> {
    h: &'a SparseHamiltonian,
    engine: Engine,
}

impl<'a> Propagator<'a> {
    pub fn new(h: &'a SparseHamiltonian) -> Self {
        if h.dim() <= DENSE_LIMIT {
            Self::dense(h)
        } else {
            Self::krylov(h)
        }
    }

    pub fn dense(h: &'a SparseHamiltonian) -> Self {
        let eig = SymmetricEigen::new(h.to_dense());
        Self {
            h,
            engine: Engine::Dense {
                q: eig.eigenvectors,
                lambda: eig.eigenvalues,
            },
        }
    }

    pub fn krylov(h: &'a SparseHamiltonian) -> Self {
        Self { h, engine: Engine::Krylov }
    }

    /// One step of length `dt`; negative `dt` propagates backward.
    pub fn step(&self, psi: &[Complex64], dt: f64) -> Result<Vec<Complex64>> {
        match &self.engine {
            Engine::Dense { q, lambda } => Ok(dense_exp(q, lambda, psi, dt)),
            Engine::Krylov => krylov_step(self.h, psi, dt),
        }
    }
}

fn dense_exp(q: &DMatrix<f64>, lambda: &DVector<f64>, psi: &[Complex64], dt: f64) -> Vec<Complex64> {
    let re = DVector::from_iterator(psi.len(), psi.iter().map(|z| z.re));
    let im = DVector::from_iterator(psi.len(), psi.iter().map(|z| z.im));
    let (cr, ci) = (q.tr_mul(&re), q.tr_mul(&im));
    let mut pr = DVector::zeros(psi.len());
    let mut pi = DVector::zeros(psi.len());
    for k in 0..psi.len() {
        let z = Complex64::new(cr[k], ci[k]) * Complex64::from_polar(1.0, -lambda[k] * dt);
        pr[k] = z.re;
        pi[k] = z.im;
    }
    let (or, oi) = (q * pr, q * pi);
    (0..psi.len()).map(|k| Complex64::new(or[k], oi[k])).collect()
}

fn krylov_step(h: &SparseHamiltonian, psi: &[Complex64], dt: f64) -> Result<Vec<Complex64>> {
    let mut out = psi.to_vec();
    let mut remaining = dt;
    let mut sub = dt;
    let mut halvings = 0;
    while remaining != 0.0 {
        if sub.abs() > remaining.abs() {
            sub = remaining;
        }
        match krylov_exp(h, &out, sub)? {
            Some(next) => {
                out = next;
                remaining -= sub;
                if remaining.abs() < 1e-15 * dt.abs() {
                    remaining = 0.0;
                }
            }
            None => {
                halvings += 1;
                if halvings > KRYLOV_MAX_HALVINGS {
                    return Err(Error::Krylov(format!("no convergence for dt = {dt:e}")));
                }
                sub /= 2.0;
            }
        }
    }
    Ok(out)
}

/// Lanczos approximation of `exp(-i H tau) psi`; `None` if the error estimate stays above tolerance.
fn krylov_exp(h: &SparseHamiltonian, psi: &[Complex64], tau: f64) -> Result<Option<Vec<Complex64>>> {
    let beta0 = vec_norm(psi);
    if beta0 == 0.0 {
        return Ok(Some(psi.to_vec()));
    }
    let n = psi.len();
    let mut basis: Vec<Vec<Complex64>> = vec![psi.iter().map(|z| z / beta0).collect()];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![Complex64::new(0.0, 0.0); n];
    let max_dim = KRYLOV_MAX_DIM.min(n);
    for j in 0..max_dim {
        h.apply_into(&basis[j], &mut w);
        let a = vdot(&basis[j], &w).re;
        alpha.push(a);
        // Two passes of classical Gram-Schmidt against the whole basis.
        for _ in 0..2 {
            for v in &basis {
                let c = vdot(v, &w);
                w.iter_mut().zip(v).for_each(|(x, y)| *x -= c * y);
            }
        }
        let b = vec_norm(&w);
        let m = j + 1;
        let (coef, last) = small_exp(&alpha, &beta, tau);
        let breakdown = b <= 1e-14 * a.abs().max(1.0);
        let err = b * last * beta0;
        if breakdown || err < KRYLOV_TOL {
            let mut out = vec![Complex64::new(0.0, 0.0); n];
            for (k, v) in basis.iter().enumerate().take(m) {
                let c = coef[k] * beta0;
                out.iter_mut().zip(v).for_each(|(x, y)| *x += c * y);
            }
            if out.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::Krylov("non-finite Lanczos result".into()));
            }
            return Ok(Some(out));
        }
        beta.push(b);
        basis.push(w.iter().map(|z| z / b).collect());
    }
    Ok(None)
}

/// `exp(-i T tau) e_1` for the tridiagonal `T`, plus the modulus of its last entry.
fn small_exp(alpha: &[f64], beta: &[f64], tau: f64) -> (Vec<Complex64>, f64) {
    let m = alpha.len();
    let mut t = DMatrix::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i + 1 < m {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let coef: Vec<Complex64> = (0..m)
        .map(|i| {
            (0..m)
                .map(|k| {
                    eig.eigenvectors[(i, k)]
                        * eig.eigenvectors[(0, k)]
                        * Complex64::from_polar(1.0, -eig.eigenvalues[k] * tau)
                })
                .sum()
        })
        .collect();
    let last = coef[m - 1].norm();
    (coef, last)
}

/// Propagate by `duration` (may be negative) in steps of `dt > 0`.
///
/// `sample` sees the initial state, every `stride`-th step and the final state.
pub fn propagate_sampled(
    state: &TwoSpeciesState,
    h: &SparseHamiltonian,
    duration: f64,
    dt: f64,
    stride: usize,
    mut sample: impl FnMut(&TwoSpeciesState) -> Result<()>,
) -> Result<TwoSpeciesState> {
    if state.dim() != h.dim() {
        return Err(Error::invalid("state", format!("dimension {} != {}", state.dim(), h.dim())));
    }
    if !(dt > 0.0) || !duration.is_finite() {
        return Err(Error::invalid("dt", "must be positive with a finite duration"));
    }
    if stride == 0 {
        return Err(Error::invalid("stride", "must be at least 1"));
    }
    let steps = (duration.abs() / dt).round() as usize;
    let signed = dt * duration.signum();
    let prop = Propagator::new(h);
    let t0 = state.time;
    let mut cur = state.clone();
    sample(&cur)?;
    for n in 1..=steps {
        cur.amplitudes = prop.step(&cur.amplitudes, signed)?;
        cur.time = t0 + n as f64 * signed;
        if !cur.is_finite() {
            return Err(Error::NonFinite {
                t: cur.time,
                context: format!("many-body step {n}"),
            });
        }
        if n % stride == 0 || n == steps {
            sample(&cur)?;
        }
    }
    Ok(cur)
}

pub fn propagate(state: &TwoSpeciesState, h: &SparseHamiltonian, duration: f64, dt: f64) -> Result<TwoSpeciesState> {
    propagate_sampled(state, h, duration, dt, usize::MAX, |_| Ok(()))
}

/// Text dump: metadata header, then `occ_a occ_b re im` per basis pair.
pub fn write_state_dump<W: Write>(mut w: W, header: &[String], state: &TwoSpeciesState) -> Result<()> {
    for line in header {
        writeln!(w, "# {line}")?;
    }
    writeln!(
        w,
        "# sites={} n1={} n2={} dim_a={} dim_b={} t={:.6}",
        state.sites(),
        state.n1(),
        state.n2(),
        state.basis_a.len(),
        state.basis_b.len(),
        state.time
    )?;
    let join = |occ: &[u32]| occ.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
    let db = state.basis_b.len();
    for (r, z) in state.amplitudes.iter().enumerate() {
        writeln!(
            w,
            "{} {} {:.17e} {:.17e}",
            join(state.basis_a.state(r / db)),
            join(state.basis_b.state(r % db)),
            z.re,
            z.im
        )?;
    }
    Ok(())
}
