//! Reduced density matrices of two-species states and the condensation indicators.
//!
//! `γ^{(k1,k2)}` acts on `(C^M)^{⊗k1} ⊗ (C^M)^{⊗k2}`, A-slots first, first slot most
//! significant. Entries are normalized correlators, e.g.
//! `γ^{(1,1)}_{(a,c),(b,d)} = ⟨a†_b b†_d b_c a_a⟩ / (N1 N2)`, evaluated as a Gram matrix of
//! annihilated vectors, which makes hermiticity and positivity structural.

use std::io::Write;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{SectorBasis, TwoSpeciesState};
use crate::lattice::ComplexField;

/// Orders reported in indicator series.
pub const REPORTED_ORDERS: [(usize, usize); 6] = [(1, 0), (0, 1), (1, 1), (2, 1), (1, 2), (2, 2)];

/// Default tolerance: an inequality `lhs ≤ rhs` passes when `lhs - rhs ≤ tolerance`.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct Rdm {
    k1: usize,
    k2: usize,
    sites: usize,
    matrix: DMatrix<Complex64>,
    trace: f64,
}

impl Rdm {
    pub fn from_matrix(k1: usize, k2: usize, sites: usize, matrix: DMatrix<Complex64>) -> Result<Self> {
        let d = sites.pow((k1 + k2) as u32);
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::invalid("matrix", format!("expected {d}x{d}")));
        }
        let trace = matrix.trace().re;
        Ok(Self {
            k1,
            k2,
            sites,
            matrix,
            trace,
        })
    }

    pub fn order(&self) -> (usize, usize) {
        (self.k1, self.k2)
    }
    pub fn sites(&self) -> usize {
        self.sites
    }
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }
    pub fn trace(&self) -> f64 {
        self.trace
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    /// Trace out the last A-slot.
    pub fn trace_out_a(&self) -> Result<Rdm> {
        if self.k1 == 0 {
            return Err(Error::invalid("k1", "no A-slot to trace out"));
        }
        self.trace_slot(self.k1 - 1, self.k1 - 1, self.k2)
    }

    /// Trace out the last B-slot.
    pub fn trace_out_b(&self) -> Result<Rdm> {
        if self.k2 == 0 {
            return Err(Error::invalid("k2", "no B-slot to trace out"));
        }
        self.trace_slot(self.k1 + self.k2 - 1, self.k1, self.k2 - 1)
    }

    fn trace_slot(&self, slot: usize, k1: usize, k2: usize) -> Result<Rdm> {
        let m = self.sites;
        let k = self.k1 + self.k2;
        let inner = m.pow((k - 1 - slot) as u32);
        let d = m.pow((k - 1) as u32);
        // Reduced index r = (hi, lo) with lo < inner; full index hi*m*inner + s*inner + lo.
        let expand = |r: usize, s: usize| (r / inner) * m * inner + s * inner + r % inner;
        let out = DMatrix::from_fn(d, d, |r, c| (0..m).map(|s| self.matrix[(expand(r, s), expand(c, s))]).sum());
        Rdm::from_matrix(k1, k2, m, out)
    }
}

fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let h = (m + m.adjoint()).scale(0.5);
    SymmetricEigen::new(h).eigenvalues.iter().copied().collect()
}

/// Sparse annihilation maps `a_s : sector N → sector N-1`, one per site.
struct Annihilator {
    target: Vec<Vec<(usize, usize, f64)>>,
    out_dim: usize,
}

impl Annihilator {
    fn new(from: &SectorBasis, to: &SectorBasis) -> Self {
        let m = from.sites();
        let mut target = vec![Vec::new(); m];
        let mut occ = vec![0u32; m];
        for (i, state) in from.states().iter().enumerate() {
            for s in 0..m {
                if state[s] == 0 {
                    continue;
                }
                occ.copy_from_slice(state);
                occ[s] -= 1;
                let j = to.index_of(&occ).expect("annihilation stays in sector");
                target[s].push((i, j, (state[s] as f64).sqrt()));
            }
        }
        Self {
            target,
            out_dim: to.len(),
        }
    }
}

fn falling(n: usize, k: usize) -> f64 {
    (0..k).map(|i| (n - i) as f64).product()
}

/// `γ^{(k1,k2)}` of a two-species state.
pub fn reduced_density(state: &TwoSpeciesState, k1: usize, k2: usize) -> Result<Rdm> {
    let (n1, n2) = (state.n1(), state.n2());
    if k1 > n1 || k2 > n2 || k1 + k2 == 0 {
        return Err(Error::OrderExceedsParticles { k1, k2, n1, n2 });
    }
    let m = state.sites();
    let sector = |n: usize| SectorBasis::new(m, n, usize::MAX);
    let chain_a: Vec<SectorBasis> = (0..=k1).map(|j| sector(n1 - j)).collect::<Result<_>>()?;
    let chain_b: Vec<SectorBasis> = (0..=k2).map(|j| sector(n2 - j)).collect::<Result<_>>()?;
    let ann_a: Vec<Annihilator> = (0..k1).map(|j| Annihilator::new(&chain_a[j], &chain_a[j + 1])).collect();
    let ann_b: Vec<Annihilator> = (0..k2).map(|j| Annihilator::new(&chain_b[j], &chain_b[j + 1])).collect();

    // Level-by-level expansion: vectors are stored as (rows over A sector, cols over B sector).
    let mut level: Vec<Vec<Complex64>> = vec![state.amplitudes.clone()];
    let (mut da, mut db) = (state.basis_a.len(), state.basis_b.len());
    for ann in &ann_a {
        let new_da = ann.out_dim;
        level = level
            .par_iter()
            .flat_map_iter(|v| {
                (0..m).map(move |s| {
                    let mut out = vec![Complex64::new(0.0, 0.0); new_da * db];
                    for &(i, j, f) in &ann.target[s] {
                        for b in 0..db {
                            out[j * db + b] += v[i * db + b] * f;
                        }
                    }
                    out
                })
            })
            .collect();
        da = new_da;
    }
    for ann in &ann_b {
        let new_db = ann.out_dim;
        level = level
            .par_iter()
            .flat_map_iter(|v| {
                (0..m).map(move |s| {
                    let mut out = vec![Complex64::new(0.0, 0.0); da * new_db];
                    for a in 0..da {
                        for &(i, j, f) in &ann.target[s] {
                            out[a * new_db + j] += v[a * db + i] * f;
                        }
                    }
                    out
                })
            })
            .collect();
        db = new_db;
    }

    let norm = falling(n1, k1) * falling(n2, k2);
    let d = level.len();
    let entries: Vec<Complex64> = (0..d * d)
        .into_par_iter()
        .map(|idx| {
            let (r, c) = (idx / d, idx % d);
            if c < r {
                return Complex64::new(0.0, 0.0);
            }
            level[c].iter().zip(&level[r]).map(|(x, y)| x.conj() * y).sum::<Complex64>() / norm
        })
        .collect();
    let mut mat = DMatrix::from_row_slice(d, d, &entries);
    for r in 0..d {
        for c in 0..r {
            mat[(r, c)] = mat[(c, r)].conj();
        }
        mat[(r, r)].im = 0.0;
    }
    Rdm::from_matrix(k1, k2, m, mat)
}

/// `u^{⊗k1} ⊗ v^{⊗k2}` in site coefficients, first slot most significant.
pub fn product_vector(u: &ComplexField, v: &ComplexField, k1: usize, k2: usize) -> Result<DVector<Complex64>> {
    u.check_normalized("u", crate::hartree::NORM_TOLERANCE)?;
    v.check_normalized("v", crate::hartree::NORM_TOLERANCE)?;
    let cu = u.normalized()?.site_coefficients();
    let cv = v.normalized()?.site_coefficients();
    let mut w = vec![Complex64::new(1.0, 0.0)];
    for f in std::iter::repeat_n(&cu, k1).chain(std::iter::repeat_n(&cv, k2)) {
        w = w.iter().flat_map(|x| f.iter().map(move |y| x * y)).collect();
    }
    Ok(DVector::from_vec(w))
}

fn check_compatible(gamma: &Rdm, u: &ComplexField, v: &ComplexField) -> Result<()> {
    if u.grid() != v.grid() || u.grid().sites() != gamma.sites {
        return Err(Error::GridMismatch("orbitals do not match the RDM".into()));
    }
    Ok(())
}

/// `α = 1 - ⟨w, γ w⟩` with `w = u^{⊗k1} ⊗ v^{⊗k2}`.
pub fn alpha_indicator(gamma: &Rdm, u: &ComplexField, v: &ComplexField) -> Result<f64> {
    check_compatible(gamma, u, v)?;
    let w = product_vector(u, v, gamma.k1, gamma.k2)?;
    Ok(1.0 - w.dotc(&(&gamma.matrix * &w)).re)
}

/// `R = Tr|γ - |w⟩⟨w||`.
pub fn trace_distance_indicator(gamma: &Rdm, u: &ComplexField, v: &ComplexField) -> Result<f64> {
    check_compatible(gamma, u, v)?;
    let w = product_vector(u, v, gamma.k1, gamma.k2)?;
    let diff = &gamma.matrix - &w * w.adjoint();
    Ok(hermitian_eigenvalues(&diff).iter().map(|x| x.abs()).sum())
}

#[derive(Clone, Debug, Serialize)]
pub struct InequalityCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Section3Report {
    /// `(k1, k2, α, R)` for every order in [`REPORTED_ORDERS`].
    pub indicators: Vec<(usize, usize, f64, f64)>,
    pub checks: Vec<InequalityCheck>,
}

impl Section3Report {
    pub fn alpha(&self, k1: usize, k2: usize) -> Option<f64> {
        self.indicators.iter().find(|x| x.0 == k1 && x.1 == k2).map(|x| x.2)
    }
    pub fn r(&self, k1: usize, k2: usize) -> Option<f64> {
        self.indicators.iter().find(|x| x.0 == k1 && x.1 == k2).map(|x| x.3)
    }
    pub fn first_violation(&self) -> Option<&InequalityCheck> {
        self.checks.iter().find(|c| !c.pass)
    }
    pub fn worst_margin(&self) -> f64 {
        self.checks.iter().map(|c| c.rhs - c.lhs).fold(f64::INFINITY, f64::min)
    }
}

/// Evaluate every indicator inequality; `tolerance` is the allowed excess `lhs - rhs`.
pub fn evaluate_section3(state: &TwoSpeciesState, u: &ComplexField, v: &ComplexField, tolerance: f64) -> Result<Section3Report> {
    let mut indicators = Vec::new();
    for &(k1, k2) in &REPORTED_ORDERS {
        let g = reduced_density(state, k1, k2)?;
        indicators.push((k1, k2, alpha_indicator(&g, u, v)?, trace_distance_indicator(&g, u, v)?));
    }
    let a = |k1: usize, k2: usize| indicators.iter().find(|x| x.0 == k1 && x.1 == k2).unwrap().2;
    let mut checks = Vec::new();
    let mut push = |name: String, lhs: f64, rhs: f64| {
        checks.push(InequalityCheck {
            pass: lhs - rhs <= tolerance,
            name,
            lhs,
            rhs,
        })
    };
    push("alpha10 <= alpha11".into(), a(1, 0), a(1, 1));
    push("alpha01 <= alpha11".into(), a(0, 1), a(1, 1));
    push("alpha11 <= alpha10 + alpha01".into(), a(1, 1), a(1, 0) + a(0, 1));
    for &(k1, k2, al, r) in &indicators {
        push(format!("alpha{k1}{k2} <= R{k1}{k2}"), al, r);
        push(format!("R{k1}{k2} <= 2 sqrt(alpha{k1}{k2})"), r, 2.0 * al.max(0.0).sqrt());
        push(
            format!("alpha{k1}{k2} <= {} alpha11", k1.max(k2)),
            al,
            k1.max(k2) as f64 * a(1, 1),
        );
    }
    Ok(Section3Report { indicators, checks })
}

/// As [`evaluate_section3`], failing with the first violated inequality.
pub fn check_section3_inequalities(state: &TwoSpeciesState, u: &ComplexField, v: &ComplexField, tolerance: f64) -> Result<Section3Report> {
    let report = evaluate_section3(state, u, v, tolerance)?;
    if let Some(c) = report.first_violation() {
        return Err(Error::Violation {
            name: c.name.clone(),
            lhs: c.lhs,
            rhs: c.rhs,
            slack: tolerance,
        });
    }
    Ok(report)
}

/// One line of the indicator time series; orders beyond the particle numbers are `None`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IndicatorRow {
    pub t: f64,
    pub alpha: [Option<f64>; 6],
    pub r11: f64,
}

impl IndicatorRow {
    pub fn alpha11(&self) -> f64 {
        self.alpha[2].expect("alpha11 is always computed")
    }
}

/// Indicators at the orders of [`REPORTED_ORDERS`] with `max(k1, k2) <= max_order`.
pub fn indicator_row(state: &TwoSpeciesState, u: &ComplexField, v: &ComplexField, max_order: usize) -> Result<IndicatorRow> {
    let mut alpha = [None; 6];
    let mut r11 = f64::NAN;
    for (slot, &(k1, k2)) in REPORTED_ORDERS.iter().enumerate() {
        if k1.max(k2) > max_order {
            continue;
        }
        let g = reduced_density(state, k1, k2)?;
        alpha[slot] = Some(alpha_indicator(&g, u, v)?);
        if (k1, k2) == (1, 1) {
            r11 = trace_distance_indicator(&g, u, v)?;
        }
    }
    Ok(IndicatorRow { t: state.time, alpha, r11 })
}

pub fn write_indicator_csv<W: Write>(mut w: W, header: &[String], rows: &[IndicatorRow]) -> Result<()> {
    for line in header {
        writeln!(w, "# {line}")?;
    }
    writeln!(w, "t,alpha_10,alpha_01,alpha_11,alpha_21,alpha_12,alpha_22,R_11")?;
    for row in rows {
        let mut line = format!("{:.6}", row.t);
        for a in &row.alpha {
            match a {
                Some(x) => line.push_str(&format!(",{x:.15e}")),
                None => line.push(','),
            }
        }
        line.push_str(&format!(",{:.15e}", row.r11));
        writeln!(w, "{line}")?;
    }
    Ok(())
}
