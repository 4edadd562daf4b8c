//! Dense first-quantized realization of the projector counting calculus.
//!
//! On `h^{⊗N}` with `h = C^M` and a unit orbital `φ`, `p_j` projects slot `j` onto `φ`,
//! `q_j = 1 - p_j`, `P_k` collects the tensor products with exactly `k` factors `q`, and
//! `f̂ = Σ_k f(k) P_k`. Slot 0 is the most significant tensor index.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::SectorBasis;

/// Largest tensor dimension `M^N` handled densely.
pub const TENSOR_CAP: usize = 4096;

type CMatrix = DMatrix<Complex64>;

fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

fn max_entry(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TensorSpace {
    sites: usize,
    factors: usize,
    dim: usize,
}

impl TensorSpace {
    pub fn new(sites: usize, factors: usize) -> Result<Self> {
        if sites == 0 || factors == 0 {
            return Err(Error::invalid("tensor space", "need M >= 1 and N >= 1"));
        }
        let required = (sites as u128).checked_pow(factors as u32).unwrap_or(u128::MAX);
        if required > TENSOR_CAP as u128 {
            return Err(Error::CapExceeded {
                required,
                cap: TENSOR_CAP as u128,
            });
        }
        Ok(Self {
            sites,
            factors,
            dim: required as usize,
        })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }
    pub fn factors(&self) -> usize {
        self.factors
    }
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `op` acting on `slots` consecutive factors starting at `first`, identity elsewhere.
    pub fn embed(&self, op: &CMatrix, first: usize, slots: usize) -> Result<CMatrix> {
        let d = self.sites.pow(slots as u32);
        if op.nrows() != d || op.ncols() != d || first + slots > self.factors {
            return Err(Error::invalid("operator", "does not fit the tensor space"));
        }
        let left = identity(self.sites.pow(first as u32));
        let right = identity(self.sites.pow((self.factors - first - slots) as u32));
        Ok(left.kronecker(op).kronecker(&right))
    }

    /// Digits of a tensor index, slot 0 first.
    pub fn word(&self, mut index: usize) -> Vec<usize> {
        let mut w = vec![0; self.factors];
        for k in (0..self.factors).rev() {
            w[k] = index % self.sites;
            index /= self.sites;
        }
        w
    }

    pub fn index(&self, word: &[usize]) -> usize {
        word.iter().fold(0, |acc, &d| acc * self.sites + d)
    }
}

/// One-body projectors realized on every slot, and the counting projectors `P_k`.
#[derive(Clone, Debug)]
pub struct Projectors {
    space: TensorSpace,
    p: Vec<CMatrix>,
    q: Vec<CMatrix>,
    counting: Vec<CMatrix>,
    p1: CMatrix,
    q1: CMatrix,
}

pub fn build_projectors(phi: &[Complex64], space: TensorSpace) -> Result<Projectors> {
    if phi.len() != space.sites {
        return Err(Error::invalid("phi", "length differs from M"));
    }
    let norm = phi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::Unnormalized { what: "phi".into(), norm });
    }
    let m = space.sites;
    let col = CMatrix::from_column_slice(m, 1, phi);
    let p1 = &col * col.adjoint();
    let q1 = identity(m) - &p1;
    let mut p = Vec::with_capacity(space.factors);
    let mut q = Vec::with_capacity(space.factors);
    for j in 0..space.factors {
        p.push(space.embed(&p1, j, 1)?);
        q.push(space.embed(&q1, j, 1)?);
    }
    // Expand Π_j (p_j + q_j) by powers of q, one slot at a time.
    let mut levels: Vec<CMatrix> = vec![identity(1)];
    for _ in 0..space.factors {
        let mut next = Vec::with_capacity(levels.len() + 1);
        for k in 0..=levels.len() {
            let mut term = CMatrix::zeros(levels[0].nrows() * m, levels[0].ncols() * m);
            if k < levels.len() {
                term += levels[k].kronecker(&p1);
            }
            if k > 0 {
                term += levels[k - 1].kronecker(&q1);
            }
            next.push(term);
        }
        levels = next;
    }
    Ok(Projectors {
        space,
        p,
        q,
        counting: levels,
        p1,
        q1,
    })
}

impl Projectors {
    pub fn space(&self) -> TensorSpace {
        self.space
    }
    pub fn p(&self, j: usize) -> &CMatrix {
        &self.p[j]
    }
    pub fn q(&self, j: usize) -> &CMatrix {
        &self.q[j]
    }
    /// `P_k`, zero outside `0..=N`.
    pub fn counting(&self, k: i64) -> CMatrix {
        if k < 0 || k as usize > self.space.factors {
            CMatrix::zeros(self.space.dim, self.space.dim)
        } else {
            self.counting[k as usize].clone()
        }
    }

    /// `f̂ = Σ_k f(k) P_k`.
    pub fn hat(&self, f: &[f64]) -> Result<CMatrix> {
        if f.len() != self.space.factors + 1 {
            return Err(Error::invalid("f", format!("table length {} != N + 1 = {}", f.len(), self.space.factors + 1)));
        }
        let mut out = CMatrix::zeros(self.space.dim, self.space.dim);
        for (k, &w) in f.iter().enumerate() {
            if w != 0.0 {
                out += self.counting[k].scale(w);
            }
        }
        Ok(out)
    }

    pub fn monomial(&self, mono: &Monomial) -> Result<CMatrix> {
        let r = mono.0.len();
        if r > self.space.factors {
            return Err(Error::invalid("monomial", format!("{r} slots exceed N = {}", self.space.factors)));
        }
        let mut op = identity(1);
        for s in &mono.0 {
            op = op.kronecker(match s {
                Slot::P => &self.p1,
                Slot::Q => &self.q1,
            });
        }
        self.space.embed(&op, 0, r)
    }
}

/// `m(k) = k/N`.
pub fn m_table(n: usize) -> Vec<f64> {
    (0..=n).map(|k| k as f64 / n as f64).collect()
}

/// `n(k) = sqrt(k/N)`.
pub fn n_table(n: usize) -> Vec<f64> {
    (0..=n).map(|k| (k as f64 / n as f64).sqrt()).collect()
}

/// Pseudo-inverse of `n`: `sqrt(N/k)` for `k ≥ 1`, zero at `k = 0`.
pub fn n_inverse_table(n: usize) -> Vec<f64> {
    (0..=n).map(|k| if k == 0 { 0.0 } else { (n as f64 / k as f64).sqrt() }).collect()
}

/// `(τ_s f)(k) = f(k + s)`, zero where `k + s` leaves `0..=N`.
pub fn shift(f: &[f64], s: i64) -> Vec<f64> {
    (0..f.len() as i64)
        .map(|k| {
            let j = k + s;
            if (0..f.len() as i64).contains(&j) {
                f[j as usize]
            } else {
                0.0
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    P,
    Q,
}

/// Product of `p`'s and `q`'s on the leading slots, e.g. `"pq"` = `p_1 q_2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monomial(pub Vec<Slot>);

impl Monomial {
    pub fn parse(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::invalid("monomial", "empty"));
        }
        s.chars()
            .map(|c| match c {
                'p' => Ok(Slot::P),
                'q' => Ok(Slot::Q),
                other => Err(Error::invalid("monomial", format!("unexpected factor `{other}`"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Monomial)
    }

    pub fn q_count(&self) -> usize {
        self.0.iter().filter(|s| **s == Slot::Q).count()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `max |Q1 A f̂ Q2 - Q1 (τ_n f)^ A Q2|` with `n = q(Q2) - q(Q1)` and `A` on the leading slots.
pub fn verify_exchange_lemma(proj: &Projectors, a: &CMatrix, f: &[f64], q1: &Monomial, q2: &Monomial) -> Result<f64> {
    if q1.len() != q2.len() {
        return Err(Error::invalid("monomial", "Q1 and Q2 act on different numbers of slots"));
    }
    let r = q1.len();
    let a_full = proj.space.embed(a, 0, r)?;
    let m1 = proj.monomial(q1)?;
    let m2 = proj.monomial(q2)?;
    let n = q2.q_count() as i64 - q1.q_count() as i64;
    let lhs = &m1 * &a_full * proj.hat(f)? * &m2;
    let rhs = &m1 * proj.hat(&shift(f, n))? * &a_full * &m2;
    Ok(max_entry(&(lhs - rhs)))
}

/// Residuals of the counting identities on one symmetric state.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CountingBounds {
    /// `|⟨Ψ, f̂ q1 Ψ⟩ - ⟨Ψ, f̂ m̂ Ψ⟩|`.
    pub q_vs_m: f64,
    /// `⟨Ψ, f̂ q1 q2 Ψ⟩ - N/(N-1) ⟨Ψ, f̂ m̂² Ψ⟩`, must be `≤ 0` up to tolerance.
    pub qq_excess: f64,
}

fn expect(psi: &[Complex64], op: &CMatrix) -> Complex64 {
    let v = nalgebra::DVector::from_column_slice(psi);
    v.dotc(&(op * &v))
}

fn norm_sq(op: &CMatrix, psi: &[Complex64]) -> f64 {
    let v = nalgebra::DVector::from_column_slice(psi);
    (op * v).norm_squared()
}

/// Bounds for `Ψ` in the symmetric sector and `f ≥ 0`.
pub fn verify_counting_bounds(proj: &Projectors, sym: &CMatrix, psi: &[Complex64], f: &[f64]) -> Result<CountingBounds> {
    let n = proj.space.factors;
    if n < 2 {
        return Err(Error::invalid("N", "the q1 q2 bound needs N >= 2"));
    }
    if f.iter().any(|&x| x < 0.0) {
        return Err(Error::invalid("f", "weights must be nonnegative"));
    }
    symmetry_residual(sym, psi)?;
    let fh = proj.hat(f)?;
    let mh = proj.hat(&m_table(n))?;
    let a = expect(psi, &(&fh * proj.q(0)));
    let b = expect(psi, &(&fh * &mh));
    let c = expect(psi, &(&fh * proj.q(0) * proj.q(1))).re;
    let d = expect(psi, &(&fh * &mh * &mh)).re;
    Ok(CountingBounds {
        q_vs_m: (a - b).norm(),
        qq_excess: c - n as f64 / (n as f64 - 1.0) * d,
    })
}

/// `‖f̂ q Φ‖² - N/(N-1) ‖f̂ n̂ Φ‖²` for `Φ ∈ h ⊗ H_{N-1,sym}`, with `q` acting on a slot of the
/// symmetric block (slot 1; slot 0 carries the unsymmetrized factor). Must be `≤ 0` up to tolerance.
///
/// With `q` on the unsymmetrized slot the bound is false: `Φ = χ ⊗ φ^{⊗(N-1)}`, `χ ⟂ φ`, gives
/// `f(1)²` on the left and `f(1)²/(N-1)` on the right.
pub fn verify_partial_symmetry_bound(proj: &Projectors, partial_sym: &CMatrix, phi: &[Complex64], f: &[f64]) -> Result<f64> {
    let n = proj.space.factors;
    if n < 2 {
        return Err(Error::invalid("N", "needs N >= 2"));
    }
    if f.iter().any(|&x| x < 0.0) {
        return Err(Error::invalid("f", "weights must be nonnegative"));
    }
    symmetry_residual(partial_sym, phi)?;
    let fh = proj.hat(f)?;
    let nh = proj.hat(&n_table(n))?;
    Ok(norm_sq(&(&fh * proj.q(1)), phi) - n as f64 / (n as f64 - 1.0) * norm_sq(&(&fh * nh), phi))
}

fn symmetry_residual(sym: &CMatrix, psi: &[Complex64]) -> Result<()> {
    let v = nalgebra::DVector::from_column_slice(psi);
    let r = (sym * &v - &v).norm();
    if r > 1e-10 {
        return Err(Error::Symmetry { residual: r });
    }
    Ok(())
}

fn occupation(word: &[usize], sites: usize) -> Vec<u32> {
    let mut o = vec![0u32; sites];
    word.iter().for_each(|&s| o[s] += 1);
    o
}

/// Orthogonal projector onto the symmetric subspace of `h^{⊗N}`.
pub fn symmetrizer(space: TensorSpace) -> CMatrix {
    let words: Vec<Vec<u32>> = (0..space.dim).map(|i| occupation(&space.word(i), space.sites)).collect();
    let count = |o: &[u32]| multinomial(o);
    CMatrix::from_fn(space.dim, space.dim, |r, c| {
        if words[r] == words[c] {
            Complex64::new(1.0 / count(&words[r]), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// `1 ⊗ Sym_{N-1}`: symmetric in every slot but the first.
pub fn partial_symmetrizer(space: TensorSpace) -> CMatrix {
    let key = |i: usize| {
        let w = space.word(i);
        (w[0], occupation(&w[1..], space.sites))
    };
    let keys: Vec<_> = (0..space.dim).map(key).collect();
    CMatrix::from_fn(space.dim, space.dim, |r, c| {
        if keys[r] == keys[c] {
            Complex64::new(1.0 / multinomial(&keys[r].1), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Number of words with the given occupation, `N!/Π n_a!`.
fn multinomial(occ: &[u32]) -> f64 {
    let mut acc = 1.0;
    let mut total = 0u32;
    for &k in occ {
        for i in 1..=k {
            total += 1;
            acc *= total as f64 / i as f64;
        }
    }
    acc
}

/// Occupation amplitudes to tensor coefficients: `|n⟩ ↦ sqrt(Π n_a!/N!) Σ_{words of n} e_w`.
pub fn fock_to_tensor(basis: &SectorBasis, space: TensorSpace, amps: &[Complex64]) -> Result<Vec<Complex64>> {
    check_bridge(basis, space, amps.len())?;
    Ok((0..space.dim)
        .map(|i| {
            let o = occupation(&space.word(i), space.sites);
            let j = basis.index_of(&o).expect("word occupation lies in the sector");
            amps[j] / multinomial(&o).sqrt()
        })
        .collect())
}

/// Adjoint of [`fock_to_tensor`]; its inverse on the symmetric subspace.
pub fn tensor_to_fock(basis: &SectorBasis, space: TensorSpace, tensor: &[Complex64]) -> Result<Vec<Complex64>> {
    if tensor.len() != space.dim {
        return Err(Error::invalid("tensor", "length differs from M^N"));
    }
    check_bridge(basis, space, basis.len())?;
    let mut out = vec![Complex64::new(0.0, 0.0); basis.len()];
    for (i, z) in tensor.iter().enumerate() {
        let o = occupation(&space.word(i), space.sites);
        let j = basis.index_of(&o).expect("word occupation lies in the sector");
        out[j] += z / multinomial(&o).sqrt();
    }
    Ok(out)
}

fn check_bridge(basis: &SectorBasis, space: TensorSpace, len: usize) -> Result<()> {
    if basis.sites() != space.sites || basis.particles() != space.factors || len != basis.len() {
        return Err(Error::invalid("basis", "sector and tensor space disagree"));
    }
    Ok(())
}

/// Largest commutator entry between monomials on the A-factors and on the B-factors of
/// `h^{⊗N1} ⊗ h^{⊗N2}`, over all monomials of length `min(N, 2)`.
pub fn two_component_commutator(sites: usize, n1: usize, n2: usize, phi_a: &[Complex64], phi_b: &[Complex64]) -> Result<f64> {
    let sa = TensorSpace::new(sites, n1)?;
    let sb = TensorSpace::new(sites, n2)?;
    if sa.dim * sb.dim > TENSOR_CAP {
        return Err(Error::CapExceeded {
            required: (sa.dim * sb.dim) as u128,
            cap: TENSOR_CAP as u128,
        });
    }
    let pa = build_projectors(phi_a, sa)?;
    let pb = build_projectors(phi_b, sb)?;
    let monos = |r: usize| -> Vec<Monomial> {
        (0..1usize << r)
            .map(|bits| Monomial((0..r).map(|i| if bits >> i & 1 == 1 { Slot::Q } else { Slot::P }).collect()))
            .collect()
    };
    let mut worst: f64 = 0.0;
    for ma in monos(n1.min(2)) {
        let x = pa.monomial(&ma)?.kronecker(&identity(sb.dim));
        for mb in monos(n2.min(2)) {
            let y = identity(sa.dim).kronecker(&pb.monomial(&mb)?);
            worst = worst.max(max_entry(&(&x * &y - &y * &x)));
        }
    }
    Ok(worst)
}
