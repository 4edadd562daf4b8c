//! Mean-field prefactors, finite-N energies, and first-equation BBGKY residuals.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{pair_tables, Propagator, SparseHamiltonian, TwoSpeciesState};
use crate::hartree::{
    energy_per_particle, one_body_energy, potential_expectation, rhs_with, FlowCoefficients, GpCouplings, HartreePair,
    MixtureParams, NORM_TOLERANCE,
};
use crate::lattice::{one_body_matrix, ComplexField};
use crate::rdm::{product_vector, reduced_density};

/// Prefactor choices `m_α(N1, N2)` in front of the three interaction sums.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingWeights {
    /// `1/N1`, `1/N2`, `1/(N1+N2)`.
    #[default]
    Default,
    /// `1/(N1+N2)` everywhere.
    Common,
    /// `1/N1`, `1/N2`, `(N1 N2)^{-1/2}`.
    Mixed,
}

impl ScalingWeights {
    pub const ALL: [ScalingWeights; 3] = [Self::Default, Self::Common, Self::Mixed];

    /// `[m1, m2, m12]` at finite populations.
    pub fn prefactors(self, n1: usize, n2: usize) -> Result<[f64; 3]> {
        if n1 == 0 || n2 == 0 {
            return Err(Error::invalid("N1/N2", "prefactors need both populations positive"));
        }
        let (a, b) = (n1 as f64, n2 as f64);
        Ok(match self {
            Self::Default => [1.0 / a, 1.0 / b, 1.0 / (a + b)],
            Self::Common => [1.0 / (a + b); 3],
            Self::Mixed => [1.0 / a, 1.0 / b, 1.0 / (a * b).sqrt()],
        })
    }

    /// `[k1, k2, k12]`, the limits of `(N1+N2) m_α` at fixed fractions.
    pub fn limits(self, c1: f64, c2: f64) -> Result<[f64; 3]> {
        if !(c1 > 0.0 && c2 > 0.0) {
            return Err(Error::invalid("c1/c2", "limits need both fractions positive"));
        }
        Ok(match self {
            Self::Default => [1.0 / c1, 1.0 / c2, 1.0],
            Self::Common => [1.0; 3],
            Self::Mixed => [1.0 / c1, 1.0 / c2, 1.0 / (c1 * c2).sqrt()],
        })
    }

    /// Nonlinear coefficients `(c1k1, c2k12, c2k2, c1k12)` of the matching limit flow.
    pub fn flow(self, params: &MixtureParams) -> Result<FlowCoefficients> {
        if self == Self::Default {
            // Same object the Hartree integrator uses, so the two flows agree bit for bit.
            return Ok(params.hartree_coefficients());
        }
        let (c1, c2) = (params.c1(), params.c2());
        let [k1, k2, k12] = self.limits(c1, c2)?;
        Ok(FlowCoefficients {
            self_a: c1 * k1,
            cross_a: c2 * k12,
            self_b: c2 * k2,
            cross_b: c1 * k12,
        })
    }

    /// Limit energy per particle with these weights.
    pub fn energy(self, state: &HartreePair, params: &MixtureParams) -> Result<f64> {
        let [k1, k2, k12] = self.limits(params.c1(), params.c2())?;
        energy_per_particle(state, params, k1, k2, k12)
    }

    /// Parameters whose many-body Hamiltonian (built with the default prefactors) carries
    /// these prefactors instead.
    pub fn rescaled_params(self, params: &MixtureParams, n1: usize, n2: usize) -> Result<MixtureParams> {
        let [m1, m2, m12] = self.prefactors(n1, n2)?;
        let s = [m1 * n1 as f64, m2 * n2 as f64, m12 * (n1 + n2) as f64];
        let gp = params.gp();
        MixtureParams::new(
            params.c1(),
            params.c2(),
            params.v1().scale(s[0]),
            params.v2().scale(s[1]),
            params.v12().scale(s[2]),
            params.u1().clone(),
            params.u2().clone(),
            params.mode(),
            GpCouplings {
                gamma1: gp.gamma1 * s[0],
                gamma2: gp.gamma2 * s[1],
                gamma12: gp.gamma12 * s[2],
            },
        )
    }
}

/// `⟨u^{⊗N1}⊗v^{⊗N2}, H u^{⊗N1}⊗v^{⊗N2}⟩ / (N1+N2)` with the default prefactors.
pub fn finite_n_energy(u: &ComplexField, v: &ComplexField, n1: usize, n2: usize, params: &MixtureParams) -> Result<f64> {
    finite_n_energy_with(u, v, n1, n2, params, ScalingWeights::Default)
}

pub fn finite_n_energy_with(
    u: &ComplexField,
    v: &ComplexField,
    n1: usize,
    n2: usize,
    params: &MixtureParams,
    weights: ScalingWeights,
) -> Result<f64> {
    u.check_normalized("u", NORM_TOLERANCE)?;
    v.check_normalized("v", NORM_TOLERANCE)?;
    let [m1, m2, m12] = weights.prefactors(n1, n2)?;
    let (a, b) = (n1 as f64, n2 as f64);
    let (rho_u, rho_v) = (u.density(), v.density());
    let e1 = potential_expectation(u, &params.apply_v1(&rho_u)?)?;
    let e2 = potential_expectation(v, &params.apply_v2(&rho_v)?)?;
    let e12 = potential_expectation(u, &params.apply_v12(&rho_v)?)?;
    let total = a * one_body_energy(u, params.u1())?
        + b * one_body_energy(v, params.u2())?
        + 0.5 * m1 * a * (a - 1.0) * e1
        + 0.5 * m2 * b * (b - 1.0) * e2
        + m12 * a * b * e12;
    Ok(total / (a + b))
}

/// Right-hand side of the limit flow with weights `weights`.
pub fn hartree_generic_weights_rhs(
    state: &HartreePair,
    params: &MixtureParams,
    weights: ScalingWeights,
) -> Result<(ComplexField, ComplexField)> {
    rhs_with(state, params, &weights.flow(params)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Drift {
    pub value: f64,
    /// False when the initial energy vanished and the drift is absolute.
    pub relative: bool,
}

/// `max_t |E(t) - E(0)| / |E(0)|` along a trajectory of the matching flow.
pub fn energy_conservation_check(traj: &[HartreePair], params: &MixtureParams, weights: ScalingWeights) -> Result<Drift> {
    let first = traj.first().ok_or_else(|| Error::invalid("trajectory", "empty"))?;
    let e0 = weights.energy(first, params)?;
    let mut worst: f64 = 0.0;
    for s in traj {
        worst = worst.max((weights.energy(s, params)? - e0).abs());
    }
    Ok(if e0.abs() > f64::MIN_POSITIVE {
        Drift {
            value: worst / e0.abs(),
            relative: true,
        }
    } else {
        Drift {
            value: worst,
            relative: false,
        }
    })
}

/// States at `t - Δ`, `t`, `t + Δ` around a many-body state.
pub fn manybody_window(state: &TwoSpeciesState, h: &SparseHamiltonian, delta: f64) -> Result<[TwoSpeciesState; 3]> {
    if !(delta > 0.0) {
        return Err(Error::invalid("delta", "must be positive"));
    }
    let prop = Propagator::new(h);
    let shifted = |dt: f64| -> Result<TwoSpeciesState> {
        let mut s = TwoSpeciesState::new(
            state.basis_a.clone(),
            state.basis_b.clone(),
            prop.step(&state.amplitudes, dt)?,
        )?;
        s.time = state.time + dt;
        Ok(s)
    };
    Ok([shifted(-delta)?, state.clone(), shifted(delta)?])
}

/// `Tr_rest [W, γ]` down to the `(1,1)` block, for diagonal `W` given on slot tuples
/// `[a1, .., a_k1, b1, .., b_k2]`. `gamma(I, J)` returns matrix entries of `γ^{(k1,k2)}`.
fn traced_commutator<G, W>(m: usize, k1: usize, k2: usize, gamma: G, w: W) -> DMatrix<Complex64>
where
    G: Fn(usize, usize) -> Complex64 + Sync,
    W: Fn(&[usize]) -> f64 + Sync,
{
    let k = k1 + k2;
    let rest = m.pow((k - 2) as u32);
    let flat = |slots: &[usize]| slots.iter().fold(0, |acc, &s| acc * m + s);
    let entries: Vec<Complex64> = (0..m.pow(4))
        .into_par_iter()
        .map(|e| {
            let (row, col) = (e / (m * m), e % (m * m));
            let (a, b, a2, b2) = (row / m, row % m, col / m, col % m);
            let mut si = vec![0; k];
            let mut sj = vec![0; k];
            let mut acc = Complex64::new(0.0, 0.0);
            for r in 0..rest {
                // Spread `r` over the traced slots, A-side first.
                let mut rem = r;
                (si[0], si[k1], sj[0], sj[k1]) = (a, b, a2, b2);
                for slot in (1..k1).chain(k1 + 1..k).rev() {
                    si[slot] = rem % m;
                    sj[slot] = rem % m;
                    rem /= m;
                }
                let dw = w(&si) - w(&sj);
                if dw != 0.0 {
                    acc += gamma(flat(&si), flat(&sj)) * dw;
                }
            }
            acc
        })
        .collect();
    DMatrix::from_row_slice(m * m, m * m, &entries)
}

/// `[h1 ⊗ 1 + 1 ⊗ h2, γ]` on the `(1,1)` block.
fn one_body_commutator(params: &MixtureParams, gamma: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let m = params.grid().sites();
    let h1 = one_body_matrix(params.u1());
    let h2 = one_body_matrix(params.u2());
    let id = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let h = DMatrix::from_fn(m * m, m * m, |r, c| {
        let (a, b, a2, b2) = (r / m, r % m, c / m, c % m);
        Complex64::new(h1[a][a2] * id(b, b2) + id(a, a2) * h2[b][b2], 0.0)
    });
    &h * gamma - gamma * &h
}

fn operator_norm(x: &DMatrix<Complex64>) -> f64 {
    x.clone().singular_values().iter().copied().fold(0.0, f64::max)
}

fn centered_derivative(minus: &DMatrix<Complex64>, plus: &DMatrix<Complex64>, delta: f64) -> DMatrix<Complex64> {
    (plus - minus).scale(0.5 / delta) * Complex64::new(0.0, 1.0)
}

/// Operator norm of `i ∂_t γ^{(1,1)}` (centered difference) minus the right side of the
/// first finite-N hierarchy equation, at the middle state of `window`.
pub fn bbgky_residual_finite(window: &[TwoSpeciesState; 3], params: &MixtureParams, delta: f64) -> Result<f64> {
    let mid = &window[1];
    let (n1, n2) = (mid.n1(), mid.n2());
    if n1 < 2 || n2 < 2 {
        return Err(Error::OrderExceedsParticles { k1: 2, k2: 2, n1, n2 });
    }
    let m = mid.sites();
    if m != params.grid().sites() {
        return Err(Error::GridMismatch("state and parameters".into()));
    }
    let g11 = reduced_density(mid, 1, 1)?;
    let g21 = reduced_density(mid, 2, 1)?;
    let g12 = reduced_density(mid, 1, 2)?;
    let g22 = reduced_density(mid, 2, 2)?;
    let lhs = centered_derivative(
        reduced_density(&window[0], 1, 1)?.matrix(),
        reduced_density(&window[2], 1, 1)?.matrix(),
        delta,
    );

    let grid = *params.grid();
    let [p1, p2, p12] = pair_tables(params);
    let pot = |table: &[f64], x: usize, y: usize| table[grid.difference(x, y)];
    let (a, b) = (n1 as f64, n2 as f64);

    let intra_a = traced_commutator(m, 2, 1, |i, j| g21.matrix()[(i, j)], |s| pot(&p1, s[0], s[1]));
    let intra_b = traced_commutator(m, 1, 2, |i, j| g12.matrix()[(i, j)], |s| pot(&p2, s[1], s[2]));
    // Slots of γ^{(2,2)}: [x1, x2, y1, y2].
    let inter = traced_commutator(
        m,
        2,
        2,
        |i, j| g22.matrix()[(i, j)],
        |s| (b - 1.0) * pot(&p12, s[0], s[3]) + (a - 1.0) * pot(&p12, s[2], s[1]) + pot(&p12, s[0], s[2]),
    );
    let rhs = one_body_commutator(params, g11.matrix())
        + intra_a.scale((a - 1.0) / a)
        + intra_b.scale((b - 1.0) / b)
        + inter.scale(1.0 / (a + b));
    Ok(operator_norm(&(lhs - rhs)))
}

fn projector_entries(u: &ComplexField, v: &ComplexField, k1: usize, k2: usize) -> Result<Vec<Complex64>> {
    Ok(product_vector(u, v, k1, k2)?.iter().copied().collect())
}

/// Residual of the limiting hierarchy's first equation for factorized marginals built from
/// a Hartree window `(t - Δ, t, t + Δ)`.
pub fn infinite_hierarchy_residual(window: &[HartreePair; 3], params: &MixtureParams, delta: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::invalid("delta", "must be positive"));
    }
    let grid = *params.grid();
    let m = grid.sites();
    if *window[1].u.grid() != grid {
        return Err(Error::GridMismatch("trajectory and parameters".into()));
    }
    let dyad = |s: &HartreePair| -> Result<DMatrix<Complex64>> {
        let w = product_vector(&s.u, &s.v, 1, 1)?;
        Ok(&w * w.adjoint())
    };
    let lhs = centered_derivative(&dyad(&window[0])?, &dyad(&window[2])?, delta);

    let (u, v) = (&window[1].u, &window[1].v);
    let w21 = projector_entries(u, v, 2, 1)?;
    let w12 = projector_entries(u, v, 1, 2)?;
    let w22 = projector_entries(u, v, 2, 2)?;
    let [p1, p2, p12] = pair_tables(params);
    let pot = |table: &[f64], x: usize, y: usize| table[grid.difference(x, y)];
    let (c1, c2) = (params.c1(), params.c2());

    let intra_a = traced_commutator(m, 2, 1, |i, j| w21[i] * w21[j].conj(), |s| pot(&p1, s[0], s[1]));
    let intra_b = traced_commutator(m, 1, 2, |i, j| w12[i] * w12[j].conj(), |s| pot(&p2, s[1], s[2]));
    let inter = traced_commutator(
        m,
        2,
        2,
        |i, j| w22[i] * w22[j].conj(),
        |s| c2 * pot(&p12, s[0], s[3]) + c1 * pot(&p12, s[2], s[1]),
    );
    let rhs = one_body_commutator(params, &dyad(&window[1])?) + intra_a + intra_b + inter;
    Ok(operator_norm(&(lhs - rhs)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ResidualEntry {
    pub delta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub finite: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub infinite: Option<f64>,
}

/// Residuals keyed by sample time.
#[derive(Clone, Debug, Default, Serialize)]
pub struct ResidualReport {
    pub residuals: BTreeMap<String, ResidualEntry>,
}

impl ResidualReport {
    pub fn insert(&mut self, t: f64, entry: ResidualEntry) {
        self.residuals.insert(format!("{t:.6}"), entry);
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{assemble_hamiltonian, condensate_state, expectation, propagate, DEFAULT_CAP};
    use crate::hartree::{evolve, evolve_with, hartree_energy, rhs, Method, NonlinearityMode};
    use crate::lattice::{KernelProfile, LatticeGrid, OrbitalShape, RealField, TrapProfile};
    use crate::sampling::random_orbital;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn kernels(g: LatticeGrid, a: [f64; 3]) -> [RealField; 3] {
        a.map(|amp| KernelProfile::Gaussian { amplitude: amp, sigma: 1.0 }.sample(g))
    }

    fn params(g: LatticeGrid, c1: f64, a: [f64; 3]) -> MixtureParams {
        let [v1, v2, v12] = kernels(g, a);
        MixtureParams::hartree(c1, v1, v2, v12).unwrap()
    }

    fn orbitals(g: LatticeGrid) -> HartreePair {
        let u = OrbitalShape::Gaussian { center: vec![1.0], width: 1.0, momentum: vec![0.4] }.sample(g).unwrap();
        let v = OrbitalShape::Gaussian { center: vec![2.5], width: 1.3, momentum: vec![-0.2] }.sample(g).unwrap();
        HartreePair::new(u, v).unwrap()
    }

    #[test]
    fn weights_presets() {
        let d = ScalingWeights::Default;
        assert_eq!(d.prefactors(2, 6).unwrap(), [0.5, 1.0 / 6.0, 0.125]);
        assert_eq!(d.limits(0.25, 0.75).unwrap(), [4.0, 1.0 / 0.75, 1.0]);
        assert_eq!(ScalingWeights::Common.limits(0.25, 0.75).unwrap(), [1.0; 3]);
        let [.., k12] = ScalingWeights::Mixed.limits(0.25, 0.75).unwrap();
        assert!((k12 - 1.0 / 0.1875f64.sqrt()).abs() < 1e-15);
        // (N1+N2) m_α → k_α along a fixed-ratio sequence.
        for w in ScalingWeights::ALL {
            let m = w.prefactors(3000, 9000).unwrap();
            let k = w.limits(0.25, 0.75).unwrap();
            for i in 0..3 {
                assert!((12000.0 * m[i] - k[i]).abs() < 1e-12, "{w:?}");
            }
        }
        assert!(d.prefactors(0, 3).is_err());
        assert!(d.limits(0.0, 1.0).is_err());
    }

    #[test]
    fn finite_energy_examples() {
        let g = LatticeGrid::line(5).unwrap();
        let s = orbitals(g);
        let p = params(g, 0.5, [0.0; 3]);
        let free = (one_body_energy(&s.u, p.u1()).unwrap() * 2.0 + one_body_energy(&s.v, p.u2()).unwrap() * 3.0) / 5.0;
        assert!((finite_n_energy(&s.u, &s.v, 2, 3, &p).unwrap() - free).abs() < 1e-14);

        let with_intra = params(g, 0.5, [1.3, 0.7, 0.0]);
        let e = finite_n_energy(&s.u, &s.v, 1, 1, &with_intra).unwrap();
        let kin = 0.5 * (one_body_energy(&s.u, p.u1()).unwrap() + one_body_energy(&s.v, p.u2()).unwrap());
        assert!((e - kin).abs() < 1e-14);
        assert!(finite_n_energy(&s.u.scale(Complex64::new(2.0, 0.0)), &s.v, 1, 1, &p).is_err());
    }

    #[test]
    fn finite_energy_matches_fock_expectation() {
        let g = LatticeGrid::new(1, 3, 0.8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let [v1, v2, v12] = kernels(g, [1.1, -0.6, 0.9]);
        let trap = TrapProfile::Harmonic { strength: 0.7, center: vec![1.0] }.sample(g).unwrap();
        for (n1, n2) in [(1, 1), (1, 4), (3, 2), (5, 5), (6, 1)] {
            let c1 = n1 as f64 / (n1 + n2) as f64;
            let p = MixtureParams::hartree(c1, v1.clone(), v2.clone(), v12.clone())
                .unwrap()
                .with_traps(trap.clone(), trap.scale(0.5))
                .unwrap();
            let u = random_orbital(&mut rng, g).unwrap();
            let v = random_orbital(&mut rng, g).unwrap();
            for w in ScalingWeights::ALL {
                let scaled = w.rescaled_params(&p, n1, n2).unwrap();
                let (h, _, _) = assemble_hamiltonian(&scaled, n1, n2, DEFAULT_CAP).unwrap();
                let psi = condensate_state(&u, &v, n1, n2, DEFAULT_CAP).unwrap();
                let fock = expectation(&psi, &h).unwrap() / (n1 + n2) as f64;
                let direct = finite_n_energy_with(&u, &v, n1, n2, &p, w).unwrap();
                assert!((fock - direct).abs() < 1e-10 * direct.abs().max(1.0), "{n1},{n2},{w:?}: {fock} vs {direct}");
            }
        }
    }

    #[test]
    fn local_gp_energy_matches_fock() {
        let g = LatticeGrid::new(1, 3, 0.5).unwrap();
        let z = RealField::zeros(g);
        let gp = GpCouplings { gamma1: 0.8, gamma2: 0.3, gamma12: -0.4 };
        let p = MixtureParams::new(0.4, 0.6, z.clone(), z.clone(), z.clone(), z.clone(), z, NonlinearityMode::LocalGp, gp).unwrap();
        let s = orbitals(g);
        let (h, _, _) = assemble_hamiltonian(&p, 2, 3, DEFAULT_CAP).unwrap();
        let psi = condensate_state(&s.u, &s.v, 2, 3, DEFAULT_CAP).unwrap();
        let fock = expectation(&psi, &h).unwrap() / 5.0;
        assert!((fock - finite_n_energy(&s.u, &s.v, 2, 3, &p).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn finite_energy_approaches_limit_like_one_over_n() {
        let g = LatticeGrid::line(6).unwrap();
        let p = params(g, 0.5, [1.0, 0.6, 0.8]);
        let s = orbitals(g);
        let limit = hartree_energy(&s, &p).unwrap();
        let err: Vec<f64> = [4, 8, 16, 32]
            .iter()
            .map(|&n| finite_n_energy(&s.u, &s.v, n, n, &p).unwrap() - limit)
            .collect();
        for w in err.windows(2) {
            assert!((w[0] / w[1] - 2.0).abs() < 1e-8, "{err:?}");
        }
        // Richardson extrapolation removes the 1/N term.
        let rich = 2.0 * err[3] - err[2];
        assert!(rich.abs() < 1e-12);
    }

    #[test]
    fn generic_rhs_examples() {
        let g = LatticeGrid::line(6).unwrap();
        let p = params(g, 0.3, [1.0, 0.6, 0.8]);
        let s = orbitals(g);
        let (du, dv) = rhs(&s, &p).unwrap();
        let (gu, gv) = hartree_generic_weights_rhs(&s, &p, ScalingWeights::Default).unwrap();
        assert_eq!((du.clone(), dv.clone()), (gu, gv));

        let base = FlowCoefficients { self_a: 1.0, cross_a: 0.7, self_b: 1.0, cross_b: 0.3 };
        let doubled = FlowCoefficients { self_a: 2.0, ..base };
        let (a_u, a_v) = rhs_with(&s, &p, &base).unwrap();
        let (b_u, b_v) = rhs_with(&s, &p, &doubled).unwrap();
        // Only the V1 term changes: -i (V1⋆|u|²) u.
        let v1u = s.u.multiply(&p.apply_v1(&s.u.density()).unwrap()).unwrap().scale(Complex64::new(0.0, -1.0));
        assert!(b_u.axpy(Complex64::new(-1.0, 0.0), &a_u).max_abs_diff(&v1u) < 1e-13);
        assert_eq!(a_v, b_v);

        let decoupled = FlowCoefficients { cross_a: 0.0, cross_b: 0.0, ..base };
        let alone = params(g, 0.3, [1.0, 0.6, 0.0]);
        let (x_u, x_v) = rhs_with(&s, &p, &decoupled).unwrap();
        let (y_u, y_v) = rhs(&s, &alone).unwrap();
        assert!(x_u.max_abs_diff(&y_u) < 1e-15 && x_v.max_abs_diff(&y_v) < 1e-15);
    }

    #[test]
    fn default_generic_flow_is_bit_identical() {
        let g = LatticeGrid::line(8).unwrap();
        let p = params(g, 0.5, [1.0, 0.6, 0.8]);
        let s = orbitals(g);
        let a = evolve(&s, &p, 0.1, 1e-3, Method::Strang, 10).unwrap();
        let b = evolve_with(&s, &p, &ScalingWeights::Default.flow(&p).unwrap(), 0.1, 1e-3, Method::Strang, 10).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn common_preset_differs_from_hartree() {
        let g = LatticeGrid::line(8).unwrap();
        let p = params(g, 0.25, [1.0, 0.6, 0.8]);
        let s = orbitals(g);
        let d = ScalingWeights::Default.energy(&s, &p).unwrap();
        let c = ScalingWeights::Common.energy(&s, &p).unwrap();
        assert!((d - c).abs() > 1e-3);
        assert_ne!(ScalingWeights::Common.flow(&p).unwrap(), p.hartree_coefficients());
    }

    #[test]
    fn energy_drift_examples() {
        let g = LatticeGrid::line(8).unwrap();
        let free = params(g, 0.5, [0.0; 3]);
        let wave = |k: usize| {
            ComplexField::from_fn(g, |a| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (k * a) as f64 / 8.0))
                .normalized()
                .unwrap()
        };
        let s = HartreePair::new(wave(1), wave(3)).unwrap();
        let traj = evolve(&s, &free, 1.0, 1e-2, Method::Strang, 1).unwrap();
        assert!(energy_conservation_check(&traj, &free, ScalingWeights::Default).unwrap().value < 1e-13);

        let p = params(g, 0.5, [1.0, 0.6, 0.8]);
        let s = orbitals(g);
        let drift = |dt: f64| {
            let traj = evolve(&s, &p, 1.0, dt, Method::Strang, 1).unwrap();
            energy_conservation_check(&traj, &p, ScalingWeights::Default).unwrap().value
        };
        let (d1, d2) = (drift(1e-2), drift(5e-3));
        assert!(d2 < 1e-4);
        assert!((3.0..5.0).contains(&(d1 / d2)), "{d1} {d2}");

        let w = ScalingWeights::Common;
        let traj = evolve_with(&s, &p, &w.flow(&p).unwrap(), 1.0, 1e-3, Method::Strang, 10).unwrap();
        assert!(energy_conservation_check(&traj, &p, w).unwrap().value < 1e-6);
    }

    fn manybody_setup(m: usize, n: usize, a: [f64; 3]) -> (MixtureParams, SparseHamiltonian, TwoSpeciesState) {
        let g = LatticeGrid::new(1, m, 1.5).unwrap();
        let p = params(g, 0.5, a);
        let s = orbitals(g);
        let (h, _, _) = assemble_hamiltonian(&p, n, n, DEFAULT_CAP).unwrap();
        let psi0 = condensate_state(&s.u, &s.v, n, n, DEFAULT_CAP).unwrap();
        let psi = propagate(&psi0, &h, 0.3, 0.05).unwrap();
        (p, h, psi)
    }

    #[test]
    fn finite_bbgky_residual_is_second_order() {
        let (p, h, psi) = manybody_setup(3, 3, [1.0, 0.6, 0.8]);
        let res = |d: f64| bbgky_residual_finite(&manybody_window(&psi, &h, d).unwrap(), &p, d).unwrap();
        let (r1, r2) = (res(1e-3), res(5e-4));
        assert!(r1 < 1e-6, "{r1}");
        assert!((3.5..4.5).contains(&(r1 / r2)), "{r1} {r2}");

        let (p0, h0, psi0) = manybody_setup(3, 2, [0.0; 3]);
        let r0 = bbgky_residual_finite(&manybody_window(&psi0, &h0, 1e-3).unwrap(), &p0, 1e-3).unwrap();
        assert!(r0 < 1e-6);
    }

    #[test]
    fn finite_bbgky_needs_two_per_species() {
        let (p, h, psi) = manybody_setup(3, 1, [1.0, 0.6, 0.8]);
        assert!(matches!(
            bbgky_residual_finite(&manybody_window(&psi, &h, 1e-3).unwrap(), &p, 1e-3),
            Err(Error::OrderExceedsParticles { .. })
        ));
    }

    #[test]
    fn infinite_hierarchy_on_hartree_solution() {
        let g = LatticeGrid::new(1, 4, 1.5).unwrap();
        let p = params(g, 0.4, [1.0, 0.6, 0.8]);
        let s = orbitals(g);
        let res = |dt: f64| {
            let traj = evolve(&s, &p, 0.5, dt, Method::Strang, 1).unwrap();
            let n = traj.len() / 2;
            let w = [traj[n - 1].clone(), traj[n].clone(), traj[n + 1].clone()];
            infinite_hierarchy_residual(&w, &p, dt).unwrap()
        };
        let (r1, r2) = (res(1e-3), res(5e-4));
        assert!(r1 < 1e-5 && r2 < r1, "{r1} {r2}");

        let frozen = [s.clone(), s.clone(), s.clone()];
        assert!(infinite_hierarchy_residual(&frozen, &p, 1e-3).unwrap() > 1e-3);

        let mut report = ResidualReport::default();
        report.insert(0.25, ResidualEntry { delta: 1e-3, finite: None, infinite: Some(r1) });
        let json: serde_json::Value = serde_json::from_str(&report.to_json().unwrap()).unwrap();
        assert!(json["residuals"]["0.250000"]["infinite"].is_number());
    }
}
