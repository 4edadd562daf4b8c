//! Coupled effective dynamics for the two condensate orbitals.
//!
//! The default nonlinearity is of Hartree type,
//!
//! ```text
//! i ∂t u = h1 u + (V1 ⋆ |u|²) u + c2 (V12 ⋆ |v|²) u
//! i ∂t v = h2 v + (V2 ⋆ |v|²) v + c1 (V12 ⋆ |u|²) v
//! ```
//!
//! with `h_j = -Δ + U_j`. The local Gross-Pitaevskii variant replaces every
//! convolution `V ⋆ ρ` by `γ ρ`.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{inner, kinetic_apply, ComplexField, Convolver, LatticeGrid, RealField, Spectral};

/// Tolerance on `‖u‖ = ‖v‖ = 1` for the public entry points.
pub const NORM_TOLERANCE: f64 = 1e-6;

const FRACTION_TOLERANCE: f64 = 1e-12;
const EVENNESS_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NonlinearityMode {
    Hartree,
    LocalGp,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GpCouplings {
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma12: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Strang,
    Rk4,
}

#[derive(Clone, Debug)]
enum Channel {
    Kernel(Convolver),
    Local(f64),
}

impl Channel {
    fn apply(&self, density: &RealField) -> Result<RealField> {
        match self {
            Channel::Kernel(c) => c.apply(density),
            Channel::Local(g) => Ok(density.scale(*g)),
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            Channel::Kernel(c) => c.is_zero(),
            Channel::Local(g) => *g == 0.0,
        }
    }
}

/// Population fractions, interaction kernels, traps and the nonlinearity mode.
#[derive(Clone, Debug)]
pub struct MixtureParams {
    c1: f64,
    c2: f64,
    v1: RealField,
    v2: RealField,
    v12: RealField,
    u1: RealField,
    u2: RealField,
    mode: NonlinearityMode,
    gp: GpCouplings,
    ch1: Channel,
    ch2: Channel,
    ch12: Channel,
    spectral: Spectral,
    symbol: Vec<f64>,
}

impl MixtureParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        c1: f64,
        c2: f64,
        v1: RealField,
        v2: RealField,
        v12: RealField,
        u1: RealField,
        u2: RealField,
        mode: NonlinearityMode,
        gp: GpCouplings,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&c1) || !(0.0..=1.0).contains(&c2) {
            return Err(Error::invalid("c1/c2", "population fractions must lie in [0, 1]"));
        }
        if (c1 + c2 - 1.0).abs() > FRACTION_TOLERANCE {
            return Err(Error::invalid("c1/c2", format!("c1 + c2 = {} != 1", c1 + c2)));
        }
        let grid = *v1.grid();
        for (name, f) in [("V2", &v2), ("V12", &v12), ("U1", &u1), ("U2", &u2)] {
            if *f.grid() != grid {
                return Err(Error::GridMismatch(format!("{name} lives on a different grid")));
            }
        }
        for (name, f) in [("V1", &v1), ("V2", &v2), ("V12", &v12)] {
            let d = f.evenness_defect();
            if d > EVENNESS_TOLERANCE {
                return Err(Error::invalid(name, format!("kernel is not even (defect {d:e})")));
            }
        }
        let (ch1, ch2, ch12) = match mode {
            NonlinearityMode::Hartree => (
                Channel::Kernel(Convolver::new(&v1)),
                Channel::Kernel(Convolver::new(&v2)),
                Channel::Kernel(Convolver::new(&v12)),
            ),
            NonlinearityMode::LocalGp => (
                Channel::Local(gp.gamma1),
                Channel::Local(gp.gamma2),
                Channel::Local(gp.gamma12),
            ),
        };
        let spectral = Spectral::new(grid);
        let symbol = spectral.laplacian_symbol();
        Ok(Self {
            c1,
            c2,
            v1,
            v2,
            v12,
            u1,
            u2,
            mode,
            gp,
            ch1,
            ch2,
            ch12,
            spectral,
            symbol,
        })
    }

    /// Hartree-mode parameters with zero traps.
    pub fn hartree(c1: f64, v1: RealField, v2: RealField, v12: RealField) -> Result<Self> {
        let g = *v1.grid();
        Self::new(
            c1,
            1.0 - c1,
            v1,
            v2,
            v12,
            RealField::zeros(g),
            RealField::zeros(g),
            NonlinearityMode::Hartree,
            GpCouplings::default(),
        )
    }

    /// Same parameters with different traps.
    pub fn with_traps(&self, u1: RealField, u2: RealField) -> Result<Self> {
        Self::new(
            self.c1,
            self.c2,
            self.v1.clone(),
            self.v2.clone(),
            self.v12.clone(),
            u1,
            u2,
            self.mode,
            self.gp,
        )
    }

    pub fn grid(&self) -> &LatticeGrid {
        self.v1.grid()
    }
    pub fn c1(&self) -> f64 {
        self.c1
    }
    pub fn c2(&self) -> f64 {
        self.c2
    }
    pub fn v1(&self) -> &RealField {
        &self.v1
    }
    pub fn v2(&self) -> &RealField {
        &self.v2
    }
    pub fn v12(&self) -> &RealField {
        &self.v12
    }
    pub fn u1(&self) -> &RealField {
        &self.u1
    }
    pub fn u2(&self) -> &RealField {
        &self.u2
    }
    pub fn mode(&self) -> NonlinearityMode {
        self.mode
    }
    pub fn gp(&self) -> GpCouplings {
        self.gp
    }

    /// Nonlinear coefficients of the Hartree system itself.
    pub fn hartree_coefficients(&self) -> FlowCoefficients {
        FlowCoefficients {
            self_a: 1.0,
            cross_a: self.c2,
            self_b: 1.0,
            cross_b: self.c1,
        }
    }

    /// `V1 ⋆ ρ` (or `γ1 ρ` in local mode).
    pub fn apply_v1(&self, rho: &RealField) -> Result<RealField> {
        self.ch1.apply(rho)
    }
    pub fn apply_v2(&self, rho: &RealField) -> Result<RealField> {
        self.ch2.apply(rho)
    }
    pub fn apply_v12(&self, rho: &RealField) -> Result<RealField> {
        self.ch12.apply(rho)
    }

    /// True when the species do not interact with each other.
    pub fn is_decoupled(&self) -> bool {
        self.ch12.is_zero()
    }

    fn kinetic_propagator(&self, tau: f64) -> Vec<Complex64> {
        self.symbol
            .iter()
            .map(|&l| Complex64::from_polar(1.0, -l * tau))
            .collect()
    }
}

/// Coefficients multiplying the four convolution terms of a generic-weight flow:
/// `W_u = self_a V1⋆|u|² + cross_a V12⋆|v|²`, `W_v = self_b V2⋆|v|² + cross_b V12⋆|u|²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowCoefficients {
    pub self_a: f64,
    pub cross_a: f64,
    pub self_b: f64,
    pub cross_b: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HartreePair {
    pub u: ComplexField,
    pub v: ComplexField,
    pub t: f64,
}

impl HartreePair {
    pub fn new(u: ComplexField, v: ComplexField) -> Result<Self> {
        if u.grid() != v.grid() {
            return Err(Error::GridMismatch("u and v".into()));
        }
        Ok(Self { u, v, t: 0.0 })
    }

    pub fn check_normalized(&self, tol: f64) -> Result<()> {
        self.u.check_normalized("u", tol)?;
        self.v.check_normalized("v", tol)
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.v.is_finite()
    }
}

pub type Trajectory = Vec<HartreePair>;

fn potentials_unchecked(
    u: &ComplexField,
    v: &ComplexField,
    params: &MixtureParams,
    k: &FlowCoefficients,
) -> Result<(RealField, RealField)> {
    let rho_u = u.density();
    let rho_v = v.density();
    let v12u = params.apply_v12(&rho_u)?;
    let v12v = params.apply_v12(&rho_v)?;
    let wu = params
        .apply_v1(&rho_u)?
        .scale(k.self_a)
        .add_scaled(k.cross_a, &v12v)?;
    let wv = params
        .apply_v2(&rho_v)?
        .scale(k.self_b)
        .add_scaled(k.cross_b, &v12u)?;
    Ok((wu, wv))
}

/// Mean-field potentials `(W_u, W_v)` felt by each orbital.
pub fn effective_potentials(state: &HartreePair, params: &MixtureParams) -> Result<(RealField, RealField)> {
    effective_potentials_with(state, params, &params.hartree_coefficients())
}

pub fn effective_potentials_with(
    state: &HartreePair,
    params: &MixtureParams,
    k: &FlowCoefficients,
) -> Result<(RealField, RealField)> {
    state.check_normalized(NORM_TOLERANCE)?;
    potentials_unchecked(&state.u, &state.v, params, k)
}

fn rhs_unchecked(
    u: &ComplexField,
    v: &ComplexField,
    params: &MixtureParams,
    k: &FlowCoefficients,
) -> Result<(ComplexField, ComplexField)> {
    let (wu, wv) = potentials_unchecked(u, v, params, k)?;
    let mi = Complex64::new(0.0, -1.0);
    let du = kinetic_apply(u)
        .axpy(Complex64::new(1.0, 0.0), &u.multiply(&params.u1.add(&wu)?)?)
        .scale(mi);
    let dv = kinetic_apply(v)
        .axpy(Complex64::new(1.0, 0.0), &v.multiply(&params.u2.add(&wv)?)?)
        .scale(mi);
    Ok((du, dv))
}

/// Time derivative `(-i h^u u, -i h^v v)`.
pub fn rhs(state: &HartreePair, params: &MixtureParams) -> Result<(ComplexField, ComplexField)> {
    rhs_with(state, params, &params.hartree_coefficients())
}

pub fn rhs_with(
    state: &HartreePair,
    params: &MixtureParams,
    k: &FlowCoefficients,
) -> Result<(ComplexField, ComplexField)> {
    state.check_normalized(NORM_TOLERANCE)?;
    rhs_unchecked(&state.u, &state.v, params, k)
}

fn kinetic_substep(f: &mut ComplexField, params: &MixtureParams, prop: &[Complex64]) {
    let data = f.values_mut();
    params.spectral.forward(data);
    data.iter_mut().zip(prop).for_each(|(x, p)| *x *= p);
    params.spectral.inverse(data);
}

fn phase_substep(f: &mut ComplexField, pot: &RealField, dt: f64) {
    f.values_mut()
        .iter_mut()
        .zip(pot.values())
        .for_each(|(x, w)| *x *= Complex64::from_polar(1.0, -w * dt));
}

/// Advance the state by `dt`.
pub fn step(state: &HartreePair, params: &MixtureParams, dt: f64, method: Method) -> Result<HartreePair> {
    step_with(state, params, &params.hartree_coefficients(), dt, method)
}

pub fn step_with(
    state: &HartreePair,
    params: &MixtureParams,
    k: &FlowCoefficients,
    dt: f64,
    method: Method,
) -> Result<HartreePair> {
    if !(dt > 0.0) {
        return Err(Error::invalid("dt", "must be positive"));
    }
    match method {
        Method::Strang => {
            let half = params.kinetic_propagator(dt / 2.0);
            strang_step(state, params, k, dt, &half)
        }
        Method::Rk4 => rk4_step(state, params, k, dt),
    }
}

fn strang_step(
    state: &HartreePair,
    params: &MixtureParams,
    k: &FlowCoefficients,
    dt: f64,
    half: &[Complex64],
) -> Result<HartreePair> {
    let mut u = state.u.clone();
    let mut v = state.v.clone();
    kinetic_substep(&mut u, params, half);
    kinetic_substep(&mut v, params, half);
    // Moduli are invariant under the phase substep, so freezing W is exact.
    let (wu, wv) = potentials_unchecked(&u, &v, params, k)?;
    phase_substep(&mut u, &params.u1.add(&wu)?, dt);
    phase_substep(&mut v, &params.u2.add(&wv)?, dt);
    kinetic_substep(&mut u, params, half);
    kinetic_substep(&mut v, params, half);
    Ok(HartreePair {
        u,
        v,
        t: state.t + dt,
    })
}

fn rk4_step(state: &HartreePair, params: &MixtureParams, k: &FlowCoefficients, dt: f64) -> Result<HartreePair> {
    let one = Complex64::new(1.0, 0.0);
    let c = |x: f64| Complex64::new(x, 0.0);
    let (u0, v0) = (&state.u, &state.v);
    let (k1u, k1v) = rhs_unchecked(u0, v0, params, k)?;
    let (k2u, k2v) = rhs_unchecked(&u0.axpy(c(dt / 2.0), &k1u), &v0.axpy(c(dt / 2.0), &k1v), params, k)?;
    let (k3u, k3v) = rhs_unchecked(&u0.axpy(c(dt / 2.0), &k2u), &v0.axpy(c(dt / 2.0), &k2v), params, k)?;
    let (k4u, k4v) = rhs_unchecked(&u0.axpy(c(dt), &k3u), &v0.axpy(c(dt), &k3v), params, k)?;
    let combine = |x0: &ComplexField, a: &ComplexField, b: &ComplexField, cc: &ComplexField, d: &ComplexField| {
        let incr = a
            .axpy(c(2.0), b)
            .axpy(c(2.0), cc)
            .axpy(one, d)
            .scale(c(dt / 6.0));
        x0.axpy(one, &incr)
    };
    Ok(HartreePair {
        u: combine(u0, &k1u, &k2u, &k3u, &k4u),
        v: combine(v0, &k1v, &k2v, &k3v, &k4v),
        t: state.t + dt,
    })
}

/// Integrate to `t0 + t_final`, keeping every `stride`-th state and the final one.
pub fn evolve(
    state: &HartreePair,
    params: &MixtureParams,
    t_final: f64,
    dt: f64,
    method: Method,
    stride: usize,
) -> Result<Trajectory> {
    evolve_with(state, params, &params.hartree_coefficients(), t_final, dt, method, stride)
}

pub fn evolve_with(
    state: &HartreePair,
    params: &MixtureParams,
    k: &FlowCoefficients,
    t_final: f64,
    dt: f64,
    method: Method,
    stride: usize,
) -> Result<Trajectory> {
    if t_final < 0.0 || !t_final.is_finite() {
        return Err(Error::invalid("T", "must be a non-negative finite time"));
    }
    if !(dt > 0.0) {
        return Err(Error::invalid("dt", "must be positive"));
    }
    if stride == 0 {
        return Err(Error::invalid("stride", "must be at least 1"));
    }
    let steps = (t_final / dt).round() as usize;
    let t0 = state.t;
    let half = params.kinetic_propagator(dt / 2.0);
    let mut out = vec![state.clone()];
    let mut cur = state.clone();
    for n in 1..=steps {
        cur = match method {
            Method::Strang => strang_step(&cur, params, k, dt, &half)?,
            Method::Rk4 => rk4_step(&cur, params, k, dt)?,
        };
        cur.t = t0 + n as f64 * dt;
        if !cur.is_finite() {
            return Err(Error::NonFinite {
                t: cur.t,
                context: format!("Hartree step {n} produced NaN/inf"),
            });
        }
        if n % stride == 0 || n == steps {
            out.push(cur.clone());
        }
    }
    Ok(out)
}

/// `⟨u, h u⟩` with `h = -Δ + trap`.
pub fn one_body_energy(u: &ComplexField, trap: &RealField) -> Result<f64> {
    let hu = kinetic_apply(u).axpy(Complex64::new(1.0, 0.0), &u.multiply(trap)?);
    Ok(inner(u, &hu)?.re)
}

/// `⟨f, (W) f⟩` for a real multiplication potential.
pub(crate) fn potential_expectation(f: &ComplexField, w: &RealField) -> Result<f64> {
    Ok(inner(f, &f.multiply(w)?)?.re)
}

/// Mean-field energy per particle with weights `(k1, k2, k12)`:
/// `c1⟨u,h1u⟩ + c2⟨v,h2v⟩ + c1²k1/2 ⟨u,V1⋆|u|² u⟩ + c2²k2/2 ⟨v,V2⋆|v|² v⟩ + c1c2k12 ⟨u,V12⋆|v|² u⟩`.
pub fn energy_per_particle(state: &HartreePair, params: &MixtureParams, k1: f64, k2: f64, k12: f64) -> Result<f64> {
    state.check_normalized(NORM_TOLERANCE)?;
    energy_unchecked(state, params, k1, k2, k12)
}

pub(crate) fn energy_unchecked(state: &HartreePair, params: &MixtureParams, k1: f64, k2: f64, k12: f64) -> Result<f64> {
    let (c1, c2) = (params.c1, params.c2);
    let (u, v) = (&state.u, &state.v);
    let rho_u = u.density();
    let rho_v = v.density();
    let kin = c1 * one_body_energy(u, &params.u1)? + c2 * one_body_energy(v, &params.u2)?;
    let e1 = potential_expectation(u, &params.apply_v1(&rho_u)?)?;
    let e2 = potential_expectation(v, &params.apply_v2(&rho_v)?)?;
    let e12 = potential_expectation(u, &params.apply_v12(&rho_v)?)?;
    Ok(kin + 0.5 * c1 * c1 * k1 * e1 + 0.5 * c2 * c2 * k2 * e2 + c1 * c2 * k12 * e12)
}

/// Energy with the weights that make the Hartree system its conserved flow.
pub fn hartree_energy(state: &HartreePair, params: &MixtureParams) -> Result<f64> {
    let (k1, k2) = (default_weight(params.c1), default_weight(params.c2));
    energy_per_particle(state, params, k1, k2, 1.0)
}

fn default_weight(c: f64) -> f64 {
    if c > 0.0 {
        1.0 / c
    } else {
        0.0
    }
}

/// Trajectory CSV: comment header lines, then `t,norm_u,norm_v,energy` with energy weights
/// `(k1, k2, k12)`.
pub fn write_trajectory_csv<W: Write>(
    mut w: W,
    header: &[String],
    traj: &[HartreePair],
    params: &MixtureParams,
    [k1, k2, k12]: [f64; 3],
) -> Result<()> {
    for line in header {
        writeln!(w, "# {line}")?;
    }
    writeln!(w, "t,norm_u,norm_v,energy")?;
    for s in traj {
        let e = energy_unchecked(s, params, k1, k2, k12)?;
        writeln!(w, "{:.6},{:.15e},{:.15e},{:.15e}", s.t, s.u.norm(), s.v.norm(), e)?;
    }
    Ok(())
}

/// Per-site dump: `t site re_u im_u re_v im_v`, one line per site and sample.
pub fn write_site_dump<W: Write>(mut w: W, header: &[String], traj: &[HartreePair]) -> Result<()> {
    for line in header {
        writeln!(w, "# {line}")?;
    }
    writeln!(w, "# t site re_u im_u re_v im_v")?;
    for s in traj {
        for (a, (x, y)) in s.u.values().iter().zip(s.v.values()).enumerate() {
            writeln!(w, "{:.6} {} {:.15e} {:.15e} {:.15e} {:.15e}", s.t, a, x.re, x.im, y.re, y.im)?;
        }
    }
    Ok(())
}
