//! `L^r + L^s` norms, convolution bounds, and the Grönwall envelope for `α^{(1,1)}`.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::hartree::HartreePair;
use crate::lattice::{convolve, lp_norm, ComplexField, RealField};

/// `r̂` with `1/r + 1/r̂ = 1/2`.
pub fn conjugate(r: f64) -> f64 {
    if r == 2.0 {
        f64::INFINITY
    } else if r.is_infinite() {
        2.0
    } else {
        2.0 * r / (r - 2.0)
    }
}

/// Exponents `2 ≤ r ≤ s ≤ ∞` for one interaction kernel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentPair {
    #[serde(with = "exponent")]
    pub r: f64,
    #[serde(with = "exponent")]
    pub s: f64,
}

impl Default for ExponentPair {
    fn default() -> Self {
        Self { r: 2.0, s: f64::INFINITY }
    }
}

impl ExponentPair {
    pub fn new(r: f64, s: f64) -> Result<Self> {
        let p = Self { r, s };
        p.validate("r", "s")?;
        Ok(p)
    }

    pub fn validate(&self, r_path: &str, s_path: &str) -> Result<()> {
        if self.r.is_nan() || self.r < 2.0 {
            return Err(Error::config(r_path, format!("r = {} must be >= 2", self.r)));
        }
        if self.s.is_nan() || self.r > self.s {
            return Err(Error::config(r_path, format!("r = {} exceeds s = {}", self.r, self.s)));
        }
        if self.s < 2.0 {
            return Err(Error::config(s_path, format!("s = {} must be >= 2", self.s)));
        }
        Ok(())
    }

    pub fn r_hat(&self) -> f64 {
        conjugate(self.r)
    }
    pub fn s_hat(&self) -> f64 {
        conjugate(self.s)
    }
}

/// Exponent pairs for `V1`, `V2`, `V12`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentPairs {
    #[serde(default)]
    pub v1: ExponentPair,
    #[serde(default)]
    pub v2: ExponentPair,
    #[serde(default)]
    pub v12: ExponentPair,
}

impl ExponentPairs {
    /// Validate with config paths `{prefix}.r1`, `{prefix}.s12`, ...
    pub fn validate(&self, prefix: &str) -> Result<()> {
        for (pair, tag) in [(&self.v1, "1"), (&self.v2, "2"), (&self.v12, "12")] {
            pair.validate(&format!("{prefix}.r{tag}"), &format!("{prefix}.s{tag}"))?;
        }
        Ok(())
    }
}

/// Serde for exponents: a number or the string `"inf"`.
mod exponent {
    use super::*;

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if x.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*x)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(x),
            Raw::Text(t) if t == "inf" || t == "infinity" => Ok(f64::INFINITY),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("invalid exponent `{t}`"))),
        }
    }
}

fn weighted_power_sums(sorted: &[f64], p: f64, vmax: f64) -> Vec<f64> {
    // prefix[i] = Σ_{j<i} (x_j / vmax)^p
    let mut out = Vec::with_capacity(sorted.len() + 1);
    out.push(0.0);
    let mut acc = 0.0;
    for &x in sorted {
        acc += (x / vmax).powf(p);
        out.push(acc);
    }
    out
}

/// Upper bound on `‖V‖_{L^r + L^s}` from threshold splits `V = V 1_{|V|>τ} + V 1_{|V|≤τ}`,
/// `τ` ranging over `0` and the distinct values of `|V|`. Exact for `r = s`.
pub fn lrs_norm(v: &RealField, r: f64, s: f64) -> Result<f64> {
    ExponentPair::new(r, s)?;
    if r == s {
        return lp_norm(v, r);
    }
    let w = v.grid().cell_volume();
    let mut mags: Vec<f64> = v.values().iter().map(|x| x.abs()).collect();
    mags.sort_by(f64::total_cmp);
    let vmax = *mags.last().unwrap_or(&0.0);
    if vmax == 0.0 {
        return Ok(0.0);
    }
    let n = mags.len();
    let norm_of = |sums: &[f64], lo: usize, hi: usize, p: f64| -> f64 {
        if lo >= hi {
            return 0.0;
        }
        if p.is_infinite() {
            return mags[hi - 1];
        }
        vmax * (w * (sums[hi] - sums[lo])).powf(1.0 / p)
    };
    let sr = if r.is_finite() { weighted_power_sums(&mags, r, vmax) } else { Vec::new() };
    let ss = if s.is_finite() { weighted_power_sums(&mags, s, vmax) } else { Vec::new() };
    // Split index i: entries [0, i) form the L^s part (|V| ≤ τ), [i, n) the L^r part.
    let mut best = f64::INFINITY;
    let mut i = 0;
    loop {
        let upper = norm_of(&sr, i, n, r);
        let lower = norm_of(&ss, 0, i, s);
        best = best.min(upper + lower);
        if i == n {
            break;
        }
        // Advance past every entry equal to the next threshold.
        let tau = mags[i];
        while i < n && mags[i] <= tau {
            i += 1;
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvolutionReport {
    pub lrs: f64,
    pub phi_norms: f64,
    /// `‖V ⋆ |φ|²‖_∞` and its bound.
    pub lhs1: f64,
    pub rhs1: f64,
    /// `‖V² ⋆ |φ|²‖_∞` and its bound.
    pub lhs2: f64,
    pub rhs2: f64,
}

impl ConvolutionReport {
    pub fn worst_excess(&self) -> f64 {
        (self.lhs1 - self.rhs1).max(self.lhs2 - self.rhs2)
    }
}

/// Evaluate both sides of the two convolution bounds for a unit `φ`.
pub fn verify_convolution_bounds(v: &RealField, phi: &ComplexField, pair: ExponentPair) -> Result<ConvolutionReport> {
    phi.check_normalized("phi", 1e-10)?;
    let lrs = lrs_norm(v, pair.r, pair.s)?;
    let phi_norms = lp_norm(phi, pair.r_hat())? + lp_norm(phi, pair.s_hat())?;
    let rho = phi.density();
    let lhs1 = convolve(v, &rho)?.max_modulus();
    let v2 = v.map(|x| x * x);
    let lhs2 = convolve(&v2, &rho)?.max_modulus();
    Ok(ConvolutionReport {
        lrs,
        phi_norms,
        lhs1,
        rhs1: lrs * phi_norms,
        lhs2,
        rhs2: 2.0 * lrs * lrs * phi_norms * phi_norms,
    })
}

/// Kernels entering the Grönwall integrand.
#[derive(Clone, Copy, Debug)]
pub struct KernelNorms {
    pub v1: f64,
    pub v2: f64,
    pub v12: f64,
}

impl KernelNorms {
    pub fn new(v1: &RealField, v2: &RealField, v12: &RealField, pairs: &ExponentPairs) -> Result<Self> {
        Ok(Self {
            v1: lrs_norm(v1, pairs.v1.r, pairs.v1.s)?,
            v2: lrs_norm(v2, pairs.v2.r, pairs.v2.s)?,
            v12: lrs_norm(v12, pairs.v12.r, pairs.v12.s)?,
        })
    }
}

/// Integrand of `f(t)` at one Hartree state.
pub fn gronwall_integrand(state: &HartreePair, norms: &KernelNorms, pairs: &ExponentPairs) -> Result<f64> {
    let two = |f: &ComplexField, p: &crate::bounds::ExponentPair| -> Result<f64> {
        Ok(lp_norm(f, p.r_hat())? + lp_norm(f, p.s_hat())?)
    };
    let (u, v) = (&state.u, &state.v);
    Ok(norms.v1 * two(u, &pairs.v1)?
        + norms.v2 * two(v, &pairs.v2)?
        + norms.v12 * (two(u, &pairs.v12)? + two(v, &pairs.v12)?))
}

/// Cumulative trapezoidal `f(t_i)` along a sampled trajectory; `f(t_0) = 0`.
pub fn gronwall_f(traj: &[HartreePair], norms: &KernelNorms, pairs: &ExponentPairs) -> Result<Vec<f64>> {
    if traj.is_empty() {
        return Err(Error::invalid("trajectory", "empty"));
    }
    let g: Vec<f64> = traj.iter().map(|s| gronwall_integrand(s, norms, pairs)).collect::<Result<_>>()?;
    Ok(cumulative_trapezoid(&traj.iter().map(|s| s.t).collect::<Vec<_>>(), &g))
}

pub fn cumulative_trapezoid(t: &[f64], g: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(g.len());
    let mut acc = 0.0;
    out.push(0.0);
    for i in 1..g.len() {
        acc += 0.5 * (g[i] + g[i - 1]) * (t[i] - t[i - 1]);
        out.push(acc);
    }
    out
}

/// Default Grönwall rate `16 (1/c1 + 1/c2)`.
pub fn kappa_default(c1: f64, c2: f64) -> Result<f64> {
    if !(c1 > 0.0 && c2 > 0.0) {
        return Err(Error::invalid("c1/c2", "default kappa needs both fractions positive"));
    }
    Ok(16.0 * (1.0 / c1 + 1.0 / c2))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificateSample {
    pub t: f64,
    pub alpha: f64,
    pub r11: f64,
    pub f: f64,
    pub envelope: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GronwallCertificate {
    pub kappa: f64,
    #[serde(rename = "N1")]
    pub n1: usize,
    #[serde(rename = "N2")]
    pub n2: usize,
    pub samples: Vec<CertificateSample>,
    pub pass: bool,
}

/// Series of `(t, α^{(1,1)}, R^{(1,1)})` measured on the many-body side.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Measured {
    pub t: f64,
    pub alpha: f64,
    pub r11: f64,
}

impl GronwallCertificate {
    /// `envelope(t) = (α(0) + 1/(N1+N2)) exp(κ f(t))`, with `f` sampled at the measured times.
    pub fn new(kappa: f64, n1: usize, n2: usize, measured: &[Measured], f: &[f64], f_times: &[f64]) -> Result<Self> {
        if measured.is_empty() || measured.len() != f.len() || f.len() != f_times.len() {
            return Err(Error::invalid("certificate", "measured and f series differ in length"));
        }
        if !(kappa > 0.0) {
            return Err(Error::invalid("kappa", "must be positive"));
        }
        for (m, &t) in measured.iter().zip(f_times) {
            if (m.t - t).abs() > 1e-9 {
                return Err(Error::invalid("certificate", format!("time grids differ at t = {}", m.t)));
            }
        }
        let base = measured[0].alpha + 1.0 / (n1 + n2) as f64;
        let samples: Vec<CertificateSample> = measured
            .iter()
            .zip(f)
            .map(|(m, &fv)| CertificateSample {
                t: m.t,
                alpha: m.alpha,
                r11: m.r11,
                f: fv,
                envelope: base * (kappa * fv).exp(),
            })
            .collect();
        let mut cert = Self {
            kappa,
            n1,
            n2,
            samples,
            pass: false,
        };
        cert.pass = cert.first_violation().is_none();
        Ok(cert)
    }

    /// First sample with `α > envelope` or `R > 2 sqrt(envelope)`, with the failing quantity.
    pub fn first_violation(&self) -> Option<(&CertificateSample, &'static str)> {
        self.samples.iter().find_map(|s| {
            if s.alpha > s.envelope {
                Some((s, "alpha11 <= envelope"))
            } else if s.r11 > 2.0 * s.envelope.sqrt() {
                Some((s, "R11 <= 2 sqrt(envelope)"))
            } else {
                None
            }
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Fails with the first offending time.
pub fn envelope_check(cert: &GronwallCertificate) -> Result<()> {
    match cert.first_violation() {
        None => Ok(()),
        Some((s, name)) => {
            let (lhs, rhs) = if name.starts_with("alpha") {
                (s.alpha, s.envelope)
            } else {
                (s.r11, 2.0 * s.envelope.sqrt())
            };
            Err(Error::Violation {
                name: format!("{name} at t = {}", s.t),
                lhs,
                rhs,
                slack: 0.0,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hartree::{evolve, Method, MixtureParams};
    use crate::lattice::{KernelProfile, LatticeGrid, OrbitalShape};
    use crate::sampling::{random_orbital, uniform_table};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn conjugates() {
        assert_eq!(conjugate(2.0), f64::INFINITY);
        assert_eq!(conjugate(f64::INFINITY), 2.0);
        assert!((conjugate(4.0) - 4.0).abs() < 1e-15);
        assert!((conjugate(3.0) - 6.0).abs() < 1e-15);
    }

    #[test]
    fn pair_validation_names_fields() {
        let bad = ExponentPairs {
            v1: ExponentPair { r: 5.0, s: 3.0 },
            ..Default::default()
        };
        match bad.validate("bounds") {
            Err(Error::Config { path, .. }) => assert_eq!(path, "bounds.r1"),
            other => panic!("{other:?}"),
        }
        let bad = ExponentPairs {
            v12: ExponentPair { r: 1.0, s: 3.0 },
            ..Default::default()
        };
        assert!(matches!(bad.validate("bounds"), Err(Error::Config { path, .. }) if path == "bounds.r12"));
        let json = r#"{"v1":{"r":2,"s":"inf"},"v2":{"r":3,"s":6}}"#;
        let p: ExponentPairs = serde_json::from_str(json).unwrap();
        assert_eq!(p.v1.s, f64::INFINITY);
        assert_eq!(p.v12, ExponentPair::default());
        let back = serde_json::to_string(&p).unwrap();
        assert!(back.contains("\"inf\""));
    }

    #[test]
    fn lrs_examples() {
        let g = LatticeGrid::new(1, 16, 0.5).unwrap();
        let v = KernelProfile::Gaussian { amplitude: 1.5, sigma: 1.3 }.sample(g);
        for r in [2.0, 3.0, f64::INFINITY] {
            assert_eq!(lrs_norm(&v, r, r).unwrap(), lp_norm(&v, r).unwrap());
        }
        assert!(lrs_norm(&v, 2.0, f64::INFINITY).unwrap() <= v.max_modulus() + 1e-15);
        assert!(lrs_norm(&v, 2.0, 4.0).unwrap() <= lp_norm(&v, 2.0).unwrap() + 1e-15);
        assert!(lrs_norm(&v, 2.0, 4.0).unwrap() <= lp_norm(&v, 4.0).unwrap() + 1e-15);
        assert_eq!(lrs_norm(&RealField::zeros(g), 2.0, 3.0).unwrap(), 0.0);
        assert!(lrs_norm(&v, 3.0, 2.0).is_err());
    }

    /// Exhaustive split search on a refined threshold grid, plus all subsets for tiny inputs.
    fn oracle_lrs(v: &RealField, r: f64, s: f64) -> f64 {
        let vmax = v.max_modulus();
        let mut best = f64::INFINITY;
        for i in 0..=20000 {
            let tau = vmax * i as f64 / 20000.0;
            let hi = v.map(|x| if x.abs() > tau { x } else { 0.0 });
            let lo = v.map(|x| if x.abs() <= tau { x } else { 0.0 });
            best = best.min(lp_norm(&hi, r).unwrap() + lp_norm(&lo, s).unwrap());
        }
        best
    }

    #[test]
    fn lrs_matches_refined_grid_on_spike_plus_tail() {
        let g = LatticeGrid::line(32).unwrap();
        let v = RealField::from_fn(g, |a| {
            let r = g.radius(a);
            if r == 0.0 {
                25.0
            } else {
                0.3 * (-r / 6.0).exp()
            }
        });
        for (r, s) in [(2.0, f64::INFINITY), (2.0, 4.0), (3.0, 8.0)] {
            let a = lrs_norm(&v, r, s).unwrap();
            let b = oracle_lrs(&v, r, s);
            assert!((a - b).abs() <= 1e-6 * b, "{r},{s}: {a} vs {b}");
        }
    }

    #[test]
    fn convolution_bound_examples() {
        let g = LatticeGrid::line(8).unwrap();
        let phi = OrbitalShape::Gaussian { center: vec![2.0], width: 1.0, momentum: vec![0.3] }.sample(g).unwrap();
        let rep = verify_convolution_bounds(&RealField::zeros(g), &phi, ExponentPair::default()).unwrap();
        assert_eq!((rep.lhs1, rep.rhs1, rep.lhs2, rep.rhs2), (0.0, 0.0, 0.0, 0.0));
        let c = RealField::from_fn(g, |_| -0.7);
        let rep = verify_convolution_bounds(&c, &phi, ExponentPair::new(2.0, 4.0).unwrap()).unwrap();
        assert!((rep.lhs1 - 0.7).abs() < 1e-14);
        assert!(rep.worst_excess() <= 0.0);
    }

    #[test]
    fn convolution_bounds_on_random_draws() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..50 {
            let m = rng.random_range(2..12);
            let delta = rng.random_range(0.3..2.0);
            let g = LatticeGrid::new(1, m, delta).unwrap();
            let raw = uniform_table(&mut rng, g.sites(), -3.0, 3.0);
            let v = RealField::from_fn(g, |a| 0.5 * (raw[a] + raw[g.reflect(a)]));
            let phi = random_orbital(&mut rng, g).unwrap();
            let r = 2.0 + rng.random_range(0.0..4.0);
            let s = if rng.random_bool(0.3) { f64::INFINITY } else { r + rng.random_range(0.0..6.0) };
            let rep = verify_convolution_bounds(&v, &phi, ExponentPair::new(r, s).unwrap()).unwrap();
            assert!(rep.worst_excess() <= 1e-10, "{rep:?}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn lrs_is_monotone_sane(vals in proptest::collection::vec(-5.0f64..5.0, 2..16), r in 2.0f64..5.0, ds in 0.0f64..5.0) {
            let g = LatticeGrid::line(vals.len()).unwrap();
            let v = RealField::from_values(g, vals).unwrap();
            let s = r + ds;
            let x = lrs_norm(&v, r, s).unwrap();
            prop_assert!(x <= lp_norm(&v, r).unwrap() * (1.0 + 1e-12) + 1e-15);
            prop_assert!(x <= lp_norm(&v, s).unwrap() * (1.0 + 1e-12) + 1e-15);
            prop_assert!(x >= 0.0);
        }
    }

    fn setup() -> (MixtureParams, HartreePair) {
        let g = LatticeGrid::line(8).unwrap();
        let k = |a: f64| KernelProfile::Gaussian { amplitude: a, sigma: 1.0 }.sample(g);
        let p = MixtureParams::hartree(0.5, k(1.0), k(0.5), k(0.8)).unwrap();
        let u = OrbitalShape::Gaussian { center: vec![2.0], width: 1.0, momentum: vec![0.3] }.sample(g).unwrap();
        let v = OrbitalShape::Gaussian { center: vec![5.0], width: 1.4, momentum: vec![0.0] }.sample(g).unwrap();
        (p, HartreePair::new(u, v).unwrap())
    }

    #[test]
    fn gronwall_f_examples() {
        let (p, s) = setup();
        let pairs = ExponentPairs::default();
        let zero = KernelNorms { v1: 0.0, v2: 0.0, v12: 0.0 };
        let traj = evolve(&s, &p, 0.2, 1e-3, Method::Strang, 10).unwrap();
        assert!(gronwall_f(&traj, &zero, &pairs).unwrap().iter().all(|&x| x == 0.0));
        assert!(gronwall_f(&[], &zero, &pairs).is_err());

        let norms = KernelNorms::new(p.v1(), p.v2(), p.v12(), &pairs).unwrap();
        let frozen: Vec<HartreePair> = (0..5)
            .map(|i| HartreePair { t: i as f64 * 0.1, ..s.clone() })
            .collect();
        let f = gronwall_f(&frozen, &norms, &pairs).unwrap();
        let slope = gronwall_integrand(&s, &norms, &pairs).unwrap();
        for (i, x) in f.iter().enumerate() {
            assert!((x - slope * 0.1 * i as f64).abs() < 1e-13);
        }

        let f = gronwall_f(&traj, &norms, &pairs).unwrap();
        assert!(f.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn gronwall_quadrature_self_convergence() {
        let (p, s) = setup();
        let pairs = ExponentPairs { v1: ExponentPair::new(2.0, 4.0).unwrap(), ..Default::default() };
        let norms = KernelNorms::new(p.v1(), p.v2(), p.v12(), &pairs).unwrap();
        let traj = evolve(&s, &p, 1.0, 1e-3, Method::Strang, 1).unwrap();
        let end = |stride: usize| {
            let sub: Vec<HartreePair> = traj.iter().step_by(stride).cloned().collect();
            *gronwall_f(&sub, &norms, &pairs).unwrap().last().unwrap()
        };
        let (e1, e2, e4) = (end(100), end(50), end(25));
        let ratio = (e1 - e2).abs() / (e2 - e4).abs();
        assert!((3.0..5.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn certificate_examples() {
        let measured: Vec<Measured> = (0..4).map(|i| Measured { t: i as f64 * 0.1, alpha: 0.0, r11: 0.0 }).collect();
        let times: Vec<f64> = measured.iter().map(|m| m.t).collect();
        let f = vec![0.0, 0.1, 0.2, 0.35];
        let cert = GronwallCertificate::new(5.0, 2, 2, &measured, &f, &times).unwrap();
        assert!(cert.pass);
        assert!(cert.samples.windows(2).all(|w| w[1].envelope >= w[0].envelope));
        assert!((cert.samples[0].envelope - 0.25).abs() < 1e-15);
        envelope_check(&cert).unwrap();
        let json: serde_json::Value = serde_json::from_str(&cert.to_json().unwrap()).unwrap();
        assert_eq!(json["N1"], 2);
        assert_eq!(json["samples"].as_array().unwrap().len(), 4);

        let mut bad = measured.clone();
        bad[2].alpha = 0.9;
        let cert = GronwallCertificate::new(1.0, 2, 2, &bad, &f, &times).unwrap();
        assert!(!cert.pass);
        match envelope_check(&cert) {
            Err(Error::Violation { name, .. }) => assert!(name.contains("t = 0.2")),
            other => panic!("{other:?}"),
        }
        // Large κ makes the check vacuous.
        let cert = GronwallCertificate::new(1e3, 2, 2, &bad, &f, &times).unwrap();
        assert!(cert.pass);
        assert!(GronwallCertificate::new(1.0, 2, 2, &bad, &f[..3], &times[..3]).is_err());
        assert_eq!(kappa_default(0.5, 0.5).unwrap(), 64.0);
    }
}
