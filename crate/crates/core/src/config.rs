//! Experiment configuration: JSON schema, validation, and derived simulation inputs.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bounds::{kappa_default, ExponentPair, ExponentPairs};
use crate::error::{Error, Result};
use crate::fock::DEFAULT_CAP;
use crate::hartree::{GpCouplings, HartreePair, Method, MixtureParams, NonlinearityMode};
use crate::lattice::{KernelProfile, LatticeGrid, OrbitalShape, TrapProfile};
use crate::scaling::ScalingWeights;

/// Tolerance on `c1 = N1/(N1+N2)` when both are given.
pub const FRACTION_MATCH: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub grid: GridConfig,
    #[serde(default)]
    pub kernels: KernelsConfig,
    #[serde(default = "default_mode")]
    pub mode: NonlinearityMode,
    #[serde(default)]
    pub gp: GpCouplings,
    pub orbitals: OrbitalsConfig,
    pub populations: PopulationsConfig,
    pub integrator: IntegratorConfig,
    #[serde(default)]
    pub manybody: ManybodyConfig,
    #[serde(default)]
    pub bounds: BoundsConfig,
    #[serde(default)]
    pub weights: ScalingWeights,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_mode() -> NonlinearityMode {
    NonlinearityMode::Hartree
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "one")]
    pub dim: usize,
    pub points: usize,
    #[serde(default = "unit")]
    pub spacing: f64,
}

fn one() -> usize {
    1
}
fn unit() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelsConfig {
    #[serde(default = "zero_kernel")]
    pub v1: KernelProfile,
    #[serde(default = "zero_kernel")]
    pub v2: KernelProfile,
    #[serde(default = "zero_kernel")]
    pub v12: KernelProfile,
    #[serde(default = "zero_trap")]
    pub u1: TrapProfile,
    #[serde(default = "zero_trap")]
    pub u2: TrapProfile,
}

impl Default for KernelsConfig {
    fn default() -> Self {
        Self {
            v1: KernelProfile::Zero,
            v2: KernelProfile::Zero,
            v12: KernelProfile::Zero,
            u1: TrapProfile::Zero,
            u2: TrapProfile::Zero,
        }
    }
}

fn zero_kernel() -> KernelProfile {
    KernelProfile::Zero
}
fn zero_trap() -> TrapProfile {
    TrapProfile::Zero
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitalsConfig {
    pub u: OrbitalShape,
    pub v: OrbitalShape,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PopulationsConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n1: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n2: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c1: Option<f64>,
    /// `[N1, N2]` pairs for the convergence sweep.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Vec<[usize; 2]>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_final: f64,
    #[serde(default = "default_method")]
    pub method: Method,
    #[serde(default = "one")]
    pub stride: usize,
}

fn default_method() -> Method {
    Method::Strang
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManybodyConfig {
    #[serde(default = "default_cap")]
    pub cap: usize,
    /// Largest `max(k1, k2)` among the reported indicators.
    #[serde(default = "one")]
    pub max_order: usize,
}

impl Default for ManybodyConfig {
    fn default() -> Self {
        Self {
            cap: DEFAULT_CAP,
            max_order: 1,
        }
    }
}

fn default_cap() -> usize {
    DEFAULT_CAP
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsConfig {
    #[serde(default)]
    pub v1: ExponentPair,
    #[serde(default)]
    pub v2: ExponentPair,
    #[serde(default)]
    pub v12: ExponentPair,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
}

impl BoundsConfig {
    pub fn pairs(&self) -> ExponentPairs {
        ExponentPairs {
            v1: self.v1,
            v2: self.v2,
            v12: self.v12,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Output directory; `--out` takes precedence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Parse and validate; schema errors carry the offending field path.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::config(if path == "." { "<root>".into() } else { path }, e.into_inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::config("<file>", format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        LatticeGrid::new(self.grid.dim, self.grid.points, self.grid.spacing)
            .map_err(|e| Error::config("grid", e.to_string()))?;
        for (name, k) in [("v1", &self.kernels.v1), ("v2", &self.kernels.v2), ("v12", &self.kernels.v12)] {
            k.validate(&format!("kernels.{name}"))?;
        }
        let ig = &self.integrator;
        if !(ig.dt > 0.0 && ig.dt.is_finite()) {
            return Err(Error::config("integrator.dt", "must be positive"));
        }
        if !(ig.t_final >= 0.0 && ig.t_final.is_finite()) {
            return Err(Error::config("integrator.t_final", "must be a non-negative finite time"));
        }
        if ig.stride == 0 {
            return Err(Error::config("integrator.stride", "must be at least 1"));
        }
        if self.manybody.max_order == 0 || self.manybody.max_order > 2 {
            return Err(Error::config("manybody.max_order", "must be 1 or 2"));
        }
        self.bounds.pairs().validate("bounds")?;
        if let Some(k) = self.bounds.kappa {
            if !(k > 0.0 && k.is_finite()) {
                return Err(Error::config("bounds.kappa", "must be positive"));
            }
        }
        self.fraction()?;
        if let Some(sweep) = &self.populations.sweep {
            sweep_fraction(sweep)?;
        }
        Ok(())
    }

    /// `c1`, from explicit populations, the sweep, or `populations.c1`, checked for consistency.
    pub fn fraction(&self) -> Result<f64> {
        let p = &self.populations;
        let from_n = match (p.n1, p.n2) {
            (Some(a), Some(b)) => {
                if a + b == 0 {
                    return Err(Error::config("populations.n1", "N1 + N2 must be positive"));
                }
                Some(a as f64 / (a + b) as f64)
            }
            (None, None) => None,
            (Some(_), None) => return Err(Error::config("populations.n2", "missing while n1 is given")),
            (None, Some(_)) => return Err(Error::config("populations.n1", "missing while n2 is given")),
        };
        let from_sweep = match &p.sweep {
            Some(s) => Some(sweep_fraction(s)?),
            None => None,
        };
        let derived = from_n.or(from_sweep);
        if let (Some(a), Some(b)) = (from_n, from_sweep) {
            if (a - b).abs() > FRACTION_MATCH {
                return Err(Error::config("populations.sweep", format!("ratio {b} differs from N1/(N1+N2) = {a}")));
            }
        }
        match (p.c1, derived) {
            (Some(c), Some(d)) if (c - d).abs() > FRACTION_MATCH => Err(Error::config(
                "populations.c1",
                format!("c1 = {c} but the populations give {d}"),
            )),
            (Some(c), _) if !(0.0..=1.0).contains(&c) => Err(Error::config("populations.c1", "must lie in [0, 1]")),
            (_, Some(d)) => Ok(d),
            (Some(c), None) => Ok(c),
            (None, None) => Err(Error::config("populations", "give n1/n2, a sweep, or c1")),
        }
    }

    pub fn populations(&self) -> Result<(usize, usize)> {
        match (self.populations.n1, self.populations.n2) {
            (Some(a), Some(b)) => Ok((a, b)),
            _ => Err(Error::config("populations.n1", "many-body runs need n1 and n2")),
        }
    }

    pub fn sweep(&self) -> Result<Vec<(usize, usize)>> {
        let s = self
            .populations
            .sweep
            .as_ref()
            .ok_or_else(|| Error::config("populations.sweep", "missing"))?;
        if s.len() < 3 {
            return Err(Error::config("populations.sweep", "needs at least three sizes"));
        }
        Ok(s.iter().map(|&[a, b]| (a, b)).collect())
    }

    pub fn grid(&self) -> Result<LatticeGrid> {
        LatticeGrid::new(self.grid.dim, self.grid.points, self.grid.spacing).map_err(|e| Error::config("grid", e.to_string()))
    }

    /// Mixture parameters with fraction `c1`.
    pub fn params_with_fraction(&self, c1: f64) -> Result<MixtureParams> {
        let g = self.grid()?;
        let k = &self.kernels;
        let trap = |t: &TrapProfile, path: &str| t.sample(g).map_err(|e| Error::config(path, e.to_string()));
        MixtureParams::new(
            c1,
            1.0 - c1,
            k.v1.sample(g),
            k.v2.sample(g),
            k.v12.sample(g),
            trap(&k.u1, "kernels.u1")?,
            trap(&k.u2, "kernels.u2")?,
            self.mode,
            self.gp,
        )
        .map_err(|e| Error::config("kernels", e.to_string()))
    }

    pub fn params(&self) -> Result<MixtureParams> {
        self.params_with_fraction(self.fraction()?)
    }

    pub fn initial_state(&self) -> Result<HartreePair> {
        let g = self.grid()?;
        let u = self.orbitals.u.sample(g).map_err(|e| Error::config("orbitals.u", e.to_string()))?;
        let v = self.orbitals.v.sample(g).map_err(|e| Error::config("orbitals.v", e.to_string()))?;
        HartreePair::new(u, v)
    }

    pub fn kappa(&self, c1: f64) -> Result<f64> {
        match self.bounds.kappa {
            Some(k) => Ok(k),
            None => kappa_default(c1, 1.0 - c1).map_err(|e| Error::config("bounds.kappa", e.to_string())),
        }
    }

    /// SHA-256 of the canonical (re-serialized) configuration.
    pub fn hash(&self) -> String {
        sha256_hex(serde_json::to_string(self).expect("config serializes").as_bytes())
    }

    pub fn provenance(&self, seed: u64) -> Provenance {
        Provenance::new(self.hash(), seed)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Version, config hash, and seed, embedded in every output file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub version: String,
    pub config_sha256: String,
    pub seed: u64,
}

impl Provenance {
    pub fn new(config_sha256: String, seed: u64) -> Self {
        Self {
            version: format!("mixturemf {}", env!("CARGO_PKG_VERSION")),
            config_sha256,
            seed,
        }
    }

    /// Comment lines for CSV outputs.
    pub fn lines(&self) -> Vec<String> {
        vec![
            self.version.clone(),
            format!("config_sha256 {}", self.config_sha256),
            format!("seed {}", self.seed),
        ]
    }

    /// `value` with a top-level `"meta"` entry.
    pub fn attach<T: Serialize>(&self, value: &T) -> Result<serde_json::Value> {
        let mut v = serde_json::to_value(value)?;
        match v.as_object_mut() {
            Some(map) => {
                map.insert("meta".into(), serde_json::to_value(self)?);
                Ok(v)
            }
            None => Err(Error::invalid("report", "expected a JSON object")),
        }
    }
}

fn sweep_fraction(sweep: &[[usize; 2]]) -> Result<f64> {
    let [a0, b0] = *sweep.first().ok_or_else(|| Error::config("populations.sweep", "empty"))?;
    if a0 + b0 == 0 {
        return Err(Error::config("populations.sweep[0]", "N1 + N2 must be positive"));
    }
    for (i, &[a, b]) in sweep.iter().enumerate() {
        if a * b0 != b * a0 || a + b == 0 {
            return Err(Error::config(
                format!("populations.sweep[{i}]"),
                format!("ratio {a}:{b} differs from {a0}:{b0}"),
            ));
        }
    }
    Ok(a0 as f64 / (a0 + b0) as f64)
}

/// Energy weights `(k1, k2, k12)` matching a flow; an empty species gets weight zero
/// under the default prefactors.
pub fn energy_weights(weights: ScalingWeights, c1: f64) -> Result<[f64; 3]> {
    match weights.limits(c1, 1.0 - c1) {
        Err(_) if weights == ScalingWeights::Default => {
            let w = |c: f64| if c > 0.0 { 1.0 / c } else { 0.0 };
            Ok([w(c1), w(1.0 - c1), 1.0])
        }
        other => other.map_err(|e| Error::config("weights", e.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "grid": {"points": 4},
        "orbitals": {"u": {"kind": "uniform"}, "v": {"kind": "plane_wave", "k": [1]}},
        "populations": {"n1": 2, "n2": 2},
        "integrator": {"dt": 0.001, "t_final": 0.01}
    }"#;

    fn with(patch: &str) -> String {
        let mut base: serde_json::Value = serde_json::from_str(MINIMAL).unwrap();
        let p: serde_json::Value = serde_json::from_str(patch).unwrap();
        for (k, v) in p.as_object().unwrap() {
            base[k] = v.clone();
        }
        base.to_string()
    }

    fn path_of(text: &str) -> String {
        match ExperimentConfig::from_json(text) {
            Err(Error::Config { path, .. }) => path,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_config_defaults() {
        let c = ExperimentConfig::from_json(MINIMAL).unwrap();
        assert_eq!(c.fraction().unwrap(), 0.5);
        assert_eq!(c.integrator.method, Method::Strang);
        assert_eq!(c.manybody.cap, DEFAULT_CAP);
        assert_eq!(c.kappa(0.5).unwrap(), 64.0);
        assert_eq!(c.bounds.v1.s, f64::INFINITY);
        assert!(c.params().unwrap().is_decoupled());
        assert_eq!(c.hash().len(), 64);
    }

    #[test]
    fn hash_ignores_formatting() {
        let a = ExperimentConfig::from_json(MINIMAL).unwrap();
        let b = ExperimentConfig::from_json(&MINIMAL.replace(['\n', ' '], "")).unwrap();
        assert_eq!(a.hash(), b.hash());
        let c = ExperimentConfig::from_json(&with(r#"{"seed": 3}"#)).unwrap();
        assert_ne!(a.hash(), c.hash());
        let p = a.provenance(9);
        assert!(p.lines()[0].starts_with("mixturemf "));
        let v = p.attach(&serde_json::json!({"x": 1})).unwrap();
        assert_eq!(v["meta"]["seed"], 9);
        assert!(p.attach(&3).is_err());
        assert_eq!(energy_weights(ScalingWeights::Default, 1.0).unwrap(), [1.0, 0.0, 1.0]);
    }

    #[test]
    fn schema_errors_name_fields() {
        assert_eq!(path_of(&with(r#"{"bounds": {"v1": {"r": 5, "s": 3}}}"#)), "bounds.r1");
        assert_eq!(path_of(&with(r#"{"bounds": {"v12": {"r": 1, "s": 3}}}"#)), "bounds.r12");
        assert_eq!(path_of(&with(r#"{"integrator": {"dt": -1, "t_final": 1}}"#)), "integrator.dt");
        assert_eq!(path_of(&with(r#"{"populations": {"n1": 2, "n2": 2, "c1": 0.3}}"#)), "populations.c1");
        assert_eq!(
            path_of(&with(r#"{"populations": {"sweep": [[2, 2], [4, 4], [6, 5]]}}"#)),
            "populations.sweep[2]"
        );
        assert_eq!(path_of(&with(r#"{"grid": {"points": 4, "bogus": 1}}"#)), "grid.bogus");
        assert_eq!(path_of(&with(r#"{"kernels": {"v1": {"kind": "gaussian", "amplitude": 1, "sigma": 0}}}"#)), "kernels.v1.sigma");
        assert_eq!(path_of(&with(r#"{"integrator": {"dt": "fast", "t_final": 1}}"#)), "integrator.dt");
        assert_eq!(path_of(&with(r#"{"grid": {"points": 0}}"#)), "grid");
        assert_eq!(path_of(&with(r#"{"bounds": {"kappa": -2}}"#)), "bounds.kappa");
    }

    #[test]
    fn sweep_and_infinite_exponents() {
        let c = ExperimentConfig::from_json(&with(
            r#"{"populations": {"sweep": [[1, 2], [2, 4], [3, 6]], "c1": 0.3333333333333333},
                "bounds": {"v2": {"r": 3, "s": "inf"}, "kappa": 5}}"#,
        ))
        .unwrap();
        assert_eq!(c.sweep().unwrap(), vec![(1, 2), (2, 4), (3, 6)]);
        assert!(c.populations().is_err());
        assert_eq!(c.kappa(0.3).unwrap(), 5.0);
        let short = ExperimentConfig::from_json(&with(r#"{"populations": {"sweep": [[1, 1], [2, 2]]}}"#)).unwrap();
        assert!(matches!(short.sweep(), Err(Error::Config { .. })));
    }
}
