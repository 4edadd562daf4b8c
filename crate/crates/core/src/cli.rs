//! Command-line runners. Each runner writes its outputs atomically under the output
//! directory and returns a summary; [`main_from_args`] maps errors to exit codes.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{gronwall_f, GronwallCertificate, KernelNorms, Measured};
use crate::config::{energy_weights, sha256_hex, ExperimentConfig, Provenance};
use crate::error::{Error, Result};
use crate::fock::{assemble_hamiltonian, condensate_state, expectation, pair_tables, propagate_sampled};
use crate::hartree::{evolve, evolve_with, write_trajectory_csv, HartreePair};
use crate::lattice::RealField;
use crate::rdm::{indicator_row, write_indicator_csv, IndicatorRow};
use crate::scaling::{energy_conservation_check, Drift};
use crate::verify::{self, Suite, VerifyOptions, VerifyReport};

pub const THREADS_ENV: &str = "MIXTUREMF_THREADS";
const DEFAULT_OUT: &str = "mixturemf-out";

#[derive(Debug, Parser)]
#[command(name = "mixturemf", version, about = "Two-species mean-field dynamics and many-body checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output directory (overrides `output.dir`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed (overrides the config seed).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; falls back to MIXTUREMF_THREADS.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the coupled Hartree system.
    Hartree {
        #[arg(long)]
        config: PathBuf,
    },
    /// Exact lattice dynamics with indicators and the envelope certificate.
    Manybody {
        #[arg(long)]
        config: PathBuf,
    },
    /// Many-body runs over the population sweep.
    Converge {
        #[arg(long)]
        config: PathBuf,
    },
    /// Randomized checks of the inequalities.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, hide = true, allow_hyphen_values = true)]
        inject_slack: Option<f64>,
    },
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config { .. } => 2,
        Error::NonFinite { .. } => 3,
        Error::CapExceeded { .. } | Error::OrderExceedsParticles { .. } => 4,
        _ => 1,
    }
}

/// Parse, run, report. Returns the process exit code.
pub fn main_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(&cli) {
        Ok(lines) => {
            for l in lines {
                println!("{l}");
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<Vec<String>> {
    configure_threads(cli.threads)?;
    match &cli.command {
        Command::Hartree { config } => {
            let cfg = ExperimentConfig::from_path(config)?;
            let out = out_dir(cli, &cfg);
            let r = run_hartree(&cfg, &out, cli.seed.unwrap_or(cfg.seed))?;
            Ok(vec![
                format!("wrote {}", out.join(HARTREE_CSV).display()),
                format!("norm drift {:.3e}, energy drift {:.3e}", r.norm_drift, r.energy.value),
            ])
        }
        Command::Manybody { config } => {
            let cfg = ExperimentConfig::from_path(config)?;
            let out = out_dir(cli, &cfg);
            let r = run_manybody(&cfg, &out, cli.seed.unwrap_or(cfg.seed))?;
            certificate_verdict(&r.certificate)?;
            let last = r.rows.last().map(|x| x.alpha11()).unwrap_or(f64::NAN);
            Ok(vec![
                format!("wrote {} and {}", out.join(INDICATORS_CSV).display(), out.join(CERTIFICATE_JSON).display()),
                format!("alpha11(T) = {last:.6e}, certificate pass"),
            ])
        }
        Command::Converge { config } => {
            let cfg = ExperimentConfig::from_path(config)?;
            let out = out_dir(cli, &cfg);
            let r = run_converge(&cfg, &out, cli.seed.unwrap_or(cfg.seed))?;
            for c in &r.certificates {
                certificate_verdict(c)?;
            }
            let mut lines = vec![format!("wrote {}", out.join(CONVERGENCE_CSV).display())];
            lines.extend(
                r.rows
                    .iter()
                    .map(|x| format!("N = {:>3}  max alpha11 = {:.6e}  alpha*N = {:.6e}", x.total, x.max_alpha11, x.scaled)),
            );
            Ok(lines)
        }
        Command::Verify { suite, inject_slack } => {
            let suite: Suite = suite.parse()?;
            let mut opts = VerifyOptions::new(cli.seed.unwrap_or(0));
            if let Some(s) = inject_slack {
                opts = opts.with_slack(*s);
            }
            let out = cli.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
            let report = run_verify(suite, &opts, &out)?;
            let summary = format!("wrote {}", out.join(VERIFY_JSON).display());
            report.into_result()?;
            Ok(vec![summary, format!("suite {suite}: pass")])
        }
    }
}

fn out_dir(cli: &Cli, cfg: &ExperimentConfig) -> PathBuf {
    cli.out
        .clone()
        .or_else(|| cfg.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

fn configure_threads(flag: Option<usize>) -> Result<()> {
    let n = match flag {
        Some(n) => n,
        None => match std::env::var(THREADS_ENV) {
            Ok(s) => s
                .trim()
                .parse()
                .map_err(|_| Error::config(THREADS_ENV, format!("expected a thread count, got {s:?}")))?,
            Err(_) => return Ok(()),
        },
    };
    if n == 0 {
        return Err(Error::config("threads", "must be at least 1"));
    }
    // The global pool can only be built once per process; later calls keep the first size.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn certificate_verdict(cert: &GronwallCertificate) -> Result<()> {
    crate::bounds::envelope_check(cert).map_err(|e| match e {
        Error::Violation { name, lhs, rhs, slack } => Error::Violation {
            name: format!("N1 = {}, N2 = {}: {name}", cert.n1, cert.n2),
            lhs,
            rhs,
            slack,
        },
        other => other,
    })
}

/// Write via a sibling temp file and rename, so readers never see partial output.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, meta: &Provenance, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(&meta.attach(value)?)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

pub const HARTREE_CSV: &str = "hartree.csv";
pub const INDICATORS_CSV: &str = "indicators.csv";
pub const CERTIFICATE_JSON: &str = "certificate.json";
pub const CONVERGENCE_CSV: &str = "convergence.csv";
pub const VERIFY_JSON: &str = "verify.json";

#[derive(Clone, Debug)]
pub struct HartreeOutcome {
    pub trajectory: Vec<HartreePair>,
    pub norm_drift: f64,
    pub energy: Drift,
}

/// Integrate the flow selected by `cfg.weights` and write `hartree.csv`.
pub fn run_hartree(cfg: &ExperimentConfig, out: &Path, seed: u64) -> Result<HartreeOutcome> {
    let params = cfg.params()?;
    let state = cfg.initial_state()?;
    let flow = cfg.weights.flow(&params)?;
    let ig = &cfg.integrator;
    let trajectory = evolve_with(&state, &params, &flow, ig.t_final, ig.dt, ig.method, ig.stride)?;
    let k = energy_weights(cfg.weights, params.c1())?;
    let mut buf = Vec::new();
    write_trajectory_csv(&mut buf, &cfg.provenance(seed).lines(), &trajectory, &params, k)?;
    write_atomic(&out.join(HARTREE_CSV), &buf)?;
    let norm_drift = trajectory
        .iter()
        .map(|s| (s.u.norm() - 1.0).abs().max((s.v.norm() - 1.0).abs()))
        .fold(0.0, f64::max);
    let energy = energy_conservation_check(&trajectory, &params, cfg.weights)?;
    Ok(HartreeOutcome { trajectory, norm_drift, energy })
}

#[derive(Clone, Debug)]
pub struct ManybodyOutcome {
    pub rows: Vec<IndicatorRow>,
    pub certificate: GronwallCertificate,
    /// Largest `| ||Psi(t)|| - 1 |` over the samples.
    pub norm_drift: f64,
    /// Largest relative change of `<Psi(t), H Psi(t)>` over the samples.
    pub energy_drift: f64,
}

/// Exact dynamics from the condensate of the initial orbitals, sampled on the Hartree grid.
pub fn manybody_pipeline(cfg: &ExperimentConfig, n1: usize, n2: usize, max_order: usize) -> Result<ManybodyOutcome> {
    if n1.min(n2) < max_order {
        return Err(Error::OrderExceedsParticles {
            k1: max_order,
            k2: max_order,
            n1,
            n2,
        });
    }
    let c1 = n1 as f64 / (n1 + n2) as f64;
    let params = cfg.params_with_fraction(c1)?;
    let start = cfg.initial_state()?;
    let ig = &cfg.integrator;
    let traj = evolve(&start, &params, ig.t_final, ig.dt, ig.method, ig.stride)?;
    let (h, _, _) = assemble_hamiltonian(&params, n1, n2, cfg.manybody.cap)?;
    let psi0 = condensate_state(&start.u, &start.v, n1, n2, cfg.manybody.cap)?;

    let mut rows = Vec::with_capacity(traj.len());
    let mut norm_drift: f64 = 0.0;
    let mut energy_drift: f64 = 0.0;
    let e0 = expectation(&psi0, &h)?;
    propagate_sampled(&psi0, &h, ig.t_final, ig.dt, ig.stride, |s| {
        let hp = traj
            .get(rows.len())
            .ok_or_else(|| Error::invalid("manybody", "more many-body samples than Hartree samples"))?;
        if (hp.t - s.time).abs() > 1e-9 {
            return Err(Error::invalid("manybody", format!("sample times differ: {} vs {}", hp.t, s.time)));
        }
        norm_drift = norm_drift.max((s.norm() - 1.0).abs());
        energy_drift = energy_drift.max((expectation(s, &h)? - e0).abs() / e0.abs().max(f64::MIN_POSITIVE));
        rows.push(indicator_row(s, &hp.u, &hp.v, max_order)?);
        Ok(())
    })?;

    let g = *params.grid();
    let [t1, t2, t12] = pair_tables(&params);
    let pairs = cfg.bounds.pairs();
    let norms = KernelNorms::new(
        &RealField::from_values(g, t1)?,
        &RealField::from_values(g, t2)?,
        &RealField::from_values(g, t12)?,
        &pairs,
    )?;
    let f = gronwall_f(&traj, &norms, &pairs)?;
    let times: Vec<f64> = traj.iter().map(|s| s.t).collect();
    let measured: Vec<Measured> = rows
        .iter()
        .map(|r| Measured {
            t: r.t,
            alpha: r.alpha11(),
            r11: r.r11,
        })
        .collect();
    let certificate = GronwallCertificate::new(cfg.kappa(c1)?, n1, n2, &measured, &f, &times)?;
    Ok(ManybodyOutcome {
        rows,
        certificate,
        norm_drift,
        energy_drift,
    })
}

/// Single many-body run; writes `indicators.csv` and `certificate.json`.
pub fn run_manybody(cfg: &ExperimentConfig, out: &Path, seed: u64) -> Result<ManybodyOutcome> {
    let (n1, n2) = cfg.populations()?;
    let outcome = manybody_pipeline(cfg, n1, n2, cfg.manybody.max_order)?;
    let meta = cfg.provenance(seed);
    write_run(out, INDICATORS_CSV, CERTIFICATE_JSON, &meta, &outcome)?;
    Ok(outcome)
}

fn write_run(out: &Path, csv: &str, json: &str, meta: &Provenance, r: &ManybodyOutcome) -> Result<()> {
    let mut buf = Vec::new();
    write_indicator_csv(&mut buf, &meta.lines(), &r.rows)?;
    write_atomic(&out.join(csv), &buf)?;
    write_json(&out.join(json), meta, &r.certificate)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n1: usize,
    pub n2: usize,
    pub total: usize,
    pub max_alpha11: f64,
    /// `max_alpha11 * (N1 + N2)`.
    pub scaled: f64,
}

#[derive(Clone, Debug)]
pub struct ConvergeOutcome {
    pub rows: Vec<ConvergenceRow>,
    pub certificates: Vec<GronwallCertificate>,
    /// Worst many-body norm and energy drift over all runs.
    pub norm_drift: f64,
    pub energy_drift: f64,
}

/// Sweep sizes run in parallel; rows keep the sweep order, so output is thread-count independent.
pub fn run_converge(cfg: &ExperimentConfig, out: &Path, seed: u64) -> Result<ConvergeOutcome> {
    let sizes = cfg.sweep()?;
    let runs: Vec<ManybodyOutcome> = sizes
        .par_iter()
        .map(|&(n1, n2)| manybody_pipeline(cfg, n1, n2, 1))
        .collect::<Result<_>>()?;
    let meta = cfg.provenance(seed);
    let mut rows = Vec::with_capacity(runs.len());
    for (&(n1, n2), r) in sizes.iter().zip(&runs) {
        write_run(
            out,
            &format!("indicators_{n1}_{n2}.csv"),
            &format!("certificate_{n1}_{n2}.json"),
            &meta,
            r,
        )?;
        let max_alpha11 = r.rows.iter().map(|x| x.alpha11()).fold(0.0, f64::max);
        rows.push(ConvergenceRow {
            n1,
            n2,
            total: n1 + n2,
            max_alpha11,
            scaled: max_alpha11 * (n1 + n2) as f64,
        });
    }
    let mut buf = Vec::new();
    for line in meta.lines() {
        writeln!(buf, "# {line}")?;
    }
    writeln!(buf, "N1,N2,N,max_alpha11,alpha11_times_N")?;
    for r in &rows {
        writeln!(buf, "{},{},{},{:.15e},{:.15e}", r.n1, r.n2, r.total, r.max_alpha11, r.scaled)?;
    }
    write_atomic(&out.join(CONVERGENCE_CSV), &buf)?;
    let norm_drift = runs.iter().map(|r| r.norm_drift).fold(0.0, f64::max);
    let energy_drift = runs.iter().map(|r| r.energy_drift).fold(0.0, f64::max);
    let certificates = runs.into_iter().map(|r| r.certificate).collect();
    Ok(ConvergeOutcome {
        rows,
        certificates,
        norm_drift,
        energy_drift,
    })
}

/// Run a verification suite and write `verify.json`; the report is returned even when it fails.
pub fn run_verify(suite: Suite, opts: &VerifyOptions, out: &Path) -> Result<VerifyReport> {
    let report = verify::run(suite, opts)?;
    let hash = sha256_hex(serde_json::to_string(opts)?.as_bytes());
    write_json(&out.join(VERIFY_JSON), &Provenance::new(hash, opts.seed), &report)?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::config("bounds.r1", "x")), 2);
        assert_eq!(exit_code(&Error::NonFinite { t: 0.0, context: String::new() }), 3);
        assert_eq!(exit_code(&Error::CapExceeded { required: 2, cap: 1 }), 4);
        assert_eq!(exit_code(&Error::invalid("x", "y")), 1);
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a/b.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read(&p).unwrap(), b"two");
        assert!(!dir.path().join("a/b.txt.tmp").exists());
    }

    #[test]
    fn unknown_suite_is_a_config_error() {
        let dir = tempfile::tempdir().unwrap();
        let code = main_from_args(["mixturemf", "verify", "--suite", "nope", "--out", dir.path().to_str().unwrap()]);
        assert_eq!(code, 2);
    }
}
