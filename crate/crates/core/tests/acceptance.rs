//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
//!
//! Run with `cargo test --release -p mixturemf --test acceptance`.

mod common;

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use mixturemf::cli::{run_converge, run_hartree, ConvergeOutcome};
use mixturemf::config::ExperimentConfig;
use mixturemf::fock::{assemble_hamiltonian, condensate_state, expectation, SectorBasis, TwoSpeciesState, DEFAULT_CAP};
use mixturemf::hartree::MixtureParams;
use mixturemf::lattice::{KernelProfile, LatticeGrid, TrapProfile};
use mixturemf::rdm::reduced_density;
use mixturemf::sampling::{haar_vector, random_orbital};
use mixturemf::scaling::finite_n_energy;
use mixturemf::verify::{run, Suite, SuiteReport, VerifyOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20240611;

struct Outcome {
    pass: bool,
    detail: String,
}

fn config_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/acceptance.json")
}

fn suite_outcome(report: &SuiteReport) -> Outcome {
    let worst = report
        .checks
        .iter()
        .max_by(|a, b| (a.value - a.limit).total_cmp(&(b.value - b.limit)))
        .map(|c| format!("tightest: {} (value {:.3e}, limit {:.1e})", c.name, c.value, c.limit))
        .unwrap_or_default();
    Outcome {
        pass: report.pass,
        detail: match report.checks.iter().find(|c| !c.pass) {
            Some(c) => format!("{} draws; failed: {} (value {:.3e} > {:.1e})", report.draws, c.name, c.value, c.limit),
            None => format!("{} draws, {} checks; {worst}", report.draws, report.checks.len()),
        },
    }
}

fn single_suite(suite: Suite) -> Outcome {
    match run(suite, &VerifyOptions::new(SEED)) {
        Ok(r) => suite_outcome(&r.suites[0]),
        Err(e) => Outcome { pass: false, detail: e.to_string() },
    }
}

fn convergence(sweep: &ConvergeOutcome) -> Outcome {
    let rows = &sweep.rows;
    let decreasing = rows.windows(2).all(|w| w[1].max_alpha11 < w[0].max_alpha11);
    let ratios: Vec<f64> = rows.windows(2).map(|w| w[1].scaled / w[0].scaled).collect();
    let within = ratios.iter().all(|&r| r < 1.7 && r > 1.0 / 1.7);
    let table: Vec<String> = rows
        .iter()
        .map(|r| format!("N={} a={:.4e} aN={:.4e}", r.total, r.max_alpha11, r.scaled))
        .collect();
    Outcome {
        pass: decreasing && within && rows.len() >= 4,
        detail: format!(
            "{}; consecutive aN ratios {:?}; strictly decreasing: {decreasing}",
            table.join(", "),
            ratios.iter().map(|r| format!("{r:.3}")).collect::<Vec<_>>()
        ),
    }
}

fn envelope(sweep: &ConvergeOutcome) -> Outcome {
    let failures: Vec<String> = sweep
        .certificates
        .iter()
        .filter_map(|c| c.first_violation().map(|(s, what)| format!("N1={} N2={}: {what} at t={}", c.n1, c.n2, s.t)))
        .collect();
    let margin = sweep
        .certificates
        .iter()
        .flat_map(|c| &c.samples)
        .map(|s| s.alpha / s.envelope)
        .fold(0.0, f64::max);
    Outcome {
        pass: failures.is_empty() && sweep.certificates.iter().all(|c| c.pass),
        detail: if failures.is_empty() {
            format!("{} runs, zero violations; max alpha/envelope = {margin:.3e}", sweep.certificates.len())
        } else {
            failures.join("; ")
        },
    }
}

fn random_state(rng: &mut ChaCha8Rng, m: usize, n1: usize, n2: usize) -> TwoSpeciesState {
    let a = Arc::new(SectorBasis::new(m, n1, DEFAULT_CAP).unwrap());
    let b = Arc::new(SectorBasis::new(m, n2, DEFAULT_CAP).unwrap());
    let amps = haar_vector(rng, a.len() * b.len());
    TwoSpeciesState::new(a, b, amps).unwrap()
}

fn cross_representation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x6);
    let mut rdm_err: f64 = 0.0;
    for _ in 0..20 {
        let s = random_state(&mut rng, 2, 2, 2);
        let fast = reduced_density(&s, 1, 1).unwrap();
        let oracle = common::gamma11_partial_trace(&s);
        rdm_err = rdm_err.max((fast.matrix() - oracle).camax());
    }

    let g = LatticeGrid::new(1, 3, 1.0).unwrap();
    let mut energy_err: f64 = 0.0;
    for n1 in 1..=6 {
        for n2 in 1..=6 {
            let amp = |rng: &mut ChaCha8Rng| KernelProfile::Gaussian { amplitude: rng.random_range(-1.0..1.5), sigma: 1.0 }.sample(g);
            let params = MixtureParams::hartree(n1 as f64 / (n1 + n2) as f64, amp(&mut rng), amp(&mut rng), amp(&mut rng))
                .and_then(|p| {
                    let trap = |x: f64| TrapProfile::Harmonic { strength: x, center: vec![1.0] }.sample(g);
                    p.with_traps(trap(rng.random_range(0.0..0.5))?, trap(rng.random_range(0.0..0.5))?)
                })
                .unwrap();
            let (u, v) = (random_orbital(&mut rng, g).unwrap(), random_orbital(&mut rng, g).unwrap());
            let (h, _, _) = assemble_hamiltonian(&params, n1, n2, DEFAULT_CAP).unwrap();
            let psi = condensate_state(&u, &v, n1, n2, DEFAULT_CAP).unwrap();
            let fock = expectation(&psi, &h).unwrap() / (n1 + n2) as f64;
            let closed = finite_n_energy(&u, &v, n1, n2, &params).unwrap();
            energy_err = energy_err.max((fock - closed).abs());
        }
    }
    Outcome {
        pass: rdm_err <= 1e-11 && energy_err <= 1e-10,
        detail: format!("gamma11 max |diff| = {rdm_err:.2e} (20 states); energy max |diff| = {energy_err:.2e} (N1, N2 in 1..=6)"),
    }
}

fn conservation(cfg: &ExperimentConfig, manybody_norm: f64, manybody_energy: f64) -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    match run_hartree(cfg, dir.path(), cfg.seed) {
        Ok(h) => Outcome {
            pass: h.norm_drift <= 1e-10 && h.energy.value <= 1e-6 && manybody_norm <= 1e-10 && manybody_energy <= 1e-8,
            detail: format!(
                "Hartree norm {:.2e}, energy {:.2e}; many-body norm {manybody_norm:.2e}, energy {manybody_energy:.2e}",
                h.norm_drift, h.energy.value
            ),
        },
        Err(e) => Outcome { pass: false, detail: e.to_string() },
    }
}

fn csv_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn main() {
    let cfg = ExperimentConfig::from_path(&config_path()).expect("acceptance config loads");
    let first = tempfile::tempdir().unwrap();
    let second = tempfile::tempdir().unwrap();

    let clock = Instant::now();
    let sweep = run_converge(&cfg, first.path(), cfg.seed).expect("sweep runs");
    let sweep_secs = clock.elapsed().as_secs_f64();

    let mut results: Vec<(&str, Outcome)> = Vec::new();
    let mut c1 = convergence(&sweep);
    c1.detail.push_str(&format!("; sweep took {sweep_secs:.0} s"));
    results.push(("1 mean-field convergence rate", c1));
    results.push(("2 envelope certificate", envelope(&sweep)));
    results.push(("3 reduced-density inequalities", single_suite(Suite::Section3)));
    results.push(("4 counting identities", single_suite(Suite::Counting)));
    results.push(("5 convolution bounds", single_suite(Suite::Bounds)));
    results.push(("6 cross-representation oracle", cross_representation()));
    results.push(("7 hierarchy consistency", single_suite(Suite::Hierarchy)));

    results.push(("8 conservation", conservation(&cfg, sweep.norm_drift, sweep.energy_drift)));

    let rerun = run_converge(&cfg, second.path(), cfg.seed).map(|_| ());
    let (a, b) = (csv_files(first.path()), csv_files(second.path()));
    results.push((
        "9 determinism",
        Outcome {
            pass: rerun.is_ok() && !a.is_empty() && a == b,
            detail: format!("{} CSV files compared byte for byte", a.len()),
        },
    ));

    let mut failed = 0;
    for (name, o) in &results {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} criterion {name}: {}", o.detail);
        failed += usize::from(!o.pass);
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
