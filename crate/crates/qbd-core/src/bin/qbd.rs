//! Command-line driver: run configured tasks, sweep the phase diagram, or
//! run the structural property suite. Exit codes: 0 success, 2 validation
//! failure, 3 numeric failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex64 as C64;

use qbd_core::config::{self, RunConfig, Task, Validated};
use qbd_core::error::QbdError;
use qbd_core::report::{
    self, ClassicalSection, Cx, EvolveSection, EvolveStep, ExtremalSection, ModelSummary,
    RunReport, SpectrumSection, StateSummary, StationaryEntry, StationarySection, VerifySection,
};
use qbd_core::spectral::{
    default_probes, ergodic_report, extremality_report, ExtremalityVerdict,
};
use qbd_core::stationary::{
    boundary_mass, invariant_pure_state_homogeneous, invariant_state_baby,
    invariant_state_diagonal, solve_invariant_numeric, InvariantKind, InvariantStateResult,
};
use qbd_core::sweep::{sweep_phase_diagram, write_sweep_csv};
use qbd_core::verify::run_property_suite;
use qbd_core::{
    classical_stationary, classical_transition_matrix, diagonal_invariance_check, Channel,
    ClassicalStationary, ModelKind, QubitState, TruncatedOperator,
};

#[derive(Parser)]
#[command(name = "qbd", about = "Quantum birth-and-death chain toolbox", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute the tasks listed in the config file.
    Run { config: PathBuf },
    /// Sweep the (lambda, |zeta|) grid and write the phase-diagram CSV.
    Sweep { config: PathBuf },
    /// Run the full structural property suite for the configured channel.
    Verify { config: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (path, forced) = match &cli.command {
        Command::Run { config } => (config, None),
        Command::Sweep { config } => (config, Some(Task::Sweep)),
        Command::Verify { config } => (config, Some(Task::Verify)),
    };
    let mut cfg = match config::load(path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(task) = forced {
        cfg.tasks = vec![task];
        if task == Task::Sweep && cfg.sweep.is_none() {
            cfg.sweep = Some(Default::default());
        }
    }
    let validated = match cfg.validate() {
        Ok(v) => v,
        Err(errors) => {
            eprintln!("config validation failed:");
            for e in &errors {
                eprintln!("  - {e}");
            }
            return ExitCode::from(2);
        }
    };
    match execute(&validated) {
        Ok(all_ok) => {
            if all_ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            }
        }
        Err(e) => {
            eprintln!("numeric failure: {e}");
            ExitCode::from(3)
        }
    }
}

fn execute(v: &Validated) -> Result<bool, QbdError> {
    let cfg = &v.config;
    let mut all_ok = true;
    let mut rep = RunReport {
        model: ModelSummary::new(&v.model),
        state: v.state.as_ref().map(StateSummary::new),
        truncation_dim: v.truncation.dim(),
        interior_margin: v.truncation.interior_margin(),
        seed: cfg.seed,
        boundary_leakage: None,
        evolve: None,
        stationary: None,
        spectrum: None,
        extremal: None,
        classical: None,
        verify: None,
        sweep_csv: None,
        status: "ok".into(),
    };

    let channel = match &v.state {
        Some(psi) => Some(Channel::new(v.model.clone(), *psi, v.truncation)?),
        None => None,
    };
    if let Some(ch) = &channel {
        rep.boundary_leakage = Some(ch.boundary_leakage());
    }

    for task in &cfg.tasks {
        match task {
            Task::Evolve => {
                let ch = channel.as_ref().expect("validated");
                rep.evolve = Some(run_evolve(ch, cfg)?);
            }
            Task::Stationary => {
                let ch = channel.as_ref().expect("validated");
                rep.stationary = Some(run_stationary(ch, cfg)?);
            }
            Task::Spectrum => {
                let ch = channel.as_ref().expect("validated");
                let erg = ergodic_report(ch, cfg.solver.spectral_tol)?;
                println!(
                    "spectrum: fixed_dim = {}, gap = {:.3e}, rogue peripheral = {}, probe: {}",
                    erg.spectrum.fixed_dim,
                    erg.spectrum.gap,
                    erg.spectrum.rogue_peripheral,
                    erg.subharmonic.summary()
                );
                rep.spectrum = Some(SpectrumSection {
                    fixed_dim: erg.spectrum.fixed_dim,
                    gap: erg.spectrum.gap,
                    rogue_peripheral: erg.spectrum.rogue_peripheral,
                    peripheral_count: erg.spectrum.peripheral.len(),
                    peripheral: erg.spectrum.peripheral.clone(),
                    probes_used: default_probes(ch).len(),
                    subharmonic: erg.subharmonic.summary(),
                    expected_weak_mixing: erg.expected.weak_mixing.clone(),
                    expected_irreducible: erg.expected.irreducible.clone(),
                });
                if let Some(dir) = &cfg.output.csv_dir {
                    std::fs::create_dir_all(dir)?;
                    let eigen: Vec<C64> = erg
                        .spectrum
                        .peripheral
                        .iter()
                        .map(|p| C64::new(p.eigenvalue_re, p.eigenvalue_im))
                        .collect();
                    report::write_spectrum_csv(&dir.join("peripheral_spectrum.csv"), &eigen)?;
                }
            }
            Task::Extremal => {
                let ch = channel.as_ref().expect("validated");
                let ext = extremality_report(ch)?;
                let mut section = ExtremalSection {
                    verdict: ext.verdict.summary(),
                    gram_rank: ext.gram_rank,
                    kraus_operator_rank: ext.kraus_operator_rank,
                    split_weights: None,
                    recombination_error: None,
                    witness: None,
                    maps_differ: None,
                };
                if let ExtremalityVerdict::NotExtremal(split) = &ext.verdict {
                    section.split_weights = Some(split.weights);
                    section.recombination_error = Some(split.recombination_error);
                    section.witness = split.witness.map(|(a, b)| (Cx::from(a), Cx::from(b)));
                    section.maps_differ = Some(split.maps_differ);
                }
                println!(
                    "extremality: {} (product rank {}, operator rank {})",
                    section.verdict, section.gram_rank, section.kraus_operator_rank
                );
                rep.extremal = Some(section);
            }
            Task::Classical => {
                let ch = channel.as_ref().expect("validated");
                rep.classical = Some(run_classical(ch, cfg)?);
            }
            Task::Verify => {
                let ch = channel.as_ref().expect("validated");
                let checks = run_property_suite(ch, cfg.seed)?;
                let ok = checks.iter().all(|c| c.pass);
                for c in &checks {
                    println!("{} {} ({})", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
                }
                all_ok &= ok;
                rep.verify = Some(VerifySection { all_passed: ok, checks });
            }
            Task::Sweep => {
                let grid = cfg.sweep.as_ref().expect("validated");
                let rows = sweep_phase_diagram(&v.model, grid, v.truncation, &cfg.solver);
                let path = cfg
                    .output
                    .csv_dir
                    .as_ref()
                    .map(|d| d.join("sweep.csv"))
                    .unwrap_or_else(|| PathBuf::from("qbd_sweep.csv"));
                write_sweep_csv(&path, &rows)?;
                println!("sweep: {} grid points -> {}", rows.len(), path.display());
                rep.sweep_csv = Some(path.display().to_string());
            }
        }
    }

    if !all_ok {
        rep.status = "verification failures".into();
    }
    report::write_json(&cfg.output.report, &rep)?;
    println!("report -> {}", cfg.output.report.display());
    Ok(all_ok)
}

fn run_evolve(ch: &Channel, cfg: &RunConfig) -> Result<EvolveSection, QbdError> {
    let n = ch.dim();
    let mut rho = match cfg.evolve.initial.as_str() {
        "vacuum" => qbd_core::matrix_unit(0, 0, n)?,
        _ => {
            let uniform = ndarray::Array2::eye(n).mapv(|z: C64| z / n as f64);
            TruncatedOperator::from_matrix(uniform)?
        }
    };
    let mut steps = Vec::with_capacity(cfg.evolve.steps + 1);
    for step in 0..=cfg.evolve.steps {
        let trace = rho.trace().re;
        let normalized = rho.scaled(C64::new(1.0 / trace.max(1e-300), 0.0));
        let purity = normalized.mul(&normalized).trace().re;
        steps.push(EvolveStep {
            step,
            trace,
            purity,
            boundary_mass: boundary_mass(ch, &rho),
        });
        if step < cfg.evolve.steps {
            rho = ch.apply_schrodinger(&rho)?;
        }
    }
    Ok(EvolveSection { initial: cfg.evolve.initial.clone(), steps })
}

fn run_stationary(ch: &Channel, cfg: &RunConfig) -> Result<StationarySection, QbdError> {
    let expected =
        qbd_core::theorem_verdicts(ch.model().kind(), ch.psi()).invariant_state;
    let mut results = Vec::new();
    let psi = ch.psi();

    if matches!(ch.model().kind(), ModelKind::Baby) {
        results.push(entry("closed_form_baby", invariant_state_baby(ch))?);
    }
    if psi.is_diagonal() {
        results.push(entry("closed_form_diagonal", invariant_state_diagonal(ch))?);
    }
    let pure_applicable = matches!(
        ch.model().kind(),
        ModelKind::Baby | ModelKind::Homogeneous { .. }
    ) && (psi.zeta().norm() - 1.0).abs() <= 1e-12
        && psi.lambda() > 0.0
        && psi.lambda() < 1.0;
    if pure_applicable {
        results.push(entry("closed_form_pure", invariant_pure_state_homogeneous(ch))?);
    }
    match solve_invariant_numeric(ch, cfg.solver.tol, cfg.solver.max_iter) {
        Ok(res) => {
            if let (Some(dir), Some(rho)) = (&cfg.output.csv_dir, &res.rho) {
                std::fs::create_dir_all(dir)?;
                report::write_matrix_csv(&dir.join("invariant_state.csv"), rho.matrix())?;
            }
            results.push(entry("numeric", Ok(res))?);
        }
        Err(QbdError::ConvergenceFailure(iters)) => results.push(StationaryEntry {
            method: "numeric".into(),
            kind: "none",
            residual: None,
            q: None,
            state_rank: None,
            truncated_mass: None,
            diagnosis: Some(format!("no convergence after {iters} iterations")),
        }),
        Err(e) => return Err(e),
    }
    for r in &results {
        println!(
            "stationary[{}]: {}{}",
            r.method,
            r.kind,
            r.residual.map(|x| format!(" (residual {x:.2e})")).unwrap_or_default()
        );
    }
    Ok(StationarySection { expected, results })
}

fn entry(
    method: &str,
    res: Result<InvariantStateResult, QbdError>,
) -> Result<StationaryEntry, QbdError> {
    let res = res?;
    let state_rank = res
        .rho
        .as_ref()
        .map(|rho| {
            let vals = qbd_core::operators::hermitian_eigenvalues(rho)?;
            let top = vals.iter().cloned().fold(0.0, f64::max);
            Ok::<usize, QbdError>(vals.iter().filter(|&&e| e > 1e-8 * top.max(1e-300)).count())
        })
        .transpose()?;
    Ok(StationaryEntry {
        method: method.into(),
        kind: res.kind.name(),
        residual: if res.kind == InvariantKind::None { None } else { Some(res.residual) },
        q: res.q.map(Cx::from),
        state_rank,
        truncated_mass: if res.kind == InvariantKind::None {
            None
        } else {
            Some(res.truncated_mass)
        },
        diagnosis: res.diagnosis,
    })
}

fn run_classical(ch: &Channel, cfg: &RunConfig) -> Result<ClassicalSection, QbdError> {
    let chain = classical_transition_matrix(ch);
    let rotated = Channel::new(
        ch.model().clone(),
        QubitState::new(ch.psi().lambda(), C64::new(0.9, 0.0))?,
        ch.truncation(),
    )?;
    let other = classical_transition_matrix(&rotated);
    let zeta_dev = chain
        .transition()
        .iter()
        .zip(other.transition().iter())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let inv = diagonal_invariance_check(ch)?;
    let (stationary, residual) = match classical_stationary(&chain) {
        ClassicalStationary::Distribution { residual_l1, .. } => {
            ("geometric".to_string(), Some(residual_l1))
        }
        ClassicalStationary::None { ratio } => {
            (format!("none (ratio {ratio:.4} >= 1)"), None)
        }
    };
    if let Some(dir) = &cfg.output.csv_dir {
        std::fs::create_dir_all(dir)?;
        let complex = chain.transition().mapv(|x| C64::new(x, 0.0));
        report::write_matrix_csv(&dir.join("classical_transition.csv"), &complex)?;
    }
    println!(
        "classical: tridiagonal = {}, stationary = {}, diagonal invariant = {}",
        chain.is_tridiagonal(),
        stationary,
        inv.invariant
    );
    Ok(ClassicalSection {
        tridiagonal: chain.is_tridiagonal(),
        zeta_independent: zeta_dev == 0.0,
        diagonal_invariant: inv.invariant,
        max_offdiagonal_mass: inv.max_offdiag,
        stationary,
        stationary_residual_l1: residual,
    })
}
