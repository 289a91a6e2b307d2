//! Phase-diagram sweep over the `(lambda, |zeta|)` parameters: expected
//! verdicts next to numeric evidence, one CSV row per grid point.

use std::path::Path;

use num_complex::Complex64 as C64;

use crate::channel::Channel;
use crate::config::{SolverConfig, SweepConfig};
use crate::error::{QbdError, Result};
use crate::model::{ModelKind, ModelParameters, QubitState};
use crate::operators::Truncation;
use crate::spectral::{default_probes, spectrum_and_probe, theorem_verdicts, Verdict};
use crate::stationary::{
    invariant_pure_state_homogeneous, invariant_state_baby, invariant_state_diagonal,
    solve_invariant_numeric, InvariantKind, InvariantStateResult,
};

#[derive(Clone, Debug)]
pub struct SweepRow {
    pub lambda: f64,
    pub abs_zeta: f64,
    pub irreducible_expected: Verdict,
    pub irreducible_numeric: String,
    pub inv_state_expected: Verdict,
    pub inv_state_numeric: String,
    pub weakmix_expected: Verdict,
    pub fixed_dim: usize,
    pub gap: f64,
    pub status: String,
}

/// Runs the grid in row-major order (`lambda` outer, `|zeta|` inner). Errors
/// at a point are recorded in its row and do not abort the sweep. The phase
/// of `zeta` is irrelevant up to a rotation conjugation, so points are taken
/// on the positive real axis.
pub fn sweep_phase_diagram(
    model: &ModelParameters,
    grid: &SweepConfig,
    trunc: Truncation,
    solver: &SolverConfig,
) -> Vec<SweepRow> {
    let mut rows = Vec::new();
    for lam in grid.lambda.values() {
        for az in grid.abs_zeta.values() {
            rows.push(sweep_point(model, lam, az, trunc, solver));
        }
    }
    rows
}

fn sweep_point(
    model: &ModelParameters,
    lam: f64,
    az: f64,
    trunc: Truncation,
    solver: &SolverConfig,
) -> SweepRow {
    let mut row = SweepRow {
        lambda: lam,
        abs_zeta: az,
        irreducible_expected: Verdict::Unknown,
        irreducible_numeric: String::new(),
        inv_state_expected: Verdict::Unknown,
        inv_state_numeric: String::new(),
        weakmix_expected: Verdict::Unknown,
        fixed_dim: 0,
        gap: f64::NAN,
        status: "ok".into(),
    };
    let psi = match QubitState::new(lam, C64::new(az, 0.0)) {
        Ok(p) => p,
        Err(e) => {
            row.status = e.to_string();
            return row;
        }
    };
    let expected = theorem_verdicts(model.kind(), &psi);
    row.irreducible_expected = expected.irreducible.verdict;
    row.inv_state_expected = expected.invariant_state.verdict;
    row.weakmix_expected = expected.weak_mixing.verdict;

    let ch = match Channel::new(model.clone(), psi, trunc) {
        Ok(c) => c,
        Err(e) => {
            row.status = e.to_string();
            return row;
        }
    };

    let probes = default_probes(&ch);
    match spectrum_and_probe(&ch, solver.spectral_tol, &probes) {
        Ok((spec, probe)) => {
            row.fixed_dim = spec.fixed_dim;
            row.gap = spec.gap;
            row.irreducible_numeric = probe.summary();
        }
        Err(e) => row.status = e.to_string(),
    }
    row.inv_state_numeric = invariant_summary(&ch, solver);
    row
}

/// Closed form where one applies, then the numeric solver; both summarized in
/// one cell.
fn invariant_summary(ch: &Channel, solver: &SolverConfig) -> String {
    let mut parts = Vec::new();
    let closed = match ch.model().kind() {
        ModelKind::Baby => Some(invariant_state_baby(ch)),
        _ if ch.psi().is_diagonal() => Some(invariant_state_diagonal(ch)),
        ModelKind::Homogeneous { .. } if ch.psi().is_pure() => {
            Some(invariant_pure_state_homogeneous(ch))
        }
        _ => None,
    };
    if let Some(res) = closed {
        parts.push(summarize("closed", res));
    }
    parts.push(summarize(
        "numeric",
        solve_invariant_numeric(ch, solver.tol, solver.max_iter),
    ));
    parts.join("; ")
}

fn summarize(label: &str, res: Result<InvariantStateResult>) -> String {
    match res {
        Ok(r) => match r.kind {
            InvariantKind::None => {
                format!("{label}=none[{}]", r.diagnosis.unwrap_or_default())
            }
            kind => format!("{label}={}(res={:.2e})", kind.name(), r.residual),
        },
        Err(QbdError::ConvergenceFailure(n)) => {
            format!("{label}=unconverged({n} iterations)")
        }
        Err(e) => format!("{label}=error[{e}]"),
    }
}

/// Writes the sweep in the fixed column order, UTF-8, dot decimal separator,
/// grid row-major.
pub fn write_sweep_csv(path: &Path, rows: &[SweepRow]) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    let mut w = csv::Writer::from_path(path)
        .map_err(|e| QbdError::Config(format!("csv: {e}")))?;
    w.write_record([
        "lambda",
        "abs_zeta",
        "irreducible_expected",
        "irreducible_numeric",
        "inv_state_expected",
        "inv_state_numeric",
        "weakmix_expected",
        "fixed_dim",
        "gap",
        "status",
    ])
    .map_err(|e| QbdError::Config(format!("csv: {e}")))?;
    for r in rows {
        w.write_record([
            format!("{:.10}", r.lambda),
            format!("{:.10}", r.abs_zeta),
            r.irreducible_expected.as_str().to_string(),
            r.irreducible_numeric.clone(),
            r.inv_state_expected.as_str().to_string(),
            r.inv_state_numeric.clone(),
            r.weakmix_expected.as_str().to_string(),
            r.fixed_dim.to_string(),
            format!("{:.6e}", r.gap),
            r.status.clone(),
        ])
        .map_err(|e| QbdError::Config(format!("csv: {e}")))?;
    }
    w.flush()?;
    Ok(())
}
