//! Report structures serialized to JSON, and the CSV emitters for matrices
//! and spectra. Field order is fixed by the struct definitions so identical
//! configs produce byte-identical reports.

use std::path::Path;

use ndarray::Array2;
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::Result;
use crate::model::{ModelKind, ModelParameters, QubitState};
use crate::spectral::{PeripheralPoint, TaggedVerdict};

/// Complex scalar serialized as a `{re, im}` pair.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Cx {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for Cx {
    fn from(z: C64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ModelSummary {
    pub kind: &'static str,
    pub n_max: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
}

impl ModelSummary {
    pub fn new(model: &ModelParameters) -> Self {
        let (alpha, beta, g) = match model.kind() {
            ModelKind::Homogeneous { alpha, beta } => (Some(*alpha), Some(*beta), None),
            ModelKind::JaynesCummings { g } => (None, None, Some(*g)),
            _ => (None, None, None),
        };
        Self { kind: model.kind().name(), n_max: model.n_max(), alpha, beta, g }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StateSummary {
    pub lambda: f64,
    pub zeta: Cx,
    pub nu: Cx,
    pub faithful: bool,
    pub pure: bool,
    pub diagonal: bool,
}

impl StateSummary {
    pub fn new(psi: &QubitState) -> Self {
        let c = psi.classify();
        Self {
            lambda: psi.lambda(),
            zeta: psi.zeta().into(),
            nu: psi.nu().into(),
            faithful: c.faithful,
            pure: c.pure,
            diagonal: c.diagonal,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StationaryEntry {
    pub method: String,
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<Cx>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state_rank: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncated_mass: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnosis: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StationarySection {
    pub expected: TaggedVerdict,
    pub results: Vec<StationaryEntry>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumSection {
    pub fixed_dim: usize,
    pub gap: f64,
    pub rogue_peripheral: usize,
    pub peripheral_count: usize,
    pub peripheral: Vec<PeripheralPoint>,
    pub probes_used: usize,
    pub subharmonic: String,
    pub expected_weak_mixing: TaggedVerdict,
    pub expected_irreducible: TaggedVerdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtremalSection {
    pub verdict: &'static str,
    pub gram_rank: usize,
    pub kraus_operator_rank: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub split_weights: Option<(f64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recombination_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<(Cx, Cx)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub maps_differ: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassicalSection {
    pub tridiagonal: bool,
    pub zeta_independent: bool,
    pub diagonal_invariant: bool,
    pub max_offdiagonal_mass: f64,
    pub stationary: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stationary_residual_l1: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EvolveStep {
    pub step: usize,
    pub trace: f64,
    pub purity: f64,
    pub boundary_mass: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EvolveSection {
    pub initial: String,
    pub steps: Vec<EvolveStep>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifySection {
    pub all_passed: bool,
    pub checks: Vec<CheckResult>,
}

/// Top-level JSON report written by `qbd run` / `qbd verify`.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub model: ModelSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<StateSummary>,
    pub truncation_dim: usize,
    pub interior_margin: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary_leakage: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evolve: Option<EvolveSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stationary: Option<StationarySection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extremal: Option<ExtremalSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classical: Option<ClassicalSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifySection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_csv: Option<String>,
    pub status: String,
}

pub fn write_json(path: &Path, report: &RunReport) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    let file = std::fs::File::create(path)?;
    serde_json::to_writer_pretty(&file, report)
        .map_err(|e| crate::error::QbdError::Config(e.to_string()))?;
    Ok(())
}

/// Long-format matrix dump: one `row,col,re,im` line per entry, row-major.
pub fn write_matrix_csv(path: &Path, m: &Array2<C64>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(["row", "col", "re", "im"]).map_err(csv_err)?;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            w.write_record([
                i.to_string(),
                j.to_string(),
                format!("{:.17e}", m[[i, j]].re),
                format!("{:.17e}", m[[i, j]].im),
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Spectrum dump: `index,re,im,abs`, ordered by descending modulus.
pub fn write_spectrum_csv(path: &Path, eigenvalues: &[C64]) -> Result<()> {
    let mut sorted: Vec<C64> = eigenvalues.to_vec();
    sorted.sort_by(|a, b| b.norm().total_cmp(&a.norm()).then(b.re.total_cmp(&a.re)));
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(["index", "re", "im", "abs"]).map_err(csv_err)?;
    for (k, z) in sorted.iter().enumerate() {
        w.write_record([
            k.to_string(),
            format!("{:.17e}", z.re),
            format!("{:.17e}", z.im),
            format!("{:.17e}", z.norm()),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> crate::error::QbdError {
    crate::error::QbdError::Config(format!("csv: {e}"))
}
