//! JSON config schema for the command-line driver, with eager validation
//! that aggregates every problem before giving up.

use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{QbdError, Result};
use crate::model::{ModelParameters, QubitState};
use crate::operators::Truncation;
use crate::spectral::DENSE_GUARD_DEFAULT;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Evolve,
    Stationary,
    Spectrum,
    Extremal,
    Classical,
    Verify,
    Sweep,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    /// One of `baby`, `homogeneous`, `jaynes_cummings`, `general`.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_seq: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_seq: Option<Vec<f64>>,
    /// Largest level for which couplings are materialized; defaults to the
    /// truncation dimension.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct StateConfig {
    pub lambda: f64,
    #[serde(default)]
    pub zeta_re: f64,
    #[serde(default)]
    pub zeta_im: f64,
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationConfig {
    pub dim: usize,
    #[serde(default = "default_margin")]
    pub interior_margin: usize,
}

fn default_margin() -> usize {
    1
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GridAxis {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl GridAxis {
    pub fn values(&self) -> Vec<f64> {
        if self.steps <= 1 {
            return vec![self.min];
        }
        let h = (self.max - self.min) / (self.steps - 1) as f64;
        (0..self.steps).map(|k| self.min + h * k as f64).collect()
    }
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "default_lambda_axis")]
    pub lambda: GridAxis,
    #[serde(default = "default_zeta_axis")]
    pub abs_zeta: GridAxis,
}

fn default_lambda_axis() -> GridAxis {
    GridAxis { min: 0.0, max: 1.0, steps: 21 }
}

fn default_zeta_axis() -> GridAxis {
    GridAxis { min: 0.0, max: 1.0, steps: 11 }
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { lambda: default_lambda_axis(), abs_zeta: default_zeta_axis() }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_report_path")]
    pub report: PathBuf,
    /// When set, matrices and spectra are also written as CSV files here.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv_dir: Option<PathBuf>,
}

fn default_report_path() -> PathBuf {
    PathBuf::from("qbd_report.json")
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { report: default_report_path(), csv_dir: None }
    }
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_spectral_tol")]
    pub spectral_tol: f64,
}

fn default_tol() -> f64 {
    1e-10
}
fn default_max_iter() -> usize {
    5000
}
fn default_spectral_tol() -> f64 {
    1e-7
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: default_tol(),
            max_iter: default_max_iter(),
            spectral_tol: default_spectral_tol(),
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveConfig {
    #[serde(default = "default_steps")]
    pub steps: usize,
    /// `uniform` or `vacuum`.
    #[serde(default = "default_initial")]
    pub initial: String,
}

fn default_steps() -> usize {
    16
}
fn default_initial() -> String {
    "uniform".into()
}

impl Default for EvolveConfig {
    fn default() -> Self {
        Self { steps: default_steps(), initial: default_initial() }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<StateConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    pub truncation: TruncationConfig,
    pub tasks: Vec<Task>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub evolve: EvolveConfig,
}

fn default_seed() -> u64 {
    20240 // fixed default so identical configs give identical reports
}

/// A config whose pieces all built successfully.
#[derive(Clone, Debug)]
pub struct Validated {
    pub config: RunConfig,
    pub model: ModelParameters,
    pub state: Option<QubitState>,
    pub truncation: Truncation,
}

pub fn load(path: &Path) -> Result<RunConfig> {
    let file = std::fs::File::open(path)?;
    serde_json::from_reader(file).map_err(|e| QbdError::Config(e.to_string()))
}

impl RunConfig {
    /// Builds every component eagerly; on failure the full list of problems
    /// comes back at once.
    pub fn validate(&self) -> std::result::Result<Validated, Vec<String>> {
        let mut errors = Vec::new();

        let truncation = match Truncation::with_margin(
            self.truncation.dim,
            self.truncation.interior_margin,
        ) {
            Ok(t) => Some(t),
            Err(e) => {
                errors.push(e.to_string());
                None
            }
        };

        let n_max = self.model.n_max.unwrap_or(self.truncation.dim.max(4));
        if n_max + 1 < self.truncation.dim {
            errors.push(format!(
                "n_max {} too small for truncation dim {}",
                n_max, self.truncation.dim
            ));
        }
        let model = match self.build_model(n_max) {
            Ok(m) => Some(m),
            Err(e) => {
                errors.push(e.to_string());
                None
            }
        };

        let state = match &self.state {
            Some(sc) => match QubitState::new(sc.lambda, C64::new(sc.zeta_re, sc.zeta_im)) {
                Ok(s) => Some(s),
                Err(e) => {
                    errors.push(e.to_string());
                    None
                }
            },
            None => None,
        };

        if self.tasks.is_empty() {
            errors.push("no tasks requested".into());
        }
        let needs_state = [
            Task::Evolve,
            Task::Stationary,
            Task::Spectrum,
            Task::Extremal,
            Task::Classical,
            Task::Verify,
        ];
        for task in &self.tasks {
            if needs_state.contains(task) && self.state.is_none() {
                errors.push(format!("task {task:?} needs a state section"));
            }
        }
        if self.tasks.contains(&Task::Sweep) && self.sweep.is_none() {
            errors.push("task Sweep needs a sweep section (grid axes)".into());
        }
        if let Some(sw) = &self.sweep {
            for (name, axis) in [("lambda", sw.lambda), ("abs_zeta", sw.abs_zeta)] {
                if !(0.0..=1.0).contains(&axis.min)
                    || !(0.0..=1.0).contains(&axis.max)
                    || axis.min > axis.max
                    || axis.steps == 0
                {
                    errors.push(format!(
                        "sweep axis {name} must satisfy 0 <= min <= max <= 1, steps >= 1"
                    ));
                }
            }
        }
        let guard = std::env::var("QBD_MAX_N")
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(DENSE_GUARD_DEFAULT);
        if (self.tasks.contains(&Task::Spectrum) || self.tasks.contains(&Task::Sweep))
            && self.truncation.dim > guard
        {
            errors.push(format!(
                "dense spectral tasks need dim <= {guard} (set QBD_MAX_N to override)"
            ));
        }
        if self.tasks.contains(&Task::Evolve)
            && !matches!(self.evolve.initial.as_str(), "uniform" | "vacuum")
        {
            errors.push(format!(
                "evolve.initial must be 'uniform' or 'vacuum', got '{}'",
                self.evolve.initial
            ));
        }
        if self.solver.tol <= 0.0 || self.solver.spectral_tol <= 0.0 {
            errors.push("solver tolerances must be positive".into());
        }

        match (model, truncation, errors.is_empty()) {
            (Some(model), Some(truncation), true) => Ok(Validated {
                config: self.clone(),
                model,
                state,
                truncation,
            }),
            _ => Err(errors),
        }
    }

    fn build_model(&self, n_max: usize) -> Result<ModelParameters> {
        let mc = &self.model;
        match mc.kind.as_str() {
            "baby" => ModelParameters::baby(n_max),
            "homogeneous" => {
                let alpha = mc
                    .alpha
                    .ok_or_else(|| QbdError::Config("homogeneous model needs 'alpha'".into()))?;
                let beta = mc
                    .beta
                    .ok_or_else(|| QbdError::Config("homogeneous model needs 'beta'".into()))?;
                ModelParameters::homogeneous(alpha, beta, n_max)
            }
            "jaynes_cummings" => {
                let g = mc
                    .g
                    .ok_or_else(|| QbdError::Config("jaynes_cummings model needs 'g'".into()))?;
                ModelParameters::jaynes_cummings(g, n_max)
            }
            "general" => {
                let alpha = mc
                    .alpha_seq
                    .clone()
                    .ok_or_else(|| QbdError::Config("general model needs 'alpha_seq'".into()))?;
                let beta = mc
                    .beta_seq
                    .clone()
                    .ok_or_else(|| QbdError::Config("general model needs 'beta_seq'".into()))?;
                ModelParameters::general(alpha, beta)
            }
            other => Err(QbdError::Config(format!("unknown model kind '{other}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_config() -> RunConfig {
        serde_json::from_str(
            r#"{
                "model": {"kind": "baby"},
                "state": {"lambda": 0.25},
                "truncation": {"dim": 16},
                "tasks": ["stationary"]
            }"#,
        )
        .unwrap()
    }

    #[test]
    fn minimal_config_validates() {
        let v = base_config().validate().unwrap();
        assert_eq!(v.truncation.dim(), 16);
        assert_eq!(v.model.n_max(), 16);
        assert!(v.state.is_some());
    }

    #[test]
    fn lambda_out_of_range_is_reported() {
        let mut cfg = base_config();
        cfg.state = Some(StateConfig { lambda: 1.2, zeta_re: 0.0, zeta_im: 0.0 });
        let errs = cfg.validate().unwrap_err();
        assert!(errs.iter().any(|e| e.contains("lambda out of range")), "{errs:?}");
    }

    #[test]
    fn trapping_coupling_is_reported() {
        let mut cfg = base_config();
        cfg.model = ModelConfig {
            kind: "jaynes_cummings".into(),
            alpha: None,
            beta: None,
            g: Some(std::f64::consts::PI),
            alpha_seq: None,
            beta_seq: None,
            n_max: None,
        };
        let errs = cfg.validate().unwrap_err();
        assert!(errs.iter().any(|e| e.contains("trapping state at level 1")), "{errs:?}");
    }

    #[test]
    fn errors_aggregate() {
        let mut cfg = base_config();
        cfg.state = Some(StateConfig { lambda: -0.5, zeta_re: 0.0, zeta_im: 0.0 });
        cfg.truncation = TruncationConfig { dim: 2, interior_margin: 1 };
        let errs = cfg.validate().unwrap_err();
        assert!(errs.len() >= 2, "{errs:?}");
    }

    #[test]
    fn sweep_requires_grid() {
        let mut cfg = base_config();
        cfg.tasks = vec![Task::Sweep];
        let errs = cfg.validate().unwrap_err();
        assert!(errs.iter().any(|e| e.contains("sweep section")));
    }
}
