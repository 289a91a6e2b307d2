//! Model parameters (the coupling sequences) and the qubit state that
//! together determine a chain.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::error::{QbdError, Result};

/// Tolerance on the normalization constraint `alpha_n^2 + beta_n^2 = 1`.
pub const NORMALIZATION_TOL: f64 = 1e-12;
/// Couplings with `|beta_n|` at or below this are treated as trapping.
pub const TRAPPING_TOL: f64 = 1e-9;
/// Window used for pure / diagonal state classification.
pub const CLASSIFY_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum ModelKind {
    /// Explicit coupling sequences.
    General,
    /// Constant couplings `alpha_n = alpha`, `beta_n = beta` for n >= 1.
    Homogeneous { alpha: f64, beta: f64 },
    /// The simplest homogeneous chain: `alpha_n = 0`, `beta_n = 1` for n >= 1.
    Baby,
    /// `alpha_n = cos(g sqrt(n))`, `beta_n = -sin(g sqrt(n))`.
    JaynesCummings { g: f64 },
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::General => "general",
            ModelKind::Homogeneous { .. } => "homogeneous",
            ModelKind::Baby => "baby",
            ModelKind::JaynesCummings { .. } => "jaynes_cummings",
        }
    }
}

/// Validated coupling sequences `alpha_n`, `beta_n` for `n = 0..=n_max`.
///
/// Invariants: `alpha_0 = 1`, `beta_0 = 0`, `alpha_n^2 + beta_n^2 = 1`, and
/// `|beta_n| > TRAPPING_TOL` for all n >= 1. Values are materialized eagerly
/// so validation happens once, at construction.
#[derive(Clone, Debug)]
pub struct ModelParameters {
    kind: ModelKind,
    alpha: Vec<f64>,
    beta: Vec<f64>,
}

impl ModelParameters {
    /// Model from explicit sequences; index 0 must carry `(1, 0)`.
    pub fn general(alpha: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        if alpha.len() != beta.len() {
            return Err(QbdError::ShapeMismatch {
                expected: alpha.len(),
                got: beta.len(),
            });
        }
        if alpha.len() < 3 {
            return Err(QbdError::OutOfRange(
                "need sequences up to n_max >= 2".into(),
            ));
        }
        Self::validate(ModelKind::General, alpha, beta)
    }

    pub fn homogeneous(alpha: f64, beta: f64, n_max: usize) -> Result<Self> {
        if (alpha * alpha + beta * beta - 1.0).abs() > NORMALIZATION_TOL {
            return Err(QbdError::NormalizationViolation {
                level: 1,
                deviation: (alpha * alpha + beta * beta - 1.0).abs(),
            });
        }
        let mut a = vec![alpha; n_max + 1];
        let mut b = vec![beta; n_max + 1];
        a[0] = 1.0;
        b[0] = 0.0;
        Self::validate(ModelKind::Homogeneous { alpha, beta }, a, b)
    }

    pub fn baby(n_max: usize) -> Result<Self> {
        let mut a = vec![0.0; n_max + 1];
        let mut b = vec![1.0; n_max + 1];
        a[0] = 1.0;
        b[0] = 0.0;
        Self::validate(ModelKind::Baby, a, b)
    }

    pub fn jaynes_cummings(g: f64, n_max: usize) -> Result<Self> {
        let mut a = Vec::with_capacity(n_max + 1);
        let mut b = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            let phase = g * (n as f64).sqrt();
            a.push(phase.cos());
            b.push(-phase.sin());
        }
        Self::validate(ModelKind::JaynesCummings { g }, a, b)
    }

    fn validate(kind: ModelKind, mut alpha: Vec<f64>, mut beta: Vec<f64>) -> Result<Self> {
        if alpha.len() < 3 {
            return Err(QbdError::OutOfRange(
                "need sequences up to n_max >= 2".into(),
            ));
        }
        if (alpha[0] - 1.0).abs() > NORMALIZATION_TOL || beta[0].abs() > NORMALIZATION_TOL {
            return Err(QbdError::OutOfRange(
                "sequences must start with alpha_0 = 1, beta_0 = 0".into(),
            ));
        }
        alpha[0] = 1.0;
        beta[0] = 0.0;
        for n in 0..alpha.len() {
            let (a, b) = (alpha[n], beta[n]);
            if !a.is_finite() || !b.is_finite() || a.abs() > 1.0 + NORMALIZATION_TOL
                || b.abs() > 1.0 + NORMALIZATION_TOL
            {
                return Err(QbdError::OutOfRange(format!(
                    "coupling at level {n} outside [-1, 1]"
                )));
            }
            let dev = (a * a + b * b - 1.0).abs();
            if dev > NORMALIZATION_TOL {
                return Err(QbdError::NormalizationViolation { level: n, deviation: dev });
            }
            if n >= 1 && b.abs() <= TRAPPING_TOL {
                return Err(QbdError::TrappingState(n));
            }
        }
        Ok(Self { kind, alpha, beta })
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    /// Largest index for which couplings are stored.
    pub fn n_max(&self) -> usize {
        self.alpha.len() - 1
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alpha
    }

    pub fn betas(&self) -> &[f64] {
        &self.beta
    }
}

/// State on the two-level system, parametrized by `lambda` in [0, 1] and a
/// point `zeta` of the closed unit disc. For `lambda` in {0, 1} the value of
/// `zeta` is irrelevant and stored as 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitState {
    lambda: f64,
    zeta: C64,
}

/// Classification flags of a [`QubitState`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StateClass {
    pub faithful: bool,
    pub pure: bool,
    pub diagonal: bool,
}

impl QubitState {
    pub fn new(lambda: f64, zeta: C64) -> Result<Self> {
        if !lambda.is_finite() || !(0.0..=1.0).contains(&lambda) {
            return Err(QbdError::OutOfRange(format!("lambda out of range: {lambda}")));
        }
        if !zeta.re.is_finite() || !zeta.im.is_finite() || zeta.norm() > 1.0 + 1e-15 {
            return Err(QbdError::OutOfRange(format!("zeta outside the unit disc: {zeta}")));
        }
        let zeta = if lambda == 0.0 || lambda == 1.0 {
            C64::new(0.0, 0.0)
        } else {
            zeta
        };
        Ok(Self { lambda, zeta })
    }

    /// North pole (`lambda = 1`).
    pub fn plus() -> Self {
        Self { lambda: 1.0, zeta: C64::new(0.0, 0.0) }
    }

    /// South pole (`lambda = 0`).
    pub fn minus() -> Self {
        Self { lambda: 0.0, zeta: C64::new(0.0, 0.0) }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn zeta(&self) -> C64 {
        self.zeta
    }

    /// The off-diagonal weight `nu = i zeta sqrt(lambda (1 - lambda))`.
    pub fn nu(&self) -> C64 {
        C64::i() * self.zeta * (self.lambda * (1.0 - self.lambda)).sqrt()
    }

    /// Replace `zeta` by `zeta * theta` for a unit-modulus `theta`.
    pub fn rotate(&self, theta: C64) -> Result<Self> {
        if (theta.norm() - 1.0).abs() > 1e-12 {
            return Err(QbdError::OutOfRange(format!("|theta| != 1: {theta}")));
        }
        Self::new(self.lambda, self.zeta * theta)
    }

    /// The 2x2 density matrix of the state.
    pub fn density_matrix(&self) -> Array2<C64> {
        let off = (self.lambda * (1.0 - self.lambda)).sqrt();
        let mut rho = Array2::zeros((2, 2));
        rho[[0, 0]] = C64::new(self.lambda, 0.0);
        rho[[0, 1]] = self.zeta.conj() * off;
        rho[[1, 0]] = self.zeta * off;
        rho[[1, 1]] = C64::new(1.0 - self.lambda, 0.0);
        rho
    }

    pub fn classify(&self) -> StateClass {
        let az = self.zeta.norm();
        StateClass {
            faithful: self.lambda > 0.0 && self.lambda < 1.0 && az < 1.0,
            pure: self.lambda <= CLASSIFY_TOL
                || self.lambda >= 1.0 - CLASSIFY_TOL
                || (az - 1.0).abs() <= CLASSIFY_TOL,
            diagonal: az == 0.0,
        }
    }

    pub fn is_faithful(&self) -> bool {
        self.classify().faithful
    }

    pub fn is_pure(&self) -> bool {
        self.classify().pure
    }

    pub fn is_diagonal(&self) -> bool {
        self.classify().diagonal
    }
}
