//! Closed-form invariant states, a numeric invariant-state solver, and the
//! explicit fixed-point families that witness a degenerate fixed space.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::channel::Channel;
use crate::error::{QbdError, Result};
use crate::linalg;
use crate::model::ModelKind;
use crate::operators::{shift, TruncatedOperator};

/// How an invariant state was obtained, or why none is reported.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InvariantKind {
    ClosedFormDiagonal,
    ClosedFormPure,
    ClosedFormBaby,
    Numeric,
    None,
}

impl InvariantKind {
    pub fn name(&self) -> &'static str {
        match self {
            InvariantKind::ClosedFormDiagonal => "closed_form_diagonal",
            InvariantKind::ClosedFormPure => "closed_form_pure",
            InvariantKind::ClosedFormBaby => "closed_form_baby",
            InvariantKind::Numeric => "numeric",
            InvariantKind::None => "none",
        }
    }
}

#[derive(Clone, Debug)]
pub struct InvariantStateResult {
    pub kind: InvariantKind,
    /// Hermitian, positive semidefinite, trace one (after renormalization).
    pub rho: Option<TruncatedOperator>,
    /// Trace-norm residual of invariance on the interior corner.
    pub residual: f64,
    /// Geometric parameter of the pure state, when applicable.
    pub q: Option<C64>,
    pub diagnosis: Option<String>,
    /// Mass of the untruncated state that fell outside the window; the
    /// renormalization factor deviates from 1 by this amount.
    pub truncated_mass: f64,
}

impl InvariantStateResult {
    fn none(diagnosis: String) -> Self {
        Self {
            kind: InvariantKind::None,
            rho: None,
            residual: f64::NAN,
            q: None,
            diagnosis: Some(diagnosis),
            truncated_mass: 0.0,
        }
    }
}

/// Trace-norm residual `|T_*(rho) - rho|_tr` after compressing both sides to
/// the interior corner.
pub fn verify_invariant(ch: &Channel, rho: &TruncatedOperator) -> Result<f64> {
    if !rho.is_hermitian(1e-10 * rho.max_abs().max(1.0)) {
        return Err(QbdError::PreconditionViolated("state must be Hermitian".into()));
    }
    let image = ch.apply_schrodinger(rho)?;
    let diff = image.sub(rho).into_matrix();
    let k = ch.interior();
    linalg::trace_norm_hermitian(&linalg::corner(&diff, k))
}

/// Geometric diagonal invariant state for a diagonal qubit state with
/// `lambda < 1/2`; valid for every model. For `lambda >= 1/2` reports why the
/// candidate diverges.
pub fn invariant_state_diagonal(ch: &Channel) -> Result<InvariantStateResult> {
    if ch.psi().zeta() != C64::new(0.0, 0.0) {
        return Err(QbdError::PreconditionViolated(
            "diagonal closed form needs zeta = 0".into(),
        ));
    }
    let lam = ch.psi().lambda();
    let ratio = lam / (1.0 - lam);
    if lam >= 0.5 {
        return Ok(InvariantStateResult::none(format!(
            "geometric ratio {ratio:.4} >= 1 (lambda >= 1/2)"
        )));
    }
    let n = ch.dim();
    let mut mat = Array2::zeros((n, n));
    let mut v = 1.0;
    let mut raw_trace = 0.0;
    for k in 0..n {
        mat[[k, k]] = C64::new(v, 0.0);
        raw_trace += v;
        v *= ratio;
    }
    let geom_total = 1.0 / (1.0 - ratio);
    let truncated_mass = 1.0 - raw_trace / geom_total;
    mat.mapv_inplace(|z| z / raw_trace);
    let rho = TruncatedOperator::from_matrix(mat)?;
    let residual = verify_invariant(ch, &rho)?;
    Ok(InvariantStateResult {
        kind: InvariantKind::ClosedFormDiagonal,
        rho: Some(rho),
        residual,
        q: None,
        diagnosis: None,
        truncated_mass,
    })
}

/// Pure invariant state for constant couplings and a pure `psi` on the disc
/// boundary. Exists exactly when `lambda < (1 - alpha)/2`; the state is the
/// geometric vector with ratio `q = i conj(zeta) beta/(1-alpha)
/// sqrt(lambda/(1-lambda))`.
pub fn invariant_pure_state_homogeneous(ch: &Channel) -> Result<InvariantStateResult> {
    let (alpha, beta) = match ch.model().kind() {
        ModelKind::Homogeneous { alpha, beta } => (*alpha, *beta),
        ModelKind::Baby => (0.0, 1.0),
        other => {
            return Err(QbdError::PreconditionViolated(format!(
                "pure closed form needs constant couplings, got {}",
                other.name()
            )))
        }
    };
    let lam = ch.psi().lambda();
    let zeta = ch.psi().zeta();
    if !(lam > 0.0 && lam < 1.0) || (zeta.norm() - 1.0).abs() > 1e-12 {
        return Err(QbdError::PreconditionViolated(
            "pure closed form needs 0 < lambda < 1 and |zeta| = 1".into(),
        ));
    }
    let threshold = 0.5 * (1.0 - alpha);
    if lam >= threshold {
        return Ok(InvariantStateResult::none(format!(
            "lambda {lam:.4} >= pure-state threshold {threshold:.4}"
        )));
    }
    let q = C64::i() * zeta.conj() * beta / (1.0 - alpha) * (lam / (1.0 - lam)).sqrt();
    let n = ch.dim();
    let mut xi = Vec::with_capacity(n);
    let mut p = C64::new(1.0, 0.0);
    for _ in 0..n {
        xi.push(p);
        p *= q;
    }
    let mut mat = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            mat[[i, j]] = xi[i] * xi[j].conj();
        }
    }
    let raw_trace: f64 = (0..n).map(|i| mat[[i, i]].re).sum();
    let truncated_mass = 1.0 - raw_trace * (1.0 - q.norm_sqr());
    mat.mapv_inplace(|z| z / raw_trace);
    let rho = TruncatedOperator::from_matrix(mat)?;
    let residual = verify_invariant(ch, &rho)?;
    Ok(InvariantStateResult {
        kind: InvariantKind::ClosedFormPure,
        rho: Some(rho),
        residual,
        q: Some(q),
        diagnosis: None,
        truncated_mass,
    })
}

/// Closed-form invariant state of the baby chain for any `psi` with
/// `lambda < 1/2`: geometric on the diagonal with ratio `lambda/(1-lambda)`,
/// and the k-th subdiagonal damped by `(i conj(zeta) sqrt(ratio))^k`.
pub fn invariant_state_baby(ch: &Channel) -> Result<InvariantStateResult> {
    if *ch.model().kind() != ModelKind::Baby {
        return Err(QbdError::PreconditionViolated(format!(
            "baby closed form needs the baby model, got {}",
            ch.model().kind().name()
        )));
    }
    let lam = ch.psi().lambda();
    let zeta = ch.psi().zeta();
    if lam >= 0.5 {
        return Ok(InvariantStateResult::none(format!(
            "geometric ratio {:.4} >= 1 (lambda >= 1/2)",
            lam / (1.0 - lam)
        )));
    }
    let n = ch.dim();
    let ratio = lam / (1.0 - lam);
    let damp = C64::i() * zeta.conj() * ratio.sqrt();
    let mut mat = Array2::zeros((n, n));
    for base in 0..n {
        let diag = ratio.powi(base as i32);
        let mut off = C64::new(diag, 0.0);
        for k in 0..n - base {
            mat[[base + k, base]] = off;
            mat[[base, base + k]] = off.conj();
            off *= damp;
        }
    }
    let raw_trace: f64 = (0..n).map(|i| mat[[i, i]].re).sum();
    let truncated_mass = 1.0 - raw_trace * (1.0 - ratio);
    mat.mapv_inplace(|z| z / raw_trace);
    let rho = TruncatedOperator::from_matrix(mat)?;
    let residual = verify_invariant(ch, &rho)?;
    Ok(InvariantStateResult {
        kind: InvariantKind::ClosedFormBaby,
        rho: Some(rho),
        residual,
        q: None,
        diagnosis: None,
        truncated_mass,
    })
}

/// Fraction of the state's mass sitting on the last `2*margin + 1` basis
/// indices.
pub fn boundary_mass(ch: &Channel, rho: &TruncatedOperator) -> f64 {
    let n = ch.dim();
    let window = 2 * ch.truncation().interior_margin() + 1;
    let start = n.saturating_sub(window);
    let total: f64 = (0..n).map(|k| rho.entry(k, k).re).sum();
    if total <= 0.0 {
        return 1.0;
    }
    (start..n).map(|k| rho.entry(k, k).re).sum::<f64>() / total
}

/// Power iteration on the predual from the uniform diagonal start. Converges
/// to the dominant state of the truncated predual; when the iterate parks
/// more than 10% of its mass at the boundary the escape is reported instead,
/// since at this truncation that is the signature of mass running upward
/// without a normalizable limit.
pub fn solve_invariant_numeric(
    ch: &Channel,
    tol: f64,
    max_iter: usize,
) -> Result<InvariantStateResult> {
    if tol <= 0.0 {
        return Err(QbdError::OutOfRange("tolerance must be positive".into()));
    }
    let n = ch.dim();
    let uniform = Array2::eye(n).mapv(|z: C64| z / n as f64);
    let mut rho = TruncatedOperator::from_matrix(uniform)?;
    let burn_in = 4 * n;
    let mut converged = false;
    let mut iterations = 0;
    for it in 0..max_iter {
        let next = ch.apply_schrodinger(&rho)?;
        let trace = next.trace().re;
        if trace <= 1e-300 {
            return Ok(InvariantStateResult::none(format!(
                "all mass escaped through the truncation edge after {} iterations",
                it + 1
            )));
        }
        let next = next.scaled(C64::new(1.0 / trace, 0.0));
        let delta = next.sub(&rho).max_abs();
        rho = next;
        iterations = it + 1;
        if it >= burn_in && boundary_mass(ch, &rho) > 0.10 {
            let mass = boundary_mass(ch, &rho);
            return Ok(InvariantStateResult::none(format!(
                "boundary mass {:.1}% exceeds 10% after {} iterations",
                100.0 * mass,
                iterations
            )));
        }
        if delta <= tol {
            converged = true;
            break;
        }
    }
    let mass = boundary_mass(ch, &rho);
    if mass > 0.10 {
        return Ok(InvariantStateResult::none(format!(
            "boundary mass {:.1}% exceeds 10% after {} iterations",
            100.0 * mass,
            iterations
        )));
    }
    if !converged {
        return Err(QbdError::ConvergenceFailure(max_iter));
    }
    let residual = verify_invariant(ch, &rho)?;
    Ok(InvariantStateResult {
        kind: InvariantKind::Numeric,
        rho: Some(rho),
        residual,
        q: None,
        diagnosis: None,
        truncated_mass: mass,
    })
}

/// Linearly independent fixed points of the transition operator for
/// `lambda > 1/2`, where the fixed space degenerates. Supported for the baby
/// model (any `zeta`) and constant couplings with `zeta = 0`; each returned
/// element satisfies the fixed-point equations exactly on the interior.
pub fn explicit_fixed_points(ch: &Channel, count: usize) -> Result<Vec<TruncatedOperator>> {
    let lam = ch.psi().lambda();
    if lam <= 0.5 {
        return Err(QbdError::PreconditionViolated(
            "explicit fixed points need lambda > 1/2".into(),
        ));
    }
    if count == 0 {
        return Err(QbdError::PreconditionViolated("count must be >= 1".into()));
    }
    let n = ch.dim();
    if count + 3 > n {
        return Err(QbdError::PreconditionViolated(format!(
            "count {count} too large for truncation {n}"
        )));
    }
    let zeta = ch.psi().zeta();
    match ch.model().kind() {
        ModelKind::Baby => {
            if zeta == C64::new(0.0, 0.0) {
                Ok(shifted_family(shifted_profile_baby(lam, n), n, count))
            } else {
                Ok(baby_mixed_family(lam, zeta, n, count))
            }
        }
        ModelKind::Homogeneous { alpha, .. } => {
            if zeta != C64::new(0.0, 0.0) {
                return Err(QbdError::PreconditionViolated(
                    "constant-coupling fixed points need zeta = 0".into(),
                ));
            }
            Ok(shifted_family(shifted_profile_homogeneous(lam, *alpha, n), n, count))
        }
        other => Err(QbdError::PreconditionViolated(format!(
            "no explicit fixed points for the {} model",
            other.name()
        ))),
    }
}

/// Diagonal profile whose shifts are fixed: `lambda (1 - s* d s)` where `d`
/// is geometric with ratio `(1-lambda)/lambda`.
fn shifted_profile_baby(lam: f64, n: usize) -> Vec<C64> {
    let q = (1.0 - lam) / lam;
    (0..n)
        .map(|k| C64::new(lam * (1.0 - q.powi(k as i32 + 1)), 0.0))
        .collect()
}

/// Same construction for constant couplings:
/// `(lambda/(1-lambda) + (2 lambda - 1)/(1-lambda) alpha) 1 - d`.
fn shifted_profile_homogeneous(lam: f64, alpha: f64, n: usize) -> Vec<C64> {
    if lam == 1.0 {
        return vec![C64::new(1.0, 0.0); n];
    }
    let q = (1.0 - lam) / lam;
    let coef = lam / (1.0 - lam) + (2.0 * lam - 1.0) / (1.0 - lam) * alpha;
    (0..n)
        .map(|k| C64::new(coef - q.powi(k as i32), 0.0))
        .collect()
}

fn shifted_family(profile: Vec<C64>, n: usize, count: usize) -> Vec<TruncatedOperator> {
    let diag = {
        let mut m = Array2::zeros((n, n));
        for (k, v) in profile.iter().enumerate() {
            m[[k, k]] = *v;
        }
        TruncatedOperator::from_matrix(m).expect("finite")
    };
    let s = shift(n);
    let mut out = Vec::with_capacity(count);
    let mut shifted = diag;
    for _ in 0..count {
        shifted = s.mul(&shifted);
        out.push(shifted.clone());
    }
    out
}

/// Fixed points of the baby chain for `zeta != 0`. A bounded fixed element
/// supported on subdiagonals `1..=top` has per-subdiagonal profile
/// `A_k + B_k q^m` with `q = (1-lambda)/lambda`, subject to the column-0
/// equations; those couple neighbouring subdiagonals through
/// `nu = i zeta sqrt(lambda(1-lambda))` and leave one free parameter per
/// added subdiagonal. One representative per `top = 2..=count+1` gives a
/// linearly independent family.
fn baby_mixed_family(lam: f64, zeta: C64, n: usize, count: usize) -> Vec<TruncatedOperator> {
    let q = (1.0 - lam) / lam;
    let nu = C64::i() * zeta * (lam * (1.0 - lam)).sqrt();
    let mut out = Vec::with_capacity(count);
    for top in 2..=count + 1 {
        let mut coef_a = vec![C64::new(0.0, 0.0); top + 1];
        let mut coef_b = vec![C64::new(0.0, 0.0); top + 1];
        coef_b[top] = C64::new(1.0, 0.0);
        coef_a[top] = C64::new(-lam / (1.0 - lam), 0.0);
        for k in (2..top).rev() {
            coef_b[k] = -nu * (coef_a[k + 1] + coef_b[k + 1]) / lam;
        }
        coef_b[1] = -nu * (coef_a[2] + coef_b[2]) / (2.0 * lam - 1.0);
        coef_a[1] = -coef_b[1];
        let mut m = Array2::zeros((n, n));
        for k in 1..=top {
            let mut geom = C64::new(1.0, 0.0);
            for col in 0..n - k {
                m[[col + k, col]] = coef_a[k] + coef_b[k] * geom;
                geom *= q;
            }
        }
        out.push(TruncatedOperator::from_matrix(m).expect("finite"));
    }
    out
}
