//! Ergodic analysis of a chain: dense superoperator, peripheral spectrum and
//! fixed-space dimension, subharmonic-projection probe, extremality, the
//! coefficient recursions behind the mixing proofs, and the expected verdicts
//! backed by the closed-form results.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::channel::{ApplyMode, Channel};
use crate::error::{QbdError, Result};
use crate::linalg;
use crate::model::{ModelKind, ModelParameters, QubitState};
use crate::operators::{interval_projection, TruncatedOperator, Truncation};
use crate::stationary::explicit_fixed_points;

/// Default guard for the dense `N^2 x N^2` eigensolve.
pub const DENSE_GUARD_DEFAULT: usize = 64;
/// A verified fixed vector must commute with the weighted Kraus family to
/// this relative precision on the interior; this is what separates genuinely
/// fixed elements from truncation-induced near-1 eigenvectors.
pub const COMMUTATION_TOL: f64 = 1e-9;

fn dense_guard_limit() -> usize {
    std::env::var("QBD_MAX_N")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DENSE_GUARD_DEFAULT)
}

/// Dense matrix of the Heisenberg action in the matrix-unit basis with the
/// row-major flattening `idx(m, n) = m * N + n`. Column `idx(c, d)` holds the
/// coefficients of the image of the unit at `(c, d)`; by locality it is
/// supported on rows whose indices differ by at most one in each slot.
#[derive(Clone, Debug)]
pub struct SuperoperatorMatrix {
    n: usize,
    mat: Array2<C64>,
}

impl SuperoperatorMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.mat
    }
}

pub fn superoperator_matrix(ch: &Channel) -> Result<SuperoperatorMatrix> {
    let n = ch.dim();
    let limit = dense_guard_limit();
    if n > limit {
        return Err(QbdError::DimensionGuard { n, limit });
    }
    let mut mat = Array2::zeros((n * n, n * n));
    for c in 0..n {
        for d in 0..n {
            for (i, j, coeff) in ch.unit_image(c, d) {
                mat[[i * n + j, c * n + d]] = coeff;
            }
        }
    }
    Ok(SuperoperatorMatrix { n, mat })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PeripheralPoint {
    pub eigenvalue_re: f64,
    pub eigenvalue_im: f64,
    /// Relative interior residual of the eigenvalue equation.
    pub residual: f64,
}

/// Spectral summary near the unit circle.
#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    pub peripheral: Vec<PeripheralPoint>,
    /// Dimension of the verified numerically-fixed subspace. The identity is
    /// always a member (it is fixed on the interior); eigenvectors and probe
    /// vectors are added only after passing the residual and commutation
    /// filters.
    pub fixed_dim: usize,
    pub gap: f64,
    /// Peripheral eigenvalues away from 1, i.e. with `|mu - 1| > tol`; weak
    /// mixing predicts none.
    pub rogue_peripheral: usize,
}

type EigPair = (ndarray::Array1<C64>, Array2<C64>);

fn compute_eig(ch: &Channel) -> Result<EigPair> {
    let sup = superoperator_matrix(ch)?;
    linalg::eig_general(sup.matrix())
}

pub fn peripheral_spectrum(ch: &Channel, tol: f64) -> Result<SpectrumReport> {
    peripheral_spectrum_with_probes(ch, tol, &[])
}

/// Like [`peripheral_spectrum`], with additional candidate fixed vectors
/// (typically from [`explicit_fixed_points`]) counted into `fixed_dim` after
/// verification.
pub fn peripheral_spectrum_with_probes(
    ch: &Channel,
    tol: f64,
    probes: &[TruncatedOperator],
) -> Result<SpectrumReport> {
    let eig = compute_eig(ch)?;
    spectrum_from_eig(ch, tol, probes, &eig)
}

fn spectrum_from_eig(
    ch: &Channel,
    tol: f64,
    probes: &[TruncatedOperator],
    eig: &EigPair,
) -> Result<SpectrumReport> {
    let n = ch.dim();
    let (vals, vecs) = eig;

    let interior = ch.interior();
    let mut peripheral = Vec::new();
    let mut rogue = 0;
    let mut non_peripheral_max = 0.0f64;
    let mut fixed: Vec<Array2<C64>> = vec![Array2::eye(n)];

    for (idx, mu) in vals.iter().enumerate() {
        if mu.norm() >= 1.0 - tol {
            let v = column_as_matrix(vecs, idx, n);
            let scale = linalg::corner_max_abs(&v, interior);
            let residual = if scale > 0.0 {
                let x = TruncatedOperator::from_matrix(v.clone())?;
                let img = ch.apply_heisenberg(&x, ApplyMode::Coefficient)?;
                let diff = img.into_matrix() - &v.mapv(|z| z * *mu);
                linalg::corner_max_abs(&diff, interior) / scale
            } else {
                f64::NAN
            };
            peripheral.push(PeripheralPoint {
                eigenvalue_re: mu.re,
                eigenvalue_im: mu.im,
                residual,
            });
            if (mu - C64::new(1.0, 0.0)).norm() > tol {
                rogue += 1;
            }
        } else {
            non_peripheral_max = non_peripheral_max.max(mu.norm());
        }
        if (mu - C64::new(1.0, 0.0)).norm() <= tol {
            let v = column_as_matrix(vecs, idx, n);
            if verifies_as_fixed(ch, &v, interior, 10.0 * tol)? {
                fixed.push(v);
            }
        }
    }

    let probe_corner = (n.saturating_sub(3 + probes.len())).max(2);
    for y in probes {
        let scale = y.corner_max_abs(probe_corner);
        if scale == 0.0 {
            continue;
        }
        let img = ch.apply_heisenberg(y, ApplyMode::Kraus)?;
        let res = img.sub(y).corner_max_abs(probe_corner) / scale;
        if res <= 1e-8 {
            fixed.push(y.matrix().clone());
        }
    }

    let rank_corner = (n.saturating_sub(3 + probes.len())).max(2);
    let fixed_dim = linalg::span_rank(&fixed, rank_corner, 1e-6)?;
    let gap = 1.0 - non_peripheral_max;
    Ok(SpectrumReport { peripheral, fixed_dim, gap, rogue_peripheral: rogue })
}

fn column_as_matrix(vecs: &Array2<C64>, col: usize, n: usize) -> Array2<C64> {
    let mut m = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            m[[i, j]] = vecs[[i * n + j, col]];
        }
    }
    m
}

/// Residual and Kraus-commutation filter for a would-be fixed element.
fn verifies_as_fixed(
    ch: &Channel,
    v: &Array2<C64>,
    interior: usize,
    residual_tol: f64,
) -> Result<bool> {
    let scale = linalg::corner_max_abs(v, interior);
    if scale == 0.0 {
        return Ok(false);
    }
    let x = TruncatedOperator::from_matrix(v.clone())?;
    let img = ch.apply_heisenberg(&x, ApplyMode::Coefficient)?;
    let fp = img.sub(&x).corner_max_abs(interior) / scale;
    if fp > residual_tol {
        return Ok(false);
    }
    for (w, t) in ch.kraus() {
        if *w == 0.0 {
            continue;
        }
        let comm = x.mul(t).sub(&t.mul(&x)).corner_max_abs(interior) / scale;
        if comm > COMMUTATION_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Outcome of the subharmonic-projection search. The candidate family is
/// structured (initial intervals, their complements, and rank-1 spectral
/// projections of fixed elements), so a negative answer is evidence, not
/// proof.
#[derive(Clone, Debug)]
pub enum SubharmonicVerdict {
    NoneFound,
    Found { description: String, projection: TruncatedOperator },
}

impl SubharmonicVerdict {
    pub fn summary(&self) -> String {
        match self {
            SubharmonicVerdict::NoneFound => "no_subharmonic_found".into(),
            SubharmonicVerdict::Found { description, .. } => {
                format!("subharmonic_found({description})")
            }
        }
    }
}

pub fn subharmonic_probe(ch: &Channel, tol: f64) -> Result<SubharmonicVerdict> {
    let eig = if ch.dim() <= dense_guard_limit() {
        Some(compute_eig(ch)?)
    } else {
        None
    };
    subharmonic_from_eig(ch, tol, eig.as_ref())
}

fn subharmonic_from_eig(
    ch: &Channel,
    tol: f64,
    eig: Option<&EigPair>,
) -> Result<SubharmonicVerdict> {
    let n = ch.dim();
    let mut candidates: Vec<(String, TruncatedOperator)> = Vec::new();
    for k in 0..=n.saturating_sub(3) {
        let p = interval_projection(0, k, n)?;
        let compl = TruncatedOperator::identity(n).sub(&p);
        candidates.push((format!("p[0,{k}]"), p));
        candidates.push((format!("complement of p[0,{k}]"), compl));
    }
    if let Some(eig) = eig {
        for (label, p) in spectral_projection_candidates(ch, tol, eig)? {
            candidates.push((label, p));
        }
    }
    let interior = ch.interior();
    for (label, p) in candidates {
        let img = ch.apply_heisenberg(&p, ApplyMode::Kraus)?;
        let diff = img.sub(&p).into_matrix();
        let min_eig = linalg::min_eig_hermitian(&linalg::corner(&diff, interior))?;
        if min_eig < -tol {
            continue;
        }
        // second, equivalent characterization: t p = p t p for every
        // weighted Kraus operator
        let compl = TruncatedOperator::identity(n).sub(&p);
        let mut violates = false;
        for (w, t) in ch.kraus() {
            if *w == 0.0 {
                continue;
            }
            let off = compl.mul(&t.mul(&p));
            if off.corner_max_abs(interior) > tol.max(1e-10) {
                violates = true;
                break;
            }
        }
        if !violates {
            return Ok(SubharmonicVerdict::Found { description: label, projection: p });
        }
    }
    Ok(SubharmonicVerdict::NoneFound)
}

/// Rank-1 projections onto eigenvectors of (the Hermitian parts of) verified
/// fixed elements.
fn spectral_projection_candidates(
    ch: &Channel,
    tol: f64,
    (vals, vecs): &EigPair,
) -> Result<Vec<(String, TruncatedOperator)>> {
    let n = ch.dim();
    let interior = ch.interior();
    let mut out = Vec::new();
    for (idx, mu) in vals.iter().enumerate() {
        if (mu - C64::new(1.0, 0.0)).norm() > tol.max(1e-7) {
            continue;
        }
        let v = column_as_matrix(vecs, idx, n);
        if !verifies_as_fixed(ch, &v, interior, 1e-6)? {
            continue;
        }
        let herm = linalg::hermitian_part(&v);
        let skew = linalg::hermitian_part(&v.mapv(|z| z * C64::new(0.0, -1.0)));
        for part in [herm, skew] {
            let (evals, evecs) = linalg::eigh_hermitian(&part)?;
            let top = evals.iter().map(|e| e.abs()).fold(0.0, f64::max);
            if top == 0.0 {
                continue;
            }
            for (k, e) in evals.iter().enumerate() {
                if e.abs() < 0.1 * top {
                    continue;
                }
                let mut proj = Array2::zeros((n, n));
                for i in 0..n {
                    for j in 0..n {
                        proj[[i, j]] = evecs[[i, k]] * evecs[[j, k]].conj();
                    }
                }
                out.push((
                    "rank-1 spectral projection of a fixed element".to_string(),
                    TruncatedOperator::from_matrix(proj)?,
                ));
            }
        }
    }
    Ok(out)
}

/// A convex decomposition `T = w1 T1 + w2 T2` into distinct unital maps,
/// each given by its weighted Kraus family.
#[derive(Clone, Debug)]
pub struct ConvexSplit {
    pub weights: (f64, f64),
    pub first: Vec<(f64, TruncatedOperator)>,
    pub second: Vec<(f64, TruncatedOperator)>,
    /// Max-entry error of the recombination, checked on a fixed probe set.
    pub recombination_error: f64,
    /// `(<T1(p0) e1, e0>, <T2(p0) e1, e0>)` when that witness separates the
    /// two maps.
    pub witness: Option<(C64, C64)>,
    /// Max-entry distance of `T1(p0)` and `T2(p0)`.
    pub maps_differ: f64,
}

#[derive(Clone, Debug)]
pub enum ExtremalityVerdict {
    Extremal,
    NotExtremal(Box<ConvexSplit>),
    Undetermined,
}

impl ExtremalityVerdict {
    pub fn summary(&self) -> &'static str {
        match self {
            ExtremalityVerdict::Extremal => "extremal",
            ExtremalityVerdict::NotExtremal(_) => "not_extremal",
            ExtremalityVerdict::Undetermined => "undetermined",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExtremalityReport {
    pub verdict: ExtremalityVerdict,
    /// Numerical rank of the span of the pairwise products of the weighted
    /// Kraus operators; linear independence of the products certifies an
    /// extreme point.
    pub gram_rank: usize,
    /// Numerical rank of the span of the weighted Kraus operators
    /// themselves; full rank means the decomposition is minimal.
    pub kraus_operator_rank: usize,
}

pub fn extremality_report(ch: &Channel) -> Result<ExtremalityReport> {
    let n = ch.dim();
    let interior = ch.interior();
    let kraus = ch.kraus();

    let mut products = Vec::new();
    for (wi, ti) in kraus {
        for (wj, tj) in kraus {
            let scale = (wi * wj).sqrt();
            products.push(ti.adjoint().mul(tj).scaled(C64::new(scale, 0.0)).into_matrix());
        }
    }
    let gram_rank = linalg::raw_span_rank(&products, interior, n as f64 * 1e-12)?;
    let ops: Vec<_> = kraus
        .iter()
        .map(|(w, t)| t.scaled(C64::new(w.sqrt(), 0.0)).into_matrix())
        .collect();
    let kraus_operator_rank = linalg::raw_span_rank(&ops, interior, n as f64 * 1e-12)?;

    let psi = ch.psi();
    let lam = psi.lambda();
    let zeta = psi.zeta();
    let class = psi.classify();

    let verdict = if lam == 1.0 {
        north_pole_verdict(ch)?
    } else if class.pure {
        if lam == 0.0 || (zeta.norm() - 1.0).abs() <= 1e-12 {
            ExtremalityVerdict::Extremal
        } else {
            // inside the disc but within classification tolerance of pure
            ExtremalityVerdict::Undetermined
        }
    } else {
        // non-pure: explicit convex split from the two halves of the family
        let w1 = (1.0 - lam) * (1.0 - zeta.norm_sqr());
        let w2 = lam + zeta.norm_sqr() * (1.0 - lam);
        let t1 = kraus[0].1.clone();
        let t2 = kraus[1].1.clone();
        let t3 = kraus[2].1.clone();
        let t4 = kraus[3].1.clone();
        let first = vec![(1.0, t3), (1.0, t4)];
        let second = vec![(lam / w2, t1), (lam / w2, t2)];
        let split = build_split(ch, (w1, w2), first, second, true)?;
        ExtremalityVerdict::NotExtremal(Box::new(split))
    };

    Ok(ExtremalityReport { verdict, gram_rank, kraus_operator_rank })
}

/// At the north pole extremality hinges on the compressed square coupling
/// `s* a^2 s`: a nonzero multiple of the identity or of `p_0` yields an
/// explicit convex split, anything else is extremal.
fn north_pole_verdict(ch: &Channel) -> Result<ExtremalityVerdict> {
    let n = ch.dim();
    let al = &ch.model().alphas()[..n];
    let tail = &al[1..];
    let tol = 1e-12;
    let all_zero = tail.iter().all(|a| a.abs() <= tol);
    if all_zero {
        return Ok(ExtremalityVerdict::Extremal);
    }
    let first_sq = tail[0] * tail[0];
    let multiple_of_one = tail.iter().all(|a| (a * a - first_sq).abs() <= tol) && first_sq > tol;
    let multiple_of_p0 =
        first_sq > tol && tail[1..].iter().all(|a| a.abs() <= tol);
    let t1 = ch.kraus()[0].1.clone(); // s* a s
    let t2 = ch.kraus()[1].1.clone(); // b s
    if multiple_of_one {
        let mu = first_sq;
        let first = vec![(1.0 / mu, t1)];
        let second = vec![(1.0 / (1.0 - mu), t2)];
        let split = build_split(ch, (mu, 1.0 - mu), first, second, false)?;
        return Ok(ExtremalityVerdict::NotExtremal(Box::new(split)));
    }
    if multiple_of_p0 {
        let mu = first_sq;
        let root = mu.sqrt();
        let p0 = interval_projection(0, 0, n)?;
        let minus = p0.scaled(C64::new(root, 0.0)).sub(&t2);
        let plus = p0.scaled(C64::new(root, 0.0)).add(&t2);
        let split = build_split(ch, (0.5, 0.5), vec![(1.0, minus)], vec![(1.0, plus)], false)?;
        return Ok(ExtremalityVerdict::NotExtremal(Box::new(split)));
    }
    Ok(ExtremalityVerdict::Extremal)
}

fn apply_family(
    family: &[(f64, TruncatedOperator)],
    x: &TruncatedOperator,
) -> TruncatedOperator {
    let mut out = TruncatedOperator::zeros(x.dim());
    for (w, t) in family {
        out = out.add(&t.adjoint().mul(x).mul(t).scaled(C64::new(*w, 0.0)));
    }
    out
}

fn build_split(
    ch: &Channel,
    weights: (f64, f64),
    first: Vec<(f64, TruncatedOperator)>,
    second: Vec<(f64, TruncatedOperator)>,
    with_witness: bool,
) -> Result<ConvexSplit> {
    let n = ch.dim();
    let interior = ch.interior();
    let p0 = interval_projection(0, 0, n)?;
    let mut probes = vec![TruncatedOperator::identity(n), p0.clone()];
    let mut wave = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            let phase = (i as f64 * 0.71 + j as f64 * 1.13).sin();
            wave[[i, j]] = C64::new(phase, (i as f64 - j as f64) * 0.05);
        }
    }
    probes.push(TruncatedOperator::from_matrix(wave)?);
    let mut recombination_error = 0.0f64;
    for x in &probes {
        let combined = apply_family(&first, x)
            .scaled(C64::new(weights.0, 0.0))
            .add(&apply_family(&second, x).scaled(C64::new(weights.1, 0.0)));
        let direct = ch.apply_heisenberg(x, ApplyMode::Kraus)?;
        recombination_error = recombination_error
            .max(combined.sub(&direct).corner_max_abs(interior) / x.max_abs().max(1.0));
    }
    let first_p0 = apply_family(&first, &p0);
    let second_p0 = apply_family(&second, &p0);
    let maps_differ = first_p0.sub(&second_p0).corner_max_abs(interior);
    let witness = if with_witness {
        Some((first_p0.entry(0, 1), second_p0.entry(0, 1)))
    } else {
        None
    };
    Ok(ConvexSplit { weights, first, second, recombination_error, witness, maps_differ })
}

/// The two-term transfer matrix governing the coefficient recursions along
/// the diagonals, together with the entrywise residuals of the eigenvalue
/// equations for a candidate `x` at peripheral eigenvalue `mu`.
#[derive(Clone, Debug)]
pub struct RecursionReport {
    pub max_residual: f64,
    pub transfer: [[C64; 2]; 2],
    /// Eigenvalues ordered by modulus, `|omega_1| <= |omega_2|`.
    pub omega: (C64, C64),
    pub det: C64,
    pub trace: C64,
}

pub fn recursion_residuals(
    ch: &Channel,
    x: &TruncatedOperator,
    mu: C64,
) -> Result<RecursionReport> {
    if (mu.norm() - 1.0).abs() > 1e-12 {
        return Err(QbdError::PreconditionViolated("|mu| must be 1".into()));
    }
    if x.dim() != ch.dim() {
        return Err(QbdError::ShapeMismatch { expected: ch.dim(), got: x.dim() });
    }
    let lam = ch.psi().lambda();
    let zeta = ch.psi().zeta();
    match ch.model().kind() {
        ModelKind::Baby => {
            if lam == 0.0 {
                return Err(QbdError::PreconditionViolated(
                    "transfer matrix needs lambda > 0".into(),
                ));
            }
            let nu = ch.psi().nu();
            let n = ch.dim();
            let last = n - 2; // equations reference index + 1
            let mut worst = 0.0f64;
            // corner equation
            let r = mu * x.entry(0, 0)
                - ((1.0 - lam) * x.entry(0, 0)
                    + lam * x.entry(1, 1)
                    - nu.conj() * x.entry(0, 1)
                    - nu * x.entry(1, 0));
            worst = worst.max(r.norm());
            for m in 1..last {
                let r = mu * x.entry(m, 0) - (lam * x.entry(m + 1, 1) - nu * x.entry(m + 1, 0));
                worst = worst.max(r.norm());
                let r = mu * x.entry(0, m)
                    - (lam * x.entry(1, m + 1) - nu.conj() * x.entry(0, m + 1));
                worst = worst.max(r.norm());
            }
            for m in 1..last {
                for k in 1..last {
                    let r = mu * x.entry(m, k)
                        - (lam * x.entry(m + 1, k + 1) + (1.0 - lam) * x.entry(m - 1, k - 1));
                    worst = worst.max(r.norm());
                }
            }
            let trace = mu / lam;
            let det = C64::new((1.0 - lam) / lam, 0.0);
            let omega = quadratic_roots(trace, det);
            let transfer = [
                [trace, -det],
                [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            ];
            Ok(RecursionReport { max_residual: worst, transfer, omega, det, trace })
        }
        ModelKind::Homogeneous { alpha, beta } => {
            if zeta != C64::new(0.0, 0.0) {
                return Err(QbdError::PreconditionViolated(
                    "constant-coupling recursion needs zeta = 0".into(),
                ));
            }
            if lam == 0.0 {
                return Err(QbdError::PreconditionViolated(
                    "transfer matrix needs lambda > 0".into(),
                ));
            }
            let (a, b) = (*alpha, *beta);
            let a2 = a * a;
            let b2 = b * b;
            let n = ch.dim();
            let last = n - 2;
            let mut worst = 0.0f64;
            let r = mu * x.entry(0, 0)
                - ((lam * a2 + (1.0 - lam)) * x.entry(0, 0) + lam * b2 * x.entry(1, 1));
            worst = worst.max(r.norm());
            for k in 1..last {
                let r = mu * x.entry(0, k)
                    - ((lam * a2 + (1.0 - lam) * a) * x.entry(0, k)
                        + lam * b2 * x.entry(1, k + 1));
                worst = worst.max(r.norm());
                let r = mu * x.entry(k, 0)
                    - ((lam * a2 + (1.0 - lam) * a) * x.entry(k, 0)
                        + lam * b2 * x.entry(k + 1, 1));
                worst = worst.max(r.norm());
            }
            for m in 1..last {
                for k in 1..last {
                    let r = mu * x.entry(m, k)
                        - (a2 * x.entry(m, k)
                            + lam * b2 * x.entry(m + 1, k + 1)
                            + (1.0 - lam) * b2 * x.entry(m - 1, k - 1));
                    worst = worst.max(r.norm());
                }
            }
            let trace = (mu - a2) / (lam * b2);
            let det = C64::new((1.0 - lam) / lam, 0.0);
            let omega = quadratic_roots(trace, det);
            let transfer = [
                [trace, -det],
                [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            ];
            Ok(RecursionReport { max_residual: worst, transfer, omega, det, trace })
        }
        other => Err(QbdError::PreconditionViolated(format!(
            "recursion residuals are defined for the baby and constant-coupling models, got {}",
            other.name()
        ))),
    }
}

/// Roots of `w^2 - trace w + det`, ordered by modulus.
fn quadratic_roots(trace: C64, det: C64) -> (C64, C64) {
    let disc = (trace * trace - det * 4.0).sqrt();
    let r1 = (trace + disc) * 0.5;
    let r2 = (trace - disc) * 0.5;
    if r1.norm() <= r2.norm() {
        (r1, r2)
    } else {
        (r2, r1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Yes,
    No,
    Unknown,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::Unknown => "unknown",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TaggedVerdict {
    pub verdict: Verdict,
    /// Which closed-form result backs the verdict.
    pub basis: String,
}

fn tv(verdict: Verdict, basis: &str) -> TaggedVerdict {
    TaggedVerdict { verdict, basis: basis.to_string() }
}

/// Expected verdicts for irreducibility, existence of an invariant normal
/// state, and weak mixing, as far as the closed-form results decide them.
#[derive(Clone, Debug, Serialize)]
pub struct TheoremVerdicts {
    pub irreducible: TaggedVerdict,
    pub invariant_state: TaggedVerdict,
    pub weak_mixing: TaggedVerdict,
}

pub fn theorem_verdicts(kind: &ModelKind, psi: &QubitState) -> TheoremVerdicts {
    let lam = psi.lambda();
    let zeta = psi.zeta();
    let diagonal = zeta == C64::new(0.0, 0.0);
    let class = psi.classify();
    let threshold = match kind {
        ModelKind::Homogeneous { alpha, .. } => Some(0.5 * (1.0 - alpha)),
        ModelKind::Baby => Some(0.5),
        _ => None,
    };

    let irreducible = if class.faithful {
        tv(Verdict::Yes, "irreducibility theorem: faithful states admit no nontrivial subharmonic projection")
    } else if lam == 0.0 || lam == 1.0 {
        tv(Verdict::No, "pole states carry explicit subharmonic projections")
    } else if let Some(t) = threshold {
        if lam < t {
            tv(Verdict::No, "support of the pure invariant state is a nontrivial subharmonic projection below the threshold (1 - alpha)/2")
        } else {
            tv(Verdict::Unknown, "no irreducibility result for pure states above the threshold (1 - alpha)/2")
        }
    } else {
        tv(Verdict::Unknown, "no irreducibility result for pure states of non-constant couplings")
    };

    let invariant_state = if diagonal {
        if lam < 0.5 {
            tv(Verdict::Yes, "diagonal states: geometric invariant state exists iff lambda < 1/2")
        } else {
            tv(Verdict::No, "diagonal states: geometric invariant state exists iff lambda < 1/2")
        }
    } else if matches!(kind, ModelKind::Baby) {
        if lam < 0.5 {
            tv(Verdict::Yes, "baby chain: invariant state exists iff lambda < 1/2, for every zeta")
        } else {
            tv(Verdict::No, "baby chain: invariant state exists iff lambda < 1/2, for every zeta")
        }
    } else if matches!(kind, ModelKind::Homogeneous { .. }) && class.pure {
        match threshold {
            Some(t) if lam < t => tv(
                Verdict::Yes,
                "constant couplings: pure invariant state exists iff lambda < (1 - alpha)/2",
            ),
            _ => tv(
                Verdict::Unknown,
                "above the pure-state threshold a non-pure invariant state is not ruled out",
            ),
        }
    } else {
        tv(Verdict::Unknown, "no general existence result for non-diagonal states")
    };

    let weak_mixing = if lam == 0.0 {
        tv(Verdict::Yes, "south pole: weakly mixing for every choice of couplings")
    } else {
        match kind {
            ModelKind::Baby => {
                if lam <= 0.5 {
                    tv(Verdict::Yes, "baby chain: weakly mixing iff lambda <= 1/2, for every zeta")
                } else {
                    tv(Verdict::No, "baby chain: fixed space is infinite dimensional for lambda > 1/2")
                }
            }
            ModelKind::Homogeneous { .. } if diagonal => {
                if lam <= 0.5 {
                    tv(Verdict::Yes, "constant couplings, diagonal states: weakly mixing iff lambda <= 1/2")
                } else {
                    tv(Verdict::No, "constant couplings: fixed space is infinite dimensional for lambda > 1/2")
                }
            }
            ModelKind::Homogeneous { .. } => {
                tv(Verdict::Unknown, "no mixing result for non-diagonal states of constant couplings")
            }
            _ => {
                if diagonal && lam < 0.5 {
                    tv(Verdict::Yes, "diagonal states below 1/2: the invariant state forces weak mixing")
                } else {
                    tv(Verdict::Unknown, "no mixing result for this parameter region")
                }
            }
        }
    };

    TheoremVerdicts { irreducible, invariant_state, weak_mixing }
}

/// Everything the ergodic analysis produces for one channel.
#[derive(Clone, Debug)]
pub struct ErgodicReport {
    pub spectrum: SpectrumReport,
    pub subharmonic: SubharmonicVerdict,
    pub expected: TheoremVerdicts,
    pub extremality: ExtremalityReport,
}

/// Peripheral spectrum and subharmonic probe off one shared
/// eigendecomposition; this is the per-point workhorse of the sweep.
pub fn spectrum_and_probe(
    ch: &Channel,
    tol: f64,
    probes: &[TruncatedOperator],
) -> Result<(SpectrumReport, SubharmonicVerdict)> {
    let eig = compute_eig(ch)?;
    let spectrum = spectrum_from_eig(ch, tol, probes, &eig)?;
    let subharmonic = subharmonic_from_eig(ch, 1e-9, Some(&eig))?;
    Ok((spectrum, subharmonic))
}

/// Runs the full ergodic analysis; above the mixing threshold the explicit
/// fixed-point families are fed into the fixed-space count as probes.
pub fn ergodic_report(ch: &Channel, tol: f64) -> Result<ErgodicReport> {
    let probes = default_probes(ch);
    let (spectrum, subharmonic) = spectrum_and_probe(ch, tol, &probes)?;
    let expected = theorem_verdicts(ch.model().kind(), ch.psi());
    let extremality = extremality_report(ch)?;
    Ok(ErgodicReport { spectrum, subharmonic, expected, extremality })
}

/// Explicit fixed points when the model admits them, capped to the window.
pub fn default_probes(ch: &Channel) -> Vec<TruncatedOperator> {
    let lam = ch.psi().lambda();
    let diagonal = ch.psi().zeta() == C64::new(0.0, 0.0);
    let eligible = lam > 0.5
        && match ch.model().kind() {
            ModelKind::Baby => true,
            ModelKind::Homogeneous { .. } => diagonal,
            _ => false,
        };
    if !eligible {
        return Vec::new();
    }
    let count = 5.min(ch.dim().saturating_sub(4));
    explicit_fixed_points(ch, count).unwrap_or_default()
}

/// Numeric check of the mixing mechanism at the north pole for the fast
/// coupling decay `beta_n = (1/2)^n`: the diagonal recursion factor is
/// neutral while every off-diagonal recursion grows by at least 5/4 per
/// step, so the only peripheral eigenvector left is the identity.
#[derive(Clone, Debug, Serialize)]
pub struct PsiPlusMixingReport {
    pub fixed_dim: usize,
    pub rogue_peripheral: usize,
    /// Smallest off-diagonal growth factor over k = 1..=5, m = 0..=10.
    pub min_growth_factor: f64,
    /// Smallest slack of the factor over its lower bound
    /// `2^(k-1) + 2^(-k-1)`.
    pub min_growth_margin: f64,
    /// Max deviation of the diagonal factor `2^(2m+2)(mu - 1) + 1` from 1 at
    /// `mu = 1`.
    pub diagonal_factor_residual: f64,
}

pub fn example_psiplus_mixing_check(trunc: Truncation) -> Result<PsiPlusMixingReport> {
    let n = trunc.dim();
    if n > 32 {
        return Err(QbdError::PreconditionViolated(format!(
            "north-pole mixing check wants dim <= 32, got {n}"
        )));
    }
    let mut alpha = Vec::with_capacity(n + 1);
    let mut beta = Vec::with_capacity(n + 1);
    alpha.push(1.0);
    beta.push(0.0);
    for k in 1..=n {
        let b = 0.5f64.powi(k as i32);
        beta.push(b);
        alpha.push((1.0 - b * b).sqrt());
    }
    let model = ModelParameters::general(alpha, beta)?;
    let ch = Channel::new(model, QubitState::plus(), trunc)?;
    let spectrum = peripheral_spectrum(&ch, 1e-7)?;

    let mut min_factor = f64::INFINITY;
    let mut min_margin = f64::INFINITY;
    for k in 1..=5u32 {
        for m in 0..=10u32 {
            let c = ((1.0 - 0.25f64.powi(m as i32 + 1))
                * (1.0 - 0.25f64.powi((m + k) as i32 + 1)))
            .sqrt();
            // worst case over unit-modulus mu is attained at mu = 1
            let factor = 2f64.powi((2 * m + k + 2) as i32) * (1.0 - c);
            let bound = 2f64.powi(k as i32 - 1) + 2f64.powi(-(k as i32) - 1);
            min_factor = min_factor.min(factor);
            min_margin = min_margin.min(factor - bound);
        }
    }
    let mu = C64::new(1.0, 0.0);
    let mut diag_residual = 0.0f64;
    for m in 0..=10u32 {
        let factor = (mu - C64::new(1.0, 0.0)) * 2f64.powi(2 * m as i32 + 2) + 1.0;
        diag_residual = diag_residual.max((factor - C64::new(1.0, 0.0)).norm());
    }
    Ok(PsiPlusMixingReport {
        fixed_dim: spectrum.fixed_dim,
        rogue_peripheral: spectrum.rogue_peripheral,
        min_growth_factor: min_factor,
        min_growth_margin: min_margin,
        diagonal_factor_residual: diag_residual,
    })
}
