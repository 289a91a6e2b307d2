//! Operator toolbox on the truncated basis: shift, coupling diagonals, matrix
//! units, interval projections, the block dilation unitary, and the two
//! conditional expectations.

use ndarray::{s, Array2};
use num_complex::Complex64 as C64;

use crate::error::{QbdError, Result};
use crate::linalg;
use crate::model::{ModelParameters, QubitState};

/// Truncation window: everything lives on basis indices `0..dim`. Checks that
/// compare against the untruncated operators are restricted to the interior,
/// i.e. indices `< dim - interior_margin`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Truncation {
    dim: usize,
    interior_margin: usize,
}

impl Truncation {
    pub fn new(dim: usize) -> Result<Self> {
        Self::with_margin(dim, 1)
    }

    pub fn with_margin(dim: usize, interior_margin: usize) -> Result<Self> {
        if dim < 4 {
            return Err(QbdError::OutOfRange(format!("truncation dim {dim} < 4")));
        }
        if interior_margin < 1 || dim < 2 * interior_margin + 2 {
            return Err(QbdError::OutOfRange(format!(
                "interior margin {interior_margin} too large for dim {dim}"
            )));
        }
        Ok(Self { dim, interior_margin })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn interior_margin(&self) -> usize {
        self.interior_margin
    }

    /// Number of interior indices; entries with both indices below this are
    /// unaffected by the truncation for single applications.
    pub fn interior(&self) -> usize {
        self.dim - self.interior_margin
    }
}

/// A dense complex matrix standing for the compression of an operator to the
/// truncated basis, with optional bandwidth hints `(lower, upper)`.
#[derive(Clone, Debug)]
pub struct TruncatedOperator {
    mat: Array2<C64>,
    band: Option<(usize, usize)>,
}

impl TruncatedOperator {
    pub fn from_matrix(mat: Array2<C64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(QbdError::ShapeMismatch { expected: mat.nrows(), got: mat.ncols() });
        }
        if mat.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(QbdError::OutOfRange("non-finite matrix entry".into()));
        }
        Ok(Self { mat, band: None })
    }

    pub fn zeros(dim: usize) -> Self {
        Self { mat: Array2::zeros((dim, dim)), band: Some((0, 0)) }
    }

    pub fn identity(dim: usize) -> Self {
        Self { mat: Array2::eye(dim), band: Some((0, 0)) }
    }

    /// Attach a bandwidth hint; fails if entries outside the band are nonzero.
    pub fn with_band(mut self, lower: usize, upper: usize) -> Result<Self> {
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                let inside = j + lower >= i && i + upper >= j;
                if !inside && self.mat[[i, j]] != C64::new(0.0, 0.0) {
                    return Err(QbdError::OutOfRange(format!(
                        "entry ({i},{j}) outside declared band ({lower},{upper})"
                    )));
                }
            }
        }
        self.band = Some((lower, upper));
        Ok(self)
    }

    pub fn band(&self) -> Option<(usize, usize)> {
        self.band
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.mat[[i, j]]
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> Array2<C64> {
        self.mat
    }

    pub fn adjoint(&self) -> Self {
        Self {
            mat: linalg::adjoint(&self.mat),
            band: self.band.map(|(l, u)| (u, l)),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let band = match (self.band, rhs.band) {
            (Some((l1, u1)), Some((l2, u2))) => Some((l1 + l2, u1 + u2)),
            _ => None,
        };
        Self { mat: linalg::matmul(&self.mat, &rhs.mat), band }
    }

    pub fn scaled(&self, c: C64) -> Self {
        Self { mat: self.mat.mapv(|z| z * c), band: self.band }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let band = match (self.band, rhs.band) {
            (Some((l1, u1)), Some((l2, u2))) => Some((l1.max(l2), u1.max(u2))),
            _ => None,
        };
        Self { mat: &self.mat + &rhs.mat, band }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let band = match (self.band, rhs.band) {
            (Some((l1, u1)), Some((l2, u2))) => Some((l1.max(l2), u1.max(u2))),
            _ => None,
        };
        Self { mat: &self.mat - &rhs.mat, band }
    }

    pub fn max_abs(&self) -> f64 {
        linalg::max_abs(&self.mat)
    }

    /// Max-entry norm over the `k x k` corner.
    pub fn corner_max_abs(&self, k: usize) -> f64 {
        linalg::corner_max_abs(&self.mat, k)
    }

    pub fn trace(&self) -> C64 {
        self.mat.diag().sum()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let n = self.dim();
        for i in 0..n {
            for j in i..n {
                if (self.mat[[i, j]] - self.mat[[j, i]].conj()).norm() > tol {
                    return false;
                }
            }
        }
        true
    }
}

/// The isometric shift compressed to the truncation: `s e_n = e_{n+1}` for
/// `n < dim - 1` and `s e_{dim-1} = 0`.
pub fn shift(dim: usize) -> TruncatedOperator {
    let mut m = Array2::zeros((dim, dim));
    for n in 0..dim - 1 {
        m[[n + 1, n]] = C64::new(1.0, 0.0);
    }
    TruncatedOperator { mat: m, band: Some((1, 0)) }
}

pub fn diagonal(values: &[f64]) -> TruncatedOperator {
    let dim = values.len();
    let mut m = Array2::zeros((dim, dim));
    for (n, v) in values.iter().enumerate() {
        m[[n, n]] = C64::new(*v, 0.0);
    }
    TruncatedOperator { mat: m, band: Some((0, 0)) }
}

/// Shift and the two coupling diagonals `a = diag(alpha_n)`, `b = diag(beta_n)`.
pub fn basis_operators(
    model: &ModelParameters,
    dim: usize,
) -> Result<(TruncatedOperator, TruncatedOperator, TruncatedOperator)> {
    if model.n_max() + 1 < dim {
        return Err(QbdError::PreconditionViolated(format!(
            "model holds couplings up to n = {}, truncation needs {}",
            model.n_max(),
            dim - 1
        )));
    }
    let s = shift(dim);
    let a = diagonal(&model.alphas()[..dim]);
    let b = diagonal(&model.betas()[..dim]);
    Ok((s, a, b))
}

/// The matrix unit with a single 1 at row `m`, column `n`.
pub fn matrix_unit(m: usize, n: usize, dim: usize) -> Result<TruncatedOperator> {
    if m >= dim || n >= dim {
        return Err(QbdError::IndexOutOfRange(format!(
            "matrix unit ({m},{n}) outside dim {dim}"
        )));
    }
    let mut mat = Array2::zeros((dim, dim));
    mat[[m, n]] = C64::new(1.0, 0.0);
    Ok(TruncatedOperator { mat, band: None })
}

/// Diagonal projection with ones exactly on `[m, n]`.
pub fn interval_projection(m: usize, n: usize, dim: usize) -> Result<TruncatedOperator> {
    if m > n || n >= dim {
        return Err(QbdError::IndexOutOfRange(format!(
            "interval [{m},{n}] outside dim {dim}"
        )));
    }
    let mut mat = Array2::zeros((dim, dim));
    for k in m..=n {
        mat[[k, k]] = C64::new(1.0, 0.0);
    }
    Ok(TruncatedOperator { mat, band: Some((0, 0)) })
}

/// The 2N x 2N block matrix `[[s*as, i s*b], [i bs, a]]` built from the
/// truncated shift and couplings. It is unitary except on the rows and
/// columns touching basis index `dim - 1`.
pub fn dilation_unitary(model: &ModelParameters, dim: usize) -> Result<Array2<C64>> {
    let (s, a, b) = basis_operators(model, dim)?;
    let sa = s.adjoint().mul(&a).mul(&s);
    let sb = s.adjoint().mul(&b).scaled(C64::i());
    let bs = b.mul(&s).scaled(C64::i());
    let mut u = Array2::zeros((2 * dim, 2 * dim));
    u.slice_mut(s![0..dim, 0..dim]).assign(sa.matrix());
    u.slice_mut(s![0..dim, dim..2 * dim]).assign(sb.matrix());
    u.slice_mut(s![dim..2 * dim, 0..dim]).assign(bs.matrix());
    u.slice_mut(s![dim..2 * dim, dim..2 * dim]).assign(a.matrix());
    Ok(u)
}

/// Max-entry norms of `u* u - 1`: first over rows/columns that avoid the last
/// basis index in either block (expected 0 exactly), then over everything.
pub fn unitarity_defect(u: &Array2<C64>) -> (f64, f64) {
    let two_n = u.nrows();
    let n = two_n / 2;
    let prod = linalg::matmul(&linalg::adjoint(u), u);
    let mut interior = 0.0f64;
    let mut full = 0.0f64;
    for i in 0..two_n {
        for j in 0..two_n {
            let expect = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
            let d = (prod[[i, j]] - expect).norm();
            full = full.max(d);
            let touches = i % n == n - 1 || j % n == n - 1;
            if !touches {
                interior = interior.max(d);
            }
        }
    }
    (interior, full)
}

/// Slice map pairing a 2x2 block matrix with the qubit state: block `(i, j)`
/// is weighted by the density-matrix entry `rho_{ji}`, so elementary tensors
/// `x (x) y` map to `psi(y) x`.
pub fn conditional_expectation_psi(
    x: &Array2<C64>,
    psi: &QubitState,
) -> Result<TruncatedOperator> {
    let two_n = x.nrows();
    if x.ncols() != two_n || !two_n.is_multiple_of(2) {
        return Err(QbdError::ShapeMismatch { expected: two_n, got: x.ncols() });
    }
    let n = two_n / 2;
    let rho = psi.density_matrix();
    let mut out = Array2::zeros((n, n));
    for (bi, bj, w) in [
        (0, 0, rho[[0, 0]]),
        (0, 1, rho[[1, 0]]),
        (1, 0, rho[[0, 1]]),
        (1, 1, rho[[1, 1]]),
    ] {
        let block = x.slice(s![bi * n..(bi + 1) * n, bj * n..(bj + 1) * n]);
        out.zip_mut_with(&block, |o, b| *o += w * b);
    }
    TruncatedOperator::from_matrix(out)
}

/// Eigenvalues of a Hermitian operator, ascending.
pub fn hermitian_eigenvalues(x: &TruncatedOperator) -> Result<Vec<f64>> {
    Ok(linalg::eigvals_hermitian(x.matrix())?.to_vec())
}

/// Pinching onto the diagonal: zeroes every off-diagonal entry.
pub fn conditional_expectation_diag(x: &TruncatedOperator) -> TruncatedOperator {
    let n = x.dim();
    let mut mat = Array2::zeros((n, n));
    for i in 0..n {
        mat[[i, i]] = x.entry(i, i);
    }
    TruncatedOperator { mat, band: Some((0, 0)) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelParameters;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn shift_isometry_defect_at_boundary() {
        let n = 6;
        let s = shift(n);
        let sts = s.adjoint().mul(&s);
        let sst = s.mul(&s.adjoint());
        for k in 0..n {
            let expect = if k == n - 1 { 0.0 } else { 1.0 };
            assert_eq!(sts.entry(k, k), c(expect, 0.0));
            let expect = if k == 0 { 0.0 } else { 1.0 };
            assert_eq!(sst.entry(k, k), c(expect, 0.0));
        }
    }

    #[test]
    fn baby_basis_operators() {
        let m = ModelParameters::baby(8).unwrap();
        let (_, a, b) = basis_operators(&m, 3).unwrap();
        assert_eq!(a.entry(0, 0), c(1.0, 0.0));
        assert_eq!(a.entry(1, 1), c(0.0, 0.0));
        assert_eq!(b.entry(1, 1), c(1.0, 0.0));
        assert_eq!(b.entry(2, 2), c(1.0, 0.0));
    }

    #[test]
    fn couplings_square_to_identity() {
        let m = ModelParameters::jaynes_cummings(0.7, 8).unwrap();
        let (_, a, b) = basis_operators(&m, 8).unwrap();
        let sum = a.mul(&a).add(&b.mul(&b));
        for i in 0..8 {
            assert!((sum.entry(i, i) - c(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn annihilation_action() {
        // (s* b) e_1 = beta_1 e_0
        let m = ModelParameters::jaynes_cummings(0.7, 8).unwrap();
        let (s, _, b) = basis_operators(&m, 8).unwrap();
        let t3 = s.adjoint().mul(&b);
        assert!((t3.entry(0, 1) - c(m.betas()[1], 0.0)).norm() < 1e-15);
    }

    #[test]
    fn matrix_unit_algebra() {
        let e01 = matrix_unit(0, 1, 4).unwrap();
        let e12 = matrix_unit(1, 2, 4).unwrap();
        // adjoint flips indices
        assert_eq!(e01.adjoint().entry(1, 0), c(1.0, 0.0));
        // e_{0,1} e_{1,2} = e_{0,2}
        let prod = e01.mul(&e12);
        assert_eq!(prod.entry(0, 2), c(1.0, 0.0));
        // e_{0,1} e_{0,1} = 0
        assert_eq!(e01.mul(&e01).max_abs(), 0.0);
        assert!(matrix_unit(4, 0, 4).is_err());
    }

    #[test]
    fn interval_projections() {
        let n = 5;
        let full = interval_projection(0, n - 1, n).unwrap();
        assert_eq!(full.sub(&TruncatedOperator::identity(n)).max_abs(), 0.0);
        let p2 = interval_projection(2, 2, 4).unwrap();
        assert_eq!(p2.entry(2, 2), c(1.0, 0.0));
        assert_eq!(p2.trace(), c(1.0, 0.0));
        // complement decomposition
        let p = interval_projection(1, 3, 6).unwrap();
        let compl = TruncatedOperator::identity(6).sub(&p);
        assert_eq!(p.add(&compl).sub(&TruncatedOperator::identity(6)).max_abs(), 0.0);
    }

    #[test]
    fn dilation_blocks_baby() {
        let m = ModelParameters::baby(8).unwrap();
        let u = dilation_unitary(&m, 3).unwrap();
        // block (1,1) = s*as = 0 for the baby model
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(u[[i, j]], c(0.0, 0.0));
            }
        }
        // block (2,2) = a = diag(1,0,0)
        assert_eq!(u[[3, 3]], c(1.0, 0.0));
        assert_eq!(u[[4, 4]], c(0.0, 0.0));
        // block (2,1) column 0: (i b s) e_0 = i beta_1 e_1
        assert_eq!(u[[4, 0]], c(0.0, 1.0));
    }

    #[test]
    fn dilation_unitary_defect_confined_to_boundary() {
        // exact couplings: the interior block identities hold bit for bit
        let m = ModelParameters::baby(12).unwrap();
        let u = dilation_unitary(&m, 12).unwrap();
        let (interior, full) = unitarity_defect(&u);
        assert_eq!(interior, 0.0);
        assert!(full > 0.5);
        // irrational couplings: same identities up to one rounding step
        let m = ModelParameters::jaynes_cummings(0.7, 12).unwrap();
        let u = dilation_unitary(&m, 12).unwrap();
        let (interior, full) = unitarity_defect(&u);
        assert!(interior <= 1e-15);
        assert!(full > 0.5);
    }

    #[test]
    fn slice_map_on_elementary_tensors() {
        let n = 4;
        let psi = QubitState::new(0.5, c(1.0, 0.0)).unwrap();
        // X = x (x) 1 maps to x for any state
        let mut x = Array2::<C64>::zeros((2 * n, 2 * n));
        let mut probe = Array2::<C64>::zeros((n, n));
        probe[[1, 2]] = c(0.3, -0.7);
        probe[[0, 0]] = c(1.0, 0.5);
        x.slice_mut(s![0..n, 0..n]).assign(&probe);
        x.slice_mut(s![n..2 * n, n..2 * n]).assign(&probe);
        let out = conditional_expectation_psi(&x, &psi).unwrap();
        assert!((&out.into_matrix() - &probe).iter().all(|z| z.norm() < 1e-15));

        // only the (1,2) block set: weight is rho_{21} = zeta/2
        let mut x = Array2::<C64>::zeros((2 * n, 2 * n));
        x.slice_mut(s![0..n, n..2 * n]).assign(&probe);
        let out = conditional_expectation_psi(&x, &psi).unwrap();
        let out = out.into_matrix();
        assert!((out[[1, 2]] - c(0.5, 0.0) * probe[[1, 2]]).norm() < 1e-15);
    }

    #[test]
    fn psi_plus_slice_is_first_block() {
        let n = 3;
        let psi = QubitState::plus();
        let mut x = Array2::<C64>::zeros((2 * n, 2 * n));
        for i in 0..2 * n {
            for j in 0..2 * n {
                x[[i, j]] = c((i * 7 + j) as f64, (i + 2 * j) as f64);
            }
        }
        let out = conditional_expectation_psi(&x, &psi).unwrap();
        for i in 0..n {
            for j in 0..n {
                assert_eq!(out.entry(i, j), x[[i, j]]);
            }
        }
    }

    #[test]
    fn pinching_is_idempotent_and_star_compatible() {
        let mut mat = Array2::<C64>::zeros((3, 3));
        mat[[0, 1]] = c(1.0, 2.0);
        mat[[2, 2]] = c(0.5, 0.0);
        let x = TruncatedOperator::from_matrix(mat).unwrap();
        let d = conditional_expectation_diag(&x);
        assert_eq!(d.entry(0, 1), c(0.0, 0.0));
        assert_eq!(d.entry(2, 2), c(0.5, 0.0));
        let dd = conditional_expectation_diag(&d);
        assert_eq!(dd.sub(&d).max_abs(), 0.0);
        let lhs = conditional_expectation_diag(&x.adjoint());
        let rhs = conditional_expectation_diag(&x).adjoint();
        assert_eq!(lhs.sub(&rhs).max_abs(), 0.0);
    }
}
