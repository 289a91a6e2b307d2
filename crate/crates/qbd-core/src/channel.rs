//! The transition operator of a chain, its predual, and three independent
//! ways of applying it: the weighted Kraus family, the block dilation, and
//! the entrywise coefficient formula.

use ndarray::{s, Array2};
use num_complex::Complex64 as C64;

use crate::error::{QbdError, Result};
use crate::linalg;
use crate::model::{ModelParameters, QubitState};
use crate::operators::{
    basis_operators, conditional_expectation_psi, dilation_unitary, interval_projection,
    matrix_unit, TruncatedOperator, Truncation,
};

/// Which of the three equivalent computation paths to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ApplyMode {
    Kraus,
    Dilation,
    Coefficient,
}

/// Result of a single nearest-neighbour sandwich check: smallest eigenvalues
/// of the two differences that must be positive semidefinite.
#[derive(Clone, Copy, Debug)]
pub struct SandwichCheck {
    pub lower_ok: bool,
    pub upper_ok: bool,
    pub lower_margin: f64,
    pub upper_margin: f64,
}

/// A chain at a fixed truncation, with its weighted Kraus family
/// precomputed. Heisenberg action: `T(x) = sum w t* x t`; Schroedinger
/// action on states: `sum w t rho t*`.
///
/// Zero-weight members of the family are omitted: at `lambda = 0` the first
/// two operators drop out, at `lambda = 1` or `|zeta| = 1` the last two.
#[derive(Clone, Debug)]
pub struct Channel {
    model: ModelParameters,
    psi: QubitState,
    trunc: Truncation,
    kraus: Vec<(f64, TruncatedOperator)>,
}

impl Channel {
    pub fn new(model: ModelParameters, psi: QubitState, trunc: Truncation) -> Result<Self> {
        let n = trunc.dim();
        let (s_op, a, b) = basis_operators(&model, n)?;
        let lam = psi.lambda();
        let zeta = psi.zeta();
        let mut kraus = Vec::new();
        if lam > 0.0 {
            let cfac = C64::i() * zeta * ((1.0 - lam) / lam).sqrt();
            let t1 = s_op.adjoint().mul(&a).mul(&s_op).add(&s_op.adjoint().mul(&b).scaled(cfac));
            let t2 = b.mul(&s_op).sub(&a.scaled(cfac));
            kraus.push((lam, t1));
            kraus.push((lam, t2));
        }
        let w = (1.0 - lam) * (1.0 - zeta.norm_sqr());
        if w > 0.0 {
            kraus.push((w, s_op.adjoint().mul(&b)));
            kraus.push((w, a));
        }
        Ok(Self { model, psi, trunc, kraus })
    }

    pub fn model(&self) -> &ModelParameters {
        &self.model
    }

    pub fn psi(&self) -> &QubitState {
        &self.psi
    }

    pub fn truncation(&self) -> Truncation {
        self.trunc
    }

    pub fn dim(&self) -> usize {
        self.trunc.dim()
    }

    /// First index excluded from interior checks (`dim - margin`).
    pub fn interior(&self) -> usize {
        self.trunc.interior()
    }

    pub fn kraus(&self) -> &[(f64, TruncatedOperator)] {
        &self.kraus
    }

    /// Heisenberg application `T(x)` through the requested path. On inputs
    /// supported in the leading `dim - 1` indices all three paths agree with
    /// the untruncated operator.
    pub fn apply_heisenberg(
        &self,
        x: &TruncatedOperator,
        mode: ApplyMode,
    ) -> Result<TruncatedOperator> {
        if x.dim() != self.dim() {
            return Err(QbdError::ShapeMismatch { expected: self.dim(), got: x.dim() });
        }
        match mode {
            ApplyMode::Kraus => Ok(self.apply_kraus(x)),
            ApplyMode::Dilation => self.apply_dilation(x),
            ApplyMode::Coefficient => Ok(self.apply_coefficient(x)),
        }
    }

    fn apply_kraus(&self, x: &TruncatedOperator) -> TruncatedOperator {
        let n = self.dim();
        let mut out = TruncatedOperator::zeros(n);
        for (w, t) in &self.kraus {
            let term = t.adjoint().mul(x).mul(t);
            out = out.add(&term.scaled(C64::new(*w, 0.0)));
        }
        out
    }

    fn apply_dilation(&self, x: &TruncatedOperator) -> Result<TruncatedOperator> {
        let n = self.dim();
        let u = dilation_unitary(&self.model, n)?;
        let mut big = Array2::zeros((2 * n, 2 * n));
        big.slice_mut(s![0..n, 0..n]).assign(x.matrix());
        big.slice_mut(s![n..2 * n, n..2 * n]).assign(x.matrix());
        let conjugated = linalg::matmul(&linalg::adjoint(&u), &linalg::matmul(&big, &u));
        conditional_expectation_psi(&conjugated, &self.psi)
    }

    fn apply_coefficient(&self, x: &TruncatedOperator) -> TruncatedOperator {
        let n = self.dim();
        let mut out = Array2::zeros((n, n));
        let zero = C64::new(0.0, 0.0);
        for r in 0..n {
            for c in 0..n {
                let v = x.entry(r, c);
                if v == zero {
                    continue;
                }
                for (i, j, coeff) in self.unit_image(r, c) {
                    out[[i, j]] += coeff * v;
                }
            }
        }
        TruncatedOperator::from_matrix(out).expect("finite by construction")
    }

    /// Entrywise image of the matrix unit at (row, col): the at most seven
    /// nonzero coefficients of `T(e_{row,col})`. Couplings at the truncation
    /// edge (index `dim`) count as zero, matching the compressed products.
    pub(crate) fn unit_image(&self, row: usize, col: usize) -> Vec<(usize, usize, C64)> {
        let n = self.dim();
        let lam = self.psi.lambda();
        let nu = self.psi.nu();
        let al = |k: usize| -> f64 {
            if k < n {
                self.model.alphas()[k]
            } else {
                0.0
            }
        };
        let be = |k: usize| -> f64 {
            if k < n {
                self.model.betas()[k]
            } else {
                0.0
            }
        };
        let mut terms = Vec::with_capacity(7);
        let diag = lam * al(row + 1) * al(col + 1) + (1.0 - lam) * al(row) * al(col);
        terms.push((row, col, C64::new(diag, 0.0)));
        if row + 1 < n && col + 1 < n {
            terms.push((
                row + 1,
                col + 1,
                C64::new((1.0 - lam) * be(row + 1) * be(col + 1), 0.0),
            ));
        }
        if row + 1 < n {
            terms.push((row + 1, col, nu.conj() * al(col + 1) * be(row + 1)));
        }
        if col + 1 < n {
            terms.push((row, col + 1, nu * al(row + 1) * be(col + 1)));
        }
        if row >= 1 && col >= 1 {
            terms.push((row - 1, col - 1, C64::new(lam * be(row) * be(col), 0.0)));
        }
        if row >= 1 {
            terms.push((row - 1, col, -nu * al(col) * be(row)));
        }
        if col >= 1 {
            terms.push((row, col - 1, -nu.conj() * al(row) * be(col)));
        }
        terms.retain(|(_, _, c)| *c != C64::new(0.0, 0.0));
        terms
    }

    /// Predual (state-side) application `sum w t rho t*`.
    pub fn apply_schrodinger(&self, rho: &TruncatedOperator) -> Result<TruncatedOperator> {
        if rho.dim() != self.dim() {
            return Err(QbdError::ShapeMismatch { expected: self.dim(), got: rho.dim() });
        }
        let mut out = TruncatedOperator::zeros(self.dim());
        for (w, t) in &self.kraus {
            let term = t.mul(rho).mul(&t.adjoint());
            out = out.add(&term.scaled(C64::new(*w, 0.0)));
        }
        Ok(out)
    }

    /// Max-entry norm of `T(1) - 1` over the whole truncated matrix. The
    /// deviation is confined to the last basis indices.
    pub fn boundary_leakage(&self) -> f64 {
        let one = TruncatedOperator::identity(self.dim());
        self.apply_kraus(&one).sub(&one).max_abs()
    }

    /// The channel for the rotated state `(lambda, zeta theta)` together
    /// with the diagonal phase unitary `u = diag(conj(theta)^n)` realizing
    /// the conjugation `T_rotated(x) = u T(u* x u) u*`. Replacing `zeta` by
    /// `-zeta` (theta = -1) gives the time-reversed process.
    pub fn conjugate_rotation(&self, theta: C64) -> Result<(Channel, TruncatedOperator)> {
        let rotated = self.psi.rotate(theta)?;
        let ch = Channel::new(self.model.clone(), rotated, self.trunc)?;
        let n = self.dim();
        let mut mat = Array2::zeros((n, n));
        let mut phase = C64::new(1.0, 0.0);
        for k in 0..n {
            mat[[k, k]] = phase;
            phase *= theta.conj();
        }
        Ok((ch, TruncatedOperator::from_matrix(mat)?))
    }

    /// Checks the nearest-neighbour sandwich
    /// `p_[m+1,n-1] <= T(p_[m,n]) <= p_[m-1,n+1]` on the interior corner.
    pub fn locality_sandwich_check(&self, m: usize, n: usize, tol: f64) -> Result<SandwichCheck> {
        let dim = self.dim();
        if m < 1 || m > n || n + 3 > dim {
            return Err(QbdError::IndexOutOfRange(format!(
                "sandwich needs 1 <= m <= n <= dim-3, got ({m},{n}) at dim {dim}"
            )));
        }
        let p = interval_projection(m, n, dim)?;
        let image = self.apply_kraus(&p);
        let inner = if m + 2 <= n {
            interval_projection(m + 1, n - 1, dim)?
        } else {
            TruncatedOperator::zeros(dim)
        };
        let outer = interval_projection(m - 1, n + 1, dim)?;
        let k = self.interior();
        let lower = linalg::corner(&image.sub(&inner).into_matrix(), k);
        let upper = linalg::corner(&outer.sub(&image).into_matrix(), k);
        let lower_margin = linalg::min_eig_hermitian(&lower)?;
        let upper_margin = linalg::min_eig_hermitian(&upper)?;
        Ok(SandwichCheck {
            lower_ok: lower_margin >= -tol,
            upper_ok: upper_margin >= -tol,
            lower_margin,
            upper_margin,
        })
    }

    /// Block matrix `sum_{m,n} e_{m,n} (x) T_*(e_{m,n})`; positive
    /// semidefinite exactly when the predual is completely positive.
    pub fn choi_matrix(&self) -> Result<Array2<C64>> {
        let n = self.dim();
        let mut choi = Array2::zeros((n * n, n * n));
        for m in 0..n {
            for k in 0..n {
                let unit = matrix_unit(m, k, n)?;
                let img = self.apply_schrodinger(&unit)?;
                let img = img.matrix();
                for i in 0..n {
                    for j in 0..n {
                        choi[[m * n + i, k * n + j]] = img[[i, j]];
                    }
                }
            }
        }
        Ok(choi)
    }
}
