//! The classical birth-and-death chain obtained by pinching the transition
//! operator to the diagonal subalgebra.

use ndarray::Array2;

use crate::channel::{ApplyMode, Channel};
use crate::error::Result;
use crate::operators::matrix_unit;

/// Row-stochastic transition matrix in the distribution-evolving convention.
/// Row `dim - 1` may fall short of 1 because the upward rate is truncated off.
#[derive(Clone, Debug)]
pub struct ClassicalChain {
    lambda: f64,
    transition: Array2<f64>,
}

/// Outcome of the stationary-distribution computation.
#[derive(Clone, Debug)]
pub enum ClassicalStationary {
    Distribution {
        pi: Vec<f64>,
        /// l1 norm of `pi P - pi` over the interior indices.
        residual_l1: f64,
    },
    /// No normalizable stationary law: the detailed-balance ratio is >= 1.
    None { ratio: f64 },
}

/// Whether the diagonal subalgebra is preserved, and by how much it fails.
#[derive(Clone, Copy, Debug)]
pub struct DiagonalInvariance {
    pub invariant: bool,
    pub max_offdiag: f64,
}

impl ClassicalChain {
    pub fn dim(&self) -> usize {
        self.transition.nrows()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn transition(&self) -> &Array2<f64> {
        &self.transition
    }

    pub fn probability(&self, from: usize, to: usize) -> f64 {
        self.transition[[from, to]]
    }

    pub fn is_tridiagonal(&self) -> bool {
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                if self.transition[[i, j]] != 0.0 && i.abs_diff(j) > 1 {
                    return false;
                }
            }
        }
        true
    }
}

/// Extracts the tridiagonal rates: up `lambda beta_{n+1}^2`, down
/// `(1-lambda) beta_n^2`, stay `(1-lambda) alpha_n^2 + lambda alpha_{n+1}^2`.
/// The result does not depend on `zeta`.
pub fn classical_transition_matrix(ch: &Channel) -> ClassicalChain {
    let n = ch.dim();
    let lam = ch.psi().lambda();
    let al = ch.model().alphas();
    let be = ch.model().betas();
    let edge = |k: usize, v: &[f64]| if k < n { v[k] } else { 0.0 };
    let mut p = Array2::zeros((n, n));
    for row in 0..n {
        if row + 1 < n {
            p[[row, row + 1]] = lam * be[row + 1] * be[row + 1];
        }
        if row >= 1 {
            p[[row, row - 1]] = (1.0 - lam) * be[row] * be[row];
        }
        let up = edge(row + 1, al);
        p[[row, row]] = (1.0 - lam) * al[row] * al[row] + lam * up * up;
    }
    ClassicalChain { lambda: lam, transition: p }
}

/// Stationary law of the chain. For `lambda < 1/2` this is the truncated,
/// renormalized geometric distribution with ratio `lambda / (1 - lambda)`;
/// otherwise no normalizable solution exists.
pub fn classical_stationary(chain: &ClassicalChain) -> ClassicalStationary {
    let lam = chain.lambda();
    let ratio = lam / (1.0 - lam);
    if lam >= 0.5 {
        return ClassicalStationary::None { ratio };
    }
    let n = chain.dim();
    let mut pi = Vec::with_capacity(n);
    let mut v = 1.0;
    let mut total = 0.0;
    for _ in 0..n {
        pi.push(v);
        total += v;
        v *= ratio;
    }
    for p in &mut pi {
        *p /= total;
    }
    // residual over the interior, skipping the last two rows where the
    // truncated upward rate distorts balance
    let mut residual = 0.0;
    for col in 0..n.saturating_sub(2) {
        let acc: f64 = pi
            .iter()
            .enumerate()
            .map(|(row, p)| p * chain.transition[[row, col]])
            .sum();
        residual += (acc - pi[col]).abs();
    }
    ClassicalStationary::Distribution { pi, residual_l1: residual }
}

/// Checks that every diagonal projection maps to a diagonal operator; reports
/// the largest off-diagonal magnitude seen.
pub fn diagonal_invariance_check(ch: &Channel) -> Result<DiagonalInvariance> {
    let n = ch.dim();
    let mut worst = 0.0f64;
    for k in 0..n.saturating_sub(1) {
        let unit = matrix_unit(k, k, n)?;
        let img = ch.apply_heisenberg(&unit, ApplyMode::Coefficient)?;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    worst = worst.max(img.entry(i, j).norm());
                }
            }
        }
    }
    Ok(DiagonalInvariance { invariant: worst <= 1e-12, max_offdiag: worst })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ModelParameters, QubitState};
    use crate::operators::Truncation;
    use num_complex::Complex64 as C64;

    fn channel(kind: &str, lam: f64, zeta: C64, n: usize) -> Channel {
        let model = match kind {
            "baby" => ModelParameters::baby(n).unwrap(),
            "homog" => ModelParameters::homogeneous(0.6, 0.8, n).unwrap(),
            _ => ModelParameters::jaynes_cummings(0.7, n).unwrap(),
        };
        let psi = QubitState::new(lam, zeta).unwrap();
        Channel::new(model, psi, Truncation::new(n).unwrap()).unwrap()
    }

    #[test]
    fn homogeneous_rates() {
        let ch = channel("homog", 0.25, C64::new(0.0, 0.0), 12);
        let c = classical_transition_matrix(&ch);
        assert!((c.probability(3, 4) - 0.16).abs() < 1e-15);
        assert!((c.probability(3, 2) - 0.48).abs() < 1e-15);
        assert!((c.probability(3, 3) - 0.36).abs() < 1e-15);
        assert!((c.probability(0, 0) - 0.84).abs() < 1e-15);
        assert!(c.is_tridiagonal());
        // rows up to dim-2 are stochastic
        for row in 0..c.dim() - 1 {
            let sum: f64 = (0..c.dim()).map(|j| c.probability(row, j)).sum();
            assert!((sum - 1.0).abs() < 1e-12, "row {row} sums to {sum}");
        }
    }

    #[test]
    fn south_pole_only_descends() {
        let ch = channel("jc", 0.0, C64::new(0.0, 0.0), 10);
        let c = classical_transition_matrix(&ch);
        for row in 0..c.dim() - 1 {
            assert_eq!(c.probability(row, row + 1), 0.0);
        }
        assert!(c.probability(3, 2) > 0.0);
    }

    #[test]
    fn rates_do_not_depend_on_zeta() {
        let a = classical_transition_matrix(&channel("homog", 0.3, C64::new(0.0, 0.0), 10));
        let b = classical_transition_matrix(&channel("homog", 0.3, C64::new(0.9, 0.0), 10));
        let diff = a
            .transition()
            .iter()
            .zip(b.transition().iter())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        assert_eq!(diff, 0.0);
    }

    #[test]
    fn stationary_geometric_law() {
        let ch = channel("baby", 1.0 / 3.0, C64::new(0.0, 0.0), 32);
        let c = classical_transition_matrix(&ch);
        match classical_stationary(&c) {
            ClassicalStationary::Distribution { pi, residual_l1 } => {
                // pi_n = (1/2)^(n+1) up to the truncation tail
                assert!((pi[0] - 0.5).abs() < 1e-9);
                assert!((pi[1] - 0.25).abs() < 1e-9);
                assert!(residual_l1 < 1e-10);
            }
            other => panic!("expected a distribution, got {other:?}"),
        }
    }

    #[test]
    fn no_stationary_law_at_half() {
        let ch = channel("baby", 0.5, C64::new(0.0, 0.0), 16);
        let c = classical_transition_matrix(&ch);
        match classical_stationary(&c) {
            ClassicalStationary::None { ratio } => assert!((ratio - 1.0).abs() < 1e-15),
            other => panic!("expected none, got {other:?}"),
        }
    }

    #[test]
    fn diagonal_invariance() {
        // any model with zeta = 0
        let d = diagonal_invariance_check(&channel("jc", 0.4, C64::new(0.0, 0.0), 12)).unwrap();
        assert!(d.invariant);
        // baby model for any zeta
        let d = diagonal_invariance_check(&channel("baby", 0.4, C64::new(0.7, 0.2), 12)).unwrap();
        assert!(d.invariant, "baby off-diagonal mass {}", d.max_offdiag);
        // homogeneous with zeta != 0 leaks off the diagonal
        let d = diagonal_invariance_check(&channel("homog", 0.4, C64::new(0.5, 0.0), 12)).unwrap();
        assert!(!d.invariant);
        assert!(d.max_offdiag > 1e-3);
    }

    #[test]
    fn pinched_action_matches_transition_columns() {
        let n = 10;
        let ch = channel("homog", 0.3, C64::new(0.4, 0.3), n);
        let c = classical_transition_matrix(&ch);
        for col in 0..n - 1 {
            let unit = matrix_unit(col, col, n).unwrap();
            let img = ch.apply_heisenberg(&unit, ApplyMode::Kraus).unwrap();
            for row in 0..n {
                let want = c.probability(row, col);
                assert!(
                    (img.entry(row, row).re - want).abs() < 1e-12,
                    "mismatch at ({row},{col})"
                );
            }
        }
    }
}
