//! Quantum birth-and-death chains on a truncated basis.
//!
//! A chain is fixed by two coupling sequences `(alpha_n)`, `(beta_n)` with
//! `alpha_n^2 + beta_n^2 = 1` and a state of a two-level probe, parametrized
//! by `lambda` in [0, 1] and a point `zeta` of the unit disc. One step of the
//! dynamics is the unital completely positive map obtained by coupling the
//! level ladder to the probe through a block unitary and slicing the probe
//! out again. This crate builds that map at a finite truncation, exposes
//! three independent ways of applying it (Kraus family, block dilation,
//! entrywise coefficients), computes the closed-form invariant states and
//! fixed-point families in the parameter regions where they exist, analyzes
//! the peripheral spectrum of the dense superoperator, and sweeps the
//! `(lambda, |zeta|)` disc to map out the ergodic phase diagram.

pub mod channel;
pub mod classical;
pub mod config;
pub mod error;
mod linalg;
pub mod model;
pub mod operators;
pub mod report;
pub mod spectral;
pub mod stationary;
pub mod sweep;
pub mod verify;

pub use channel::{ApplyMode, Channel, SandwichCheck};
pub use classical::{
    classical_stationary, classical_transition_matrix, diagonal_invariance_check, ClassicalChain,
    ClassicalStationary, DiagonalInvariance,
};
pub use error::{QbdError, Result};
pub use model::{ModelKind, ModelParameters, QubitState, StateClass};
pub use operators::{
    basis_operators, conditional_expectation_diag, conditional_expectation_psi, dilation_unitary,
    interval_projection, matrix_unit, shift, unitarity_defect, TruncatedOperator, Truncation,
};
pub use spectral::{
    ergodic_report, example_psiplus_mixing_check, extremality_report, peripheral_spectrum,
    peripheral_spectrum_with_probes, recursion_residuals, spectrum_and_probe, subharmonic_probe,
    superoperator_matrix, theorem_verdicts, ErgodicReport, ExtremalityReport, ExtremalityVerdict,
    PsiPlusMixingReport, RecursionReport, SpectrumReport, SubharmonicVerdict, TaggedVerdict,
    TheoremVerdicts, Verdict,
};
pub use stationary::{
    explicit_fixed_points, invariant_pure_state_homogeneous, invariant_state_baby,
    invariant_state_diagonal, solve_invariant_numeric, verify_invariant, InvariantKind,
    InvariantStateResult,
};
