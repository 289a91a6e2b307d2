//! The property suite behind `qbd verify`: structural identities of the
//! transition operator checked on random inputs with a seeded generator.

use ndarray::{s, Array2};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::{ApplyMode, Channel};
use crate::classical::classical_transition_matrix;
use crate::error::Result;
use crate::linalg;
use crate::model::QubitState;
use crate::operators::{
    conditional_expectation_diag, conditional_expectation_psi, matrix_unit, TruncatedOperator,
    Truncation,
};
use crate::report::CheckResult;
use crate::spectral::superoperator_matrix;

/// Random matrix supported on the leading `support x support` corner.
fn random_supported(rng: &mut ChaCha8Rng, dim: usize, support: usize) -> TruncatedOperator {
    let mut m = Array2::zeros((dim, dim));
    for i in 0..support {
        for j in 0..support {
            m[[i, j]] = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
    }
    TruncatedOperator::from_matrix(m).expect("finite")
}

fn check(name: &'static str, pass: bool, detail: String) -> CheckResult {
    CheckResult { name, pass, detail }
}

/// Runs every structural check; deterministic for a fixed seed.
pub fn run_property_suite(ch: &Channel, seed: u64) -> Result<Vec<CheckResult>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = ch.dim();
    let interior = ch.interior();
    let mut out = Vec::new();

    // the three computation paths agree on interior-supported inputs
    let mut worst = 0.0f64;
    for _ in 0..8 {
        let x = random_supported(&mut rng, n, n - 1);
        let a = ch.apply_heisenberg(&x, ApplyMode::Kraus)?;
        let b = ch.apply_heisenberg(&x, ApplyMode::Dilation)?;
        let c = ch.apply_heisenberg(&x, ApplyMode::Coefficient)?;
        worst = worst.max(a.sub(&b).max_abs()).max(a.sub(&c).max_abs());
    }
    out.push(check(
        "three_path_agreement",
        worst <= 1e-12,
        format!("max deviation {worst:.2e}"),
    ));

    // unitality on the interior; leakage confined to the last indices
    let one = TruncatedOperator::identity(n);
    let diff = ch.apply_heisenberg(&one, ApplyMode::Kraus)?.sub(&one);
    let interior_dev = diff.corner_max_abs(interior);
    let localized = diff.corner_max_abs(n - 2);
    out.push(check(
        "unitality_interior",
        interior_dev <= 1e-12,
        format!("interior deviation {interior_dev:.2e}"),
    ));
    out.push(check(
        "leakage_localized",
        localized <= 1e-12,
        format!(
            "full leakage {:.2e}, entries below the last two indices {localized:.2e}",
            ch.boundary_leakage()
        ),
    ));

    // T(x*) = T(x)*
    let x = random_supported(&mut rng, n, n - 1);
    let lhs = ch.apply_heisenberg(&x.adjoint(), ApplyMode::Kraus)?;
    let rhs = ch.apply_heisenberg(&x, ApplyMode::Kraus)?.adjoint();
    let dev = lhs.sub(&rhs).max_abs();
    out.push(check("hermiticity_preservation", dev <= 1e-13, format!("deviation {dev:.2e}")));

    // images of matrix units live on neighbouring rows and columns
    let mut local_ok = true;
    let mut local_worst = 0.0f64;
    for _ in 0..12 {
        let r = rng.gen_range(0..n - 1);
        let c = rng.gen_range(0..n - 1);
        let img = ch.apply_heisenberg(&matrix_unit(r, c, n)?, ApplyMode::Kraus)?;
        for i in 0..n {
            for j in 0..n {
                if i.abs_diff(r) > 1 || j.abs_diff(c) > 1 {
                    let v = img.entry(i, j).norm();
                    if v > 1e-14 {
                        local_ok = false;
                        local_worst = local_worst.max(v);
                    }
                }
            }
        }
    }
    out.push(check(
        "locality_support",
        local_ok,
        format!("largest non-neighbour entry {local_worst:.2e}"),
    ));

    // nearest-neighbour sandwich for every admissible interval
    let mut sandwich_ok = true;
    let mut sandwich_margin = f64::INFINITY;
    for m in 1..=n - 3 {
        for k in m..=n - 3 {
            let chk = ch.locality_sandwich_check(m, k, 1e-10)?;
            sandwich_ok &= chk.lower_ok && chk.upper_ok;
            sandwich_margin = sandwich_margin.min(chk.lower_margin).min(chk.upper_margin);
        }
    }
    out.push(check(
        "locality_sandwich",
        sandwich_ok,
        format!("worst margin {sandwich_margin:.2e}"),
    ));

    // complete positivity via the block structure matrix at a small window
    let choi_dim = n.min(8);
    let small = Channel::new(
        ch.model().clone(),
        *ch.psi(),
        Truncation::new(choi_dim)?,
    )?;
    let min_eig = linalg::min_eig_hermitian(&small.choi_matrix()?)?;
    out.push(check(
        "complete_positivity",
        min_eig >= -1e-10,
        format!("block-structure min eigenvalue {min_eig:.2e} at dim {choi_dim}"),
    ));

    // Cauchy-Schwarz for the channel: T(x*x) >= T(x)* T(x)
    let mut ks_min = f64::INFINITY;
    for _ in 0..4 {
        let mut x = random_supported(&mut rng, n, n - 2);
        let scale = x.max_abs();
        x = x.scaled(C64::new(1.0 / scale, 0.0));
        let lhs = ch.apply_heisenberg(&x.adjoint().mul(&x), ApplyMode::Kraus)?;
        let tx = ch.apply_heisenberg(&x, ApplyMode::Kraus)?;
        let diff = lhs.sub(&tx.adjoint().mul(&tx)).into_matrix();
        ks_min = ks_min.min(linalg::min_eig_hermitian(&linalg::corner(&diff, interior))?);
    }
    out.push(check(
        "two_positivity_inequality",
        ks_min >= -1e-10,
        format!("min eigenvalue {ks_min:.2e}"),
    ));

    // rotation covariance
    let mut rot_worst = 0.0f64;
    let fifth = C64::from_polar(1.0, std::f64::consts::PI / 5.0);
    for theta in [C64::i(), fifth, C64::new(-1.0, 0.0)] {
        let (rot, u) = ch.conjugate_rotation(theta)?;
        for _ in 0..3 {
            let x = random_supported(&mut rng, n, n - 1);
            let lhs = rot.apply_heisenberg(&x, ApplyMode::Kraus)?;
            let inner = u.adjoint().mul(&x).mul(&u);
            let rhs = u
                .mul(&ch.apply_heisenberg(&inner, ApplyMode::Kraus)?)
                .mul(&u.adjoint());
            rot_worst = rot_worst.max(lhs.sub(&rhs).max_abs());
        }
    }
    out.push(check(
        "rotation_covariance",
        rot_worst <= 1e-12,
        format!("max deviation {rot_worst:.2e}"),
    ));

    // trace duality of the two pictures
    let mut dual_worst = 0.0f64;
    for _ in 0..6 {
        let rho = random_supported(&mut rng, n, n - 2);
        let x = random_supported(&mut rng, n, n - 2);
        let lhs = ch.apply_schrodinger(&rho)?.mul(&x).trace();
        let rhs = rho.mul(&ch.apply_heisenberg(&x, ApplyMode::Kraus)?).trace();
        dual_worst = dual_worst.max((lhs - rhs).norm());
    }
    out.push(check(
        "picture_duality",
        dual_worst <= 1e-11,
        format!("max deviation {dual_worst:.2e}"),
    ));

    // classical restriction: pinched action matches the transition matrix,
    // and the matrix does not depend on zeta
    let chain = classical_transition_matrix(ch);
    let mut classical_worst = 0.0f64;
    for col in 0..n - 1 {
        let img = ch.apply_heisenberg(&matrix_unit(col, col, n)?, ApplyMode::Kraus)?;
        let pinched = conditional_expectation_diag(&img);
        for row in 0..n {
            classical_worst = classical_worst
                .max((pinched.entry(row, row).re - chain.probability(row, col)).abs());
        }
    }
    let rotated = Channel::new(
        ch.model().clone(),
        QubitState::new(ch.psi().lambda(), C64::new(0.9, 0.0))?,
        ch.truncation(),
    )?;
    let other = classical_transition_matrix(&rotated);
    let zeta_dev = chain
        .transition()
        .iter()
        .zip(other.transition().iter())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let mut rows_ok = chain.is_tridiagonal();
    for row in 0..n - 1 {
        let sum: f64 = (0..n).map(|j| chain.probability(row, j)).sum();
        rows_ok &= (sum - 1.0).abs() <= 1e-12;
    }
    out.push(check(
        "classical_consistency",
        classical_worst <= 1e-12 && zeta_dev == 0.0 && rows_ok,
        format!("pinching deviation {classical_worst:.2e}, zeta dependence {zeta_dev:.2e}"),
    ));

    // slice map: unital and positive on random positive block matrices
    let mut slice_min = f64::INFINITY;
    for _ in 0..4 {
        let raw = {
            let mut m = Array2::zeros((2 * n, 2 * n));
            for i in 0..2 * n {
                for j in 0..2 * n {
                    m[[i, j]] = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                }
            }
            m
        };
        let psd = linalg::matmul(&linalg::adjoint(&raw), &raw);
        let sliced = conditional_expectation_psi(&psd, ch.psi())?;
        slice_min = slice_min.min(linalg::min_eig_hermitian(sliced.matrix())?);
    }
    let mut block_one = Array2::<C64>::zeros((2 * n, 2 * n));
    block_one.slice_mut(s![0..n, 0..n]).assign(&Array2::eye(n));
    block_one.slice_mut(s![n..2 * n, n..2 * n]).assign(&Array2::eye(n));
    let unital_dev = conditional_expectation_psi(&block_one, ch.psi())?
        .sub(&TruncatedOperator::identity(n))
        .max_abs();
    out.push(check(
        "slice_map_unital_positive",
        slice_min >= -1e-10 && unital_dev <= 1e-14,
        format!("min eigenvalue {slice_min:.2e}, unitality deviation {unital_dev:.2e}"),
    ));

    // dense superoperator: column locality and predual trace preservation
    if n <= crate::spectral::DENSE_GUARD_DEFAULT {
        let sup = superoperator_matrix(ch)?;
        let m = sup.matrix();
        let mut pattern_ok = true;
        for col in 0..n * n {
            let (cc, dd) = (col / n, col % n);
            for row in 0..n * n {
                if m[[row, col]] != C64::new(0.0, 0.0) {
                    let (a, b) = (row / n, row % n);
                    pattern_ok &= a.abs_diff(cc) <= 1 && b.abs_diff(dd) <= 1;
                }
            }
        }
        let mut trace_dev = 0.0f64;
        for k in 0..n - 1 {
            let img = ch.apply_schrodinger(&matrix_unit(k, k, n)?)?;
            trace_dev = trace_dev.max((img.trace() - C64::new(1.0, 0.0)).norm());
        }
        out.push(check(
            "superoperator_locality",
            pattern_ok && trace_dev <= 1e-12,
            format!("trace deviation on diagonal units {trace_dev:.2e}"),
        ));
    }

    Ok(out)
}
