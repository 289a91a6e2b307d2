//! Acceptance suite: every closed-form result the library implements is
//! checked end to end at its stated tolerance, one criterion per test.

use std::time::Instant;

use ndarray::Array2;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qbd_core::config::{GridAxis, SolverConfig, SweepConfig};
use qbd_core::operators::hermitian_eigenvalues;
use qbd_core::stationary::boundary_mass;
use qbd_core::sweep::sweep_phase_diagram;
use qbd_core::{
    classical_stationary, classical_transition_matrix, example_psiplus_mixing_check,
    explicit_fixed_points, extremality_report, invariant_pure_state_homogeneous,
    invariant_state_baby, invariant_state_diagonal, matrix_unit, peripheral_spectrum,
    peripheral_spectrum_with_probes, solve_invariant_numeric, subharmonic_probe, ApplyMode,
    Channel, ClassicalStationary, ExtremalityVerdict, InvariantKind, ModelParameters, QubitState,
    SubharmonicVerdict, TruncatedOperator, Truncation, Verdict,
};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn preset(name: &str, n_max: usize) -> ModelParameters {
    match name {
        "baby" => ModelParameters::baby(n_max).unwrap(),
        "homogeneous" => ModelParameters::homogeneous(0.6, 0.8, n_max).unwrap(),
        "jaynes_cummings" => ModelParameters::jaynes_cummings(0.7, n_max).unwrap(),
        other => panic!("unknown preset {other}"),
    }
}

fn channel(model: ModelParameters, lam: f64, zeta: C64, n: usize) -> Channel {
    let psi = QubitState::new(lam, zeta).unwrap();
    Channel::new(model, psi, Truncation::new(n).unwrap()).unwrap()
}

fn random_interior(rng: &mut ChaCha8Rng, dim: usize) -> TruncatedOperator {
    let mut m = Array2::zeros((dim, dim));
    for i in 0..dim - 1 {
        for j in 0..dim - 1 {
            m[[i, j]] = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
    }
    TruncatedOperator::from_matrix(m).unwrap()
}

#[test]
fn acceptance_01_three_path_agreement() {
    let started = Instant::now();
    let n = 16;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let states = [
        (0.3, c(0.0, 0.0)),
        (0.3, c(0.0, 0.5)),
        (0.5, c(1.0, 0.0)),
        (1.0, c(0.0, 0.0)),
        (0.0, c(0.0, 0.0)),
    ];
    let mut worst = 0.0f64;
    for model in ["baby", "homogeneous", "jaynes_cummings"] {
        for (lam, zeta) in states {
            let ch = channel(preset(model, n), lam, zeta, n);
            for _ in 0..50 {
                let x = random_interior(&mut rng, n);
                let a = ch.apply_heisenberg(&x, ApplyMode::Kraus).unwrap();
                let b = ch.apply_heisenberg(&x, ApplyMode::Dilation).unwrap();
                let f = ch.apply_heisenberg(&x, ApplyMode::Coefficient).unwrap();
                worst = worst.max(a.sub(&b).max_abs()).max(a.sub(&f).max_abs());
            }
        }
    }
    let elapsed = started.elapsed();
    assert!(worst <= 1e-12, "three-path deviation {worst:.3e}");
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    println!(
        "acceptance 01 three_path_agreement: PASS (max deviation {worst:.2e}, {:.2}s)",
        elapsed.as_secs_f64()
    );
}

#[test]
fn acceptance_02_unitality_and_locality() {
    let n = 16;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst_unital = 0.0f64;
    let mut worst_margin = f64::INFINITY;
    for model in ["baby", "homogeneous", "jaynes_cummings"] {
        let ch = channel(preset(model, n), 0.3, c(0.0, 0.5), n);
        // unitality on the interior
        let one = TruncatedOperator::identity(n);
        let diff = ch.apply_heisenberg(&one, ApplyMode::Kraus).unwrap().sub(&one);
        worst_unital = worst_unital.max(diff.corner_max_abs(n - 1));
        // neighbour support of unit images
        for _ in 0..20 {
            let (r, s) = (rng.gen_range(0..n - 1), rng.gen_range(0..n - 1));
            let img = ch
                .apply_heisenberg(&matrix_unit(r, s, n).unwrap(), ApplyMode::Kraus)
                .unwrap();
            for i in 0..n {
                for j in 0..n {
                    if i.abs_diff(r) > 1 || j.abs_diff(s) > 1 {
                        assert!(
                            img.entry(i, j).norm() <= 1e-14,
                            "{model}: image of ({r},{s}) leaks to ({i},{j})"
                        );
                    }
                }
            }
        }
        // sandwich margins for every admissible interval
        for m in 1..=n - 3 {
            for k in m..=n - 3 {
                let chk = ch.locality_sandwich_check(m, k, 1e-10).unwrap();
                assert!(chk.lower_ok && chk.upper_ok, "{model} interval ({m},{k}): {chk:?}");
                worst_margin = worst_margin.min(chk.lower_margin).min(chk.upper_margin);
            }
        }
    }
    assert!(worst_unital <= 1e-14, "interior unitality deviation {worst_unital:.3e}");
    println!(
        "acceptance 02 unitality_and_locality: PASS (unitality {worst_unital:.2e}, worst sandwich margin {worst_margin:.2e})"
    );
}

#[test]
fn acceptance_03_complete_positivity() {
    let n = 8;
    let cases = [
        ("baby", 0.3, c(0.4, 0.2)),
        ("baby", 0.9, c(0.0, 0.0)),
        ("homogeneous", 0.5, c(1.0, 0.0)),
        ("jaynes_cummings", 0.25, c(0.3, 0.0)),
        ("jaynes_cummings", 0.0, c(0.0, 0.0)),
    ];
    let mut worst = f64::INFINITY;
    for (model, lam, zeta) in cases {
        let ch = channel(preset(model, n), lam, zeta, n);
        let choi = ch.choi_matrix().unwrap();
        let vals = hermitian_eigenvalues(
            &TruncatedOperator::from_matrix(choi).unwrap(),
        )
        .unwrap();
        let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(min >= -1e-10, "{model} ({lam}, {zeta}): min eigenvalue {min:.3e}");
        worst = worst.min(min);
    }
    println!("acceptance 03 complete_positivity: PASS (worst min eigenvalue {worst:.2e})");
}

#[test]
fn acceptance_04_closed_form_invariant_states() {
    // (a) geometric diagonal state at lambda = 1/3
    let n = 64;
    for model in ["baby", "jaynes_cummings"] {
        let ch = channel(preset(model, n), 1.0 / 3.0, c(0.0, 0.0), n);
        let res = invariant_state_diagonal(&ch).unwrap();
        assert_eq!(res.kind, InvariantKind::ClosedFormDiagonal);
        let rho = res.rho.unwrap();
        for k in 0..n {
            let expect = 0.5f64.powi(k as i32 + 1);
            assert!(
                (rho.entry(k, k).re - expect).abs() <= 1e-12,
                "{model}: entry {k} = {} vs {expect}",
                rho.entry(k, k).re
            );
        }
        assert!(res.residual <= 1e-10, "{model}: residual {:.3e}", res.residual);
    }

    // (b) baby closed form at (0.25, 0.6)
    let n = 48;
    let ch = channel(preset("baby", n), 0.25, c(0.6, 0.0), n);
    let res = invariant_state_baby(&ch).unwrap();
    assert_eq!(res.kind, InvariantKind::ClosedFormBaby);
    let residual_b = res.residual;
    assert!(residual_b <= 1e-8, "baby residual {residual_b:.3e}");

    // (c) pure state for constant couplings at (0.6, 0.8, 0.15, i)
    let n = 64;
    let ch = channel(preset("homogeneous", n), 0.15, c(0.0, 1.0), n);
    let res = invariant_pure_state_homogeneous(&ch).unwrap();
    assert_eq!(res.kind, InvariantKind::ClosedFormPure);
    let q = res.q.unwrap();
    assert!((q - c(0.84017, 0.0)).norm() < 5e-5, "q = {q}");
    let mut vals = hermitian_eigenvalues(res.rho.as_ref().unwrap()).unwrap();
    vals.sort_by(|a, b| b.total_cmp(a));
    assert!(vals[1].abs() <= 1e-10, "second eigenvalue {:.3e}", vals[1]);
    assert!(res.residual <= 1e-8, "pure residual {:.3e}", res.residual);
    println!(
        "acceptance 04 closed_form_invariant_states: PASS (baby residual {residual_b:.2e}, q = {:.5})",
        q.re
    );
}

#[test]
fn acceptance_05_nonexistence_diagnosis() {
    let n = 48;
    // closed forms refuse above the threshold, naming the divergent ratio
    let ch = channel(preset("baby", n), 0.6, c(0.0, 0.0), n);
    let res = invariant_state_baby(&ch).unwrap();
    assert_eq!(res.kind, InvariantKind::None);
    assert!(res.diagnosis.as_ref().unwrap().contains("ratio"));

    let ch_half = channel(preset("jaynes_cummings", n), 0.5, c(0.0, 0.0), n);
    let res = invariant_state_diagonal(&ch_half).unwrap();
    assert_eq!(res.kind, InvariantKind::None);
    assert!(res.diagnosis.as_ref().unwrap().contains("ratio"));

    // the numeric solver watches the escaping mass
    let res = solve_invariant_numeric(&ch, 1e-10, 20_000).unwrap();
    assert_eq!(res.kind, InvariantKind::None);
    let diag = res.diagnosis.unwrap();
    assert!(diag.contains("boundary mass") && diag.contains("exceeds 10%"), "{diag}");

    // and indeed the dominant state of the truncated predual parks more
    // than 10% of its mass at the boundary window
    let mut rho = TruncatedOperator::from_matrix(
        Array2::eye(n).mapv(|z: C64| z / n as f64),
    )
    .unwrap();
    for _ in 0..4000 {
        rho = ch.apply_schrodinger(&rho).unwrap();
        let tr = rho.trace().re;
        rho = rho.scaled(c(1.0 / tr, 0.0));
    }
    let mass = boundary_mass(&ch, &rho);
    assert!(mass >= 0.10, "converged boundary mass {mass:.4}");
    println!(
        "acceptance 05 nonexistence_diagnosis: PASS (diagnosis '{diag}', converged mass {:.1}%)",
        100.0 * mass
    );
}

#[test]
fn acceptance_06_explicit_fixed_points() {
    let n = 24;
    let mut min_dim = usize::MAX;
    for model in ["baby", "homogeneous"] {
        let ch = channel(preset(model, n), 0.75, c(0.0, 0.0), n);
        let family = explicit_fixed_points(&ch, 5).unwrap();
        for (j, y) in family.iter().enumerate() {
            let img = ch.apply_heisenberg(y, ApplyMode::Kraus).unwrap();
            let k = n - 2 - (j + 1);
            let res = img.sub(y).corner_max_abs(k) / y.corner_max_abs(k);
            assert!(res <= 1e-10, "{model} member {j}: residual {res:.3e}");
        }
        let rep = peripheral_spectrum_with_probes(&ch, 1e-7, &family).unwrap();
        assert!(rep.fixed_dim >= 5, "{model}: fixed_dim {}", rep.fixed_dim);
        min_dim = min_dim.min(rep.fixed_dim);
    }
    println!("acceptance 06 explicit_fixed_points: PASS (fixed_dim >= {min_dim})");
}

#[test]
fn acceptance_07_mixing_dichotomy_at_threshold() {
    let n = 24;
    for (model, zeta) in [("baby", c(0.9, 0.0)), ("homogeneous", c(0.0, 0.0))] {
        let ch = channel(preset(model, n), 0.5, zeta, n);
        let rep = peripheral_spectrum(&ch, 1e-7).unwrap();
        assert_eq!(rep.fixed_dim, 1, "{model}: fixed_dim {}", rep.fixed_dim);
        assert_eq!(rep.rogue_peripheral, 0, "{model}: rogue peripheral eigenvalues");
    }
    println!("acceptance 07 mixing_dichotomy_at_threshold: PASS (fixed_dim = 1 at the boundary)");
}

#[test]
fn acceptance_08_pole_state_suite() {
    // south pole: weakly mixing for all three presets
    let n = 16;
    for model in ["baby", "homogeneous", "jaynes_cummings"] {
        let ch = channel(preset(model, n), 0.0, c(0.0, 0.0), n);
        let rep = peripheral_spectrum(&ch, 1e-7).unwrap();
        assert_eq!(rep.fixed_dim, 1, "{model} south pole: fixed_dim {}", rep.fixed_dim);
        assert_eq!(rep.rogue_peripheral, 0);
        match subharmonic_probe(&ch, 1e-9).unwrap() {
            SubharmonicVerdict::Found { description, .. } => assert_eq!(description, "p[0,0]"),
            other => panic!("{model} south pole: expected p0, got {}", other.summary()),
        }
        let ch = channel(preset(model, n), 1.0, c(0.0, 0.0), n);
        match subharmonic_probe(&ch, 1e-9).unwrap() {
            SubharmonicVerdict::Found { description, .. } => {
                assert_eq!(description, "complement of p[0,0]");
            }
            other => panic!("{model} north pole: expected p0 complement, got {}", other.summary()),
        }
    }

    // north pole with fast coupling decay: mixing survives, and the
    // off-diagonal recursion grows by at least 5/4 per step
    let rep = example_psiplus_mixing_check(Truncation::new(24).unwrap()).unwrap();
    assert_eq!(rep.fixed_dim, 1, "fast-decay north pole: fixed_dim {}", rep.fixed_dim);
    assert_eq!(rep.rogue_peripheral, 0);
    assert!(rep.min_growth_factor >= 1.25, "growth factor {:.4}", rep.min_growth_factor);
    assert!(rep.min_growth_margin >= 0.0);
    assert_eq!(rep.diagonal_factor_residual, 0.0);
    println!(
        "acceptance 08 pole_state_suite: PASS (min growth factor {:.4})",
        rep.min_growth_factor
    );
}

#[test]
fn acceptance_09_extremality_table() {
    let n = 16;

    let ch = channel(preset("baby", n), 1.0, c(0.0, 0.0), n);
    let rep = extremality_report(&ch).unwrap();
    assert!(matches!(rep.verdict, ExtremalityVerdict::Extremal), "baby north pole");

    let ch = channel(preset("homogeneous", n), 1.0, c(0.0, 0.0), n);
    let rep = extremality_report(&ch).unwrap();
    let ExtremalityVerdict::NotExtremal(split) = rep.verdict else {
        panic!("constant couplings at the north pole must split");
    };
    assert!((split.weights.0 - 0.36).abs() <= 1e-12, "weights {:?}", split.weights);
    assert!(split.recombination_error <= 1e-12);

    let ch = channel(preset("homogeneous", n), 0.3, c(0.2, 0.0), n);
    let rep = extremality_report(&ch).unwrap();
    let ExtremalityVerdict::NotExtremal(split) = rep.verdict else {
        panic!("faithful state must split");
    };
    let (w1, w2) = split.witness.unwrap();
    assert!(w1.norm() <= 1e-14, "first witness {w1}");
    assert!(w2.norm() > 1e-3, "second witness {w2}");
    assert!(split.recombination_error <= 1e-12);

    let ch = channel(preset("homogeneous", n), 0.3, c(1.0, 0.0), n);
    let rep = extremality_report(&ch).unwrap();
    assert!(matches!(rep.verdict, ExtremalityVerdict::Extremal), "pure boundary state");
    assert_eq!(rep.gram_rank, 4);
    println!("acceptance 09 extremality_table: PASS (pure product rank 4, split weight 0.36)");
}

#[test]
fn acceptance_10_rotation_covariance() {
    let n = 16;
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let fifth = C64::from_polar(1.0, std::f64::consts::PI / 5.0);
    let mut worst = 0.0f64;
    for model in ["baby", "homogeneous", "jaynes_cummings"] {
        let ch = channel(preset(model, n), 0.3, c(0.2, 0.4), n);
        for theta in [c(0.0, 1.0), fifth, c(-1.0, 0.0)] {
            let (rot, u) = ch.conjugate_rotation(theta).unwrap();
            for _ in 0..5 {
                let x = random_interior(&mut rng, n);
                let lhs = rot.apply_heisenberg(&x, ApplyMode::Kraus).unwrap();
                let inner = u.adjoint().mul(&x).mul(&u);
                let rhs = u
                    .mul(&ch.apply_heisenberg(&inner, ApplyMode::Kraus).unwrap())
                    .mul(&u.adjoint());
                worst = worst.max(lhs.sub(&rhs).max_abs());
            }
        }
    }
    assert!(worst <= 1e-12, "covariance deviation {worst:.3e}");
    println!("acceptance 10 rotation_covariance: PASS (max deviation {worst:.2e})");
}

#[test]
fn acceptance_11_classical_consistency() {
    // tridiagonal rates for the three presets
    let n = 16;
    for model in ["baby", "homogeneous", "jaynes_cummings"] {
        let m = preset(model, n);
        let lam = 0.25;
        let ch = channel(m.clone(), lam, c(0.0, 0.0), n);
        let chain = classical_transition_matrix(&ch);
        assert!(chain.is_tridiagonal());
        for row in 1..n - 1 {
            let be = m.betas();
            let al = m.alphas();
            assert!((chain.probability(row, row + 1) - lam * be[row + 1] * be[row + 1]).abs() < 1e-15);
            assert!(
                (chain.probability(row, row - 1) - (1.0 - lam) * be[row] * be[row]).abs() < 1e-15
            );
            let stay = (1.0 - lam) * al[row] * al[row] + lam * al[row + 1] * al[row + 1];
            assert!((chain.probability(row, row) - stay).abs() < 1e-15);
        }
        // zeta independence
        let other = classical_transition_matrix(&channel(m, lam, c(0.9, 0.0), n));
        let dev = chain
            .transition()
            .iter()
            .zip(other.transition().iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert_eq!(dev, 0.0, "{model}: rates depend on zeta");
    }

    // stationary law at lambda = 1/3, truncation 64
    let n = 64;
    let ch = channel(preset("homogeneous", n), 1.0 / 3.0, c(0.0, 0.0), n);
    let chain = classical_transition_matrix(&ch);
    let ClassicalStationary::Distribution { pi, residual_l1 } = classical_stationary(&chain)
    else {
        panic!("expected a stationary law")
    };
    for (k, p) in pi.iter().take(40).enumerate() {
        assert!((p - 0.5f64.powi(k as i32 + 1)).abs() <= 1e-12);
    }
    assert!(residual_l1 <= 1e-10, "closed-form residual {residual_l1:.3e}");

    // and the numerically solved left fixed vector agrees
    let mut v = vec![1.0 / n as f64; n];
    for _ in 0..20_000 {
        let mut next = vec![0.0; n];
        for (row, val) in v.iter().enumerate() {
            for col in row.saturating_sub(1)..=(row + 1).min(n - 1) {
                next[col] += val * chain.probability(row, col);
            }
        }
        let total: f64 = next.iter().sum();
        for x in &mut next {
            *x /= total;
        }
        v = next;
    }
    let l1: f64 = v.iter().zip(pi.iter()).map(|(a, b)| (a - b).abs()).sum();
    assert!(l1 <= 1e-8, "numeric vs closed form l1 distance {l1:.3e}");
    println!(
        "acceptance 11 classical_consistency: PASS (closed-form residual {residual_l1:.2e}, numeric l1 {l1:.2e})"
    );
}

#[test]
fn acceptance_12_phase_diagram_sweep() {
    let started = Instant::now();
    let n = 24;
    let trunc = Truncation::new(n).unwrap();
    let solver = SolverConfig::default();

    // baby chain over the full disc
    let grid = SweepConfig {
        lambda: GridAxis { min: 0.0, max: 1.0, steps: 21 },
        abs_zeta: GridAxis { min: 0.0, max: 1.0, steps: 11 },
    };
    let rows = sweep_phase_diagram(&preset("baby", n), &grid, trunc, &solver);
    assert_eq!(rows.len(), 231);
    for row in &rows {
        assert_eq!(row.status, "ok", "({}, {}): {}", row.lambda, row.abs_zeta, row.status);
        let below = row.lambda < 0.5 - 1e-12;
        let expect_inv = if below { Verdict::Yes } else { Verdict::No };
        assert_eq!(
            row.inv_state_expected, expect_inv,
            "invariant-state verdict at ({}, {})",
            row.lambda, row.abs_zeta
        );
        let mixing = row.lambda <= 0.5 + 1e-12;
        let expect_mix = if mixing { Verdict::Yes } else { Verdict::No };
        assert_eq!(row.weakmix_expected, expect_mix);
        if mixing {
            assert_eq!(row.fixed_dim, 1, "fixed_dim at ({}, {})", row.lambda, row.abs_zeta);
        } else {
            assert!(row.fixed_dim > 1, "fixed_dim at ({}, {})", row.lambda, row.abs_zeta);
        }
    }

    // constant couplings along the pure boundary: the pure invariant state
    // disappears exactly at (1 - alpha)/2 = 0.2
    let grid = SweepConfig {
        lambda: GridAxis { min: 0.0, max: 1.0, steps: 21 },
        abs_zeta: GridAxis { min: 1.0, max: 1.0, steps: 1 },
    };
    let rows = sweep_phase_diagram(&preset("homogeneous", n), &grid, trunc, &solver);
    for row in &rows {
        let expect_yes = row.lambda < 0.2 - 1e-12;
        assert_eq!(
            row.inv_state_expected == Verdict::Yes,
            expect_yes,
            "pure-state verdict at lambda = {}",
            row.lambda
        );
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 600.0, "sweep took {elapsed:?}");
    println!(
        "acceptance 12 phase_diagram_sweep: PASS (231 + 21 points in {:.1}s)",
        elapsed.as_secs_f64()
    );
}
