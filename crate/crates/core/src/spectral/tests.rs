use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use faer::c64;

use super::*;
use crate::model::{ParameterPoint, UnitCirclePoint};

fn point(mu: f64, e: f64) -> ParameterPoint {
    ParameterPoint::new(mu, e).unwrap()
}

fn index(mu: f64, e: f64, angle: f64) -> IndexPair {
    morse_index_nullity(
        &point(mu, e),
        UnitCirclePoint::new(angle),
        &SpectralConfig::default(),
    )
    .unwrap()
    .pair
}

fn pair(index: usize, nullity: usize) -> IndexPair {
    IndexPair { index, nullity }
}

#[test]
fn circular_matrix_has_block_spectrum() {
    for (mu, sign) in [(0.3, 1), (0.93, -1), (1.0, 1)] {
        let w = if sign == 1 {
            UnitCirclePoint::one()
        } else {
            UnitCirclePoint::minus_one()
        };
        let op = assemble_operator(&point(mu, 0.0), w, 12).unwrap();
        let ev = op.eigenvalues().unwrap();
        let blocks = galerkin_aligned_spectrum(mu, sign, 12).unwrap();
        for (a, b) in ev.iter().zip(&blocks) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
    }
}

#[test]
fn zero_mass_ratio_is_nonnegative() {
    for e in [0.0, 0.4, 0.8] {
        let ev = assemble_operator(&point(0.0, e), UnitCirclePoint::one(), 24)
            .unwrap()
            .eigenvalues()
            .unwrap();
        assert!(ev[0] >= -1e-10, "e {e}: {}", ev[0]);
        assert!(
            ev[1].abs() <= 1e-10 && ev[2] > 1e-3,
            "e {e}: {:?}",
            &ev[..3]
        );
        for angle in [0.5, PI, 5.0] {
            let ev = assemble_operator(&point(0.0, e), UnitCirclePoint::new(angle), 24)
                .unwrap()
                .eigenvalues()
                .unwrap();
            assert!(ev[0] > 1e-3, "e {e} angle {angle}: {}", ev[0]);
        }
    }
}

#[test]
fn assembly_is_hermitian() {
    let op = assemble_operator(&point(0.37, 0.21), UnitCirclePoint::new(2.1), 24).unwrap();
    assert!(op.hermitian_residual() <= 1e-12);
    assert_eq!(op.dim(), 98);
}

#[test]
fn truncation_below_four_is_rejected() {
    assert!(assemble_operator(&point(0.5, 0.0), UnitCirclePoint::one(), 3).is_err());
}

#[test]
fn nested_truncations() {
    let p = point(0.6, 0.5);
    let w = UnitCirclePoint::new(1.3);
    let big = assemble_operator(&p, w, 12).unwrap();
    let small = assemble_operator(&p, w, 8).unwrap();
    let sliced = big.truncated(8);
    for i in 0..small.dim() {
        for j in 0..small.dim() {
            assert!((small.matrix()[(i, j)] - sliced.matrix()[(i, j)]).norm() < 1e-15);
        }
    }
}

#[test]
fn decomposition_in_mass_ratio() {
    let p = point(0.7, 0.35);
    let w = UnitCirclePoint::new(2.5);
    let full = assemble_operator(&p, w, 8).unwrap();
    let zero = assemble_zero_mass_part(&p, w, 8).unwrap();
    let deriv = assemble_mass_derivative(&p, w, 8).unwrap();
    let scaled = assemble_scaled_operator(&p, w, 8).unwrap();
    for i in 0..full.dim() {
        for j in 0..full.dim() {
            let a = full.matrix()[(i, j)];
            assert!((a - zero.matrix()[(i, j)] - deriv.matrix()[(i, j)] * 0.7).norm() < 1e-13);
            assert!((a / 0.7 - scaled.matrix()[(i, j)]).norm() < 1e-12);
        }
    }
    assert!(assemble_scaled_operator(&point(0.0, 0.3), w, 8).is_err());
}

#[test]
fn index_table_examples() {
    assert_eq!(index(0.5, 0.4, 0.0), pair(0, 0));
    assert_eq!(index(0.0, 0.3, 0.0), pair(0, 2));
    assert_eq!(index(0.95, 0.0, PI), pair(2, 0));
    assert_eq!(index(mu_star(), 0.0, PI), pair(0, 2));
    assert_eq!(index(1.0, 0.6, 0.0), pair(0, 3));
}

#[test]
fn unconverged_truncation_is_reported() {
    // orders 4..6 are far too low for the Kepler factor at e = 0.95
    let cfg = SpectralConfig {
        truncation: 4,
        step: 1,
        max_truncation: 6,
        zero_band: 1e-8,
    };
    let err =
        morse_index_nullity(&point(1.0, 0.95), UnitCirclePoint::minus_one(), &cfg).unwrap_err();
    assert!(matches!(
        err,
        crate::Error::TruncationNotConverged {
            max_truncation: 6,
            ..
        }
    ));

    let bad = SpectralConfig {
        max_truncation: 40,
        ..SpectralConfig::default()
    };
    assert!(morse_index_nullity(&point(0.5, 0.0), UnitCirclePoint::one(), &bad).is_err());
}

#[test]
fn block_oracle_examples() {
    assert_eq!(e_zero_block_oracle(0.0, 1, 16).unwrap().pair, pair(0, 2));
    assert_eq!(e_zero_block_oracle(0.5, 1, 16).unwrap().pair, pair(0, 0));
    assert_eq!(
        e_zero_block_oracle(mu_star(), -1, 16).unwrap().pair,
        pair(0, 2)
    );
    assert_eq!(e_zero_block_oracle(0.95, -1, 16).unwrap().pair, pair(2, 0));
    assert!(e_zero_block_oracle(0.5, 0, 16).is_err());

    // at μ = 0 the blocks of mode n have eigenvalues (n+1)² and (n-1)²
    let ev = e_zero_block_oracle(0.0, 1, 3).unwrap().eigenvalues;
    let mut expected: Vec<f64> = (-3i32..=3)
        .flat_map(|n| [((n + 1) * (n + 1)) as f64, ((n - 1) * (n - 1)) as f64])
        .collect();
    expected.sort_by(f64::total_cmp);
    for (a, b) in ev.iter().zip(&expected) {
        assert_abs_diff_eq!(a, b, epsilon = 1e-12);
    }
}

#[test]
fn mu_star_kernel_lives_in_the_lowest_half_integer_modes() {
    for n in 0..6 {
        for nu in [n as f64 + 0.5, -(n as f64) - 0.5] {
            let n2 = nu * nu;
            let ms = mu_star();
            let det = (n2 - 1.0).powi(2) + (n2 + 1.0) * ms - 2.0 * ms * ms;
            assert_eq!(det.abs() < 1e-12, n == 0, "nu {nu}: {det:e}");
        }
    }
}

#[test]
fn oracle_equivalence_on_circular_orbits() {
    for k in 0..20 {
        let mu = (k as f64 + 0.5) / 20.0;
        for (sign, angle) in [(1, 0.0), (-1, PI)] {
            let oracle = e_zero_block_oracle(mu, sign, 32).unwrap();
            assert_eq!(index(mu, 0.0, angle), oracle.pair, "mu {mu} sign {sign}");
        }
    }
}

#[test]
fn kernel_constants() {
    assert_abs_diff_eq!(a_tilde(), 0.3219464, epsilon = 1e-7);
    assert_abs_diff_eq!(a_tilde(), 1.25 - mu_star(), epsilon = 1e-15);
    assert_abs_diff_eq!(mu_star(), 0.9280536, epsilon = 1e-7);
}

#[test]
fn kernel_functions_are_null_and_orthogonal() {
    let basis = kernel_basis_minus_one();
    let w = UnitCirclePoint::minus_one();
    let op = assemble_operator(&point(mu_star(), 0.0), w, 16).unwrap();
    for f in [KernelFunction::X0, KernelFunction::X1] {
        let coeffs = project_onto_basis(|t| basis.eval(f, t), w, 16, 128);
        let norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        assert!(norm > 0.5);
        let image: f64 = op
            .apply(&coeffs)
            .iter()
            .map(|c: &c64| c.norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(image <= 1e-8, "{f:?}: {image:e}");
    }
    let h = 2.0 * PI / 256.0;
    let inner: f64 = (0..256)
        .map(|i| {
            let t = i as f64 * h;
            let (a, b) = (basis.x0(t), basis.x1(t));
            a[0] * b[0] + a[1] * b[1]
        })
        .sum::<f64>()
        * h;
    assert!(inner.abs() < 1e-13);
}

#[test]
fn pairing_values() {
    let s = 97f64.sqrt();
    assert_abs_diff_eq!(
        perturbation_pairing(PairingDirection::Mu),
        PI * (97.0 - 15.0 * s) / 64.0,
        epsilon = 1e-10
    );
    assert_abs_diff_eq!(
        perturbation_pairing(PairingDirection::E),
        PI * (-33.0 + 15.0 * s) / 1024.0,
        epsilon = 1e-10
    );
    // the two kernel functions do not mix at first order
    for d in [PairingDirection::Mu, PairingDirection::E] {
        assert!(pairing_between(d, KernelFunction::X0, KernelFunction::X1).abs() < 1e-12);
    }
    let slope = (291.0 + 15.0 * s) / 3104.0;
    assert_abs_diff_eq!(
        kernel_tangent_slope(KernelFunction::X0),
        slope,
        epsilon = 1e-10
    );
    assert_abs_diff_eq!(
        kernel_tangent_slope(KernelFunction::X1),
        -slope,
        epsilon = 1e-10
    );
}

#[test]
fn index_pairs_agree_across_monodromy_and_operator() {
    use crate::monodromy::{
        integrate_monodromy, nullity_omega, IntegratorConfig, DEFAULT_KERNEL_TOL,
    };
    for (mu, e, angle) in [
        (0.0, 0.5, 0.0),
        (1.0, 0.2, 0.0),
        (mu_star(), 0.0, PI),
        (0.4, 0.3, 1.0),
        (0.97, 0.6, PI),
    ] {
        let p = point(mu, e);
        let w = UnitCirclePoint::new(angle);
        let m = integrate_monodromy(&p, &IntegratorConfig::default()).unwrap();
        assert_eq!(
            nullity_omega(&m, w, DEFAULT_KERNEL_TOL),
            index(mu, e, angle).nullity,
            "{mu} {e} {angle}"
        );
    }
}

#[test]
fn morse_index_is_monotone_in_mass_ratio() {
    for e in [0.0, 0.5] {
        for angle in [0.0, 1.0, PI, 4.5] {
            let mut prev = 0;
            for k in 0..=20 {
                let mu = k as f64 / 20.0;
                let i = index(mu, e, angle).index;
                assert!(i >= prev, "e {e} angle {angle} mu {mu}");
                prev = i;
            }
            assert_eq!(prev, if angle == 0.0 { 0 } else { 2 });
        }
    }
}

mod props {
    use proptest::prelude::*;

    use super::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn assembled_matrix_is_hermitian(mu in 0.0..=1.0f64, e in 0.0..0.9f64, angle in 0.0..(2.0 * PI)) {
            let op = assemble_operator(&point(mu, e), UnitCirclePoint::new(angle), 12).unwrap();
            prop_assert!(op.hermitian_residual() <= 1e-12);
        }

        #[test]
        fn nullity_is_at_most_four(mu in 0.0..=1.0f64, e in 0.0..0.9f64, angle in 0.0..(2.0 * PI)) {
            prop_assert!(index(mu, e, angle).nullity <= 4);
        }

        #[test]
        fn index_grows_with_mass_ratio(a in 0.0..=1.0f64, b in 0.0..=1.0f64, e in 0.0..0.9f64, angle in 0.0..(2.0 * PI)) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(index(lo, e, angle).index <= index(hi, e, angle).index);
        }
    }
}
