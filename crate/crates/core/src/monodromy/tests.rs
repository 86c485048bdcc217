use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use nalgebra::Matrix2;
use proptest::prelude::*;

use super::*;
use crate::model::rotation;

fn mono(mu: f64, e: f64) -> SymplecticMatrix4 {
    integrate_monodromy(
        &ParameterPoint::new(mu, e).unwrap(),
        &IntegratorConfig::default(),
    )
    .unwrap()
}

fn mu_star() -> f64 {
    (5.0 + 97f64.sqrt()) / 16.0
}

/// Smallest max-distance over all pairings of two 4-point multisets.
fn matching_distance(a: &[Complex64; 4], b: &[Complex64; 4]) -> f64 {
    let mut best = f64::INFINITY;
    let mut perm = [0usize, 1, 2, 3];
    permutations(&mut perm, 0, &mut |p| {
        let d = (0..4).map(|i| (a[i] - b[p[i]]).norm()).fold(0.0, f64::max);
        best = best.min(d);
    });
    best
}

fn permutations(p: &mut [usize; 4], k: usize, f: &mut impl FnMut(&[usize; 4])) {
    if k == 4 {
        f(p);
        return;
    }
    for i in k..4 {
        p.swap(k, i);
        permutations(p, k + 1, f);
        p.swap(k, i);
    }
}

fn cis(angle: f64) -> Complex64 {
    Complex64::from_polar(1.0, angle)
}

/// `M₁ ⋄ M₂` for 2×2 blocks acting on `(x₁, y₁)` and `(x₂, y₂)`.
fn diamond(a: &Matrix2<f64>, b: &Matrix2<f64>) -> Matrix4<f64> {
    let mut m = Matrix4::zeros();
    for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        m[(2 * i, 2 * j)] = a[(i, j)];
        m[(2 * i + 1, 2 * j + 1)] = b[(i, j)];
    }
    m
}

/// A symplectic change of coordinates `exp(J H)` with symmetric `H`.
fn symplectic_conjugator(seed: f64) -> Matrix4<f64> {
    let mut h = Matrix4::zeros();
    for i in 0..4 {
        for j in i..4 {
            let v = (seed * (1.0 + i as f64) + 0.7 * j as f64).sin() * 0.4;
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
    }
    expm(&(symplectic_j() * h)).unwrap()
}

fn conjugate(m: &Matrix4<f64>, p: &Matrix4<f64>) -> SymplecticMatrix4 {
    SymplecticMatrix4::new(p * m * p.try_inverse().unwrap())
}

#[test]
fn expm_matches_library_exponential() {
    let p = ParameterPoint::new(0.37, 0.0).unwrap();
    let a = symplectic_j() * crate::model::coefficient_matrix_b(0.0, &p) * (2.0 * PI);
    let diff = (expm(&a).unwrap() - a.exp()).amax();
    assert!(diff < 1e-10 * a.exp().amax(), "diff {diff:e}");
}

#[test]
fn circular_monodromy_matches_exponential() {
    let m = mono(0.5, 0.0);
    let oracle = e_zero_oracle(0.5).unwrap();
    let diff = (m.entries() - oracle.monodromy.entries()).amax();
    assert!(diff < 1e-9, "diff {diff:e}");
}

#[test]
fn double_pair_at_eight_ninths() {
    let m = mono(8.0 / 9.0, 0.0);
    let target = cis(2.0 * PI * 5f64.sqrt() / 3.0);
    let expected = [target, target, target.conj(), target.conj()];
    // a Jordan block splits by the square root of the integration error
    assert!(matching_distance(&eigenvalues_symplectic(&m), &expected) < 1e-5);
    assert!(matching_distance(&e_zero_oracle(8.0 / 9.0).unwrap().eigenvalues, &expected) < 1e-7);
}

#[test]
fn residual_and_determinant_on_grid() {
    for mu in [0.0, 0.3, 0.7, 0.95, 1.0] {
        for e in [0.0, 0.4, 0.8, 0.95] {
            let m = mono(mu, e);
            assert!(
                m.symplectic_residual() <= 1e-9,
                "{mu} {e}: {:e}",
                m.symplectic_residual()
            );
            let det = m.determinant();
            assert!(
                (det - 1.0).abs() <= 1e-9 * m.entries().amax().powi(4).max(1.0),
                "{mu} {e}: det {det}"
            );
        }
    }
}

#[test]
fn loose_step_budget_reports_tolerance_failure() {
    let cfg = IntegratorConfig {
        max_steps: 8,
        ..IntegratorConfig::default()
    };
    let err = integrate_monodromy(&ParameterPoint::new(0.5, 0.9).unwrap(), &cfg).unwrap_err();
    assert!(matches!(err, Error::ToleranceNotMet { .. }));
}

#[test]
fn rotated_system_has_same_monodromy() {
    for (mu, e) in [(0.2, 0.1), (0.93, 0.4), (0.6, 0.7)] {
        let p = ParameterPoint::new(mu, e).unwrap();
        let cfg = IntegratorConfig::default();
        let a = integrate_monodromy(&p, &cfg).unwrap();
        let b = integrate_rotated_monodromy(&p, &cfg).unwrap();
        let diff = (a.entries() - b.entries()).amax() / a.entries().amax().max(1.0);
        assert!(diff < 1e-8, "{mu} {e}: {diff:e}");
    }
}

#[test]
fn identity_spectrum() {
    let id = SymplecticMatrix4::identity();
    for l in eigenvalues_symplectic(&id) {
        assert_abs_diff_eq!(l.re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(l.im, 0.0, epsilon = 1e-12);
    }
    assert_eq!(
        nullity_omega(&id, UnitCirclePoint::one(), DEFAULT_KERNEL_TOL),
        4
    );
    assert_eq!(degeneracy_scalar(&id, UnitCirclePoint::one()).unwrap(), 0.0);
}

#[test]
fn spectrum_at_mu_star() {
    let m = mono(mu_star(), 0.0);
    let w = cis(PI * (23.0 - 97f64.sqrt()).sqrt() / 2.0);
    let minus_one = Complex64::new(-1.0, 0.0);
    let expected = [minus_one, minus_one, w, w.conj()];
    assert!(matching_distance(&eigenvalues_symplectic(&m), &expected) < 1e-6);
    assert_eq!(
        nullity_omega(&m, UnitCirclePoint::minus_one(), DEFAULT_KERNEL_TOL),
        2
    );
    assert!(
        degeneracy_scalar(&m, UnitCirclePoint::minus_one())
            .unwrap()
            .abs()
            < 1e-8
    );

    let class = classify_stability(&m, DEFAULT_CLASSIFY_TOL);
    let points = class.degenerate_points();
    assert_eq!(points.len(), 1);
    assert_eq!(points[0].omega, UnitCirclePoint::minus_one());
    assert_eq!(points[0].multiplicity, 2);
    assert_eq!(points[0].hint, JordanHint::Semisimple);
}

#[test]
fn complex_quadruple_below_eight_ninths() {
    let l = eigenvalues_symplectic(&mono(0.5, 0.0));
    for z in l {
        assert!((z.norm() - 1.0).abs() > 1e-3);
        assert!(z.im.abs() > 1e-3);
    }
    let q = l[0];
    let expected = [q, q.conj(), q.inv(), q.conj().inv()];
    assert!(matching_distance(&l, &expected) < 1e-12);
    assert_eq!(
        classify_stability(&mono(0.5, 0.0), DEFAULT_CLASSIFY_TOL).kind,
        StabilityKind::HyperbolicHyperbolic
    );
}

#[test]
fn kernel_at_one_for_zero_mass_ratio() {
    for e in [0.0, 0.3, 0.6] {
        let m = mono(0.0, e);
        assert_eq!(
            nullity_omega(&m, UnitCirclePoint::one(), DEFAULT_KERNEL_TOL),
            2,
            "e = {e}"
        );
    }
}

#[test]
fn degeneracy_scalar_keeps_sign_below_mu_star() {
    let ms = mu_star();
    let values: Vec<f64> = (0..40)
        .map(|k| {
            let mu = ms * k as f64 / 40.0;
            degeneracy_scalar(&mono(mu, 0.0), UnitCirclePoint::minus_one()).unwrap()
        })
        .collect();
    assert!(
        values.iter().all(|&d| d > 0.0) || values.iter().all(|&d| d < 0.0),
        "{values:?}"
    );
}

#[test]
fn degeneracy_scalar_rejects_non_symplectic_input() {
    let m = SymplecticMatrix4::new(Matrix4::from_diagonal(&nalgebra::Vector4::new(
        2.0, 1.0, 1.0, 1.0,
    )));
    let err = degeneracy_scalar(&m, UnitCirclePoint::new(PI / 2.0)).unwrap_err();
    assert!(matches!(err, Error::NonRealResult { .. }));
}

#[test]
fn strongly_stable_beyond_mu_star() {
    let class = classify_stability(&mono(0.95, 0.0), DEFAULT_CLASSIFY_TOL);
    assert_eq!(class.kind, StabilityKind::EllipticElliptic { strong: true });
    let oracle = e_zero_oracle(0.95).unwrap();
    let (t1, t2) = (oracle.theta1.unwrap(), oracle.theta2.unwrap());
    let mut angles = class.elliptic_angles.clone();
    angles.sort_by(f64::total_cmp);
    // both pairs are R(θ) with θ ∈ (π, 2π): 2π - 2πθ₁ and 2πθ₂
    assert_abs_diff_eq!(angles[0], 2.0 * PI - 2.0 * PI * t1, epsilon = 1e-8);
    assert_abs_diff_eq!(angles[1], 2.0 * PI * t2, epsilon = 1e-8);
}

#[test]
fn mixed_angles_between_eight_ninths_and_mu_star() {
    let class = classify_stability(&mono(0.91, 0.0), DEFAULT_CLASSIFY_TOL);
    assert_eq!(class.kind, StabilityKind::EllipticElliptic { strong: true });
    let below = class.elliptic_angles.iter().filter(|&&a| a < PI).count();
    assert_eq!(below, 1, "{:?}", class.elliptic_angles);
}

#[test]
fn oracle_special_values() {
    let o = e_zero_oracle(8.0 / 9.0).unwrap();
    assert_abs_diff_eq!(o.theta1.unwrap(), 5f64.sqrt() / 3.0, epsilon = 1e-7);
    assert_abs_diff_eq!(o.theta2.unwrap(), 5f64.sqrt() / 3.0, epsilon = 1e-7);

    let o = e_zero_oracle(1.0).unwrap();
    assert_eq!(o.theta1, Some(0.0));
    assert_abs_diff_eq!(o.theta2.unwrap(), 1.0, epsilon = 1e-15);
    for l in o.eigenvalues {
        assert_abs_diff_eq!((l - 1.0).norm(), 0.0, epsilon = 1e-12);
    }

    let o = e_zero_oracle(mu_star()).unwrap();
    assert_abs_diff_eq!(o.theta1.unwrap(), 0.5, epsilon = 1e-14);
    assert_abs_diff_eq!(
        o.theta2.unwrap(),
        (23.0 - 97f64.sqrt()).sqrt() / 4.0,
        epsilon = 1e-14
    );
    assert_abs_diff_eq!(o.theta2.unwrap(), 0.90661, epsilon = 1e-5);

    assert!(e_zero_oracle(0.5).unwrap().theta1.is_none());
}

#[test]
fn circular_spectra_match_oracle() {
    for k in 0..50 {
        let mu = (k as f64 + 0.5) / 50.0;
        let d = matching_distance(
            &eigenvalues_symplectic(&mono(mu, 0.0)),
            &e_zero_oracle(mu).unwrap().eigenvalues,
        );
        assert!(d < 1e-8, "mu {mu}: {d:e}");
    }
}

#[test]
fn hyperbolic_set_is_a_prefix() {
    for e in [0.0, 0.2, 0.5, 0.8] {
        let flags: Vec<bool> = (1..60)
            .map(|k| {
                classify_stability(&mono(k as f64 / 60.0, e), DEFAULT_CLASSIFY_TOL).is_hyperbolic()
            })
            .collect();
        let first_false = flags.iter().position(|&h| !h).unwrap_or(flags.len());
        assert!(
            flags[first_false..].iter().all(|&h| !h),
            "e = {e}: {flags:?}"
        );
        assert!(first_false > 0);
    }
}

#[test]
fn n1_sign_is_a_symplectic_invariant() {
    for a in [1.0, -1.0] {
        for lambda in [1.0, -1.0] {
            let n1 = Matrix2::new(lambda, a * 0.8, 0.0, lambda);
            let m = diamond(&n1, &rotation(2.2));
            for seed in [0.3, 1.7] {
                let class = classify_stability(
                    &conjugate(&m, &symplectic_conjugator(seed)),
                    DEFAULT_CLASSIFY_TOL,
                );
                let points = class.degenerate_points();
                assert_eq!(points.len(), 1, "{class:?}");
                assert_eq!(points[0].nullity, 1);
                assert_eq!(
                    points[0].hint,
                    JordanHint::N1 { a_sign: a as i8 },
                    "lambda {lambda}, a {a}"
                );
            }
        }
    }
}

#[test]
fn n2_triviality_is_a_symplectic_invariant() {
    for theta in [1.1, 4.0] {
        for trace_sign in [1.0, -1.0] {
            // b = R(θ) S with S symmetric keeps the block matrix symplectic;
            // then (b₂ - b₃) sin θ = -sin²θ tr S
            let s = Matrix2::new(0.3 * trace_sign, 0.2, 0.2, 0.5 * trace_sign);
            let b = rotation(theta) * s;
            let mut m = Matrix4::zeros();
            m.fixed_view_mut::<2, 2>(0, 0).copy_from(&rotation(theta));
            m.fixed_view_mut::<2, 2>(2, 2).copy_from(&rotation(theta));
            m.fixed_view_mut::<2, 2>(0, 2).copy_from(&b);
            let trivial = (b[(0, 1)] - b[(1, 0)]) * theta.sin() > 0.0;
            for seed in [0.0, 0.9] {
                let c = conjugate(&m, &symplectic_conjugator(seed));
                assert!(c.symplectic_residual() < 1e-12);
                let class = classify_stability(&c, DEFAULT_CLASSIFY_TOL);
                let points = class.degenerate_points();
                assert_eq!(points.len(), 2, "{class:?}");
                for p in points {
                    assert_eq!(
                        p.hint,
                        JordanHint::N2 { trivial },
                        "theta {theta}, tr sign {trace_sign}"
                    );
                }
            }
        }
    }
}

#[test]
fn semisimple_collision_is_not_strongly_stable() {
    let m = diamond(&rotation(2.0), &rotation(2.0));
    let class = classify_stability(&SymplecticMatrix4::new(m), DEFAULT_CLASSIFY_TOL);
    assert_eq!(
        class.kind,
        StabilityKind::EllipticElliptic { strong: false }
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn spectrum_is_reciprocal_and_conjugate_closed(mu in 0.0..=1.0f64, e in 0.0..0.9f64) {
        let l = eigenvalues_symplectic(&mono(mu, e));
        let conj = l.map(|z| z.conj());
        let recip = l.map(|z| z.inv());
        let scale = l.iter().map(|z| z.norm()).fold(1.0, f64::max);
        prop_assert!(matching_distance(&l, &conj) <= 1e-7 * scale);
        prop_assert!(matching_distance(&l, &recip) <= 1e-7 * scale);
    }

    #[test]
    fn degeneracy_scalar_vanishes_with_nullity(mu in 0.0..=1.0f64, e in 0.0..0.6f64, angle in 0.0..(2.0 * PI)) {
        let m = mono(mu, e);
        let w = UnitCirclePoint::new(angle);
        let d = degeneracy_scalar(&m, w).unwrap();
        let nu = nullity_omega(&m, w, DEFAULT_KERNEL_TOL);
        // det(M - ωI) is a product of four eigenvalue distances
        let dist = eigenvalues_symplectic(&m).iter().map(|l| (l - w.to_complex()).norm()).fold(f64::INFINITY, f64::min);
        prop_assume!(nu >= 1 || dist > 1e-3);
        if nu >= 1 {
            prop_assert!(d.abs() < 1e-6 * m.norm().powi(3), "d {d:e}");
        } else {
            prop_assert!(d != 0.0);
        }
    }

    #[test]
    fn nullity_never_exceeds_eigenvalue_count(mu in 0.0..=1.0f64, e in 0.0..0.9f64, angle in 0.0..(2.0 * PI)) {
        let m = mono(mu, e);
        let w = UnitCirclePoint::new(angle);
        let close = eigenvalues_symplectic(&m).iter().filter(|l| (*l - w.to_complex()).norm() <= 1e-3).count();
        prop_assert!(nullity_omega(&m, w, DEFAULT_KERNEL_TOL) <= close);
    }
}
