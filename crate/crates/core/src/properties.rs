//! Property tests over random inputs for the core invariants.

use approx::assert_relative_eq;
use proptest::prelude::*;
use statrs::function::beta::beta;
use statrs::function::gamma::gamma;

use crate::axisym::AxisProfile;
use crate::exactcomb::{beta_int, binom, involution_check, to_f64};
use crate::io::{parse_field, parse_profile};
use crate::quad::Rule;
use crate::spheregeom::{ball_volume, curvature_table, sphere_area, Domain};
use crate::symfun::{newton_tensor, sigma_all_from_eigenvalues, sigma_matrix, SymMatrix};

fn sym_matrix(max_n: usize) -> impl Strategy<Value = SymMatrix> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(-2.0f64..2.0, n * n).prop_map(move |a| SymMatrix::from_dense_symmetrized(n, &a))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn recursion_matches_eigenvalues(a in sym_matrix(8)) {
        let eig = sigma_all_from_eigenvalues(&a.eigenvalues());
        for k in 0..=a.n() {
            let s = sigma_matrix(&a, k).unwrap();
            prop_assert!((s - eig[k]).abs() <= 1e-9 * (1.0 + eig[k].abs()), "k={k}: {s} vs {}", eig[k]);
        }
    }

    #[test]
    fn sigma_is_homogeneous(a in sym_matrix(6), t in 0.1f64..3.0) {
        for k in 0..=a.n() {
            let lhs = sigma_matrix(&a.scaled(t), k).unwrap();
            let rhs = t.powi(k as i32) * sigma_matrix(&a, k).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()));
        }
    }

    #[test]
    fn newton_tensor_trace(a in sym_matrix(7)) {
        let n = a.n();
        for k in 0..n {
            let tr = newton_tensor(&a, k).unwrap().matrix.trace();
            let want = (n - k) as f64 * sigma_matrix(&a, k).unwrap();
            prop_assert!((tr - want).abs() <= 1e-9 * (1.0 + want.abs()));
        }
    }

    #[test]
    fn pascal_rule(n in 1i64..60, k in -2i64..62) {
        prop_assert_eq!(binom(n, k), binom(n - 1, k - 1) + binom(n - 1, k));
    }

    #[test]
    fn beta_matches_gamma_route(a in 1i64..30, b in 1i64..30) {
        let exact = to_f64(&beta_int(a, b));
        let reference = beta(a as f64, b as f64);
        prop_assert!((exact - reference).abs() <= 1e-12 * reference);
    }

    #[test]
    fn ball_integrals_scale(n in 2usize..7, r in 0.3f64..2.5) {
        let t = curvature_table(&Domain::Axial(AxisProfile::ball(n, r - 1.0).unwrap()), n).unwrap();
        for k in 0..=n {
            let want = to_f64(&binom(n as i64, k as i64)) * r.powi((n - k) as i32) * sphere_area(n);
            prop_assert!((t.signed[k] - want).abs() <= 1e-10 * want);
            prop_assert!(t.negative[k].abs() <= 1e-12 * want);
        }
        prop_assert!((t.volume - ball_volume(n + 1) * r.powi(n as i32 + 1)).abs() <= 1e-10 * t.volume);
    }

    #[test]
    fn gauss_legendre_is_exact_on_polynomials(m in 2usize..24, c in prop::collection::vec(-1.0f64..1.0, 1..48)) {
        let deg = (2 * m - 1).min(c.len() - 1);
        let rule = Rule::new(m);
        let q = rule.integrate(-1.0, 1.0, |x| (0..=deg).map(|j| c[j] * x.powi(j as i32)).sum());
        let exact: f64 = (0..=deg).filter(|j| j % 2 == 0).map(|j| 2.0 * c[j] / (j as f64 + 1.0)).sum();
        prop_assert!((q - exact).abs() <= 1e-12);
    }

    #[test]
    fn parsers_never_panic(text in "[0-9 .eE+#x\\-\n]{0,200}") {
        let _ = parse_field(&text);
        let _ = parse_profile(&text);
    }
}

#[test]
fn sphere_area_matches_gamma_formula() {
    for n in 0..20usize {
        let m = (n + 1) as f64;
        assert_relative_eq!(sphere_area(n), 2.0 * std::f64::consts::PI.powf(m / 2.0) / gamma(m / 2.0), max_relative = 1e-13);
    }
}

#[test]
fn involution_holds_to_thirty() {
    for n in 1..=30 {
        assert!(involution_check(n).unwrap().squares_to_identity(), "n = {n}");
    }
}
