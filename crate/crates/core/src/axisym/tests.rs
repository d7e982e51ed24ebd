use super::*;
use crate::symfun::sigma_matrix;

fn cos_profile(n: usize, a: f64, j: usize) -> AxisProfile {
    let mut c = vec![0.0; j + 1];
    c[j] = a;
    AxisProfile::cosine(n, c).unwrap()
}

#[test]
fn coarea_matches_sphere_areas() {
    assert!((coarea_integral(&|_| 1.0, 2, &[]).unwrap() - 4.0 * PI).abs() < 1e-10);
    assert!((coarea_integral(&|t: f64| t.cos().powi(2), 2, &[]).unwrap() - 4.0 * PI / 3.0).abs() < 1e-10);
    for n in 2..=9 {
        assert!((coarea_integral(&|_| 1.0, n, &[]).unwrap() - sphere_area(n)).abs() < 1e-10 * sphere_area(n));
    }
}

#[test]
fn k1_is_laplacian_of_first_harmonic() {
    let p = cos_profile(5, 0.5, 1);
    for t in [0.3, 1.0, 2.2] {
        for conv in [Convention::PlusMiddle, Convention::Intrinsic] {
            let v = p.sigma_k_d2u(t, 1, conv).unwrap();
            assert!((v + 2.5 * t.cos()).abs() < 1e-12);
        }
    }
}

#[test]
fn intrinsic_matches_diagonal_matrix() {
    let p = cos_profile(6, 0.05, 3);
    for i in 1..40 {
        let t = PI * i as f64 / 40.0;
        let jet = p.point_jet(t);
        for k in 1..=6 {
            let m = sigma_matrix(&jet.hess, k).unwrap();
            let a = p.sigma_k_d2u(t, k, Convention::Intrinsic).unwrap();
            assert!((m - a).abs() < 1e-12 * (1.0 + m.abs()), "k={k} t={t}: {m} vs {a}");
        }
    }
}

#[test]
fn conventions_differ_by_middle_term() {
    let p = cos_profile(4, 0.5, 1);
    let t = 0.7;
    let a = p.sigma_k_d2u(t, 2, Convention::PlusMiddle).unwrap();
    let b = p.sigma_k_d2u(t, 2, Convention::Intrinsic).unwrap();
    // V = cos θ / 2: u_θ = −sin θ / 2, middle term C_3^0 u_θ² = sin²θ / 4
    assert!((a - b - 0.25 * t.sin().powi(2)).abs() < 1e-12);
    assert!(matches!(p.sigma_k_d2u(0.0, 2, Convention::PlusMiddle), Err(Error::Pole(_))));
}

#[test]
fn constant_profiles() {
    for n in 2..=7 {
        let p = AxisProfile::ball(n, 0.0).unwrap();
        let q = AxisProfile::ball(n, 0.4).unwrap();
        for k in 0..=n {
            let c = binom_f64(n as i64, k as i64);
            assert!((p.sigma_k_h(1.1, k).unwrap() - c).abs() < 1e-12);
            assert!((q.sigma_k_h(1.1, k).unwrap() - c / 1.4f64.powi(k as i32)).abs() < 1e-12);
            if k >= 1 {
                assert_eq!(q.sigma_k_d2u(0.5, k, Convention::Intrinsic).unwrap(), 0.0);
            }
        }
    }
}

#[test]
fn rejects_kinked_poles_and_collapsed_profiles() {
    assert!(AxisProfile::expr(3, "0.1*sin(theta)").is_err());
    assert!(AxisProfile::ball(3, -1.5).is_err());
    assert!(AxisProfile::ball(1, 0.0).is_err());
}

#[test]
fn highest_term_routes_agree() {
    let z = highest_term_integral(&AxisProfile::ball(4, 0.0).unwrap(), 2).unwrap();
    assert_eq!((z.direct, z.by_parts), (0.0, 0.0));
    for (p, k) in [(cos_profile(5, 0.05, 1), 2), (cos_profile(6, 0.05, 3), 3)] {
        let h = highest_term_integral(&p, k).unwrap();
        assert!((h.direct - h.by_parts).abs() < 1e-9, "{h:?}");
        assert!(h.direct.abs() > 0.0);
    }
}

#[test]
fn highest_term_family() {
    for i in 0..20 {
        let n = 3 + i % 5;
        let k = 1 + i % (n - 1);
        let coeffs: Vec<f64> = (0..5).map(|j| 0.04 * ((i * 7 + j * 3) as f64).sin() / (1.0 + j as f64)).collect();
        let p = AxisProfile::cosine(n, coeffs).unwrap();
        let h = highest_term_integral(&p, k).unwrap();
        assert!((h.direct - h.by_parts).abs() < 1e-9 * (1.0 + h.direct.abs()), "i={i}: {h:?}");
    }
}

#[test]
fn theta0_values() {
    assert!((frequency_cutoff_theta0(0.01, 2).unwrap().theta0 - 0.1).abs() < 1e-15);
    assert!((frequency_cutoff_theta0(0.001, 3).unwrap().theta0 - 0.01).abs() < 1e-15);
    let d = frequency_cutoff_theta0(0.3, 1).unwrap();
    assert!(d.degenerate && d.theta0 == 1.0);
    assert!(frequency_cutoff_theta0(0.0, 2).is_err());
}

#[test]
fn derivative_identity_holds() {
    let grid: Vec<f64> = (0..=200).map(|i| PI * i as f64 / 200.0).collect();
    assert_eq!(derivative_identity_residual(&AxisProfile::ball(5, 0.0).unwrap(), 2, &grid).unwrap(), 0.0);
    for m in 1..=4 {
        let r = derivative_identity_residual(&cos_profile(5, 0.05, 1), m, &grid).unwrap();
        assert!(r <= 1e-8, "m={m}: {r}");
    }
}

#[test]
fn expression_and_samples_profiles() {
    let p = AxisProfile::expr(3, "0.1*cos(2*theta) - 0.02*cos(theta)^2").unwrap();
    let t: f64 = 0.9;
    let expect = 0.1 * (2.0 * t).cos() - 0.02 * t.cos().powi(2);
    assert!((p.value(t) - expect).abs() < 1e-14);
    let pairs: Vec<(f64, f64)> = (0..=60).map(|i| {
        let t = PI * i as f64 / 60.0;
        (t, 0.03 * (2.0 * t).cos())
    }).collect();
    let q = AxisProfile::from_samples(4, &pairs).unwrap();
    assert!((q.jet(t).d2 + 0.12 * (2.0 * t).cos()).abs() < 1e-9);
}

#[test]
fn zonal_amplitude_is_unnormalized_gegenbauer() {
    // C_2^{1/2} = P_2 on S².
    let p = AxisProfile::zonal(2, 2, 0.5).unwrap();
    let t: f64 = 0.4;
    assert!((p.value(t) - 0.5 * (1.5 * t.cos().powi(2) - 0.5)).abs() < 1e-13);
}

#[test]
fn scaling_a_ball() {
    let p = AxisProfile::ball(4, 0.2).unwrap().scaled(0.5).unwrap();
    assert!((p.value(1.0) - (0.6 - 1.0)).abs() < 1e-15);
}

#[test]
fn translating_an_offset_sphere_recovers_the_unit_sphere() {
    // The unit sphere centred at b e₁ has radial function b cos θ + √(1 − b² sin² θ).
    let b = 0.05;
    let pairs: Vec<(f64, f64)> = (0..=400)
        .map(|i| {
            let t = PI * i as f64 / 400.0;
            (t, b * t.cos() + (1.0 - b * b * t.sin().powi(2)).sqrt() - 1.0)
        })
        .collect();
    let p = AxisProfile::from_samples(3, &pairs).unwrap();
    let q = p.translated(b).unwrap();
    for t in [0.0, 0.5, 1.5, 3.0] {
        assert!(q.value(t).abs() < 1e-6, "{}", q.value(t));
    }
}

#[test]
fn pole_probe_is_finite() {
    let p = cos_profile(5, 0.02, 2);
    let r = pole_inequality_probe(&p, 2, 0.1).unwrap();
    assert!(r.lhs.is_finite() && r.rhs.is_finite());
}
