use num::complex::Complex64;

use super::*;
use crate::axisym::AxisProfile;

fn small_grid() -> Grid {
    Grid::new(48, 96)
}

fn y_terms(terms: &[(usize, i64, f64)]) -> SphereField {
    let t: Vec<_> = terms.iter().map(|&(l, m, c)| (l, m, Complex64::new(c, 0.0))).collect();
    SphereField::from_terms(small_grid(), 20, &t).unwrap()
}

#[test]
fn sphere_areas_and_ball_volumes() {
    assert!((sphere_area(2) - 4.0 * PI).abs() < 1e-14);
    assert!((sphere_area(3) - 2.0 * PI * PI).abs() < 1e-13);
    assert!((ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-14);
}

#[test]
fn sigma_h_on_spheres() {
    for n in 2..=9 {
        for c in [0.0, 0.3, -0.2] {
            let mut jet = PointJet::zero(n);
            jet.u = c;
            let s = sigma_all_h(&jet, n).unwrap();
            for (k, v) in s.iter().enumerate() {
                let expect = binom_f64(n as i64, k as i64) / (1.0 + c).powi(k as i32);
                assert!((v - expect).abs() < 1e-12 * expect.max(1.0));
            }
        }
    }
}

#[test]
fn first_harmonic_hessian_is_minus_u_identity() {
    let f = y_terms(&[(1, 0, 0.1), (1, 1, 0.05)]);
    let g = f.grid();
    for (idx, jet) in f.grid_jets().iter().enumerate().step_by(37) {
        let _ = g;
        let h = &jet.hess;
        assert!((h.get(0, 0) + jet.u).abs() < 1e-11, "{idx}");
        assert!((h.get(1, 1) + jet.u).abs() < 1e-11);
        assert!(h.get(0, 1).abs() < 1e-11);
    }
}

#[test]
fn closed_form_matches_finite_differences() {
    let f = SphereField::random(small_grid(), 12, 6, 0.05, 3).unwrap();
    let fd = shape_operator_fd(&f).unwrap();
    for (idx, jet) in f.grid_jets().iter().enumerate().step_by(53) {
        let [k1, k2] = fd[idx];
        let s = sigma_all_h(jet, 2).unwrap();
        assert!((s[1] - (k1 + k2)).abs() < 1e-6 * s[1].abs(), "{idx}: {} vs {}", s[1], k1 + k2);
        assert!((s[2] - k1 * k2).abs() < 1e-6 * s[2].abs());
    }
}

#[test]
fn curvature_integrals_of_round_spheres() {
    let f = SphereField::constant(small_grid(), 8, 0.2).unwrap();
    let t = curvature_table(&Domain::Sphere(f), 2).unwrap();
    for k in 0..=2 {
        let expect = binom_f64(2, k as i64) * 1.2f64.powi(2 - k as i32) * 4.0 * PI;
        assert!((t.signed[k] - expect).abs() < 1e-10 * expect);
        assert!(t.negative[k].abs() < 1e-14);
    }
    assert!((t.volume - ball_volume(3) * 1.2f64.powi(3)).abs() < 1e-10);
    for b in t.barycenter.unwrap() {
        assert!(b.abs() < 1e-12);
    }
}

#[test]
fn gauss_bonnet_holds_for_perturbed_spheres() {
    let f = SphereField::random(small_grid(), 12, 5, 0.08, 11).unwrap();
    let t = curvature_table(&Domain::Sphere(f), 2).unwrap();
    assert!((t.signed[2] - 4.0 * PI).abs() < 1e-8);
    assert!((t.signed[2] - (t.positive[2] - t.negative[2])).abs() < 1e-12);
}

#[test]
fn rotation_invariance_of_integrals() {
    // The same degree-2 zonal function about the z axis and about the x axis.
    let z = SphereField::from_fn(small_grid(), 16, |_, _, z| 0.05 * (1.5 * z * z - 0.5)).unwrap();
    let x = SphereField::from_fn(small_grid(), 16, |x, _, _| 0.05 * (1.5 * x * x - 0.5)).unwrap();
    let (a, b) = (curvature_table(&Domain::Sphere(z), 2).unwrap(), curvature_table(&Domain::Sphere(x), 2).unwrap());
    for k in 0..=2 {
        assert!((a.signed[k] - b.signed[k]).abs() < 1e-10 * a.signed[k].abs());
    }
}

#[test]
fn axial_and_grid_pipelines_agree() {
    let f = SphereField::from_fn(small_grid(), 16, |_, _, z| 0.03 * (2.0 * z * z - 1.0)).unwrap();
    let p = AxisProfile::cosine(2, vec![0.0, 0.0, 0.03]).unwrap();
    let (a, b) = (curvature_table(&Domain::Sphere(f), 2).unwrap(), curvature_table(&Domain::Axial(p), 2).unwrap());
    for k in 0..=2 {
        assert!((a.signed[k] - b.signed[k]).abs() < 1e-9 * a.signed[k].abs());
    }
    assert!((a.volume - b.volume).abs() < 1e-10);
}

#[test]
fn normalization_reaches_unit_volume_and_centres() {
    let f = y_terms(&[(1, 0, 0.04), (2, 1, 0.02), (3, 0, 0.01), (0, 0, 0.1)]);
    let (d, r) = normalize_to(&Domain::Sphere(f), Normalization::Volume).unwrap();
    let (vol, bary) = volume_and_barycenter(&d).unwrap();
    assert!((vol - ball_volume(3)).abs() < 1e-9);
    assert!(bary.unwrap().iter().all(|b| b.abs() < 1e-8));
    assert!(r.scale_residual < 1e-10);
}

#[test]
fn area_normalization_matches_ball_area() {
    let p = AxisProfile::cosine(5, vec![0.1, 0.02, 0.01]).unwrap();
    let (d, _) = normalize_to(&Domain::Axial(p), Normalization::Curvature(0)).unwrap();
    let t = curvature_table(&d, 0).unwrap();
    assert!((t.signed[0] - sphere_area(5)).abs() < 1e-9 * sphere_area(5));
}

#[test]
fn af_ratio_of_the_ball_is_one() {
    for n in 2..=5 {
        let d = Domain::Axial(AxisProfile::ball(n, 0.3).unwrap());
        for k in 0..n {
            let r = af_ratio(&d, k).unwrap();
            assert!((r.value - 1.0).abs() < 1e-10, "n={n} k={k}: {}", r.value);
        }
    }
}

#[test]
fn quermass_constants_of_the_ball() {
    let d = Domain::Axial(AxisProfile::ball(3, 0.0).unwrap());
    // V_n of the unit ball is ω_n.
    assert!((quermassintegral(&d, 1).unwrap() - ball_volume(3)).abs() < 1e-10);
    let (a, b) = quermass_ball_constants(3);
    assert!((a - ball_volume(3)).abs() < 1e-12 && (b - 1.0).abs() < 1e-12);
}

#[test]
fn ibp_sphere_forms_hold() {
    let f = SphereField::random(Grid::new(64, 128), 20, 8, 0.1, 5).unwrap();
    for id in ibp::ibp_identities(&f) {
        if id.name == "c" {
            assert!(id.lhs.abs() < 1e-14);
        } else {
            assert!(id.sphere_gap() < 1e-8, "{}: {:?}", id.name, id);
        }
    }
}

#[test]
fn divergence_lemma_weak_form_vanishes() {
    let g = Grid::new(64, 128);
    let u = SphereField::random(g.clone(), 20, 6, 0.1, 1).unwrap();
    let phi = SphereField::random(g.clone(), 20, 5, 0.1, 2).unwrap();
    let psi = SphereField::random(g, 20, 5, 0.1, 3).unwrap();
    for m in 1..=2 {
        let (v, s) = ibp::divergence_weak_form(&u, &phi, &psi, m).unwrap();
        assert!(v.abs() <= 1e-10 * s + 1e-15, "m={m}: {v} / {s}");
    }
}

#[test]
fn translation_recentres_an_offset_sphere() {
    let b = [0.03, -0.02, 0.01];
    let f = SphereField::from_fn(Grid::new(64, 128), 24, |x, y, z| {
        let yb = x * b[0] + y * b[1] + z * b[2];
        let bb = b.iter().map(|v| v * v).sum::<f64>();
        yb + (1.0 - bb + yb * yb).sqrt() - 1.0
    })
    .unwrap();
    let d = Domain::Sphere(f).translated(&b).unwrap();
    if let Domain::Sphere(g) = d {
        assert!(g.values().iter().all(|v| v.abs() < 1e-9));
    }
}
