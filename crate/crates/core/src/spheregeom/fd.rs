//! Finite-difference shape operator of a radial graph in ℝ³, used as an
//! independent check on the closed-form curvature formula.

use super::SphereField;
use crate::error::{Error, Result};
use crate::par;

type V3 = [f64; 3];

fn dot(a: V3, b: V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}
fn cross(a: V3, b: V3) -> V3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}
fn lin(terms: &[(f64, V3)]) -> V3 {
    let mut out = [0.0; 3];
    for (c, v) in terms {
        for i in 0..3 {
            out[i] += c * v[i];
        }
    }
    out
}
fn normalized(v: V3) -> V3 {
    let r = dot(v, v).sqrt();
    [v[0] / r, v[1] / r, v[2] / r]
}

/// Step of the fourth-order stencils.
const H: f64 = 2e-3;

/// Principal curvatures (ascending) of the surface {r(y) y : |y| = 1} at
/// direction `p`, sign chosen so the unit sphere gives (1, 1).
///
/// The chart is gnomonic around `p`, y(a, b) = normalize(p + a e₁ + b e₂),
/// which is regular everywhere including the poles.
pub fn principal_curvatures_fd(radius: &dyn Fn(V3) -> f64, p: V3) -> Result<[f64; 2]> {
    let p = normalized(p);
    let helper = if p[2].abs() < 0.9 { [0.0, 0.0, 1.0] } else { [1.0, 0.0, 0.0] };
    let e1 = normalized(cross(helper, p));
    let e2 = cross(p, e1);
    let x = |a: f64, b: f64| {
        let y = normalized(lin(&[(1.0, p), (a, e1), (b, e2)]));
        let r = radius(y);
        [r * y[0], r * y[1], r * y[2]]
    };
    let h = H;
    let d1 = |dir: (f64, f64)| {
        let f = |t: f64| x(t * dir.0, t * dir.1);
        lin(&[(-1.0, f(2.0 * h)), (8.0, f(h)), (-8.0, f(-h)), (1.0, f(-2.0 * h))]).map(|v| v / (12.0 * h))
    };
    let x0 = x(0.0, 0.0);
    let d2 = |dir: (f64, f64)| {
        let f = |t: f64| x(t * dir.0, t * dir.1);
        lin(&[(-1.0, f(2.0 * h)), (16.0, f(h)), (-30.0, x0), (16.0, f(-h)), (-1.0, f(-2.0 * h))])
            .map(|v| v / (12.0 * h * h))
    };
    let mixed = |s: f64| {
        lin(&[(1.0, x(s, s)), (-1.0, x(s, -s)), (-1.0, x(-s, s)), (1.0, x(-s, -s))]).map(|v| v / (4.0 * s * s))
    };
    let xa = d1((1.0, 0.0));
    let xb = d1((0.0, 1.0));
    let xaa = d2((1.0, 0.0));
    let xbb = d2((0.0, 1.0));
    // Richardson on the mixed difference removes the h² term.
    let xab = lin(&[(4.0 / 3.0, mixed(h)), (-1.0 / 3.0, mixed(2.0 * h))]);

    let (e, f, g) = (dot(xa, xa), dot(xa, xb), dot(xb, xb));
    let det = e * g - f * f;
    if det <= 1e-14 {
        return Err(Error::Chart(format!("first fundamental form degenerate at {p:?}")));
    }
    let mut nrm = normalized(cross(xa, xb));
    if dot(nrm, x0) < 0.0 {
        nrm = nrm.map(|v| -v);
    }
    // Inward-pointing convention: h = −II with outward normal.
    let (l, m, nn) = (-dot(xaa, nrm), -dot(xab, nrm), -dot(xbb, nrm));
    // S = I⁻¹ II
    let s11 = (g * l - f * m) / det;
    let s12 = (g * m - f * nn) / det;
    let s21 = (e * m - f * l) / det;
    let s22 = (e * nn - f * m) / det;
    let tr = s11 + s22;
    let dt = s11 * s22 - s12 * s21;
    let disc = (tr * tr / 4.0 - dt).max(0.0).sqrt();
    Ok([tr / 2.0 - disc, tr / 2.0 + disc])
}

/// Principal curvatures at every grid node of the radial graph of `field`.
pub fn shape_operator_fd(field: &SphereField) -> Result<Vec<[f64; 2]>> {
    let g = field.grid();
    let radius = |y: V3| 1.0 + field.value_at_point(y[0], y[1], y[2]);
    par::map_range(g.nodes(), |idx| {
        let (i, j) = (idx / g.l_phi, idx % g.l_phi);
        let (st, ct) = g.theta[i].sin_cos();
        let (sp, cp) = g.phi(j).sin_cos();
        principal_curvatures_fd(&radius, [st * cp, st * sp, ct])
    })
    .into_iter()
    .collect()
}
