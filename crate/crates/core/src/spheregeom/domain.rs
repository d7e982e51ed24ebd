use super::{PointJet, SphereField};
use crate::axisym::AxisProfile;
use crate::counterexample::BumpDomain;
use crate::error::{arg, Error, Result};
use crate::par;

/// One quadrature node: weight for ∫ · dA on Sⁿ, the jet of u there, and
/// the node's direction in ℝ^{n+1} (empty when positions are not tracked).
#[derive(Debug, Clone)]
pub struct NodeSample {
    pub weight: f64,
    pub jet: PointJet,
    pub x: Vec<f64>,
}

/// A nearly spherical domain given as a radial graph.
#[derive(Debug, Clone)]
pub enum Domain {
    /// Full field on S² (n = 2).
    Sphere(SphereField),
    /// Axially symmetric profile on Sⁿ.
    Axial(AxisProfile),
    /// Disjoint identical bumps on an otherwise round sphere.
    Bumps(BumpDomain),
}

impl Domain {
    pub fn n(&self) -> usize {
        match self {
            Domain::Sphere(_) => 2,
            Domain::Axial(p) => p.n(),
            Domain::Bumps(b) => b.n(),
        }
    }

    /// Quadrature nodes; each level doubles the resolution.
    pub fn samples(&self, level: u32) -> Result<Vec<NodeSample>> {
        match self {
            Domain::Sphere(f) => sphere_samples(f, level),
            Domain::Axial(p) => p.samples(level),
            Domain::Bumps(b) => b.samples(level),
        }
    }

    /// The domain dilated by `s` about the origin: u ↦ s(1+u) − 1.
    pub fn scaled(&self, s: f64) -> Result<Domain> {
        if !(s > 0.0 && s.is_finite()) {
            return arg(format!("scale factor must be positive, got {s}"));
        }
        Ok(match self {
            Domain::Sphere(f) => Domain::Sphere(f.affine_coeffs(s, s - 1.0)?),
            Domain::Axial(p) => Domain::Axial(p.scaled(s)?),
            Domain::Bumps(b) => Domain::Bumps(b.scaled(s)),
        })
    }

    /// The domain shifted by −b (so a barycenter b moves to the origin),
    /// re-graphed over the unit sphere.
    pub fn translated(&self, b: &[f64]) -> Result<Domain> {
        match self {
            Domain::Sphere(f) => Ok(Domain::Sphere(translate_field(f, b)?)),
            Domain::Axial(p) => Ok(Domain::Axial(p.translated(b[0])?)),
            Domain::Bumps(_) => Err(Error::Domain("bump domains do not track cap positions".into())),
        }
    }
}

fn sphere_samples(field: &SphereField, level: u32) -> Result<Vec<NodeSample>> {
    let f = if level == 0 { field.clone() } else { field.resampled(field.grid().refined(level))? };
    let g = f.grid();
    let jets = f.grid_jets();
    Ok(jets
        .into_iter()
        .enumerate()
        .map(|(idx, jet)| {
            let (i, j) = (idx / g.l_phi, idx % g.l_phi);
            let (st, ct) = g.theta[i].sin_cos();
            let (sp, cp) = g.phi(j).sin_cos();
            NodeSample { weight: g.area_weight(i), jet, x: vec![st * cp, st * sp, ct] }
        })
        .collect())
}

/// Solves |ρy + b| = 1 + u(dir(ρy + b)) for ρ at every grid direction y
/// (secant iteration) and analyzes ρ − 1 as the new field.
fn translate_field(field: &SphereField, b: &[f64]) -> Result<SphereField> {
    let g = field.grid().clone();
    let radial = |p: [f64; 3]| {
        let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        r - 1.0 - field.value_at_point(p[0] / r, p[1] / r, p[2] / r)
    };
    let values: Vec<Result<f64>> = par::map_range(g.nodes(), |idx| {
        let (i, j) = (idx / g.l_phi, idx % g.l_phi);
        let (st, ct) = g.theta[i].sin_cos();
        let (sp, cp) = g.phi(j).sin_cos();
        let y = [st * cp, st * sp, ct];
        let at = |rho: f64| radial([rho * y[0] + b[0], rho * y[1] + b[1], rho * y[2] + b[2]]);
        let yb = y[0] * b[0] + y[1] * b[1] + y[2] * b[2];
        let mut r0 = 1.0 + field.value_at_point(y[0], y[1], y[2]) - yb;
        let mut r1 = r0 + 1e-4;
        let mut f0 = at(r0);
        for _ in 0..60 {
            let f1 = at(r1);
            if f1 == 0.0 || f1 == f0 || (r1 - r0).abs() < 1e-14 {
                return Ok(r1 - 1.0);
            }
            let r2 = r1 - f1 * (r1 - r0) / (f1 - f0);
            r0 = r1;
            f0 = f1;
            r1 = r2;
        }
        Err(Error::Normalization(format!("re-graphing failed to converge at node ({i}, {j})")))
    });
    let values = values.into_iter().collect::<Result<Vec<_>>>()?;
    SphereField::from_values(g, field.lmax(), values)
}
