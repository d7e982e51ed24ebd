//! Spherical-harmonic analysis: full spectra on S², zonal Gegenbauer
//! spectra on Sⁿ, the low/high frequency split and Poincaré ratios.

use std::f64::consts::PI;

use num::complex::Complex64;
use serde::Serialize;

use crate::axisym::AxisProfile;
use crate::error::{arg, Result};
use crate::jet::Jet2;
use crate::quad::Rule;
use crate::spheregeom::{curvature_table_at, sphere_area, Domain, SphereField};

/// Laplace eigenvalue of degree ℓ on Sⁿ.
pub fn eigenvalue(l: usize, n: usize) -> f64 {
    (l * (l + n - 1)) as f64
}

/// Default split threshold 2(n+1)+1: degrees ≤ 2 go low, ≥ 3 go high.
pub fn default_lambda(n: usize) -> f64 {
    2.0 * (n as f64 + 1.0) + 1.0
}

/// Unnormalized Gegenbauer C_ℓ^α(cos θ), ℓ = 0..=lmax, as θ-jets.
pub fn gegenbauer_jets(lmax: usize, alpha: f64, theta: Jet2) -> Vec<Jet2> {
    let x = theta.cos();
    let mut c = Vec::with_capacity(lmax + 1);
    c.push(Jet2::constant(1.0));
    if lmax >= 1 {
        c.push(x.scale(2.0 * alpha));
    }
    for l in 2..=lmax {
        let lf = l as f64;
        let next = ((x * c[l - 1]).scale(2.0 * (lf + alpha - 1.0)) - c[l - 2].scale(lf + 2.0 * alpha - 2.0)).scale(1.0 / lf);
        c.push(next);
    }
    c
}

fn gamma_half_integer(two_x: usize) -> f64 {
    // Γ(x) for x = two_x / 2 > 0
    if two_x % 2 == 0 {
        (1..two_x / 2).map(|v| v as f64).product()
    } else {
        let mut g = PI.sqrt();
        let mut x = 0.5;
        while (2.0 * x) < two_x as f64 {
            g *= x;
            x += 1.0;
        }
        g
    }
}

/// ∫_{Sⁿ} C_ℓ^α(cos θ)² dA with α = (n−1)/2.
pub fn zonal_norm_sq(l: usize, n: usize) -> f64 {
    assert!(n >= 2);
    let alpha = (n as f64 - 1.0) / 2.0;
    // Γ(ℓ+2α)/ℓ! = Π_{i=1}^{2α−1} (ℓ+i) since 2α = n−1 is an integer.
    let ratio: f64 = (1..n - 1).map(|i| (l + i) as f64).product();
    let g = gamma_half_integer(n - 1);
    let jacobi = PI * 2f64.powf(1.0 - 2.0 * alpha) * ratio / ((l as f64 + alpha) * g * g);
    sphere_area(n - 1) * jacobi
}

/// Orthonormal zonal basis Ĉ_ℓ = C_ℓ^α / ‖C_ℓ^α‖ on Sⁿ, as θ-jets.
pub fn zonal_basis_jets(lmax: usize, n: usize, theta: Jet2) -> Vec<Jet2> {
    let alpha = (n as f64 - 1.0) / 2.0;
    gegenbauer_jets(lmax, alpha, theta)
        .into_iter()
        .enumerate()
        .map(|(l, j)| j.scale(1.0 / zonal_norm_sq(l, n).sqrt()))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum HarmonicSpectrum {
    /// Complex coefficients c_{l,m}, m >= 0, on S².
    Sphere {
        lmax: usize,
        #[serde(serialize_with = "ser_complex")]
        coeffs: Vec<Complex64>,
    },
    /// Orthonormal zonal coefficients on Sⁿ.
    Zonal { n: usize, coeffs: Vec<f64> },
}

fn ser_complex<S: serde::Serializer>(c: &[Complex64], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(c.len()))?;
    for z in c {
        seq.serialize_element(&(z.re, z.im))?;
    }
    seq.end()
}

fn lm_index(l: usize, m: usize) -> usize {
    l * (l + 1) / 2 + m
}

impl HarmonicSpectrum {
    pub fn n(&self) -> usize {
        match self {
            HarmonicSpectrum::Sphere { .. } => 2,
            HarmonicSpectrum::Zonal { n, .. } => *n,
        }
    }

    pub fn lmax(&self) -> usize {
        match self {
            HarmonicSpectrum::Sphere { lmax, .. } => *lmax,
            HarmonicSpectrum::Zonal { coeffs, .. } => coeffs.len().saturating_sub(1),
        }
    }

    /// Σ|c|² per degree (all orders for S²).
    pub fn degree_energy(&self) -> Vec<f64> {
        match self {
            HarmonicSpectrum::Sphere { lmax, coeffs } => (0..=*lmax)
                .map(|l| {
                    (0..=l)
                        .map(|m| coeffs[lm_index(l, m)].norm_sqr() * if m == 0 { 1.0 } else { 2.0 })
                        .sum()
                })
                .collect(),
            HarmonicSpectrum::Zonal { coeffs, .. } => coeffs.iter().map(|c| c * c).collect(),
        }
    }

    /// ∫u² dA by Parseval.
    pub fn l2_squared(&self) -> f64 {
        self.degree_energy().iter().sum()
    }

    /// ∫|∇u|² dA by Parseval.
    pub fn dirichlet(&self) -> f64 {
        let n = self.n();
        self.degree_energy().iter().enumerate().map(|(l, e)| eigenvalue(l, n) * e).sum()
    }

    fn keep_degrees(&self, keep: impl Fn(usize) -> bool) -> Self {
        match self {
            HarmonicSpectrum::Sphere { lmax, coeffs } => {
                let mut c = coeffs.clone();
                for l in 0..=*lmax {
                    if !keep(l) {
                        for m in 0..=l {
                            c[lm_index(l, m)] = Complex64::new(0.0, 0.0);
                        }
                    }
                }
                HarmonicSpectrum::Sphere { lmax: *lmax, coeffs: c }
            }
            HarmonicSpectrum::Zonal { n, coeffs } => HarmonicSpectrum::Zonal {
                n: *n,
                coeffs: coeffs.iter().enumerate().map(|(l, c)| if keep(l) { *c } else { 0.0 }).collect(),
            },
        }
    }
}

/// Forward transform of grid samples.
pub fn analyze_field(field: &SphereField) -> Result<HarmonicSpectrum> {
    let f = SphereField::from_values(field.grid().clone(), field.lmax(), field.values().to_vec())?;
    Ok(HarmonicSpectrum::Sphere { lmax: f.lmax(), coeffs: f.coeffs().to_vec() })
}

/// Zonal coefficients c_ℓ = ∫_{Sⁿ} V Ĉ_ℓ dA by Gauss–Legendre in θ.
pub fn analyze_profile(profile: &AxisProfile, lmax: usize) -> HarmonicSpectrum {
    let n = profile.n();
    let rule = Rule::new((2 * lmax + 64).max(128));
    let area = sphere_area(n - 1);
    let mut coeffs = vec![0.0; lmax + 1];
    for (t, w) in rule.on(0.0, PI) {
        let v = profile.value(t);
        let basis = zonal_basis_jets(lmax, n, Jet2::constant(t));
        let ws = area * w * t.sin().powi(n as i32 - 1) * v;
        for (c, b) in coeffs.iter_mut().zip(&basis) {
            *c += ws * b.v;
        }
    }
    HarmonicSpectrum::Zonal { n, coeffs }
}

/// Back to a field (S²) or a zonal profile (Sⁿ).
pub fn synthesize(spec: &HarmonicSpectrum, grid: crate::spheregeom::Grid) -> Result<Domain> {
    match spec {
        HarmonicSpectrum::Sphere { lmax, coeffs } => {
            Ok(Domain::Sphere(SphereField::from_coeffs(grid, *lmax, coeffs.clone())?))
        }
        HarmonicSpectrum::Zonal { n, coeffs } => Ok(Domain::Axial(AxisProfile::zonal_series(*n, coeffs.clone())?)),
    }
}

/// u₁ keeps eigenvalues ≤ λ, u₂ the rest; u₁ + u₂ = u coefficient-wise.
pub fn split(spec: &HarmonicSpectrum, lambda: f64) -> Result<(HarmonicSpectrum, HarmonicSpectrum)> {
    if !(lambda > 0.0) {
        return arg(format!("split threshold must be positive, got {lambda}"));
    }
    let n = spec.n();
    Ok((spec.keep_degrees(|l| eigenvalue(l, n) <= lambda), spec.keep_degrees(|l| eigenvalue(l, n) > lambda)))
}

/// Removes the ℓ = 0 and ℓ = 1 components.
pub fn project_constraints(spec: &HarmonicSpectrum) -> HarmonicSpectrum {
    spec.keep_degrees(|l| l >= 2)
}

/// ∫|∇u|² / ∫u² by quadrature of the domain's jets.
pub fn rayleigh(domain: &Domain) -> Result<f64> {
    let t = curvature_table_at(domain, 0, 0)?;
    if t.l2 <= 0.0 {
        return arg("rayleigh quotient of the zero field");
    }
    Ok(t.dirichlet / t.l2)
}

/// Both sides of the frequency-split estimate with the ω(ε) corrections
/// set to zero: ∫ ∇²u[∇u, ∇u] dA against −½∫ Δu |∇u₂|² dA, where u₂ is
/// the part of u above λ. Diagnostic only.
#[derive(Debug, Clone, Serialize)]
pub struct SplitProbe {
    pub lambda: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub low_energy_fraction: f64,
}

pub fn split_probe(field: &SphereField, lambda: f64) -> Result<SplitProbe> {
    let n = 2;
    let u2 = field.filter_degrees(|l| eigenvalue(l, n) > lambda)?;
    let g = field.grid();
    let (ju, j2) = (field.grid_jets(), u2.grid_jets());
    let (mut lhs, mut rhs) = (0.0, 0.0);
    for (idx, (a, b)) in ju.iter().zip(&j2).enumerate() {
        let w = g.area_weight(idx / g.l_phi);
        lhs += w * a.hess.quad_form(&a.grad);
        rhs += -0.5 * w * a.laplacian() * b.grad_norm_sq();
    }
    let e = field.degree_energy();
    let total: f64 = e.iter().sum();
    let low: f64 = e.iter().enumerate().filter(|(l, _)| eigenvalue(*l, n) <= lambda).map(|(_, v)| v).sum();
    Ok(SplitProbe { lambda, lhs, rhs, low_energy_fraction: if total > 0.0 { low / total } else { 0.0 } })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zonal_norms_match_quadrature() {
        let rule = Rule::new(200);
        for n in [2usize, 3, 5, 6, 9] {
            for l in [0usize, 1, 2, 7, 20] {
                let alpha = (n as f64 - 1.0) / 2.0;
                let q: f64 = sphere_area(n - 1)
                    * rule.integrate(0.0, PI, |t| {
                        let c = gegenbauer_jets(l, alpha, Jet2::constant(t))[l].v;
                        c * c * t.sin().powi(n as i32 - 1)
                    });
                let z = zonal_norm_sq(l, n);
                assert!((q - z).abs() <= 1e-11 * z, "n={n} l={l}: {q} vs {z}");
            }
        }
        // Legendre on S²: 4π/(2ℓ+1)
        assert!((zonal_norm_sq(3, 2) - 4.0 * PI / 7.0).abs() < 1e-13);
    }

    #[test]
    fn eigenvalues_and_lambda() {
        assert_eq!(eigenvalue(2, 5), 12.0);
        assert_eq!(default_lambda(5), 13.0);
    }
}
