//! Band-limited scalar fields on S²: Gauss–Legendre × uniform-azimuth
//! samples paired with complex spherical-harmonic coefficients.

use std::f64::consts::PI;

use num::complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::PointJet;
use crate::error::{arg, Error, Result};
use crate::jet::Jet2;
use crate::par;
use crate::quad::gauss_legendre;
use crate::symfun::SymMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub l_theta: usize,
    pub l_phi: usize,
    /// Colatitudes in increasing order.
    pub theta: Vec<f64>,
    /// Gauss–Legendre weights in cos θ.
    pub weight: Vec<f64>,
}

impl Grid {
    pub fn new(l_theta: usize, l_phi: usize) -> Self {
        let (z, w) = gauss_legendre(l_theta);
        // z increasing means θ decreasing; flip so θ increases.
        let theta = z.iter().rev().map(|z| z.acos()).collect();
        let weight = w.iter().rev().copied().collect();
        Self { l_theta, l_phi, theta, weight }
    }

    pub fn phi(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.l_phi as f64
    }

    pub fn nodes(&self) -> usize {
        self.l_theta * self.l_phi
    }

    /// Quadrature weight of node (i, j) for ∫ · dA.
    pub fn area_weight(&self, i: usize) -> f64 {
        self.weight[i] * 2.0 * PI / self.l_phi as f64
    }

    pub fn refined(&self, level: u32) -> Self {
        Self::new(self.l_theta << level, self.l_phi << level)
    }
}

impl Default for Grid {
    fn default() -> Self {
        Self::new(96, 192)
    }
}

pub const DEFAULT_LMAX: usize = 64;

fn lm_index(l: usize, m: usize) -> usize {
    l * (l + 1) / 2 + m
}

/// Orthonormal P̄_l^m(cos θ) for 0 <= m <= l <= lmax as θ-jets, so the
/// first two colatitude derivatives come for free.
pub fn legendre_jets(lmax: usize, theta: Jet2) -> Vec<Jet2> {
    let x = theta.cos();
    let s = theta.sin();
    let mut p = vec![Jet2::default(); lm_index(lmax, lmax) + 1];
    p[0] = Jet2::constant((1.0 / (4.0 * PI)).sqrt());
    for m in 0..=lmax {
        if m > 0 {
            let f = -((2 * m + 1) as f64 / (2 * m) as f64).sqrt();
            p[lm_index(m, m)] = (s * p[lm_index(m - 1, m - 1)]).scale(f);
        }
        if m < lmax {
            p[lm_index(m + 1, m)] = (x * p[lm_index(m, m)]).scale(((2 * m + 3) as f64).sqrt());
        }
        for l in m + 2..=lmax {
            let (lf, mf) = (l as f64, m as f64);
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0).powi(2) - mf * mf) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt();
            p[lm_index(l, m)] = (x * p[lm_index(l - 1, m)] - p[lm_index(l - 2, m)].scale(b)).scale(a);
        }
    }
    p
}

/// Raw partial derivatives in (θ, φ) at one point.
#[derive(Debug, Clone, Copy, Default)]
pub struct Partials {
    pub u: f64,
    pub t: f64,
    pub tt: f64,
    pub p: f64,
    pub pp: f64,
    pub tp: f64,
}

impl Partials {
    /// Covariant gradient and Hessian in the orthonormal frame (e_θ, e_φ/sin θ).
    pub fn to_jet(self, theta: f64) -> PointJet {
        let (s, c) = theta.sin_cos();
        let cot = c / s;
        let grad = vec![self.t, self.p / s];
        let mut hess = SymMatrix::zeros(2);
        hess.set(0, 0, self.tt);
        hess.set(0, 1, (self.tp - cot * self.p) / s);
        hess.set(1, 1, self.pp / (s * s) + cot * self.t);
        PointJet { u: self.u, grad, hess }
    }
}

#[derive(Debug, Clone)]
pub struct SphereField {
    grid: Grid,
    lmax: usize,
    /// c_{l,m} for m >= 0; negative orders follow from c_{l,−m} = (−1)^m conj(c_{l,m}).
    coeffs: Vec<Complex64>,
    values: Vec<f64>,
    pub warnings: Vec<String>,
}

impl SphereField {
    /// Builds from coefficients and synthesizes grid samples.
    pub fn from_coeffs(grid: Grid, lmax: usize, mut coeffs: Vec<Complex64>) -> Result<Self> {
        if lmax + 1 > grid.l_theta || 2 * lmax + 1 > grid.l_phi {
            return arg(format!(
                "lmax {lmax} is not resolved by a {}x{} grid",
                grid.l_theta, grid.l_phi
            ));
        }
        coeffs.resize(lm_index(lmax, lmax) + 1, Complex64::new(0.0, 0.0));
        for l in 0..=lmax {
            coeffs[lm_index(l, 0)].im = 0.0;
        }
        let mut f = Self { grid, lmax, coeffs, values: Vec::new(), warnings: Vec::new() };
        f.values = f.synthesize_values();
        f.validate()?;
        Ok(f)
    }

    /// From an explicit list of (l, m, c) with m possibly negative.
    pub fn from_terms(grid: Grid, lmax: usize, terms: &[(usize, i64, Complex64)]) -> Result<Self> {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); lm_index(lmax, lmax) + 1];
        for &(l, m, c) in terms {
            if l > lmax || m.unsigned_abs() as usize > l {
                return arg(format!("coefficient (l={l}, m={m}) outside 0 <= |m| <= l <= {lmax}"));
            }
            if m >= 0 {
                coeffs[lm_index(l, m as usize)] += c;
            } else {
                let sgn = if m % 2 == 0 { 1.0 } else { -1.0 };
                coeffs[lm_index(l, (-m) as usize)] += c.conj() * sgn;
            }
        }
        Self::from_coeffs(grid, lmax, coeffs)
    }

    /// Samples `f(x, y, z)` on the grid and analyzes up to `lmax`.
    pub fn from_fn(grid: Grid, lmax: usize, f: impl Fn(f64, f64, f64) -> f64 + Sync) -> Result<Self> {
        let values: Vec<f64> = par::map_range(grid.nodes(), |idx| {
            let (i, j) = (idx / grid.l_phi, idx % grid.l_phi);
            let (st, ct) = grid.theta[i].sin_cos();
            let (sp, cp) = grid.phi(j).sin_cos();
            f(st * cp, st * sp, ct)
        });
        Self::from_values(grid, lmax, values)
    }

    /// Analyzes grid samples (row-major θ × φ).
    pub fn from_values(grid: Grid, lmax: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.nodes() {
            return arg(format!("expected {} grid values, got {}", grid.nodes(), values.len()));
        }
        if lmax + 1 > grid.l_theta || 2 * lmax + 1 > grid.l_phi {
            return arg(format!("lmax {lmax} exceeds grid resolution"));
        }
        let coeffs = analyze_values(&grid, lmax, &values);
        let mut f = Self { grid, lmax, coeffs, values, warnings: Vec::new() };
        let total: f64 = f.degree_energy().iter().sum();
        let top = f.degree_energy()[lmax];
        if total > 0.0 && top > 1e-6 * total {
            f.warnings.push(format!(
                "aliasing: degree {lmax} carries {:.3e} of the energy; field truncated",
                top / total
            ));
        }
        let synth = f.synthesize_values();
        f.values = synth;
        f.validate()?;
        Ok(f)
    }

    pub fn zero(grid: Grid, lmax: usize) -> Result<Self> {
        Self::from_coeffs(grid, lmax, Vec::new())
    }

    pub fn constant(grid: Grid, lmax: usize, c: f64) -> Result<Self> {
        Self::from_terms(grid, lmax, &[(0, 0, Complex64::new(c * (4.0 * PI).sqrt(), 0.0))])
    }

    /// Random field with coefficients up to degree `band`, rescaled so that
    /// max(|u|, |∇u|) over the grid equals `c1`.
    pub fn random(grid: Grid, lmax: usize, band: usize, c1: f64, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut terms = Vec::new();
        for l in 0..=band.min(lmax) {
            for m in 0..=l {
                let re = rng.gen_range(-1.0..1.0);
                let im = if m == 0 { 0.0 } else { rng.gen_range(-1.0..1.0) };
                terms.push((l, m as i64, Complex64::new(re, im)));
            }
        }
        // Pre-shrink so the intermediate field is a valid radial graph.
        let bound: f64 = terms.iter().map(|(l, _, c)| 2.0 * c.norm() * ((2 * l + 1) as f64 / (4.0 * PI)).sqrt()).sum();
        let terms: Vec<_> = terms.into_iter().map(|(l, m, c)| (l, m, c * (0.5 / bound))).collect();
        let f = Self::from_terms(grid, lmax, &terms)?;
        let norm = f.c1_norm();
        f.affine_coeffs(c1 / norm, 0.0)
    }

    fn validate(&self) -> Result<()> {
        if let Some(v) = self.values.iter().find(|v| !v.is_finite() || **v <= -1.0) {
            return Err(Error::Domain(format!("radial graph needs 1 + u > 0, found u = {v}")));
        }
        Ok(())
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn lmax(&self) -> usize {
        self.lmax
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn coeff(&self, l: usize, m: i64) -> Complex64 {
        if l > self.lmax || m.unsigned_abs() as usize > l {
            return Complex64::new(0.0, 0.0);
        }
        let c = self.coeffs[lm_index(l, m.unsigned_abs() as usize)];
        if m >= 0 {
            c
        } else if m % 2 == 0 {
            c.conj()
        } else {
            -c.conj()
        }
    }

    /// Coefficients for m >= 0, degree-major.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Σ_m |c_{l,m}|² over all orders −l..l, per degree.
    pub fn degree_energy(&self) -> Vec<f64> {
        (0..=self.lmax)
            .map(|l| {
                (0..=l)
                    .map(|m| {
                        let e = self.coeffs[lm_index(l, m)].norm_sqr();
                        if m == 0 {
                            e
                        } else {
                            2.0 * e
                        }
                    })
                    .sum()
            })
            .collect()
    }

    /// New field with coefficients `a·c + b·[constant 1]`, i.e. u ↦ a u + b.
    pub fn affine_coeffs(&self, a: f64, b: f64) -> Result<Self> {
        let mut coeffs: Vec<Complex64> = self.coeffs.iter().map(|c| c * a).collect();
        coeffs[0] += Complex64::new(b * (4.0 * PI).sqrt(), 0.0);
        Self::from_coeffs(self.grid.clone(), self.lmax, coeffs)
    }

    /// Keeps the degrees selected by `keep`.
    pub fn filter_degrees(&self, keep: impl Fn(usize) -> bool) -> Result<Self> {
        let mut coeffs = self.coeffs.clone();
        for l in 0..=self.lmax {
            if !keep(l) {
                for m in 0..=l {
                    coeffs[lm_index(l, m)] = Complex64::new(0.0, 0.0);
                }
            }
        }
        Self::from_coeffs(self.grid.clone(), self.lmax, coeffs)
    }

    /// Same coefficients on another grid.
    pub fn resampled(&self, grid: Grid) -> Result<Self> {
        Self::from_coeffs(grid, self.lmax, self.coeffs.clone())
    }

    fn row_fourier(&self, theta: f64) -> Vec<(Complex64, Complex64, Complex64)> {
        let p = legendre_jets(self.lmax, Jet2::var(theta));
        (0..=self.lmax)
            .map(|m| {
                let mut f = (Complex64::default(), Complex64::default(), Complex64::default());
                for l in m..=self.lmax {
                    let c = self.coeffs[lm_index(l, m)];
                    let pj = p[lm_index(l, m)];
                    f.0 += c * pj.v;
                    f.1 += c * pj.d1;
                    f.2 += c * pj.d2;
                }
                f
            })
            .collect()
    }

    fn partials_from_fourier(f: &[(Complex64, Complex64, Complex64)], phi_terms: impl Fn(usize) -> Complex64) -> Partials {
        let mut out = Partials::default();
        for (m, &(a, b, c)) in f.iter().enumerate() {
            let e = phi_terms(m);
            let w = if m == 0 { 1.0 } else { 2.0 };
            let mf = m as f64;
            let im = Complex64::new(0.0, mf);
            out.u += w * (a * e).re;
            out.t += w * (b * e).re;
            out.tt += w * (c * e).re;
            out.p += w * (im * a * e).re;
            out.pp += w * (-mf * mf * (a * e)).re;
            out.tp += w * (im * b * e).re;
        }
        out
    }

    /// Raw partial derivatives at an arbitrary point (θ, φ).
    pub fn partials_at(&self, theta: f64, phi: f64) -> Partials {
        let f = self.row_fourier(theta);
        Self::partials_from_fourier(&f, |m| Complex64::from_polar(1.0, m as f64 * phi))
    }

    pub fn value_at(&self, theta: f64, phi: f64) -> f64 {
        self.partials_at(theta, phi).u
    }

    /// Value at a unit vector (x, y, z).
    pub fn value_at_point(&self, x: f64, y: f64, z: f64) -> f64 {
        let theta = z.clamp(-1.0, 1.0).acos();
        let phi = y.atan2(x);
        self.value_at(theta, phi)
    }

    /// Partials at every grid node, row-major.
    pub fn grid_partials(&self) -> Vec<Partials> {
        let lp = self.grid.l_phi;
        let table: Vec<Complex64> = (0..lp).map(|j| Complex64::from_polar(1.0, self.grid.phi(j))).collect();
        let rows = par::map_range(self.grid.l_theta, |i| {
            let f = self.row_fourier(self.grid.theta[i]);
            (0..lp)
                .map(|j| Self::partials_from_fourier(&f, |m| table[(m * j) % lp]))
                .collect::<Vec<_>>()
        });
        rows.into_iter().flatten().collect()
    }

    /// Covariant jets at every grid node, row-major.
    pub fn grid_jets(&self) -> Vec<PointJet> {
        let lp = self.grid.l_phi;
        self.grid_partials()
            .into_iter()
            .enumerate()
            .map(|(idx, p)| p.to_jet(self.grid.theta[idx / lp]))
            .collect()
    }

    pub fn jet(&self, i: usize, j: usize) -> PointJet {
        self.partials_at(self.grid.theta[i], self.grid.phi(j)).to_jet(self.grid.theta[i])
    }

    fn synthesize_values(&self) -> Vec<f64> {
        let lp = self.grid.l_phi;
        let table: Vec<Complex64> = (0..lp).map(|j| Complex64::from_polar(1.0, self.grid.phi(j))).collect();
        let rows = par::map_range(self.grid.l_theta, |i| {
            let p = legendre_jets(self.lmax, Jet2::constant(self.grid.theta[i]));
            let fm: Vec<Complex64> = (0..=self.lmax)
                .map(|m| (m..=self.lmax).map(|l| self.coeffs[lm_index(l, m)] * p[lm_index(l, m)].v).sum())
                .collect();
            (0..lp)
                .map(|j| {
                    fm.iter()
                        .enumerate()
                        .map(|(m, c)| {
                            let w = if m == 0 { 1.0 } else { 2.0 };
                            w * (c * table[(m * j) % lp]).re
                        })
                        .sum::<f64>()
                })
                .collect::<Vec<_>>()
        });
        rows.into_iter().flatten().collect()
    }

    /// max over grid of max(|u|, |∇u|).
    pub fn c1_norm(&self) -> f64 {
        self.grid_jets()
            .iter()
            .map(|j| j.u.abs().max(j.grad_norm()))
            .fold(0.0, f64::max)
    }

    /// ∫ u² dA by grid quadrature.
    pub fn l2_squared(&self) -> f64 {
        let lp = self.grid.l_phi;
        self.values
            .iter()
            .enumerate()
            .map(|(idx, v)| self.grid.area_weight(idx / lp) * v * v)
            .sum()
    }
}

fn analyze_values(grid: &Grid, lmax: usize, values: &[f64]) -> Vec<Complex64> {
    let lp = grid.l_phi;
    let table: Vec<Complex64> = (0..lp).map(|j| Complex64::from_polar(1.0, -grid.phi(j))).collect();
    let rows = par::map_range(grid.l_theta, |i| {
        let p = legendre_jets(lmax, Jet2::constant(grid.theta[i]));
        let row = &values[i * lp..(i + 1) * lp];
        let wi = grid.area_weight(i);
        let mut out = vec![Complex64::default(); lm_index(lmax, lmax) + 1];
        for m in 0..=lmax {
            let g: Complex64 = row.iter().enumerate().map(|(j, v)| table[(m * j) % lp] * *v).sum::<Complex64>() * wi;
            for l in m..=lmax {
                out[lm_index(l, m)] = g * p[lm_index(l, m)].v;
            }
        }
        out
    });
    let mut coeffs = vec![Complex64::default(); lm_index(lmax, lmax) + 1];
    for row in rows {
        for (c, r) in coeffs.iter_mut().zip(row) {
            *c += r;
        }
    }
    coeffs
}
