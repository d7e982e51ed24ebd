//! Axially symmetric radial graphs on Sⁿ reduced to one variable θ, the
//! angle from the symmetry axis.

mod expr;

use std::f64::consts::PI;
use std::fmt::Debug;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

pub use expr::{Expr, Func};

use crate::error::{arg, Error, Result};
use crate::exactcomb::binom_f64;
use crate::harmonics::{analyze_profile, zonal_basis_jets, HarmonicSpectrum};
use crate::jet::Jet2;
use crate::quad::{adaptive, composite_nodes, Rule};
use crate::spheregeom::{sigma_all_h, sphere_area, NodeSample, PointJet};
use crate::symfun::SymMatrix;

/// A profile V(θ) with its first two derivatives.
pub trait ProfileFn: Send + Sync + Debug {
    fn jet(&self, theta: f64) -> Jet2;

    /// Points in (0, π) where V is only piecewise smooth.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

#[derive(Debug, Clone)]
pub struct Constant(pub f64);

impl ProfileFn for Constant {
    fn jet(&self, _: f64) -> Jet2 {
        Jet2::constant(self.0)
    }
}

/// V = Σ_j a_j cos(jθ).
#[derive(Debug, Clone)]
pub struct CosineSeries(pub Vec<f64>);

impl ProfileFn for CosineSeries {
    fn jet(&self, theta: f64) -> Jet2 {
        let mut out = Jet2::constant(0.0);
        for (j, a) in self.0.iter().enumerate() {
            let jf = j as f64;
            let (s, c) = (jf * theta).sin_cos();
            out = out + Jet2::new(a * c, -a * jf * s, -a * jf * jf * c);
        }
        out
    }
}

/// V = Σ_ℓ c_ℓ Ĉ_ℓ(cos θ) in the orthonormal zonal basis of Sⁿ.
#[derive(Debug, Clone)]
pub struct ZonalSeries {
    pub n: usize,
    pub coeffs: Vec<f64>,
}

impl ProfileFn for ZonalSeries {
    fn jet(&self, theta: f64) -> Jet2 {
        let lmax = self.coeffs.len().saturating_sub(1);
        zonal_basis_jets(lmax, self.n, Jet2::var(theta))
            .into_iter()
            .zip(&self.coeffs)
            .fold(Jet2::constant(0.0), |acc, (b, c)| acc + b.scale(*c))
    }
}

#[derive(Debug, Clone)]
pub struct ExprProfile {
    pub source: String,
    pub expr: Expr,
}

impl ProfileFn for ExprProfile {
    fn jet(&self, theta: f64) -> Jet2 {
        self.expr.eval(Jet2::var(theta))
    }
}

/// Even cosine series fitted by least squares to sampled (θ, V) pairs.
pub fn fit_cosine_series(samples: &[(f64, f64)], degree: usize) -> Result<CosineSeries> {
    if samples.len() < degree + 1 {
        return arg(format!("{} samples cannot determine a degree-{degree} cosine fit", samples.len()));
    }
    let a = DMatrix::from_fn(samples.len(), degree + 1, |i, j| (j as f64 * samples[i].0).cos());
    let b = DVector::from_iterator(samples.len(), samples.iter().map(|s| s.1));
    let svd = a.svd(true, true);
    let x = svd.solve(&b, 1e-12).map_err(|e| Error::Argument(e.to_string()))?;
    Ok(CosineSeries(x.iter().copied().collect()))
}

/// Which matrix σ_k(D²u) is taken of.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// The formula as printed, middle term C_{n−1}^{k−2} cot^{k−2}θ u_θ^k with a plus sign.
    PlusMiddle,
    /// σ_k of the intrinsic covariant Hessian diag(u_θθ, cot θ u_θ, …).
    Intrinsic,
}

/// Quadrature layout for axial integrals.
pub const PANEL_NODES: usize = 16;
pub const BASE_PANELS: usize = 32;

#[derive(Debug, Clone)]
pub struct AxisProfile {
    f: Arc<dyn ProfileFn>,
    n: usize,
    /// The stored profile is s(1 + V) − 1.
    scale: f64,
}

impl AxisProfile {
    /// Validates V′(0) = V′(π) = 0 and 1 + V > 0.
    pub fn new(f: Arc<dyn ProfileFn>, n: usize) -> Result<Self> {
        if n < 2 {
            return arg(format!("axisymmetric profiles need n >= 2, got {n}"));
        }
        let p = Self { f, n, scale: 1.0 };
        for end in [0.0, PI] {
            let j = p.jet(end);
            if j.d1.abs() > 1e-8 * (1.0 + j.d2.abs()) {
                return Err(Error::Domain(format!("profile is not smooth at the pole θ = {end}: V' = {}", j.d1)));
            }
        }
        for i in 0..=2000 {
            let t = PI * i as f64 / 2000.0;
            let v = p.value(t);
            if !v.is_finite() || v <= -1.0 {
                return Err(Error::Domain(format!("radial graph needs 1 + V > 0, V({t}) = {v}")));
            }
        }
        Ok(p)
    }

    pub fn ball(n: usize, c: f64) -> Result<Self> {
        Self::new(Arc::new(Constant(c)), n)
    }

    pub fn cosine(n: usize, coeffs: Vec<f64>) -> Result<Self> {
        Self::new(Arc::new(CosineSeries(coeffs)), n)
    }

    pub fn zonal_series(n: usize, coeffs: Vec<f64>) -> Result<Self> {
        Self::new(Arc::new(ZonalSeries { n, coeffs }), n)
    }

    /// amp · C_ℓ^{(n−1)/2}(cos θ), the unnormalized Gegenbauer polynomial.
    pub fn zonal(n: usize, l: usize, amp: f64) -> Result<Self> {
        let mut coeffs = vec![0.0; l + 1];
        coeffs[l] = amp * crate::harmonics::zonal_norm_sq(l, n).sqrt();
        Self::zonal_series(n, coeffs)
    }

    pub fn expr(n: usize, src: &str) -> Result<Self> {
        let expr = Expr::parse(src)?;
        Self::new(Arc::new(ExprProfile { source: src.to_string(), expr }), n)
    }

    /// From sampled (θ, V) pairs via a least-squares even cosine fit.
    pub fn from_samples(n: usize, samples: &[(f64, f64)]) -> Result<Self> {
        let degree = (samples.len() / 2).clamp(1, 24);
        Self::new(Arc::new(fit_cosine_series(samples, degree)?), n)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn profile(&self) -> &Arc<dyn ProfileFn> {
        &self.f
    }

    pub fn jet(&self, theta: f64) -> Jet2 {
        let j = self.f.jet(theta);
        let s = self.scale;
        Jet2::new(s * (1.0 + j.v) - 1.0, s * j.d1, s * j.d2)
    }

    pub fn value(&self, theta: f64) -> f64 {
        self.jet(theta).v
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        self.f.breakpoints()
    }

    /// cot θ · V′(θ), continued by V″ at the poles.
    pub fn cot_dv(&self, theta: f64) -> f64 {
        let j = self.jet(theta);
        let s = theta.sin();
        if s < 1e-7 {
            j.d2
        } else {
            theta.cos() / s * j.d1
        }
    }

    /// u, ∇u = V′e_θ and D²u = diag(V″, cot θ V′, …) in an orthonormal frame.
    pub fn point_jet(&self, theta: f64) -> PointJet {
        let j = self.jet(theta);
        let c = self.cot_dv(theta);
        let mut d = vec![c; self.n];
        d[0] = j.d2;
        let mut grad = vec![0.0; self.n];
        grad[0] = j.d1;
        PointJet { u: j.v, grad, hess: SymMatrix::diag(&d) }
    }

    pub fn sigma_k_d2u(&self, theta: f64, k: usize, conv: Convention) -> Result<f64> {
        sigma_k_d2u_axisym(self, theta, k, conv)
    }

    pub fn sigma_k_h(&self, theta: f64, k: usize) -> Result<f64> {
        sigma_k_h_axisym(self, theta, k)
    }

    pub fn scaled(&self, s: f64) -> Result<Self> {
        Ok(Self { f: self.f.clone(), n: self.n, scale: self.scale * s })
    }

    /// Quadrature nodes on [a, b] ⊂ [0, π] with the coarea weight
    /// |S^{n−1}| sin^{n−1}θ; x records the axial coordinate cos θ (the
    /// transverse components of the barycenter vanish by symmetry).
    pub fn samples_on(&self, a: f64, b: f64, level: u32) -> Vec<NodeSample> {
        let rule = Rule::new(PANEL_NODES);
        let max_panel = PI / BASE_PANELS as f64 / (1u64 << level) as f64;
        let area = sphere_area(self.n - 1);
        let mut breaks = self.breakpoints();
        breaks.extend(self.curvature_sign_changes(a, b));
        composite_nodes(a, b, &breaks, max_panel, &rule)
            .into_iter()
            .map(|(t, w)| {
                let mut x = vec![0.0; self.n + 1];
                x[0] = t.cos();
                NodeSample { weight: area * w * t.sin().powi(self.n as i32 - 1), jet: self.point_jet(t), x }
            })
            .collect()
    }

    /// Interior zeros of σ_j(h), 1 ≤ j ≤ n, on [a, b]: the kinks of the
    /// positive and negative parts, used as quadrature breakpoints.
    pub fn curvature_sign_changes(&self, a: f64, b: f64) -> Vec<f64> {
        const SCAN: usize = 1024;
        let n = self.n;
        let eval = |t: f64| sigma_all_h(&self.point_jet(t), n).ok();
        let ts: Vec<f64> = (0..=SCAN).map(|i| a + (b - a) * i as f64 / SCAN as f64).collect();
        let vals: Vec<Option<Vec<f64>>> = ts.iter().map(|&t| eval(t)).collect();
        let mut out = Vec::new();
        for i in 0..SCAN {
            let (Some(va), Some(vb)) = (&vals[i], &vals[i + 1]) else { continue };
            for j in 1..=n {
                if va[j] == 0.0 || va[j].signum() == vb[j].signum() {
                    continue;
                }
                let (mut lo, mut hi) = (ts[i], ts[i + 1]);
                let s_lo = va[j].signum();
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    match eval(mid) {
                        Some(v) if v[j].signum() == s_lo => lo = mid,
                        Some(_) => hi = mid,
                        None => break,
                    }
                }
                out.push(0.5 * (lo + hi));
            }
        }
        out
    }

    pub fn samples(&self, level: u32) -> Result<Vec<NodeSample>> {
        Ok(self.samples_on(0.0, PI, level))
    }

    /// Re-graphs the domain shifted by −b along the axis and refits it as a
    /// zonal series.
    pub fn translated(&self, b: f64) -> Result<Self> {
        let lmax = 48;
        let n = self.n;
        let shifted = Shifted { base: self.clone(), b };
        // Validate the node solves before fitting.
        let rule = Rule::new(2 * lmax + 64);
        for (t, _) in rule.on(0.0, PI) {
            shifted.solve(t)?;
        }
        let tmp = AxisProfile { f: Arc::new(shifted), n, scale: 1.0 };
        match analyze_profile(&tmp, lmax) {
            HarmonicSpectrum::Zonal { coeffs, .. } => Self::zonal_series(n, coeffs),
            HarmonicSpectrum::Sphere { .. } => unreachable!("axial analysis is zonal"),
        }
    }

    /// max over a fine grid of max(|V|, |V′|).
    pub fn c1_norm(&self) -> f64 {
        (0..=4000)
            .map(|i| {
                let j = self.jet(PI * i as f64 / 4000.0);
                j.v.abs().max(j.d1.abs())
            })
            .fold(0.0, f64::max)
    }
}

/// Radial function of the profile's domain after shifting by −b e₁.
#[derive(Debug)]
struct Shifted {
    base: AxisProfile,
    b: f64,
}

impl Shifted {
    fn solve(&self, theta: f64) -> Result<f64> {
        let (s, c) = theta.sin_cos();
        let g = |rho: f64| {
            let (px, py) = (rho * c + self.b, rho * s);
            (px * px + py * py).sqrt() - 1.0 - self.base.value(py.atan2(px))
        };
        let mut r0 = 1.0 + self.base.value(theta) - c * self.b;
        let mut r1 = r0 + 1e-4;
        let mut f0 = g(r0);
        for _ in 0..60 {
            let f1 = g(r1);
            if f1 == 0.0 || f1 == f0 || (r1 - r0).abs() < 1e-15 {
                return Ok(r1 - 1.0);
            }
            let r2 = r1 - f1 * (r1 - r0) / (f1 - f0);
            r0 = r1;
            f0 = f1;
            r1 = r2;
        }
        Err(Error::Normalization(format!("axial re-graph failed at θ = {theta}")))
    }
}

impl ProfileFn for Shifted {
    fn jet(&self, theta: f64) -> Jet2 {
        Jet2::constant(self.solve(theta).unwrap_or(f64::NAN))
    }
}

/// |S^{n−1}| ∫_0^π f(θ) sin^{n−1}θ dθ by adaptive Gauss–Legendre.
pub fn coarea_integral(f: &dyn Fn(f64) -> f64, n: usize, breaks: &[f64]) -> Result<f64> {
    if n < 1 {
        return arg("coarea integral needs n >= 1");
    }
    let g = |t: f64| f(t) * t.sin().powi(n as i32 - 1);
    let rough = Rule::new(32).integrate(0.0, PI, |t| g(t).abs());
    let v = adaptive(&g, 0.0, PI, breaks, 1e-12 * rough.max(1e-300))?;
    Ok(sphere_area(n - 1) * v)
}

pub fn sigma_k_d2u_axisym(p: &AxisProfile, theta: f64, k: usize, conv: Convention) -> Result<f64> {
    let n = p.n() as i64;
    if k == 0 {
        return Ok(1.0);
    }
    if k > p.n() {
        return arg(format!("sigma_k needs k <= n, got k={k}"));
    }
    let ki = k as i64;
    let j = p.jet(theta);
    match conv {
        Convention::Intrinsic => {
            let c = p.cot_dv(theta);
            Ok(binom_f64(n - 1, ki - 1) * j.d2 * c.powi(ki as i32 - 1) + binom_f64(n - 1, ki) * c.powi(ki as i32))
        }
        Convention::PlusMiddle => {
            if !(theta > 0.0 && theta < PI) || theta.sin() == 0.0 {
                return Err(Error::Pole(format!("printed formula evaluated at θ = {theta}")));
            }
            let cot = theta.cos() / theta.sin();
            let (ut, utt) = (j.d1, j.d2);
            let ki32 = ki as i32;
            let middle = if k >= 2 { binom_f64(n - 1, ki - 2) * cot.powi(ki32 - 2) * ut.powi(ki32) } else { 0.0 };
            Ok(binom_f64(n - 1, ki - 1) * cot.powi(ki32 - 1) * utt * ut.powi(ki32 - 1)
                + middle
                + binom_f64(n - 1, ki) * cot.powi(ki32) * ut.powi(ki32))
        }
    }
}

pub fn sigma_k_h_axisym(p: &AxisProfile, theta: f64, k: usize) -> Result<f64> {
    Ok(sigma_all_h(&p.point_jet(theta), k)?[k])
}

/// Largest |plus-middle − intrinsic| over a θ grid avoiding the poles.
#[derive(Debug, Clone, Serialize)]
pub struct ConventionComparison {
    pub k: usize,
    pub max_abs_difference: f64,
    pub at_theta: f64,
}

pub fn compare_conventions(p: &AxisProfile, k: usize) -> Result<ConventionComparison> {
    let mut best = ConventionComparison { k, max_abs_difference: 0.0, at_theta: 0.0 };
    for i in 1..400 {
        let t = PI * i as f64 / 400.0;
        let d = (sigma_k_d2u_axisym(p, t, k, Convention::PlusMiddle)? - sigma_k_d2u_axisym(p, t, k, Convention::Intrinsic)?).abs();
        if d > best.max_abs_difference {
            best.max_abs_difference = d;
            best.at_theta = t;
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct HighestTerm {
    pub direct: f64,
    pub by_parts: f64,
}

/// The u_θ^{k+1}u_θθ term of ∫σ_k(h)dμ, directly and after integrating by
/// parts against w(θ) = cos^{k−1}θ sin^{n−k}θ.
pub fn highest_term_integral(p: &AxisProfile, k: usize) -> Result<HighestTerm> {
    let n = p.n();
    if k == 0 || k >= n {
        return arg(format!("highest_term_integral needs 1 <= k < n, got k={k}, n={n}"));
    }
    let (ki, ni) = (k as i32, n as i32);
    let c = binom_f64(n as i64 - 1, k as i64 - 1);
    let sgn = if k % 2 == 0 { 1.0 } else { -1.0 };
    let direct_f = |t: f64| {
        let j = p.jet(t);
        j.d1.powi(ki + 1) * j.d2 * t.cos().powi(ki - 1) * t.sin().powi(ni - ki)
    };
    let parts_f = |t: f64| {
        let j = p.jet(t);
        let (s, co) = t.sin_cos();
        let mut wt = (n - k) as f64 * co.powi(ki) * s.powi(ni - ki - 1);
        if k >= 2 {
            wt -= (k - 1) as f64 * co.powi(ki - 2) * s.powi(ni - ki + 1);
        }
        j.d1.powi(ki + 2) * wt
    };
    let breaks = p.breakpoints();
    let scale = Rule::new(64).integrate(0.0, PI, |t| direct_f(t).abs() + parts_f(t).abs()).max(1e-300);
    let direct = -sgn / k as f64 * c * adaptive(&direct_f, 0.0, PI, &breaks, 1e-14 * scale)?;
    let by_parts = sgn / (k * (k + 2)) as f64 * c * adaptive(&parts_f, 0.0, PI, &breaks, 1e-14 * scale)?;
    Ok(HighestTerm { direct, by_parts })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Theta0 {
    pub theta0: f64,
    /// k = 1: the cutoff covers the whole interval.
    pub degenerate: bool,
}

/// θ₀(ε) = ε^{1−1/k}.
pub fn frequency_cutoff_theta0(epsilon: f64, k: usize) -> Result<Theta0> {
    if !(epsilon > 0.0 && epsilon < 1.0) || k == 0 {
        return arg(format!("theta0 needs 0 < ε < 1 and k >= 1, got ε={epsilon}, k={k}"));
    }
    Ok(Theta0 { theta0: epsilon.powf(1.0 - 1.0 / k as f64), degenerate: k == 1 })
}

/// max over `thetas` of |F′(θ) − expanded form| where
/// F = Σ_{j=1}^m (−1)^{m−j}(C_{n−1}^{m−1}/m)C_m^{m−j} u_θ^j sin^{n−j}θ cos^{j−1}θ;
/// F′ comes from forward-mode differentiation, the expanded form from the
/// product rule written out term by term. Nodes within 1e−6 of a pole are skipped.
pub fn derivative_identity_residual(p: &AxisProfile, m: usize, thetas: &[f64]) -> Result<f64> {
    let n = p.n();
    if m == 0 || m > n - 1 {
        return arg(format!("derivative identity needs 1 <= m <= n-1, got m={m}, n={n}"));
    }
    let (ni, mi) = (n as i64, m as i64);
    let coef = |j: i64| {
        let sgn = if (mi - j) % 2 == 0 { 1.0 } else { -1.0 };
        sgn * binom_f64(ni - 1, mi - 1) / m as f64 * binom_f64(mi, mi - j)
    };
    let mut worst: f64 = 0.0;
    for &t in thetas {
        if t < 1e-6 || t > PI - 1e-6 {
            continue;
        }
        let j = p.jet(t);
        let ut = Jet2::new(j.d1, j.d2, 0.0);
        let tv = Jet2::var(t);
        let (s, c) = (tv.sin(), tv.cos());
        let mut f = Jet2::constant(0.0);
        let mut expanded = 0.0;
        let (sv, cv) = t.sin_cos();
        for jj in 1..=mi {
            let ji = jj as i32;
            f = f + (ut.powi(ji) * s.powi(ni as i32 - ji) * c.powi(ji - 1)).scale(coef(jj));
            let mut e = jj as f64 * j.d1.powi(ji - 1) * j.d2 * sv.powi(ni as i32 - ji) * cv.powi(ji - 1)
                + (ni - jj) as f64 * j.d1.powi(ji) * sv.powi(ni as i32 - ji - 1) * cv.powi(ji);
            if jj >= 2 {
                e -= (jj - 1) as f64 * j.d1.powi(ji) * sv.powi(ni as i32 - ji + 1) * cv.powi(ji - 2);
            }
            expanded += coef(jj) * e;
        }
        worst = worst.max((f.d1 - expanded).abs());
    }
    Ok(worst)
}

/// Both sides of the near-pole estimate with the ω(ε) factors set to zero
/// and the min taken at its integral argument:
/// lhs = Σ_{j=1}^m (−1)^j u_θ^j C_m^{m−j} sin^{m−j}θ,
/// rhs = −(∫_0^θ (m/C_{n−1}^{m−1}) σ_m(h)⁻ sin^{n−1}τ dτ)/θ^{n−m} − θ^m.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PoleProbe {
    pub theta: f64,
    pub lhs: f64,
    pub rhs: f64,
}

pub fn pole_inequality_probe(p: &AxisProfile, m: usize, theta: f64) -> Result<PoleProbe> {
    let n = p.n();
    if m == 0 || m >= n || !(theta > 0.0 && theta <= PI / 2.0) {
        return arg(format!("probe needs 1 <= m < n and 0 < θ <= π/2, got m={m}, θ={theta}"));
    }
    let j = p.jet(theta);
    let s = theta.sin();
    let lhs: f64 = (1..=m)
        .map(|jj| {
            let sgn = if jj % 2 == 0 { 1.0 } else { -1.0 };
            sgn * j.d1.powi(jj as i32) * binom_f64(m as i64, (m - jj) as i64) * s.powi((m - jj) as i32)
        })
        .sum();
    let weight = m as f64 / binom_f64(n as i64 - 1, m as i64 - 1);
    let neg = |t: f64| {
        let v = p.sigma_k_h(t, m).unwrap_or(0.0);
        weight * (-v).max(0.0) * t.sin().powi(n as i32 - 1)
    };
    let integral = Rule::new(64).integrate(0.0, theta, neg);
    let rhs = -integral / theta.powi((n - m) as i32) - theta.powi(m as i32);
    Ok(PoleProbe { theta, lhs, rhs })
}

#[cfg(test)]
mod tests;
