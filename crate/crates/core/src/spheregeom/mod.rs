//! Radial graphs Ω = {(1+u(x))x} over the unit sphere: pointwise k-th mean
//! curvatures, curvature integrals, volume, barycenter and normalization.

mod domain;
mod fd;
mod field;
pub mod ibp;

use std::f64::consts::PI;

use serde::Serialize;

pub use domain::{Domain, NodeSample};
pub use fd::{principal_curvatures_fd, shape_operator_fd};
pub use field::{legendre_jets, Grid, Partials, SphereField, DEFAULT_LMAX};

use crate::error::{arg, Error, Result};
use crate::exactcomb::binom_f64;
use crate::par;
use crate::symfun::{newton_series, SymMatrix};

/// u, covariant gradient and covariant Hessian at one point of Sⁿ, in an
/// orthonormal frame.
#[derive(Debug, Clone, PartialEq)]
pub struct PointJet {
    pub u: f64,
    pub grad: Vec<f64>,
    pub hess: SymMatrix,
}

impl PointJet {
    pub fn zero(n: usize) -> Self {
        Self { u: 0.0, grad: vec![0.0; n], hess: SymMatrix::zeros(n) }
    }

    pub fn n(&self) -> usize {
        self.grad.len()
    }

    pub fn grad_norm_sq(&self) -> f64 {
        self.grad.iter().map(|g| g * g).sum()
    }

    pub fn grad_norm(&self) -> f64 {
        self.grad_norm_sq().sqrt()
    }

    pub fn laplacian(&self) -> f64 {
        self.hess.trace()
    }

    /// Jet of s(1+u) − 1.
    pub fn rescaled(&self, s: f64) -> Self {
        Self {
            u: s * (1.0 + self.u) - 1.0,
            grad: self.grad.iter().map(|g| s * g).collect(),
            hess: self.hess.scaled(s),
        }
    }
}

/// |Sⁿ|, by the recurrence |Sⁿ| = 2π/(n−1)·|S^{n−2}|.
pub fn sphere_area(n: usize) -> f64 {
    match n {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (n as f64 - 1.0) * sphere_area(n - 2),
    }
}

/// ω_m, the volume of the unit ball in ℝ^m.
pub fn ball_volume(m: usize) -> f64 {
    if m == 0 {
        1.0
    } else {
        sphere_area(m - 1) / m as f64
    }
}

/// σ_0(h)..σ_kmax(h) of the radial graph at one point:
/// σ_k(h) = W^{−(k+2)/2} Σ_{m≤k} (−1)^m C_{n−m}^{k−m}
///   [(1+u)² σ_m(D²u) + ((n+k−2m)/(n−m)) uⁱu_j [T_m]ᵢʲ(D²u)] / (1+u)^m,
/// with W = (1+u)² + |∇u|². The m = n term has no gradient part since
/// [T_n] vanishes.
pub fn sigma_all_h(jet: &PointJet, kmax: usize) -> Result<Vec<f64>> {
    let n = jet.n();
    if kmax > n {
        return arg(format!("sigma_k(h) needs k <= n, got k={kmax}, n={n}"));
    }
    let one = 1.0 + jet.u;
    if one <= 0.0 || !one.is_finite() {
        return Err(Error::Domain(format!("radial graph needs 1 + u > 0, got u = {}", jet.u)));
    }
    let w = one * one + jet.grad_norm_sq();
    let series = newton_series(&jet.hess, kmax);
    let q: Vec<f64> = series.tensors.iter().map(|t| t.quad_form(&jet.grad)).collect();
    let ni = n as i64;
    let out = (0..=kmax)
        .map(|k| {
            let ki = k as i64;
            let mut acc = 0.0;
            let mut one_pow = 1.0;
            for m in 0..=k {
                let mi = m as i64;
                let sgn = if m % 2 == 0 { 1.0 } else { -1.0 };
                let grad_term = if m < n { (ni + ki - 2 * mi) as f64 / (ni - mi) as f64 * q[m] } else { 0.0 };
                acc += sgn * binom_f64(ni - mi, ki - mi) * (one * one * series.sigma[m] + grad_term) / one_pow;
                one_pow *= one;
            }
            acc * w.powf(-(k as f64 + 2.0) / 2.0)
        })
        .collect();
    Ok(out)
}

pub fn sigma_k_h(jet: &PointJet, k: usize) -> Result<f64> {
    Ok(sigma_all_h(jet, k)?[k])
}

/// dμ/dA = (1+u)^{n−1} ((1+u)² + |∇u|²)^{1/2}.
pub fn area_element(jet: &PointJet) -> Result<f64> {
    let one = 1.0 + jet.u;
    if one <= 0.0 {
        return Err(Error::Domain(format!("radial graph needs 1 + u > 0, got u = {}", jet.u)));
    }
    Ok(one.powi(jet.n() as i32 - 1) * (one * one + jet.grad_norm_sq()).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    Signed,
    Positive,
    Negative,
}

/// All curvature integrals up to order kmax plus the scalar functionals
/// the deficit reports need, from one pass over the quadrature nodes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureTable {
    pub n: usize,
    pub kmax: usize,
    pub signed: Vec<f64>,
    pub positive: Vec<f64>,
    pub negative: Vec<f64>,
    pub volume: f64,
    pub barycenter: Option<Vec<f64>>,
    /// ∫|∇u|² dA.
    pub dirichlet: f64,
    /// ∫u² dA.
    pub l2: f64,
    /// ∫u dA.
    pub mean: f64,
    pub level: u32,
}

impl CurvatureTable {
    pub fn get(&self, k: usize, part: Part) -> f64 {
        match part {
            Part::Signed => self.signed[k],
            Part::Positive => self.positive[k],
            Part::Negative => self.negative[k],
        }
    }
}

pub fn table_from_samples(n: usize, kmax: usize, samples: &[NodeSample], level: u32) -> Result<CurvatureTable> {
    let rows: Vec<Result<Vec<f64>>> = par::map(samples, |s| {
        let sig = sigma_all_h(&s.jet, kmax)?;
        let dmu = area_element(&s.jet)?;
        let one = 1.0 + s.jet.u;
        let mut row = Vec::with_capacity(3 * (kmax + 1) + 5 + s.x.len());
        for v in &sig {
            row.push(s.weight * dmu * v);
        }
        for v in &sig {
            row.push(s.weight * dmu * v.max(0.0));
        }
        for v in &sig {
            row.push(s.weight * dmu * (-v).max(0.0));
        }
        row.push(s.weight * one.powi(n as i32 + 1) / (n as f64 + 1.0));
        row.push(s.weight * s.jet.grad_norm_sq());
        row.push(s.weight * s.jet.u * s.jet.u);
        row.push(s.weight * s.jet.u);
        let b = s.weight * one.powi(n as i32 + 2) / (n as f64 + 2.0);
        row.extend(s.x.iter().map(|x| b * x));
        Ok(row)
    });
    let has_x = samples.iter().all(|s| s.x.len() == n + 1);
    let width = 3 * (kmax + 1) + 4 + if has_x { n + 1 } else { 0 };
    let mut acc = vec![0.0; width];
    for row in rows {
        let row = row?;
        for (a, r) in acc.iter_mut().zip(row) {
            *a += r;
        }
    }
    let d = kmax + 1;
    let volume = acc[3 * d];
    Ok(CurvatureTable {
        n,
        kmax,
        signed: acc[..d].to_vec(),
        positive: acc[d..2 * d].to_vec(),
        negative: acc[2 * d..3 * d].to_vec(),
        volume,
        barycenter: has_x.then(|| acc[3 * d + 4..].iter().map(|b| b / volume).collect()),
        dirichlet: acc[3 * d + 1],
        l2: acc[3 * d + 2],
        mean: acc[3 * d + 3],
        level,
    })
}

/// Table at a fixed refinement level.
pub fn curvature_table_at(domain: &Domain, kmax: usize, level: u32) -> Result<CurvatureTable> {
    if kmax > domain.n() {
        return arg(format!("curvature integrals need k <= n, got k={kmax}, n={}", domain.n()));
    }
    table_from_samples(domain.n(), kmax, &domain.samples(level)?, level)
}

/// Relative agreement required between successive refinements.
pub const REFINEMENT_TOL: f64 = 1e-8;

/// Table with refinement-based error control: the resolution is doubled
/// until two successive levels agree to `REFINEMENT_TOL`.
pub fn curvature_table(domain: &Domain, kmax: usize) -> Result<CurvatureTable> {
    let mut prev = curvature_table_at(domain, kmax, 0)?;
    for level in 1..=3 {
        let next = curvature_table_at(domain, kmax, level)?;
        let worst = table_gap(&prev, &next);
        if worst <= REFINEMENT_TOL {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Resolution(format!(
        "curvature integrals still moving after 3 refinements (k <= {kmax})"
    )))
}

/// Agreement required of the positive and negative parts, whose
/// integrands have kinks along the zero set of σ_k(h); on S² grids those
/// kinks are not aligned with the nodes and converge only algebraically.
pub const PART_REFINEMENT_TOL: f64 = 1e-6;

fn table_gap(a: &CurvatureTable, b: &CurvatureTable) -> f64 {
    let mut worst: f64 = 0.0;
    for k in 0..=a.kmax {
        let scale = 1f64.max(b.signed[k].abs()).max(b.positive[k] + b.negative[k]);
        let parts = (a.positive[k] - b.positive[k]).abs().max((a.negative[k] - b.negative[k]).abs()) / scale;
        worst = worst
            .max((a.signed[k] - b.signed[k]).abs() / scale)
            .max(parts * REFINEMENT_TOL / PART_REFINEMENT_TOL);
    }
    worst.max((a.volume - b.volume).abs() / b.volume.abs().max(1.0))
}

/// ∫_{∂Ω} σ_k(h) dμ, or its positive/negative part.
pub fn curvature_integral(domain: &Domain, k: usize, part: Part) -> Result<f64> {
    Ok(curvature_table(domain, k)?.get(k, part))
}

/// Volume and barycenter (None when the domain does not track positions).
pub fn volume_and_barycenter(domain: &Domain) -> Result<(f64, Option<Vec<f64>>)> {
    let t = curvature_table(domain, 0)?;
    Ok((t.volume, t.barycenter))
}

/// What the rescaling step matches to the unit ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    Volume,
    /// I_j(Ω) = I_j(B); j = 0 is the area.
    Curvature(usize),
}

#[derive(Debug, Clone, Serialize)]
pub struct NormalizationResiduals {
    pub target: Normalization,
    /// Relative mismatch of the matched quantity.
    pub scale_residual: f64,
    pub volume_residual: f64,
    pub barycenter_residual: Option<f64>,
    pub rounds: usize,
}

/// Rescale for the target quantity, translate the barycenter to the origin
/// and re-graph; repeated until both residuals settle.
pub fn normalize_to(domain: &Domain, target: Normalization) -> Result<(Domain, NormalizationResiduals)> {
    let n = domain.n();
    let (j, goal) = match target {
        Normalization::Volume => (0, ball_volume(n + 1)),
        Normalization::Curvature(j) if j < n => (j, binom_f64(n as i64, j as i64) * sphere_area(n)),
        Normalization::Curvature(j) => {
            return arg(format!("I_{j} is scale invariant for n = {n}; it cannot be normalized by rescaling"))
        }
    };
    let measure = |t: &CurvatureTable| match target {
        Normalization::Volume => t.volume,
        Normalization::Curvature(_) => t.signed[j],
    };
    let power = match target {
        Normalization::Volume => (n + 1) as f64,
        Normalization::Curvature(j) => (n - j) as f64,
    };
    let mut dom = domain.clone();
    for round in 0..50 {
        let t = curvature_table_at(&dom, j, 0)?;
        let scale_res = (measure(&t) / goal - 1.0).abs();
        let bary = t.barycenter.as_ref().map(|b| b.iter().map(|x| x * x).sum::<f64>().sqrt());
        let bary_ok = bary.is_none_or(|b| b <= 1e-12);
        if scale_res <= 1e-13 && bary_ok {
            return Ok((
                dom,
                NormalizationResiduals {
                    target,
                    scale_residual: scale_res,
                    volume_residual: (t.volume / ball_volume(n + 1) - 1.0).abs(),
                    barycenter_residual: bary,
                    rounds: round,
                },
            ));
        }
        if scale_res > 1e-13 {
            dom = dom.scaled((goal / measure(&t)).powf(1.0 / power))?;
        }
        if !bary_ok {
            let t2 = curvature_table_at(&dom, 0, 0)?;
            if let Some(b) = t2.barycenter {
                dom = dom.translated(&b)?;
            }
        }
    }
    let t = curvature_table_at(&dom, j, 0)?;
    let scale_res = (measure(&t) / goal - 1.0).abs();
    let bary = t.barycenter.as_ref().map(|b| b.iter().map(|x| x * x).sum::<f64>().sqrt());
    if scale_res <= 1e-10 && bary.is_none_or(|b| b <= 1e-8) {
        return Ok((
            dom,
            NormalizationResiduals {
                target,
                scale_residual: scale_res,
                volume_residual: (t.volume / ball_volume(n + 1) - 1.0).abs(),
                barycenter_residual: bary,
                rounds: 50,
            },
        ));
    }
    Err(Error::Normalization(format!(
        "after 50 rounds: scale residual {scale_res:e}, barycenter {bary:?}"
    )))
}

/// Vol(Ω) = Vol(B) and bar(Ω) = 0.
pub fn normalize(domain: &Domain) -> Result<Domain> {
    Ok(normalize_to(domain, Normalization::Volume)?.0)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct AfRatio {
    pub value: f64,
    pub nonpositive_integral: bool,
}

/// [(∫σ_k dμ)^{1/(n+1−k)} / |Ω|^{1/(n+1)}] divided by the same quantity
/// for the unit ball, evaluated after rescaling Ω to the ball's volume so
/// that the value does not depend on the overall size.
pub fn af_ratio(domain: &Domain, k: usize) -> Result<AfRatio> {
    let n = domain.n();
    let t = curvature_table(domain, k)?;
    let s = (ball_volume(n + 1) / t.volume).powf(1.0 / (n as f64 + 1.0));
    let ik = t.signed[k] * s.powi((n - k) as i32);
    if ik <= 0.0 {
        return Ok(AfRatio { value: f64::NAN, nonpositive_integral: true });
    }
    let ball = binom_f64(n as i64, k as i64) * sphere_area(n);
    Ok(AfRatio { value: (ik / ball).powf(1.0 / (n + 1 - k) as f64), nonpositive_integral: false })
}

/// V_{n+1−k}(Ω) = ((n+1−k)!(k−1)!/(n+1)!)·(ω_{n+1−k}/ω_{n+1})·∫σ_{k−1} dμ for 1 <= k <= n+1.
pub fn quermassintegral(domain: &Domain, k: usize) -> Result<f64> {
    let n = domain.n();
    if k == 0 || k > n + 1 {
        return arg(format!("quermassintegral index k must lie in 1..=n+1, got {k}"));
    }
    let integral = curvature_integral(domain, k - 1, Part::Signed)?;
    Ok(quermass_prefactor(n, k) * integral)
}

fn quermass_prefactor(n: usize, k: usize) -> f64 {
    let fact = |m: usize| (1..=m).map(|v| v as f64).product::<f64>();
    fact(n + 1 - k) * fact(k - 1) / fact(n + 1) * ball_volume(n + 1 - k) / ball_volume(n + 1)
}

/// The two unit-ball values of V_n that the literature conventions give:
/// the curvature-integral one (ω_n) and the area-normalized one (1).
pub fn quermass_ball_constants(n: usize) -> (f64, f64) {
    (quermass_prefactor(n, 1) * sphere_area(n), sphere_area(n) / ((n as f64 + 1.0) * ball_volume(n + 1)))
}

#[cfg(test)]
mod tests;
