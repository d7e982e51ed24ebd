//! Deficit functionals and hypothesis predicates of the stability
//! theorems, evaluated on concrete domains. The constants d(k,n), ω(ε) and
//! friends are never hardcoded; reports carry measured ratios instead.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::axisym::AxisProfile;
use crate::error::{arg, Result};
use crate::exactcomb::binom_f64;
use crate::par;
use crate::spheregeom::{
    curvature_table, normalize_to, sigma_all_h, sphere_area, CurvatureTable, Domain, Normalization,
    NormalizationResiduals,
};
use crate::symfun::newton_series;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Theorem {
    #[serde(rename = "1.1")]
    T11,
    #[serde(rename = "1.2")]
    T12,
    #[serde(rename = "1.4")]
    T14,
    #[serde(rename = "1.5")]
    T15,
    #[serde(rename = "4.4")]
    T44,
    #[serde(rename = "4.5")]
    T45,
}

impl Theorem {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "1.1" => Self::T11,
            "1.2" => Self::T12,
            "1.4" => Self::T14,
            "1.5" => Self::T15,
            "4.4" => Self::T44,
            "4.5" => Self::T45,
            _ => return arg(format!("unknown theorem {s:?}; expected one of 1.1, 1.2, 1.4, 1.5, 4.4, 4.5")),
        })
    }
}

/// A pointwise or structural hypothesis with the worst observed margin
/// (negative when violated).
#[derive(Debug, Clone, Serialize)]
pub struct Flag {
    pub name: String,
    pub holds: bool,
    pub worst_margin: f64,
}

impl Flag {
    fn structural(name: impl Into<String>, holds: bool) -> Self {
        Self { name: name.into(), holds, worst_margin: if holds { 0.0 } else { -1.0 } }
    }

    fn pointwise(name: impl Into<String>, worst: f64) -> Self {
        Self { name: name.into(), holds: worst >= 0.0, worst_margin: worst }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DeficitReport {
    pub theorem: Theorem,
    pub n: usize,
    pub k: usize,
    pub jprime: Option<usize>,
    /// ∫σ_j(h)dμ and its positive and negative parts, j = 0..=k.
    pub signed: Vec<f64>,
    pub positive: Vec<f64>,
    pub negative: Vec<f64>,
    /// The left-hand integral the theorem bounds.
    pub integral: f64,
    pub compensated: bool,
    pub baseline: f64,
    pub deficit: f64,
    /// ∫_{∂B}|∇u|² dA of the normalized field.
    pub dirichlet: f64,
    /// deficit / dirichlet; absent when the field has no gradient.
    pub ratio: Option<f64>,
    /// Whether (n, k, j′) lie in the range the theorem covers.
    pub in_theorem: bool,
    pub hypotheses: Vec<Flag>,
    pub normalization: NormalizationResiduals,
    /// deficit + δ for the almost-stability statement.
    pub margin: Option<f64>,
    pub notices: Vec<String>,
}

fn ratio_of(deficit: f64, dirichlet: f64) -> Option<f64> {
    (dirichlet > 1e-300).then(|| deficit / dirichlet)
}

struct Prepared {
    domain: Domain,
    table: CurvatureTable,
    residuals: NormalizationResiduals,
    notices: Vec<String>,
}

fn prepare(domain: &Domain, kmax: usize, target: Normalization) -> Result<Prepared> {
    let (dom, residuals) = normalize_to(domain, target)?;
    let mut notices = Vec::new();
    if residuals.rounds > 0 {
        notices.push(format!("input was not normalized; rescaled/translated to {target:?} in {} rounds", residuals.rounds));
    }
    let table = curvature_table(&dom, kmax)?;
    Ok(Prepared { domain: dom, table, residuals, notices })
}

fn baseline(n: usize, k: usize) -> f64 {
    binom_f64(n as i64, k as i64) * sphere_area(n)
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        return arg(format!("deficits need 1 <= k <= n, got k={k}, n={n}"));
    }
    Ok(())
}

fn report(theorem: Theorem, k: usize, p: Prepared, integral: f64, compensated: bool, in_theorem: bool) -> DeficitReport {
    let n = p.table.n;
    let deficit = integral - baseline(n, k);
    DeficitReport {
        theorem,
        n,
        k,
        jprime: None,
        signed: p.table.signed[..=k].to_vec(),
        positive: p.table.positive[..=k].to_vec(),
        negative: p.table.negative[..=k].to_vec(),
        integral,
        compensated,
        baseline: baseline(n, k),
        deficit,
        dirichlet: p.table.dirichlet,
        ratio: ratio_of(deficit, p.table.dirichlet),
        in_theorem,
        hypotheses: Vec::new(),
        normalization: p.residuals,
        margin: None,
        notices: p.notices,
    }
}

fn compensated_integral(t: &CurvatureTable, k: usize) -> f64 {
    t.signed[k] + t.negative[1..=k].iter().sum::<f64>()
}

/// ∫σ_k + Σ_{j≤k}σ_j⁻ dμ − C_n^k|Sⁿ| under Vol(Ω) = Vol(B), bar(Ω) = 0.
pub fn deficit_compensated(domain: &Domain, k: usize) -> Result<DeficitReport> {
    let n = domain.n();
    check_k(n, k)?;
    let p = prepare(domain, k, Normalization::Volume)?;
    let integral = compensated_integral(&p.table, k);
    let mut r = report(Theorem::T11, k, p, integral, true, n >= 5 && k <= (n - 1) / 2);
    r.hypotheses.push(Flag::structural("k <= [(n-1)/2]", k <= (n - 1) / 2));
    r.hypotheses.push(Flag::structural("n >= 5", n >= 5));
    Ok(r)
}

/// The axially symmetric statement: compensated integral under I_0(Ω) = I_0(B).
pub fn deficit_axisymmetric(domain: &Domain, k: usize) -> Result<DeficitReport> {
    let n = domain.n();
    check_k(n, k)?;
    let axial = matches!(domain, Domain::Axial(_));
    let p = prepare(domain, k, Normalization::Curvature(0))?;
    let integral = compensated_integral(&p.table, k);
    let mut r = report(Theorem::T15, k, p, integral, true, n >= 5 && axial);
    r.hypotheses.push(Flag::structural("axially symmetric", axial));
    r.hypotheses.push(Flag::structural("n >= 5", n >= 5));
    Ok(r)
}

/// Compensated deficit under I_0 normalization, with margin deficit + δ.
pub fn deficit_thm14(domain: &Domain, k: usize, delta: f64) -> Result<DeficitReport> {
    let n = domain.n();
    check_k(n, k)?;
    if !(delta > 0.0) {
        return arg(format!("δ must be positive, got {delta}"));
    }
    let p = prepare(domain, k, Normalization::Curvature(0))?;
    let integral = compensated_integral(&p.table, k);
    let mut r = report(Theorem::T14, k, p, integral, true, n >= 5 && k < n / 2);
    r.margin = Some(r.deficit + delta);
    r.hypotheses.push(Flag::structural("k < [n/2]", k < n / 2));
    r.hypotheses.push(Flag::structural("n >= 5", n >= 5));
    Ok(r)
}

fn pointwise_min(domain: &Domain, f: impl Fn(&crate::spheregeom::PointJet) -> Result<f64> + Sync) -> Result<f64> {
    let samples = domain.samples(0)?;
    let vals = par::map(&samples, |s| f(&s.jet));
    let mut worst = f64::INFINITY;
    for v in vals {
        worst = worst.min(v?);
    }
    Ok(worst)
}

/// ∫σ₂⁺ dμ − (n(n−1)/2)|Sⁿ| under volume normalization; flags Δu ≤ n.
pub fn deficit_sigma2plus(domain: &Domain) -> Result<DeficitReport> {
    let n = domain.n();
    check_k(n, 2)?;
    let p = prepare(domain, 2, Normalization::Volume)?;
    let integral = p.table.positive[2];
    let upper = pointwise_min(&p.domain, |j| Ok(n as f64 - j.laplacian()))?;
    let lower = -pointwise_min(&p.domain, |j| Ok(j.laplacian()))?;
    let mut r = report(Theorem::T44, 2, p, integral, false, n >= 5);
    r.hypotheses.push(Flag::pointwise("Δu <= n", upper));
    r.hypotheses.push(Flag { name: format!("Δu >= -M with M = {:.6e}", lower.max(0.0)), holds: true, worst_margin: 0.0 });
    r.hypotheses.push(Flag::structural("n >= 5", n >= 5));
    Ok(r)
}

/// Uncompensated deficit under I_{j′}(Ω) = I_{j′}(B) with the two pointwise
/// curvature conditions.
pub fn deficit_thm12(domain: &Domain, k: usize, jprime: usize) -> Result<DeficitReport> {
    let n = domain.n();
    check_k(n, k)?;
    if jprime >= k {
        return arg(format!("j' must be smaller than k, got j'={jprime}, k={k}"));
    }
    let p = prepare(domain, k, Normalization::Curvature(jprime))?;
    let (ni, ki) = (n as i64, k as i64);
    let first = pointwise_min(&p.domain, |j| {
        let s = sigma_all_h(j, jprime)?;
        Ok((1..=jprime).map(|m| if m % 2 == 0 { s[m] } else { -s[m] }).sum())
    })?;
    let second = pointwise_min(&p.domain, |j| {
        let s = sigma_all_h(j, k)?;
        Ok((jprime + 1..=k)
            .map(|m| {
                let sgn = if (k - m) % 2 == 0 { 1.0 } else { -1.0 };
                (binom_f64(ni, ki + 1) / binom_f64(ni, m as i64) + sgn) * s[m]
            })
            .sum())
    })?;
    let integral = p.table.signed[k];
    let even = jprime % 2 == 0 && k % 2 == 0;
    let range = k + jprime + 2 > n;
    let mut r = report(Theorem::T12, k, p, integral, false, n >= 5 && even && range);
    r.jprime = Some(jprime);
    r.hypotheses.push(Flag::pointwise("sum_{m=1}^{j'} (-1)^m sigma_m(h) >= 0", first));
    r.hypotheses.push(Flag::pointwise("sum_{m=j'+1}^{k} (C_n^{k+1}/C_n^m + (-1)^{k-m}) sigma_m(h) >= 0", second));
    r.hypotheses.push(Flag::structural("j' and k even", even));
    r.hypotheses.push(Flag::structural("k > n - j' - 2", range));
    r.hypotheses.push(Flag::structural("n >= 5", n >= 5));
    Ok(r)
}

/// Uncompensated deficit under volume normalization, with the Hessian
/// condition (−1)^mσ_m(D²u) ≥ (−1)^mC_n^m, 1 ≤ m ≤ k.
pub fn deficit_hessian_condition(domain: &Domain, k: usize) -> Result<DeficitReport> {
    let n = domain.n();
    check_k(n, k)?;
    let p = prepare(domain, k, Normalization::Volume)?;
    let flags = hessian_condition_flags(&p.domain, k)?;
    let integral = p.table.signed[k];
    let mut r = report(Theorem::T45, k, p, integral, false, n >= 5 && k + 1 < n);
    r.hypotheses.extend(flags);
    r.hypotheses.push(Flag::structural("k < n - 1", k + 1 < n));
    r.hypotheses.push(Flag::structural("n >= 5", n >= 5));
    Ok(r)
}

fn hessian_condition_flags(domain: &Domain, k: usize) -> Result<Vec<Flag>> {
    let n = domain.n();
    (1..=k)
        .map(|m| {
            let sgn = if m % 2 == 0 { 1.0 } else { -1.0 };
            let c = binom_f64(n as i64, m as i64);
            let worst = pointwise_min(domain, |j| Ok(sgn * (newton_series(&j.hess, m).sigma[m] - c)))?;
            Ok(Flag::pointwise(format!("(-1)^{m} sigma_{m}(D^2 u) >= (-1)^{m} C_n^{m}"), worst))
        })
        .collect()
}

/// k-convexity (σ_m(h) > 0 for m ≤ k) and the Hessian condition, each with
/// its worst pointwise margin.
pub fn hypothesis_predicates(domain: &Domain, k: usize) -> Result<Vec<Flag>> {
    let n = domain.n();
    check_k(n, k)?;
    let mut flags = Vec::new();
    for m in 1..=k {
        let worst = pointwise_min(domain, |j| Ok(sigma_all_h(j, m)?[m]))?;
        flags.push(Flag { name: format!("sigma_{m}(h) > 0"), holds: worst > 0.0, worst_margin: worst });
    }
    flags.extend(hessian_condition_flags(domain, k)?);
    Ok(flags)
}

pub fn deficit(theorem: Theorem, domain: &Domain, k: usize, jprime: Option<usize>, delta: Option<f64>) -> Result<DeficitReport> {
    match theorem {
        Theorem::T11 => deficit_compensated(domain, k),
        Theorem::T12 => deficit_thm12(domain, k, jprime.unwrap_or(0)),
        Theorem::T14 => deficit_thm14(domain, k, delta.unwrap_or(1e-3)),
        Theorem::T15 => deficit_axisymmetric(domain, k),
        Theorem::T44 => deficit_sigma2plus(domain),
        Theorem::T45 => deficit_hessian_condition(domain, k),
    }
}

/// How σ_m(D²u) enters the quadratic functional.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Substitution {
    Hessian,
    /// σ_m(D²u) replaced by Σ_{j≤m}(−1)^jC_{n−j}^{m−j}σ_j(h).
    Involution,
}

/// ∫ C_n^k((n−k)(k+1)/(2n))|∇u|² − C_n^k((n−k)(k+1)/2)u²
///   + Σ_{m=1}^k (−1)^m C_{n−m}^{k−m}((n−k)(k+1)/(2(m+1)(n−m)))|∇u|²σ_m dA.
pub fn expansion_second_order(domain: &Domain, k: usize, sub: Substitution) -> Result<f64> {
    let n = domain.n();
    check_k(n, k)?;
    if k >= n {
        return arg(format!("the expansion needs k < n, got k={k}, n={n}"));
    }
    let (ni, ki) = (n as i64, k as i64);
    let ckn = binom_f64(ni, ki);
    let a = ((n - k) * (k + 1)) as f64;
    let coef: Vec<f64> = (0..=k)
        .map(|m| {
            let sgn = if m % 2 == 0 { 1.0 } else { -1.0 };
            sgn * binom_f64(ni - m as i64, ki - m as i64) * a / (2.0 * (m + 1) as f64 * (n - m) as f64)
        })
        .collect();
    let samples = domain.samples(0)?;
    let rows = par::map(&samples, |s| -> Result<f64> {
        let j = &s.jet;
        let g2 = j.grad_norm_sq();
        let sig_u = newton_series(&j.hess, k).sigma;
        let sig = match sub {
            Substitution::Hessian => sig_u,
            Substitution::Involution => {
                let sh = sigma_all_h(j, k)?;
                (0..=k)
                    .map(|m| {
                        (0..=m)
                            .map(|jj| {
                                let sgn = if jj % 2 == 0 { 1.0 } else { -1.0 };
                                sgn * binom_f64(ni - jj as i64, (m - jj) as i64) * sh[jj]
                            })
                            .sum()
                    })
                    .collect()
            }
        };
        let mut v = ckn * a / (2.0 * n as f64) * g2 - ckn * a / 2.0 * j.u * j.u;
        for m in 1..=k {
            v += coef[m] * g2 * sig[m];
        }
        Ok(s.weight * v)
    });
    rows.into_iter().sum()
}

/// Exact deficit I_k(Ω) − I_k(B) after volume normalization, next to the
/// quadratic functional on the same normalized field.
#[derive(Debug, Clone, Serialize)]
pub struct ExpansionCheck {
    pub exact: f64,
    pub quadratic: f64,
    pub quadratic_involution: f64,
}

pub fn expansion_check(domain: &Domain, k: usize) -> Result<ExpansionCheck> {
    let n = domain.n();
    let p = prepare(domain, k, Normalization::Volume)?;
    Ok(ExpansionCheck {
        exact: p.table.signed[k] - baseline(n, k),
        quadratic: expansion_second_order(&p.domain, k, Substitution::Hessian)?,
        quadratic_involution: expansion_second_order(&p.domain, k, Substitution::Involution)?,
    })
}

/// Least-squares slope of log|e| against log t.
pub fn fitted_exponent(ts: &[f64], errs: &[f64]) -> f64 {
    let xs: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.abs().ln()).collect();
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Random zonal profiles Σ_{ℓ=lmin}^{lmax} a_ℓ Ĉ_ℓ on Sⁿ, each scaled so
/// that max(|V|, |V′|) is a random fraction in [0.25, 1] of `c1`.
pub fn random_zonal_family(n: usize, count: usize, lmin: usize, lmax: usize, c1: f64, seed: u64) -> Result<Vec<AxisProfile>> {
    if lmin > lmax {
        return arg(format!("empty degree band {lmin}..={lmax}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut coeffs = vec![0.0; lmax + 1];
            for c in coeffs.iter_mut().skip(lmin) {
                *c = rng.gen_range(-1.0..1.0);
            }
            let target = c1 * rng.gen_range(0.25..=1.0);
            let unit = AxisProfile::zonal_series(n, coeffs.iter().map(|c| c * 1e-3).collect())?;
            let s = target / unit.c1_norm();
            AxisProfile::zonal_series(n, coeffs.iter().map(|c| c * 1e-3 * s).collect())
        })
        .collect()
}
