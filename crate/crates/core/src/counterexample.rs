//! Many small radial bumps on the round sphere: the construction showing
//! that uncompensated curvature integrals can dip below the ball's value
//! for odd k.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::axisym::{AxisProfile, ProfileFn};
use crate::error::{arg, Error, Result};
use crate::exactcomb::binom_f64;
use crate::jet::Jet2;
use crate::quad::{adaptive, Rule};
use crate::spheregeom::{sigma_all_h, sphere_area, table_from_samples, NodeSample, PointJet};
use crate::symfun::SymMatrix;

/// Smootherstep P(x) = 6x⁵ − 15x⁴ + 10x³ and its antiderivative from 0.
fn smooth(x: f64) -> (f64, f64, f64) {
    let p = x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
    let dp = 30.0 * x * x * (1.0 - x) * (1.0 - x);
    let ip = x.powi(4) * (2.5 + x * (-3.0 + x));
    (p, dp, ip)
}

/// Breakpoints of the ramp, in units of the cap radius κ⁻¹.
const RAMP: [f64; 4] = [0.25, 0.5, 0.75, 15.0 / 16.0];

/// (S, S′, ∫_0^t S) for the plateau function: up on [1/4, 1/2], equal to 1
/// on [1/2, 3/4], down on [3/4, 15/16], zero outside.
fn plateau(t: f64) -> (f64, f64, f64) {
    let [a, b, c, d] = RAMP;
    let up = b - a;
    let down = d - c;
    let full_up = 0.5 * up;
    if t <= a {
        (0.0, 0.0, 0.0)
    } else if t <= b {
        let (p, dp, ip) = smooth((t - a) / up);
        (p, dp / up, up * ip)
    } else if t <= c {
        (1.0, 0.0, full_up + (t - b))
    } else if t <= d {
        let x = (t - c) / down;
        let (p, dp, ip) = smooth(1.0 - x);
        (p, -dp / down, full_up + (c - b) + down * (0.5 - ip))
    } else {
        (0.0, 0.0, full_up + (c - b) + 0.5 * down)
    }
}

/// The radial bump f with f′ = (ε/2)S(κr), f(κ⁻¹) = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BumpSpec {
    pub epsilon: f64,
    pub kappa: f64,
}

impl BumpSpec {
    /// (f, f′, f″) at geodesic radius r.
    pub fn jet(&self, r: f64) -> Jet2 {
        let (e, k) = (self.epsilon, self.kappa);
        let (s, ds, is) = plateau(k * r);
        let total = plateau(1.0).2;
        Jet2::new(-(e / (2.0 * k)) * (total - is), 0.5 * e * s, 0.5 * e * k * ds)
    }

    pub fn radius(&self) -> f64 {
        1.0 / self.kappa
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        RAMP.iter().map(|t| t / self.kappa).collect()
    }

    pub fn plateau_interval(&self) -> (f64, f64) {
        (0.5 / self.kappa, 0.75 / self.kappa)
    }
}

pub fn make_bump(epsilon: f64, kappa: f64) -> Result<BumpSpec> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return arg(format!("bump amplitude needs 0 < ε < 1, got {epsilon}"));
    }
    // The construction meets every constraint once the cap fits on the sphere.
    if !(kappa.is_finite() && kappa >= 1.0) {
        return arg(format!("bump needs κ >= 1, got {kappa}"));
    }
    let spec = BumpSpec { epsilon, kappa };
    let half = 0.5 * epsilon;
    let (p0, p1) = spec.plateau_interval();
    for i in 0..=10_000 {
        let r = spec.radius() * 1.1 * i as f64 / 10_000.0;
        let j = spec.jet(r);
        let tol = 1e-15;
        let ok = j.v >= -half - tol
            && j.v <= tol
            && j.d1 >= -tol
            && j.d1 <= half + tol
            && (!(p0..=p1).contains(&r) || (j.d1 - half).abs() <= tol)
            && (r < spec.radius() || (j.v.abs() <= tol && j.d1 == 0.0));
        if !ok {
            return Err(Error::Argument(format!("bump constraints violated at r = {r}: {j:?}")));
        }
    }
    Ok(spec)
}

/// The bump as an axial profile about its own centre, θ = geodesic radius.
#[derive(Debug, Clone)]
pub struct BumpProfile(pub BumpSpec);

impl ProfileFn for BumpProfile {
    fn jet(&self, theta: f64) -> Jet2 {
        self.0.jet(theta)
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.0.breakpoints()
    }
}

/// σ_k(D²u) of the flat radial function u(x) = f(|x|) on ℝⁿ, as the
/// product form C_{n−1}^{k−1}f″(f′/r)^{k−1} + C_{n−1}^k(f′/r)^k and as the
/// divergence form C_{n−1}^{k−1}r^{1−n}((r^{n−k}/k)f′^k)′ (differentiated
/// by forward-mode jets).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RadialSigma {
    pub product: f64,
    pub divergence: f64,
}

pub fn radial_sigma_flat(spec: &BumpSpec, r: f64, k: usize, n: usize) -> Result<RadialSigma> {
    if k == 0 || k > n {
        return arg(format!("radial sigma needs 1 <= k <= n, got k={k}, n={n}"));
    }
    if !(r >= 0.0) {
        return arg(format!("radius must be nonnegative, got {r}"));
    }
    // f′ vanishes identically near the centre.
    if r < RAMP[0] * spec.radius() {
        return Ok(RadialSigma { product: 0.0, divergence: 0.0 });
    }
    let (ni, ki) = (n as i64, k as i64);
    let j = spec.jet(r);
    let q = j.d1 / r;
    let product = binom_f64(ni - 1, ki - 1) * j.d2 * q.powi(ki as i32 - 1) + binom_f64(ni - 1, ki) * q.powi(ki as i32);
    let fp = Jet2::new(j.d1, j.d2, 0.0);
    let g = Jet2::var(r).powi((n - k) as i32) * fp.powi(k as i32);
    let divergence = binom_f64(ni - 1, ki - 1) * r.powi(1 - n as i32) * g.d1 / k as f64;
    Ok(RadialSigma { product, divergence })
}

/// ∫_{ℝⁿ}|Du|²σ_k(D²u)dx for one flat bump, per unit solid angle (the
/// |S^{n−1}| factor is left out, matching the closed form).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DirichletSigma {
    /// ∫ f′² σ_k r^{n−1} dr with σ_k in product form.
    pub direct: f64,
    /// C_{n−1}^{k−1}(n−k)(2/(k(k+2)))∫ r^{n−k−1} f′^{k+2} dr.
    pub by_parts: f64,
    /// The plateau's share of ∫ r^{n−k−1} f′^{k+2} dr.
    pub plateau_part: f64,
    /// Lower bound for `by_parts` from the plateau alone.
    pub plateau_bound: f64,
}

pub fn dirichlet_sigma_integral(spec: &BumpSpec, k: usize, n: usize) -> Result<DirichletSigma> {
    if k == 0 || k >= n {
        return arg(format!("dirichlet sigma integral needs 1 <= k < n, got k={k}, n={n}"));
    }
    let (a, b) = (0.0, spec.radius());
    let breaks = spec.breakpoints();
    let direct_f = |r: f64| {
        let j = spec.jet(r);
        j.d1 * j.d1 * radial_sigma_flat(spec, r, k, n).map(|s| s.product).unwrap_or(f64::NAN) * r.powi(n as i32 - 1)
    };
    let parts_f = |r: f64| r.powi((n - k) as i32 - 1) * spec.jet(r).d1.powi(k as i32 + 2);
    let scale = Rule::new(64).integrate(a, b, parts_f).abs().max(1e-300);
    let coef = binom_f64(n as i64 - 1, k as i64 - 1) * (n - k) as f64 * 2.0 / (k * (k + 2)) as f64;
    let direct = adaptive(&direct_f, a, b, &breaks, 1e-13 * coef * scale)?;
    let by_parts = coef * adaptive(&parts_f, a, b, &breaks, 1e-13 * scale)?;
    let (p0, p1) = spec.plateau_interval();
    let e = (0.5 * spec.epsilon).powi(k as i32 + 2);
    let m = (n - k) as i32;
    let plateau_part = e * (p1.powi(m) - p0.powi(m)) / m as f64;
    Ok(DirichletSigma { direct, by_parts, plateau_part, plateau_bound: coef * plateau_part })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PackMode {
    Count,
    Greedy,
}

/// Cap centres with pairwise chordal distance ≥ 2κ⁻¹.
#[derive(Debug, Clone, Serialize)]
pub struct PackedBumps {
    pub n: usize,
    pub kappa: f64,
    pub q: usize,
    /// Present in greedy mode.
    pub centers: Option<Vec<Vec<f64>>>,
    pub mode: PackMode,
    /// q / κⁿ.
    pub c_n: f64,
    pub warning: Option<String>,
}

/// |{x ∈ Sⁿ : d(x, p) < ρ}|.
pub fn cap_area(n: usize, rho: f64) -> f64 {
    let rho = rho.clamp(0.0, PI);
    sphere_area(n - 1) * Rule::new(48).integrate(0.0, rho, |t| t.sin().powi(n as i32 - 1))
}

/// Geodesic radius whose chord is 2κ⁻¹.
fn separation_angle(kappa: f64) -> f64 {
    2.0 * (1.0 / kappa).min(1.0).asin()
}

/// Greedy placement is attempted up to this κ in dimensions n ≤ 3.
pub const GREEDY_MAX_KAPPA: f64 = 32.0;
pub const GREEDY_SEED: u64 = 0x5eed;

pub fn pack_caps(n: usize, kappa: f64, mode: PackMode) -> Result<PackedBumps> {
    if n < 2 {
        return arg(format!("packing needs n >= 2, got {n}"));
    }
    if !(kappa >= 4.0 && kappa.is_finite()) {
        return arg(format!("packing needs κ >= 4, got {kappa}"));
    }
    let count = || {
        let q = ((sphere_area(n) / cap_area(n, separation_angle(kappa))).floor() as usize).max(1);
        PackedBumps { n, kappa, q, centers: None, mode: PackMode::Count, c_n: q as f64 / kappa.powi(n as i32), warning: None }
    };
    match mode {
        PackMode::Count => Ok(count()),
        PackMode::Greedy if n > 3 || kappa > GREEDY_MAX_KAPPA => {
            let mut p = count();
            p.warning = Some(format!(
                "greedy placement limited to n <= 3 and κ <= {GREEDY_MAX_KAPPA}; used the counting bound"
            ));
            Ok(p)
        }
        PackMode::Greedy => {
            let centers = greedy_centers(n, kappa, GREEDY_SEED);
            let q = centers.len();
            Ok(PackedBumps { n, kappa, q, centers: Some(centers), mode: PackMode::Greedy, c_n: q as f64 / kappa.powi(n as i32), warning: None })
        }
    }
}

/// Random sequential placement with a spatial hash; stops after a long run
/// of rejections.
fn greedy_centers(n: usize, kappa: f64, seed: u64) -> Vec<Vec<f64>> {
    let d = n + 1;
    let sep = 2.0 / kappa;
    let sep2 = sep * sep;
    let cell = |x: &[f64]| -> Vec<i64> { x.iter().map(|v| (v / sep).floor() as i64).collect() };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hash: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    let mut pts: Vec<Vec<f64>> = Vec::new();
    let mut misses = 0usize;
    let patience = 2000 + 20 * (sphere_area(n) / cap_area(n, 1.0 / kappa)) as usize;
    let offsets: Vec<Vec<i64>> = (0..3usize.pow(d as u32))
        .map(|mut c| {
            (0..d)
                .map(|_| {
                    let o = (c % 3) as i64 - 1;
                    c /= 3;
                    o
                })
                .collect()
        })
        .collect();
    while misses < patience {
        let mut x: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        x.iter_mut().for_each(|v| *v /= norm);
        let c = cell(&x);
        let clash = offsets.iter().any(|o| {
            let key: Vec<i64> = c.iter().zip(o).map(|(a, b)| a + b).collect();
            hash.get(&key).is_some_and(|ids| {
                ids.iter().any(|&i| pts[i].iter().zip(&x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() < sep2)
            })
        });
        if clash {
            misses += 1;
        } else {
            misses = 0;
            hash.entry(c).or_default().push(pts.len());
            pts.push(x);
        }
    }
    pts
}

/// Smallest pairwise chordal distance (exhaustive).
pub fn min_separation(centers: &[Vec<f64>]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..centers.len() {
        for j in i + 1..centers.len() {
            let d = centers[i].iter().zip(&centers[j]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            best = best.min(d);
        }
    }
    best
}

/// The assembled bumpy sphere, sampled as q copies of one cap plus the
/// untouched remainder of the sphere. Cap positions are not tracked.
#[derive(Debug, Clone)]
pub struct BumpDomain {
    n: usize,
    spec: BumpSpec,
    q: usize,
    profile: AxisProfile,
    scale: f64,
}

impl BumpDomain {
    pub fn new(n: usize, spec: BumpSpec, q: usize) -> Result<Self> {
        if q == 0 {
            return Err(Error::Packing("no caps placed".into()));
        }
        let profile = AxisProfile::new(Arc::new(BumpProfile(spec)), n)?;
        let free = sphere_area(n) - q as f64 * cap_area(n, spec.radius());
        if free < 0.0 {
            return Err(Error::Packing(format!("{q} caps of radius {} do not fit on S^{n}", spec.radius())));
        }
        Ok(Self { n, spec, q, profile, scale: 1.0 })
    }

    /// Counting-bound packing at the bump's κ.
    pub fn packed(n: usize, spec: BumpSpec) -> Result<Self> {
        let p = pack_caps(n, spec.kappa, PackMode::Count)?;
        Self::new(n, spec, p.q)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn spec(&self) -> BumpSpec {
        self.spec
    }

    pub fn scaled(&self, s: f64) -> BumpDomain {
        BumpDomain { scale: self.scale * s, profile: self.profile.scaled(s).expect("positive scale"), ..self.clone() }
    }

    pub fn samples(&self, level: u32) -> Result<Vec<NodeSample>> {
        let mut out: Vec<NodeSample> = self
            .profile
            .samples_on(0.0, self.spec.radius(), level + 2)
            .into_iter()
            .map(|s| NodeSample { weight: s.weight * self.q as f64, jet: s.jet, x: Vec::new() })
            .collect();
        let free = sphere_area(self.n) - self.q as f64 * cap_area(self.n, self.spec.radius());
        let mut rest = PointJet::zero(self.n);
        rest.u = self.scale - 1.0;
        out.push(NodeSample { weight: free, jet: rest, x: Vec::new() });
        Ok(out)
    }

    /// max(|u|, |∇u|) over the cap.
    pub fn c1_norm(&self) -> f64 {
        (0..=4000)
            .map(|i| {
                let j = self.spec.jet(self.spec.radius() * i as f64 / 4000.0);
                j.v.abs().max(j.d1.abs())
            })
            .fold(0.0, f64::max)
    }
}

/// ∫_{cap} σ_k(h) dμ for one bump through the σ_k(h) formula on the exact
/// spherical profile.
pub fn per_bump_integral(n: usize, spec: &BumpSpec, k: usize) -> Result<f64> {
    let profile = AxisProfile::new(Arc::new(BumpProfile(*spec)), n)?;
    let at = |level| -> Result<f64> {
        let s = profile.samples_on(0.0, spec.radius(), level);
        Ok(table_from_samples(n, k, &s, level)?.signed[k])
    };
    let (a, b) = (at(2)?, at(3)?);
    if (a - b).abs() > 1e-10 * b.abs().max(cap_area(n, spec.radius())) {
        return Err(Error::Resolution(format!("per-bump integral unresolved: {a} vs {b}")));
    }
    Ok(b)
}

/// The second-order flat expansion of one bump's excess
/// ∫_{cap}σ_k(h)dμ − C_n^k|cap|: the linear and quadratic u terms plus
/// Σ_m (−1)^m C_{n−m}^{k−m}((n−k)(k+1)/(2(m+1)(n−m))) ∫|∇u|²σ_m(D²u),
/// all as flat radial integrals.
pub fn flat_expansion_excess(n: usize, spec: &BumpSpec, k: usize) -> Result<f64> {
    if k == 0 || k >= n {
        return arg(format!("flat expansion needs 1 <= k < n, got k={k}, n={n}"));
    }
    let (ni, ki) = (n as i64, k as i64);
    let b = spec.breakpoints();
    let r = spec.radius();
    let w = |p: i32| move |t: f64| t.powi(p);
    let lin = adaptive(&|t| spec.jet(t).v * w(n as i32 - 1)(t), 0.0, r, &b, 1e-16)?;
    let quad = adaptive(&|t| spec.jet(t).v.powi(2) * w(n as i32 - 1)(t), 0.0, r, &b, 1e-18)?;
    let ckn = binom_f64(ni, ki);
    let nk = (n - k) as f64;
    let mut total = ckn * nk * lin + ckn * nk * (nk - 1.0) / 2.0 * quad;
    for m in 0..=k {
        let dm = if m == 0 {
            adaptive(&|t| spec.jet(t).d1.powi(2) * w(n as i32 - 1)(t), 0.0, r, &b, 1e-18)?
        } else {
            dirichlet_sigma_integral(spec, m, n)?.by_parts
        };
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        let mi = m as i64;
        let c = binom_f64(ni - mi, ki - mi) * nk * (k + 1) as f64 / (2.0 * (m + 1) as f64 * (n - m) as f64);
        total += sign * c * dm;
    }
    Ok(sphere_area(n - 1) * total)
}

#[derive(Debug, Clone, Serialize)]
pub struct Assembly {
    pub n: usize,
    pub k: usize,
    pub epsilon: f64,
    pub kappa: f64,
    pub q: usize,
    /// q/κⁿ for the counting packing, and its κ → ∞ limit |Sⁿ|/(2ⁿωₙ).
    pub c_n: f64,
    pub c_n_limit: f64,
    pub cap_area: f64,
    pub per_bump: f64,
    pub i_k: f64,
    pub baseline: f64,
    /// I_k − baseline.
    pub margin: f64,
    pub c1_norm: f64,
}

pub fn assemble_counterexample(n: usize, k: usize, epsilon: f64, kappa: f64) -> Result<Assembly> {
    if k > n {
        return arg(format!("k must not exceed n, got k={k}, n={n}"));
    }
    let spec = make_bump(epsilon, kappa)?;
    let pack = pack_caps(n, kappa, PackMode::Count)?;
    let cap = cap_area(n, spec.radius());
    let free = sphere_area(n) - pack.q as f64 * cap;
    if free < 0.0 {
        return Err(Error::Packing(format!("{} caps overflow S^{n}", pack.q)));
    }
    let ckn = binom_f64(n as i64, k as i64);
    let per_bump = per_bump_integral(n, &spec, k)?;
    let i_k = ckn * free + pack.q as f64 * per_bump;
    let baseline = ckn * sphere_area(n);
    let c1 = BumpDomain::new(n, spec, pack.q)?.c1_norm();
    Ok(Assembly {
        n,
        k,
        epsilon,
        kappa,
        q: pack.q,
        c_n: pack.c_n,
        c_n_limit: sphere_area(n) / (2f64.powi(n as i32) * crate::spheregeom::ball_volume(n)),
        cap_area: cap,
        per_bump,
        i_k,
        baseline,
        margin: i_k - baseline,
        c1_norm: c1,
    })
}

/// Pointwise σ_k(h) of a single bump at geodesic radius r (used by tests
/// and reports that sample the profile).
pub fn bump_sigma_h(n: usize, spec: &BumpSpec, r: f64, k: usize) -> Result<f64> {
    let j = spec.jet(r);
    let c = if r.sin() < 1e-7 { j.d2 } else { r.cos() / r.sin() * j.d1 };
    let mut d = vec![c; n];
    d[0] = j.d2;
    let mut grad = vec![0.0; n];
    grad[0] = j.d1;
    Ok(sigma_all_h(&PointJet { u: j.v, grad, hess: SymMatrix::diag(&d) }, k)?[k])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_is_continuous_with_matching_antiderivative() {
        for &t in &RAMP {
            let (a, b) = (plateau(t - 1e-12), plateau(t + 1e-12));
            assert!((a.0 - b.0).abs() < 1e-9 && (a.1 - b.1).abs() < 1e-6 && (a.2 - b.2).abs() < 1e-9);
        }
        let q = Rule::new(40);
        let mut acc = 0.0;
        let mut prev = 0.0;
        for &t in RAMP.iter().chain([1.0].iter()) {
            acc += q.integrate(prev, t, |s| plateau(s).0);
            assert!((acc - plateau(t).2).abs() < 1e-14);
            prev = t;
        }
    }

    #[test]
    fn bump_examples() {
        let s = make_bump(0.2, 10.0).unwrap();
        assert!((s.jet(0.06).d1 - 0.1).abs() < 1e-15);
        assert_eq!(s.jet(0.1).v, 0.0);
        assert!(s.jet(0.0).v >= -0.1);
        let total = adaptive(&|r| s.jet(r).d1, 0.0, 0.1, &s.breakpoints(), 1e-16).unwrap();
        assert!(total <= 0.1 * 0.1 + 1e-15);
        assert!((total + s.jet(0.0).v).abs() < 1e-14);
        assert!(make_bump(0.2, 0.5).is_err());
        assert!(make_bump(1.2, 50.0).is_err());
    }

    #[test]
    fn radial_sigma_forms() {
        let s = make_bump(0.2, 10.0).unwrap();
        let r = 0.06;
        let v = radial_sigma_flat(&s, r, 2, 3).unwrap();
        assert!((v.product - v.divergence).abs() < 1e-12 * v.product.abs());
        assert!((v.product - (0.1 / r).powi(2)).abs() < 1e-12 * v.product);
        for r in [0.03, 0.04, 0.08, 0.09] {
            let j = s.jet(r);
            let v = radial_sigma_flat(&s, r, 1, 3).unwrap();
            assert!((v.product - (j.d2 + 2.0 * j.d1 / r)).abs() < 1e-12 * (1.0 + v.product.abs()));
            assert!((v.product - v.divergence).abs() < 1e-9 * v.product.abs().max(1e-300));
        }
    }

    #[test]
    fn dirichlet_plateau_example_and_routes() {
        let s = make_bump(0.2, 10.0).unwrap();
        let d = dirichlet_sigma_integral(&s, 1, 3).unwrap();
        assert!((d.plateau_part - 1.5625e-6).abs() < 1e-18);
        assert!((d.direct - d.by_parts).abs() < 1e-9 * d.by_parts.abs());
        assert!(d.by_parts >= d.plateau_bound);
    }

    #[test]
    fn greedy_packing_is_separated() {
        let p = pack_caps(2, 8.0, PackMode::Greedy).unwrap();
        let c = p.centers.as_ref().unwrap();
        assert!(p.q >= 1 && min_separation(c) >= 2.0 / 8.0);
        let w = pack_caps(4, 8.0, PackMode::Greedy).unwrap();
        assert!(w.warning.is_some() && w.mode == PackMode::Count);
    }

    #[test]
    fn per_bump_matches_pointwise_quadrature() {
        let s = make_bump(0.1, 40.0).unwrap();
        let direct = sphere_area(2)
            * adaptive(
                &|r: f64| {
                    let j = s.jet(r);
                    let one = 1.0 + j.v;
                    bump_sigma_h(3, &s, r, 1).unwrap() * one.powi(2) * (one * one + j.d1 * j.d1).sqrt() * r.sin().powi(2)
                },
                0.0,
                s.radius(),
                &s.breakpoints(),
                1e-15,
            )
            .unwrap();
        let p = per_bump_integral(3, &s, 1).unwrap();
        assert!((direct - p).abs() < 1e-10 * p.abs());
    }
}
