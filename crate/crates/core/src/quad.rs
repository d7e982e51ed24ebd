//! Gauss–Legendre rules and adaptive 1D quadrature.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Nodes and weights of the `m`-point Gauss–Legendre rule on [-1, 1],
/// nodes in increasing order.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m > 0);
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    let half = m.div_ceil(2);
    for i in 0..half {
        // Tricomi initial guess, then Newton on P_m.
        let mut z = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(m, z);
        dp = if d != 0.0 { d } else { dp };
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[m - 1 - i] = z;
        w[i] = wi;
        w[m - 1 - i] = wi;
    }
    if m % 2 == 1 {
        x[m / 2] = 0.0;
    }
    (x, w)
}

fn legendre_with_derivative(m: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    for j in 2..=m {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * z * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    if m == 0 {
        return (1.0, 0.0);
    }
    let d = m as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// A reusable rule mapped onto arbitrary intervals.
#[derive(Debug, Clone)]
pub struct Rule {
    x: Vec<f64>,
    w: Vec<f64>,
}

impl Rule {
    pub fn new(m: usize) -> Self {
        let (x, w) = gauss_legendre(m);
        Self { x, w }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// (node, weight) pairs on [a, b].
    pub fn on(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.x.iter().zip(&self.w).map(move |(&x, &w)| (c + h * x, h * w))
    }

    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        self.on(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

/// Composite nodes on [a, b]: each interval between consecutive
/// breakpoints is cut into panels no wider than `max_panel`.
pub fn composite_nodes(a: f64, b: f64, breaks: &[f64], max_panel: f64, rule: &Rule) -> Vec<(f64, f64)> {
    let mut cuts = vec![a];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&t| t > a && t < b).collect();
    inner.sort_by(|x, y| x.partial_cmp(y).unwrap());
    inner.dedup();
    cuts.extend(inner);
    cuts.push(b);
    let mut out = Vec::new();
    for pair in cuts.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        let panels = ((hi - lo) / max_panel).ceil().max(1.0) as usize;
        let h = (hi - lo) / panels as f64;
        for p in 0..panels {
            let pa = lo + p as f64 * h;
            out.extend(rule.on(pa, pa + h));
        }
    }
    out
}

/// Adaptive Gauss–Legendre: compares a 20-point rule against two halves
/// and bisects until the difference falls under `tol` (absolute), splitting
/// first at the given breakpoints.
pub fn adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, breaks: &[f64], tol: f64) -> Result<f64> {
    let rule = Rule::new(20);
    let mut cuts = vec![a];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&t| t > a && t < b).collect();
    inner.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.extend(inner);
    cuts.push(b);
    let pieces = (cuts.len() - 1) as f64;
    let mut total = 0.0;
    for pair in cuts.windows(2) {
        total += adapt_piece(f, &rule, pair[0], pair[1], tol / pieces, 0)?;
    }
    Ok(total)
}

fn adapt_piece(f: &dyn Fn(f64) -> f64, rule: &Rule, a: f64, b: f64, tol: f64, depth: u32) -> Result<f64> {
    let whole = rule.integrate(a, b, f);
    let m = 0.5 * (a + b);
    let left = rule.integrate(a, m, f);
    let right = rule.integrate(m, b, f);
    let err = (left + right - whole).abs();
    if err <= tol || (b - a) < 1e-12 {
        return Ok(left + right);
    }
    if depth >= 40 {
        return Err(Error::Resolution(format!(
            "adaptive quadrature stalled on [{a}, {b}] with error {err:e}"
        )));
    }
    Ok(adapt_piece(f, rule, a, m, 0.5 * tol, depth + 1)? + adapt_piece(f, rule, m, b, 0.5 * tol, depth + 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_is_exact_for_polynomials() {
        let r = Rule::new(8);
        // degree 15 is the limit of an 8-point rule
        let v = r.integrate(0.0, 2.0, |x| x.powi(15));
        assert!((v - 2f64.powi(16) / 16.0).abs() < 1e-9);
        let (x, w) = gauss_legendre(96);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn adaptive_handles_kinks() {
        let f = |x: f64| (x - 0.3).abs();
        let v = adaptive(&f, 0.0, 1.0, &[0.3], 1e-13).unwrap();
        assert!((v - (0.045 + 0.245)).abs() < 1e-13);
        let g = |x: f64| x.sin().powi(2);
        let v = adaptive(&g, 0.0, PI, &[], 1e-13).unwrap();
        assert!((v - PI / 2.0).abs() < 1e-12);
    }
}
