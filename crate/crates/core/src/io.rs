//! Plain-text field and profile readers.
//!
//! A field file is either grid samples, one `theta_index phi_index u` row
//! per node of a Gauss–Legendre × uniform grid, or a spectral list of
//! `l m re im` rows. Profile files hold `theta V` pairs. Blank lines and
//! `#` comments are skipped everywhere.

use std::path::Path;

use num::complex::Complex64;

use crate::error::{Error, Result};
use crate::spheregeom::{Grid, SphereField, DEFAULT_LMAX};

fn parse_err<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line, msg: msg.into() })
}

/// Numbered, comment-stripped, whitespace-split rows.
fn rows(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then(|| (i + 1, l.split_whitespace().collect()))
    })
}

fn num<T: std::str::FromStr>(line: usize, tok: &str, what: &str) -> Result<T> {
    tok.parse().or_else(|_| parse_err(line, format!("cannot read {what} from {tok:?}")))
}

pub fn parse_field(text: &str) -> Result<SphereField> {
    let rows: Vec<_> = rows(text).collect();
    let Some((_, first)) = rows.first() else {
        return parse_err(0, "empty field file");
    };
    match first.len() {
        3 => parse_grid(&rows),
        4 => parse_spectral(&rows),
        c => parse_err(rows[0].0, format!("expected 3 (grid) or 4 (spectral) columns, found {c}")),
    }
}

fn parse_grid(rows: &[(usize, Vec<&str>)]) -> Result<SphereField> {
    let mut entries = Vec::with_capacity(rows.len());
    for (line, toks) in rows {
        if toks.len() != 3 {
            return parse_err(*line, format!("grid rows need 3 columns, found {}", toks.len()));
        }
        let i: usize = num(*line, toks[0], "theta index")?;
        let j: usize = num(*line, toks[1], "phi index")?;
        let u: f64 = num(*line, toks[2], "u value")?;
        if !u.is_finite() {
            return parse_err(*line, "u value is not finite");
        }
        entries.push((*line, i, j, u));
    }
    let lt = entries.iter().map(|e| e.1).max().unwrap() + 1;
    let lp = entries.iter().map(|e| e.2).max().unwrap() + 1;
    let mut values = vec![f64::NAN; lt * lp];
    for &(line, i, j, u) in &entries {
        let slot = &mut values[i * lp + j];
        if !slot.is_nan() {
            return parse_err(line, format!("node ({i}, {j}) given twice"));
        }
        *slot = u;
    }
    if let Some(idx) = values.iter().position(|v| v.is_nan()) {
        let line = entries.last().unwrap().0;
        return parse_err(line, format!("node ({}, {}) missing from a {lt}x{lp} grid", idx / lp, idx % lp));
    }
    if lt < 2 || lp < 3 {
        return parse_err(entries[0].0, format!("a {lt}x{lp} grid is too coarse"));
    }
    let lmax = DEFAULT_LMAX.min(lt - 1).min((lp - 1) / 2);
    SphereField::from_values(Grid::new(lt, lp), lmax, values)
}

fn parse_spectral(rows: &[(usize, Vec<&str>)]) -> Result<SphereField> {
    let mut terms = Vec::with_capacity(rows.len());
    for (line, toks) in rows {
        if toks.len() != 4 {
            return parse_err(*line, format!("spectral rows need 4 columns, found {}", toks.len()));
        }
        let l: usize = num(*line, toks[0], "degree l")?;
        let m: i64 = num(*line, toks[1], "order m")?;
        if m.unsigned_abs() as usize > l {
            return parse_err(*line, format!("order {m} exceeds degree {l}"));
        }
        let re: f64 = num(*line, toks[2], "real part")?;
        let im: f64 = num(*line, toks[3], "imaginary part")?;
        terms.push((l, m, Complex64::new(re, im)));
    }
    let lmax = terms.iter().map(|t| t.0).max().unwrap().max(DEFAULT_LMAX);
    let grid = if lmax <= DEFAULT_LMAX { Grid::default() } else { Grid::new(lmax + 1, 2 * lmax + 2) };
    SphereField::from_terms(grid, lmax, &terms)
}

pub fn parse_profile(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    for (line, toks) in rows(text) {
        if toks.len() != 2 {
            return parse_err(line, format!("profile rows need 2 columns (theta V), found {}", toks.len()));
        }
        let t: f64 = num(line, toks[0], "theta")?;
        let v: f64 = num(line, toks[1], "V")?;
        if !(0.0..=std::f64::consts::PI).contains(&t) || !v.is_finite() {
            return parse_err(line, format!("theta must lie in [0, pi] and V be finite, got ({t}, {v})"));
        }
        out.push((t, v));
    }
    if out.len() < 2 {
        return parse_err(0, "profile needs at least two samples");
    }
    Ok(out)
}

pub fn read_field(path: &Path) -> Result<SphereField> {
    parse_field(&std::fs::read_to_string(path)?)
}

pub fn read_profile(path: &Path) -> Result<Vec<(f64, f64)>> {
    parse_profile(&std::fs::read_to_string(path)?)
}
