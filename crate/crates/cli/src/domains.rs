//! Named domains and file-backed fields/profiles.

use std::path::Path;

use quermass::axisym::AxisProfile;
use quermass::counterexample::{make_bump, BumpDomain};
use quermass::io::{read_field, read_profile};
use quermass::spheregeom::Domain;
use quermass::{Error, Result};

fn bad(spec: &str, why: &str) -> Error {
    Error::Argument(format!("domain {spec:?}: {why}"))
}

fn number<T: std::str::FromStr>(spec: &str, tok: &str) -> Result<T> {
    tok.parse().map_err(|_| bad(spec, &format!("cannot read a number from {tok:?}")))
}

/// `ball`, `ball:<radius>`, `zonal:<l>:<amp>`, `bumps:<eps>:<kappa>`, or
/// `None` when the string is not a named domain.
pub fn named(spec: &str, n: usize) -> Result<Option<Domain>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let d = match parts.as_slice() {
        ["ball"] => Domain::Axial(AxisProfile::ball(n, 0.0)?),
        ["ball", r] => {
            let r: f64 = number(spec, r)?;
            if !(r > 0.0 && r.is_finite()) {
                return Err(bad(spec, "radius must be positive"));
            }
            Domain::Axial(AxisProfile::ball(n, r - 1.0)?)
        }
        ["zonal", l, amp] => Domain::Axial(AxisProfile::zonal(n, number(spec, l)?, number(spec, amp)?)?),
        ["bumps", eps, kappa] => Domain::Bumps(BumpDomain::packed(n, make_bump(number(spec, eps)?, number(spec, kappa)?)?)?),
        [head, ..] if ["ball", "zonal", "bumps"].contains(head) => {
            return Err(bad(spec, "expected ball, ball:<r>, zonal:<l>:<amp> or bumps:<eps>:<kappa>"))
        }
        _ => return Ok(None),
    };
    Ok(Some(d))
}

/// A named domain or a field file (n = 2 only).
pub fn field_domain(spec: &str, n: usize) -> Result<Domain> {
    if let Some(d) = named(spec, n)? {
        return Ok(d);
    }
    if n != 2 {
        return Err(Error::Argument(format!("field files describe S^2; got --n {n}")));
    }
    Ok(Domain::Sphere(read_field(Path::new(spec))?))
}

/// A named domain, a `theta V` file, or an expression in θ.
pub fn profile_domain(spec: &str, n: usize) -> Result<Domain> {
    if let Some(d) = named(spec, n)? {
        return Ok(d);
    }
    let path = Path::new(spec);
    if path.is_file() {
        return Ok(Domain::Axial(AxisProfile::from_samples(n, &read_profile(path)?)?));
    }
    Ok(Domain::Axial(AxisProfile::expr(n, spec)?))
}
