//! Poincaré-ball utilities and the ball ↔ hyperboloid conversions.

use crate::error::{Error, Result};
use crate::geometry::{dot, minkowski};

fn check_ball(p: &[f64], what: &str) -> Result<f64> {
    if p.iter().any(|c| !c.is_finite()) {
        return Err(Error::Domain(format!("{what} has non-finite coordinates")));
    }
    let n2 = dot(p, p);
    if n2 >= 1.0 {
        return Err(Error::Domain(format!(
            "{what} lies outside the open unit ball (norm² = {n2})"
        )));
    }
    Ok(n2)
}

fn same_len(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::InvalidArgument(format!(
            "dimension mismatch: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    Ok(())
}

/// `arcosh(1 + 2‖x-y‖² / ((1-‖x‖²)(1-‖y‖²)))`.
pub fn poincare_distance(x: &[f64], y: &[f64]) -> Result<f64> {
    same_len(x, y)?;
    let nx = check_ball(x, "x")?;
    let ny = check_ball(y, "y")?;
    let diff2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    let arg = 1.0 + 2.0 * diff2 / ((1.0 - nx) * (1.0 - ny));
    Ok(arg.max(1.0).acosh())
}

/// The Möbius translation carrying the origin to `y`, applied to `x`.
pub fn poincare_translate(x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    same_len(x, y)?;
    let nx = check_ball(x, "x")?;
    let ny = check_ball(y, "y")?;
    let xy = dot(x, y);
    let denom = 1.0 + 2.0 * xy + ny * nx;
    let cx = 1.0 - ny;
    let cy = 1.0 + 2.0 * xy + nx;
    Ok(x.iter()
        .zip(y)
        .map(|(a, b)| (cx * a + cy * b) / denom)
        .collect())
}

/// `p_k = x_k / (1 + x_0)` for `k >= 1`.
pub fn lorentz_to_poincare(x: &[f64]) -> Result<Vec<f64>> {
    if x.len() < 2 {
        return Err(Error::InvalidArgument(
            "lorentz point needs at least 2 coordinates".into(),
        ));
    }
    let residual = (minkowski(x, x) + 1.0).abs() / (x[0] * x[0]).max(1.0);
    if x[0] <= 0.0 || residual > crate::consts::MEMBERSHIP_TOL {
        return Err(Error::InvalidArgument(
            "point is not on the upper hyperboloid sheet".into(),
        ));
    }
    Ok(x[1..].iter().map(|c| c / (1.0 + x[0])).collect())
}

/// Inverse of [`lorentz_to_poincare`].
pub fn poincare_to_lorentz(p: &[f64]) -> Result<Vec<f64>> {
    let n2 = check_ball(p, "ball point")?;
    let s = 1.0 - n2;
    let mut out = Vec::with_capacity(p.len() + 1);
    out.push((1.0 + n2) / s);
    out.extend(p.iter().map(|c| 2.0 * c / s));
    Ok(out)
}
