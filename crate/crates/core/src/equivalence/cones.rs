use crate::consts::DEGENERATE_SQ;
use crate::disks::FormalDisk;
use crate::error::{invalid, Error, Result};
use crate::geometry::{dot, ManifoldPoint, QuasiMetricSpace};

/// Cone constant `K` with its derived angles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeParams {
    k: f64,
    theta0: f64,
    r_min: f64,
}

impl ConeParams {
    pub fn new(k: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(invalid(format!("cone constant K must be positive, got {k}")));
        }
        Ok(ConeParams {
            k,
            theta0: (2.0 * k).atan(),
            // Positive root of K x² + x - K = 0, in the cancellation-free form.
            r_min: 2.0 * k / (1.0 + (1.0 + 4.0 * k * k).sqrt()),
        })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// `arctan(2K)`.
    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    /// Smallest apex norm for which the cone is defined.
    pub fn r_min(&self) -> f64 {
        self.r_min
    }

    /// Largest admissible disk radius, `π/2 - θ0`.
    pub fn max_radius(&self) -> f64 {
        std::f64::consts::FRAC_PI_2 - self.theta0
    }
}

impl Default for ConeParams {
    fn default() -> Self {
        ConeParams::new(0.1).expect("0.1 is a valid cone constant")
    }
}

const EDGE_TOL: f64 = 1e-12;

/// Checks `0 < ‖x‖ < 1` and returns `‖x‖²`.
fn ball_norm2(x: &[f64], what: &str) -> Result<f64> {
    if x.iter().any(|c| !c.is_finite()) {
        return Err(Error::Domain(format!("{what} has non-finite coordinates")));
    }
    let n2 = dot(x, x);
    if n2 >= 1.0 {
        return Err(Error::Domain(format!("{what} is outside the open unit ball")));
    }
    if n2 == 0.0 {
        return Err(Error::Domain(format!("{what} is the origin; the angle is undefined")));
    }
    Ok(n2)
}

/// Half-aperture `arcsin(K (1 - ‖x‖²) / ‖x‖)` for an apex of norm `norm`.
pub fn psi(norm: f64, params: &ConeParams) -> Result<f64> {
    if !(norm > 0.0 && norm < 1.0) {
        return Err(Error::Domain(format!("apex norm must lie in (0, 1), got {norm}")));
    }
    let arg = params.k * (1.0 - norm * norm) / norm;
    if arg > 1.0 + EDGE_TOL {
        return Err(Error::Domain(format!(
            "apex norm {norm} is below r_min = {}; the cone is undefined",
            params.r_min
        )));
    }
    Ok(arg.min(1.0).asin())
}

/// `(ψ(x), Ξ(x, y))`: the cone half-aperture at `x` and the angle at `x`
/// between the continuation of the ray `0x` and the geodesic from `x` to `y`.
///
/// Ξ comes from the hyperbolic triangle `0, x, y`: the law of sines gives
/// `sin Ξ`, the law of cosines at `x` picks the branch.
pub fn cone_angles(x: &[f64], y: &[f64], params: &ConeParams) -> Result<(f64, f64)> {
    if x.len() != y.len() {
        return Err(invalid(format!("dimension mismatch: {} vs {}", x.len(), y.len())));
    }
    let nx2 = ball_norm2(x, "x")?;
    let ny2 = ball_norm2(y, "y")?;
    let psi = psi(nx2.sqrt(), params)?;
    let diff2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    if diff2 == 0.0 {
        return Err(Error::Domain("x and y coincide; the angle is undefined".into()));
    }
    let (chx, shx) = ((1.0 + nx2) / (1.0 - nx2), 2.0 * nx2.sqrt() / (1.0 - nx2));
    let (chy, shy) = ((1.0 + ny2) / (1.0 - ny2), 2.0 * ny2.sqrt() / (1.0 - ny2));
    let q = 2.0 * diff2 / ((1.0 - nx2) * (1.0 - ny2));
    let chxy = 1.0 + q;
    let shxy = (q * (2.0 + q)).sqrt();
    let cos_d = (dot(x, y) / (nx2 * ny2).sqrt()).clamp(-1.0, 1.0);
    let sin_d = (1.0 - cos_d * cos_d).max(0.0).sqrt();
    let sin_xi = shy * sin_d / shxy;
    let cos_xi = -(chx * chxy - chy) / (shx * shxy);
    Ok((psi, sin_xi.atan2(cos_xi)))
}

/// Disk on the unit sphere for a cone apex: center `x/‖x‖`, radius
/// `arcsin((1 + ‖x‖²)/(2‖x‖) · sin θ0) - θ0`.
pub fn phi_hyp(x: &[f64], params: &ConeParams) -> Result<FormalDisk> {
    if x.len() < 2 {
        return Err(invalid("phi_hyp needs at least 2 coordinates"));
    }
    let n2 = ball_norm2(x, "x")?;
    let n = n2.sqrt();
    let arg = (1.0 + n2) / (2.0 * n) * params.theta0.sin();
    if arg > 1.0 + EDGE_TOL {
        return Err(Error::Domain(format!(
            "norm {n} is below r_min = {}; the cone is undefined",
            params.r_min
        )));
    }
    let center = x.iter().map(|c| c / n).collect();
    Ok(FormalDisk::new(
        ManifoldPoint::from_vec_unchecked(center),
        arg.min(1.0).asin() - params.theta0,
    ))
}

fn check_radius(r: f64, params: &ConeParams) -> Result<()> {
    if !(r > 0.0 && r <= params.max_radius() + EDGE_TOL) {
        return Err(Error::Domain(format!(
            "radius {r} is outside (0, π/2 - θ0] = (0, {}]",
            params.max_radius()
        )));
    }
    Ok(())
}

fn s_of(r: f64, params: &ConeParams) -> f64 {
    (r + params.theta0).sin() / params.theta0.sin()
}

/// The coefficient `q(d, r_i, r_j)` of the closed-form cone energy.
pub fn hyp_cone_q(d: f64, r_i: f64, r_j: f64, params: &ConeParams) -> Result<f64> {
    check_radius(r_i, params)?;
    check_radius(r_j, params)?;
    let t = params.theta0;
    let (si, sj) = (s_of(r_i, params), s_of(r_j, params));
    let half = (d / 2.0).sin();
    // s_i² + s_j² - 2 s_i s_j cos d - sin² d, rearranged to avoid cancellation at d = 0.
    let den = (si - sj).powi(2) + 4.0 * si * sj * half * half - d.sin().powi(2);
    let num = r_i.sin() * (r_i + 2.0 * t).sin();
    let q = ((r_i + r_j - d) / 2.0 + t).cos() / (t.cos() * t.sin()) * (num / den).sqrt();
    if !q.is_finite() || den <= 0.0 {
        return Err(Error::NumericDegeneracy(format!(
            "q is undefined at d = {d}, r_i = {r_i}, r_j = {r_j} (denominator {den:e})"
        )));
    }
    Ok(q)
}

/// `q(d, r_i, r_j) · 2 sin(l/2)` with `l = d - r_i + r_j`; equals `sin(Ξ - ψ)`.
pub fn hyp_cone_sine(d: f64, r_i: f64, r_j: f64, params: &ConeParams) -> Result<f64> {
    let l = d - r_i + r_j;
    Ok(hyp_cone_q(d, r_i, r_j, params)? * 2.0 * (l / 2.0).sin())
}

/// `cos(Ξ - ψ)` in disk variables, via `coth d_x = s_i` and `coth d_y = s_j`.
fn hyp_cone_cosine(d: f64, r_i: f64, r_j: f64, params: &ConeParams) -> f64 {
    let (si, sj) = (s_of(r_i, params), s_of(r_j, params));
    let shx = 1.0 / (si * si - 1.0).sqrt();
    let chx = si * shx;
    let shy = 1.0 / (sj * sj - 1.0).sqrt();
    let chy = sj * shy;
    let chxy = (chx * chy - shx * shy * d.cos()).max(1.0);
    let shxy = (chxy * chxy - 1.0).sqrt();
    let cos_xi = -(chx * chxy - chy) / (shx * shxy);
    let sin_xi = shy * d.sin().abs() / shxy;
    let sin_psi = (params.theta0.tan() * (si * si - 1.0).sqrt()).min(1.0);
    let cos_psi = (1.0 - sin_psi * sin_psi).sqrt();
    cos_xi * cos_psi + sin_xi * sin_psi
}

/// `h+(Ξ - ψ)` from the center distance `d` and radii of the two disks.
///
/// The sine of `Ξ - ψ` is `q · 2 sin(l/2)`; the cosine fixes the branch, so the
/// result stays exact when `Ξ - ψ > π/2`, where a bare arcsin would fold back.
pub fn energy_hyp_from_parts(d: f64, r_i: f64, r_j: f64, params: &ConeParams) -> Result<f64> {
    let sine = hyp_cone_sine(d, r_i, r_j, params)?;
    let cosine = hyp_cone_cosine(d, r_i, r_j, params);
    if !cosine.is_finite() {
        return Err(Error::NumericDegeneracy(format!(
            "cos(Ξ - ψ) is undefined at d = {d}, r_i = {r_i}, r_j = {r_j}"
        )));
    }
    Ok(sine.atan2(cosine).max(0.0))
}

/// `h+(arcsin(q · 2 sin(l/2)))` with the argument clamped to `[-1, 1]`.
/// Only agrees with [`energy_hyp_from_parts`] while `Ξ - ψ <= π/2`.
pub fn energy_hyp_arcsin(d: f64, r_i: f64, r_j: f64, params: &ConeParams) -> Result<f64> {
    Ok(hyp_cone_sine(d, r_i, r_j, params)?.clamp(-1.0, 1.0).asin().max(0.0))
}

/// First-order form `q(r_i - r_j, r_i, r_j) · h+(l)` around `d = r_i - r_j`.
pub fn energy_hyp_linearized(d: f64, r_i: f64, r_j: f64, params: &ConeParams) -> Result<f64> {
    Ok(hyp_cone_q(r_i - r_j, r_i, r_j, params)? * (d - r_i + r_j).max(0.0))
}

/// Cone energy between two disks on the unit sphere, `a` being the ancestor.
pub fn energy_hyp_closed_form(a: &FormalDisk, b: &FormalDisk, params: &ConeParams) -> Result<f64> {
    let (x, y) = (a.center.coords(), b.center.coords());
    if x.len() != y.len() {
        return Err(invalid(format!("dimension mismatch: {} vs {}", x.len(), y.len())));
    }
    let sphere = QuasiMetricSpace::sphere(x.len())?;
    let d = sphere.distance(&a.center, &b.center)?;
    energy_hyp_from_parts(d, a.radius, b.radius, params)
}

/// `sin(ψ - Ξ)` for Euclidean entailment cones in disk variables, with
/// `σ = sin(r + ξ0)` and `ξ0 = arcsin K`.
pub fn euclidean_cone_angle_diff(r_x: f64, r_y: f64, d: f64, k: f64) -> Result<f64> {
    if !(k > 0.0 && k < 1.0) {
        return Err(invalid(format!("K must lie in (0, 1), got {k}")));
    }
    let xi0 = k.asin();
    let (sx, sy) = ((r_x + xi0).sin(), (r_y + xi0).sin());
    let half = (d / 2.0).sin();
    let den2 = (sx - sy).powi(2) + 4.0 * sx * sy * half * half;
    if !(den2 > DEGENERATE_SQ) {
        return Err(Error::NumericDegeneracy(format!(
            "vanishing denominator at r_x = {r_x}, r_y = {r_y}, D = {d}"
        )));
    }
    Ok(2.0 * sx * ((r_x - r_y - d) / 2.0).sin() * ((r_x + r_y - d) / 2.0 + xi0).cos() / den2.sqrt())
}
