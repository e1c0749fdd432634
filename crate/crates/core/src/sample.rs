//! Random points and tangent vectors, for property checks and demos.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::geometry::{norm, GeometryKind, QuasiMetricSpace};

pub fn gaussian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// A random point of `space`. `scale` is the cube half-width for the flat
/// spaces and the tangent standard deviation at the apex for Lorentz.
pub fn point<R: Rng + ?Sized>(space: &QuasiMetricSpace, scale: f64, rng: &mut R) -> Vec<f64> {
    let dim = space.dim();
    match space.kind() {
        GeometryKind::Euclidean | GeometryKind::Polyhedral => {
            let mut p: Vec<f64> = (0..dim).map(|_| rng.random_range(-scale..=scale)).collect();
            space.project_raw(&mut p);
            p
        }
        GeometryKind::Sphere => loop {
            let mut p = gaussian(dim, rng);
            if norm(&p) > 1e-6 && space.project_raw(&mut p) {
                return p;
            }
        },
        GeometryKind::Lorentz => {
            let mut v = gaussian(dim, rng);
            v[0] = 0.0;
            v.iter_mut().for_each(|c| *c *= scale);
            let mut p = space.base_point().into_inner();
            space.exp_map_raw(&mut p, &v);
            p
        }
    }
}

/// A random tangent vector at `x` with unit length under the space's metric.
pub fn unit_tangent<R: Rng + ?Sized>(space: &QuasiMetricSpace, x: &[f64], rng: &mut R) -> Vec<f64> {
    loop {
        let mut v = gaussian(space.dim(), rng);
        space.tangent_project_raw(x, &mut v);
        let n2 = space.tangent_inner(&v, &v);
        if n2 > 1e-6 {
            let n = n2.sqrt();
            v.iter_mut().for_each(|c| *c /= n);
            return v;
        }
    }
}

/// Uniform direction in `R^dim` with norm uniform in `[lo, hi)`.
pub fn ball_point<R: Rng + ?Sized>(dim: usize, lo: f64, hi: f64, rng: &mut R) -> Vec<f64> {
    loop {
        let v = gaussian(dim, rng);
        let n = norm(&v);
        if n > 1e-6 {
            let r = rng.random_range(lo..hi);
            return v.into_iter().map(|c| c / n * r).collect();
        }
    }
}
