//! Randomised numerical property checks for the geometry, disk, model and
//! equivalence layers.
//!
//! Each group runs with its own seeded generator, so results do not depend on
//! the worker count.

use std::f64::consts::PI;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::disks::{contains, protrusion, FormalDisk};
use crate::equivalence::{
    cone_angles, energy_hyp_closed_form, energy_hyp_from_parts, energy_order, euclidean_cone_angle_diff,
    hinge, hyp_cone_q, order_relation, phi_hyp, ConeParams, OrderEmbeddingMap,
};
use crate::error::{invalid, Result};
use crate::geometry::poincare::{lorentz_to_poincare, poincare_distance, poincare_to_lorentz, poincare_translate};
use crate::geometry::{dot, GeometryKind, ManifoldPoint, QuasiMetricSpace, Wrt};
use crate::model::{energy, loss_slope, pair_loss, rsgd_step, EmbeddingTable, TrainConfig};
use crate::par::map_chunked;
use crate::sample;

/// Deliberate defects used to check that the suite catches them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Negates every analytic distance gradient seen by the checks.
    GradientSign,
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub trials: usize,
    pub seed: u64,
    pub k: f64,
    pub threads: usize,
    pub fault: Option<Fault>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            trials: 1000,
            seed: 0,
            k: 0.1,
            threads: 1,
            fault: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyCheck {
    pub name: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl PropertyCheck {
    fn new(name: impl Into<String>, max_residual: f64, tolerance: f64) -> Self {
        PropertyCheck {
            name: name.into(),
            max_residual,
            tolerance,
            passed: max_residual.is_finite() && max_residual <= tolerance,
        }
    }

    /// A check whose residual is a violation count.
    fn count(name: impl Into<String>, violations: usize) -> Self {
        Self::new(name, violations as f64, 0.0)
    }
}

impl fmt::Display for PropertyCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<44} max_residual={:.3e} tolerance={:.1e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.max_residual,
            self.tolerance
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<PropertyCheck>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &PropertyCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

struct Ctx {
    trials: usize,
    cone: ConeParams,
    fault: Option<Fault>,
}

impl Ctx {
    fn grad(&self, space: &QuasiMetricSpace, x: &[f64], y: &[f64], wrt: Wrt) -> Option<Vec<f64>> {
        let mut out = vec![0.0; space.dim()];
        if !space.distance_grad_raw(x, y, wrt, &mut out) {
            return None;
        }
        if self.fault == Some(Fault::GradientSign) {
            out.iter_mut().for_each(|c| *c = -*c);
        }
        Some(out)
    }
}

type Group = fn(&Ctx, &mut ChaCha8Rng) -> Vec<PropertyCheck>;

const GROUPS: &[Group] = &[
    axioms,
    distance_gradients,
    geodesics,
    projections,
    poincare_model,
    disk_order,
    lower_cones,
    hyperbolic_translation,
    loss_gradients,
    descent_and_gauge,
    manifold_preservation,
    order_embeddings,
    hyperbolic_cones,
    euclidean_cones,
];

/// Runs every property group with `trials` random cases each.
pub fn run(opts: &VerifyOptions) -> Result<VerifyReport> {
    if opts.trials == 0 {
        return Err(invalid("trials must be >= 1"));
    }
    let ctx = Ctx {
        trials: opts.trials,
        cone: ConeParams::new(opts.k)?,
        fault: opts.fault,
    };
    let jobs: Vec<(usize, Group)> = GROUPS.iter().copied().enumerate().collect();
    let results = map_chunked(&jobs, opts.threads, |&(idx, group)| {
        let seed = opts.seed ^ (idx as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        group(&ctx, &mut ChaCha8Rng::seed_from_u64(seed))
    });
    Ok(VerifyReport {
        checks: results.into_iter().flatten().collect(),
    })
}

struct Labeled {
    label: &'static str,
    space: QuasiMetricSpace,
}

fn asymmetric_polyhedral() -> QuasiMetricSpace {
    QuasiMetricSpace::polyhedral(vec![
        vec![2.0, 0.0],
        vec![-1.0, 0.0],
        vec![0.0, 1.0],
        vec![0.0, -1.0],
    ])
    .expect("generators span the plane")
}

fn spaces() -> Vec<Labeled> {
    vec![
        Labeled {
            label: "euclidean",
            space: QuasiMetricSpace::euclidean(3).unwrap(),
        },
        Labeled {
            label: "polyhedral",
            space: QuasiMetricSpace::polyhedral_simplex(3).unwrap(),
        },
        Labeled {
            label: "polyhedral-asym",
            space: asymmetric_polyhedral(),
        },
        Labeled {
            label: "sphere",
            space: QuasiMetricSpace::sphere(3).unwrap(),
        },
        Labeled {
            label: "lorentz",
            space: QuasiMetricSpace::lorentz(3).unwrap(),
        },
    ]
}

fn point(space: &QuasiMetricSpace, rng: &mut ChaCha8Rng) -> Vec<f64> {
    sample::point(space, 1.0, rng)
}

fn mp(coords: Vec<f64>) -> ManifoldPoint {
    ManifoldPoint::from_vec_unchecked(coords)
}

fn disk(space: &QuasiMetricSpace, rng: &mut ChaCha8Rng) -> FormalDisk {
    FormalDisk::new(mp(point(space, rng)), rng.random_range(-1.0..1.0))
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn axioms(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Vec<PropertyCheck> {
    let mut out = Vec::new();
    for s in spaces() {
        let sp = &s.space;
        let (mut neg, mut ident, mut tri, mut distinct) = (0.0f64, 0.0f64, 0.0f64, 0usize);
        for _ in 0..ctx.trials {
            let (x, y, z) = (point(sp, rng), point(sp, rng), point(sp, rng));
            let dxy = sp.distance_raw(&x, &y);
            neg = neg.max(-dxy);
            ident = ident.max(sp.distance_raw(&x, &x));
            if x != y && dxy <= 0.0 {
                distinct += 1;
            }
            tri = tri.max(dxy - sp.distance_raw(&x, &z) - sp.distance_raw(&z, &y));
        }
        out.push(PropertyCheck::new(format!("nonnegativity[{}]", s.label), neg, 0.0));
        out.push(PropertyCheck::new(format!("identity[{}]", s.label), ident, 0.0));
        out.push(PropertyCheck::count(format!("distinct_points_positive[{}]", s.label), distinct));
        out.push(PropertyCheck::new(format!("subadditivity[{}]", s.label), tri, 1e-9));
    }
    let sp = asymmetric_polyhedral();
    let mut gap = 0.0f64;
    for _ in 0..ctx.trials {
        let (x, y) = (point(&sp, rng), point(&sp, rng));
        gap = gap.max((sp.distance_raw(&x, &y) - sp.distance_raw(&y, &x)).abs());
    }
    out.push(PropertyCheck::count(
        "asymmetry_witness[polyhedral-asym]",
        usize::from(gap <= 1e-6),
    ));
    for s in spaces().into_iter().filter(|s| s.space.is_symmetric()) {
        let mut worst = 0.0f64;
        for _ in 0..ctx.trials {
            let (x, y) = (point(&s.space, rng), point(&s.space, rng));
            worst = worst.max((s.space.distance_raw(&x, &y) - s.space.distance_raw(&y, &x)).abs());
        }
        out.push(PropertyCheck::new(format!("symmetry[{}]", s.label), worst, 0.0));
    }
    out
}

/// Skips pairs where the distance is not smooth (too close, or antipodal).
fn smooth_pair(sp: &QuasiMetricSpace, x: &[f64], y: &[f64]) -> bool {
    let d = sp.distance_raw(x, y);
    d > 1e-3 && !(sp.kind() == GeometryKind::Sphere && d > PI - 1e-3)
}

fn moved(sp: &QuasiMetricSpace, x: &[f64], v: &[f64], t: f64) -> Vec<f64> {
    let mut p = x.to_vec();
    let step: Vec<f64> = v.iter().map(|c| c * t).collect();
    sp.exp_map_raw(&mut p, &step);
    p
}

fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(1e-3)
}

const FD_STEP: f64 = 1e-5;

fn distance_gradients(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Vec<PropertyCheck> {
    let mut out = Vec::new();
    for s in spaces() {
        let sp = &s.space;
        let mut worst = 0.0f64;
        let mut cases = 0;
        while cases < ctx.trials {
            let (x, y) = (point(sp, rng), point(sp, rng));
            if !smooth_pair(sp, &x, &y) {
                continue;
            }
            cases += 1;
            for wrt in [Wrt::First, Wrt::Second] {
                let g = ctx.grad(sp, &x, &y, wrt).expect("smooth pair");
                let at = if wrt == Wrt::First { &x } else { &y };
                for _ in 0..5 {
                    let v = sample::unit_tangent(sp, at, rng);
                    let f = |t: f64| {
                        let p = moved(sp, at, &v, t);
                        match wrt {
                            Wrt::First => sp.distance_raw(&p, &y),
                            Wrt::Second => sp.distance_raw(&x, &p),
                        }
                    };
                    let numeric = (f(FD_STEP) - f(-FD_STEP)) / (2.0 * FD_STEP);
                    worst = worst.max(relative_error(sp.tangent_inner(&g, &v), numeric));
                }
            }
        }
        out.push(PropertyCheck::new(
            format!("distance_grad_finite_difference[{}]", s.label),
            worst,
            1e-4,
        ));
    }
    out
}

fn geodesics(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Vec<PropertyCheck> {
    let mut out = Vec::new();
    for s in spaces().into_iter().filter(|s| s.space.is_symmetric()) {
        let sp = &s.space;
        let (mut unit_speed, mut inverse) = (0.0f64, 0.0f64);
        let mut cases = 0;
        while cases < ctx.trials {
            let (x, y) = (point(sp, rng), point(sp, rng));
            let v = sample::unit_tangent(sp, &x, rng);
            let t = rng.random_range(1e-3..=0.5);
            unit_speed = unit_speed.max((sp.distance_raw(&x, &moved(sp, &x, &v, t)) - t).abs());
            if !smooth_pair(sp, &x, &y) {
                continue;
            }
            cases += 1;
            let d = sp.distance_raw(&x, &y);
            let mut g = vec![0.0; sp.dim()];
            sp.distance_grad_raw(&x, &y, Wrt::First, &mut g);
            let reached = moved(sp, &x, &g, -d);
            let scale = y.iter().fold(1.0f64, |m, c| m.max(c.abs()));
            inverse = inverse.max(max_abs_diff(&reached, &y) / scale);
        }
        out.push(PropertyCheck::new(format!("geodesic_unit_speed[{}]", s.label), unit_speed, 1e-6));
        out.push(PropertyCheck::new(format!("geodesic_gradient_identity[{}]", s.label), inverse, 1e-6));
    }
    out
}

fn projections(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Vec<PropertyCheck> {
    let mut out = Vec::new();
    for s in spaces() {
        let sp = &s.space;
        let (mut idem, mut member, mut tan_idem, mut tangency) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for _ in 0..ctx.trials {
            let p: Vec<f64> = sample::gaussian(sp.dim(), rng).iter().map(|c| 2.0 * c).collect();
            let Ok(once) = sp.project_to_manifold(&p) else { continue };
            let twice = sp.project_to_manifold(once.coords()).expect("projected point");
            idem = idem.max(max_abs_diff(once.coords(), twice.coords()));
            member = member.max(sp.membership_residual(once.coords()));

            let x = point(sp, rng);
            let g = sample::gaussian(sp.dim(), rng);
            let mut t1 = g.clone();
            sp.tangent_project_raw(&x, &mut t1);
            let mut t2 = t1.clone();
            sp.tangent_project_raw(&x, &mut t2);
            let scale = t1.iter().fold(1.0f64, |m, c| m.max(c.abs()));
            tan_idem = tan_idem.max(max_abs_diff(&t1, &t2) / scale);
            let inner = match sp.kind() {
                GeometryKind::Sphere => dot(&x, &t1).abs(),
                GeometryKind::Lorentz => crate::geometry::minkowski(&x, &t1).abs() / (dot(&x, &x).sqrt() * scale),
                _ => sp.membership_residual(&t1),
            };
            tangency = tangency.max(inner);
        }
        out.push(PropertyCheck::new(format!("projection_idempotent[{}]", s.label), idem, 0.0));
        out.push(PropertyCheck::new(format!("projection_membership[{}]", s.label), member, 1e-9));
        out.push(PropertyCheck::new(format!("tangent_projection_idempotent[{}]", s.label), tan_idem, 1e-12));
        out.push(PropertyCheck::new(format!("tangent_projection_tangency[{}]", s.label), tangency, 1e-9));
    }
    out
}

fn poincare_model(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Vec<PropertyCheck> {
    let (mut sym, mut iso, mut round, mut cross) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let lorentz = QuasiMetricSpace::lorentz(3).unwrap();
    for _ in 0..ctx.trials {
        let a = sample::ball_point(3, 0.0, 0.9, rng);
        let b = sample::ball_point(3, 0.0, 0.9, rng);
        let y = sample::ball_point(3, 0.0, 0.5, rng);
        let dab = poincare_distance(&a, &b).unwrap();
        sym = sym.max((dab - poincare_distance(&b, &a).unwrap()).abs());
        let ta = poincare_translate(&a, &y).unwrap();
        let tb = poincare_translate(&b, &y).unwrap();
        iso = iso.max((poincare_distance(&ta, &tb).unwrap() - dab).abs());
        let la = poincare_to_lorentz(&a).unwrap();
        let lb = poincare_to_lorentz(&b).unwrap();
        round = round.max(max_abs_diff(&lorentz_to_poincare(&la).unwrap(), &a));
        cross = cross.max((lorentz.distance_raw(&la, &lb) - dab).abs());
    }
    vec![
        PropertyCheck::new("poincare_symmetry", sym, 1e-12),
        PropertyCheck::new("poincare_translation_isometry", iso, 1e-9),
        PropertyCheck::new("lorentz_poincare_roundtrip", round, 1e-12),
        PropertyCheck::new("lorentz_poincare_distance", cross, 1e-9),
    ]
}

/// A disk inside `outer`: a nearby center and a radius leaving positive slack.
fn inner_disk(sp: &QuasiMetricSpace, outer: &FormalDisk, rng: &mut ChaCha8Rng) -> FormalDisk {
    let v = sample::unit_tangent(sp, outer.center.coords(), rng);
    let c = moved(sp, outer.center.coords(), &v, rng.random_range(0.0..0.5));
    let d = sp.distance_raw(outer.center.coords(), &c);
    FormalDisk::new(mp(c), outer.radius - d - rng.random_range(1e-6..0.2))
}

fn disk_order(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Vec<PropertyCheck> {
    let mut out = Vec::new();
    for s in spaces() {
        let sp = &s.space;
        let (mut refl, mut trans, mut gauge_flip, mut gauge_val, mut rev) = (0, 0, 0, 0.0f64, 0);
        let mut chains = 0;
        for _ in 0..ctx.trials {
            let a = disk(sp, rng);
            refl += usize::from(!contains(sp, &a, &a).unwrap());
            let b = inner_disk(sp, &a, rng);
            let c = inner_disk(sp, &b, rng);
            if contains(sp, &a, &b).unwrap() && contains(sp, &b, &c).unwrap() {
                chains += 1;
                trans += usize::from(!contains(sp, &a, &c).unwrap());
            }
            let (p, q) = (disk(sp, rng), disk(sp, rng));
            let t = rng.random_range(-5.0..5.0);
            let l = protrusion(sp, &p, &q).unwrap();
            let ls = protrusion(sp, &p.shifted(t), &q.shifted(t)).unwrap();
            gauge_val = gauge_val.max((l - ls).abs());
            gauge_flip += usize::from((l <= 0.0) != (ls <= 0.0) && l.abs() > 1e-12 * (1.0 + t.abs()));
            if sp.is_symmetric() {
                let fwd = contains(sp, &p, &q).unwrap();
                let back = contains(sp, &q.negated(), &p.negated()).unwrap();
                rev += usize::from(fwd != back);
            }
        }
        out.push(PropertyCheck::count(format!("reflexivity[{}]", s.label), refl));
        out.push(PropertyCheck::count(
            format!("transitivity[{}]", s.label),
            trans + usize::from(chains == 0),
        ));
        out.push(PropertyCheck::count(format!("radius_shift_verdict[{}]", s.label), gauge_flip));
        out.push(PropertyCheck::new(format!("radius_shift_value[{}]", s.label), gauge_val, 1e-12 * 6.0));
        if sp.is_symmetric() {
            out.push(PropertyCheck::count(format!("reversibility[{}]", s.label), rev));
        }
    }
    // The reversal law needs symmetry: exhibit a pair that breaks it.
    let sp = asymmetric_polyhedral();
    let a = FormalDisk::new(mp(vec![1.0, 0.0]), 1.5);
    let b = FormalDisk::new(mp(vec![0.0, 0.0]), 0.0);
    let broken = contains(&sp, &a, &b).unwrap() != contains(&sp, &b.negated(), &a.negated()).unwrap();
    out.push(PropertyCheck::count("reversibility_witness[polyhedral-asym]", usize::from(!broken)));
    out
}

fn lower_cones(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Vec<PropertyCheck> {
    let mut out = Vec::new();
    let sets = ctx.trials.div_ceil(200).max(1);
    for s in spaces() {
        let sp = &s.space;
        let mut bad = 0;
        for _ in 0..sets {
            let disks: Vec<FormalDisk> = (0..50)
                .map(|_| FormalDisk::new(mp(sample::point(sp, 0.5, rng)), rng.random_range(-0.5..1.0)))
                .collect();
            let rel: Vec<Vec<bool>> = disks
                .iter()
                .map(|a| disks.iter().map(|b| contains(sp, a, b).unwrap()).collect())
                .collect();
            for a in 0..disks.len() {
                for b in 0..disks.len() {
                    let subset = (0..disks.len()).all(|c| !rel[b][c] || rel[a][c]);
                    bad += usize::from(rel[a][b] != subset);
                }
            }
        }
        out.push(PropertyCheck::count(format!("lower_cone_characterization[{}]", s.label), bad));
    }
    out
}

fn hyperbolic_translation(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Vec<PropertyCheck> {
    let sp = QuasiMetricSpace::lorentz(2).unwrap();
    let (mut dist, mut flips) = (0.0f64, 0);
    let groups = ctx.trials.div_ceil(50).max(1);
    for _ in 0..groups {
        let disks: Vec<FormalDisk> = (0..10)
            .map(|_| FormalDisk::new(mp(sample::point(&sp, 0.5, rng)), rng.random_range(-1.0..1.0)))
            .collect();
        let shift = sample::ball_point(2, 0.0, 0.3, rng);
        let moved: Vec<FormalDisk> = disks
            .iter()
            .map(|d| {
                let p = lorentz_to_poincare(d.center.coords()).unwrap();
                let t = poincare_translate(&p, &shift).unwrap();
                FormalDisk::new(mp(poincare_to_lorentz(&t).unwrap()), d.radius)
            })
            .collect();
        for a in 0..disks.len() {
            for b in 0..disks.len() {
                let l0 = protrusion(&sp, &disks[a], &disks[b]).unwrap();
                let l1 = protrusion(&sp, &moved[a], &moved[b]).unwrap();
                dist = dist.max((l0 - l1).abs());
                flips += usize::from((l0 <= 0.0) != (l1 <= 0.0) && l0.abs() > 1e-9);
            }
        }
    }
    vec![
        PropertyCheck::new("hyperbolic_translation_protrusion", dist, 1e-9),
        PropertyCheck::count("hyperbolic_translation_verdict", flips),
    ]
}

fn random_table(sp: &QuasiMetricSpace, n: usize, rng: &mut ChaCha8Rng) -> EmbeddingTable {
    let disks = (0..n).map(|_| disk(sp, rng)).collect();
    EmbeddingTable::new(sp.clone(), (0..n).map(|i| i.to_string()).collect(), disks).unwrap()
}

/// A pair `(0, 1)` of a two-node table with a smooth, non-zero loss slope.
fn active_pair(
    sp: &QuasiMetricSpace,
    margin: f64,
    rng: &mut ChaCha8Rng,
) -> (EmbeddingTable, bool, f64) {
    loop {
        let t = random_table(sp, 2, rng);
        let positive = rng.random_bool(0.5);
        let e = t.energy_raw(0, 1);
        let g = loss_slope(e, positive, margin);
        if g != 0.0 && e.abs() > 1e-3 && (margin - e).abs() > 1e-3 && smooth_pair(sp, t.center(1), t.center(0)) {
            return (t, positive, g);
        }
    }
}

fn loss_gradients(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Vec<PropertyCheck> {
    let cfg = TrainConfig::default();
    let mut out = Vec::new();
    for s in spaces() {
        let sp = &s.space;
        let (mut centers, mut radii) = (0.0f64, 0.0f64);
        for _ in 0..ctx.trials {
            let (t, positive, g) = active_pair(sp, cfg.margin, rng);
            let (xi, xj) = (t.center(0).to_vec(), t.center(1).to_vec());
            let (ri, rj) = (t.radius(0), t.radius(1));
            let loss = |xi: &[f64], xj: &[f64], ri: f64, rj: f64| {
                pair_loss(sp.distance_raw(xj, xi) - rj + ri, positive, cfg.margin)
            };
            let grad_j = ctx.grad(sp, &xj, &xi, Wrt::First).expect("smooth pair");
            let grad_i = ctx.grad(sp, &xj, &xi, Wrt::Second).expect("smooth pair");
            // Directional derivative along each update direction -g·grad.
            for (grad, which_j) in [(&grad_j, true), (&grad_i, false)] {
                let u: Vec<f64> = grad.iter().map(|c| -g * c).collect();
                let analytic = g * sp.tangent_inner(grad, &u);
                let f = |h: f64| {
                    if which_j {
                        loss(&xi, &moved(sp, &xj, &u, h), ri, rj)
                    } else {
                        loss(&moved(sp, &xi, &u, h), &xj, ri, rj)
                    }
                };
                let numeric = (f(FD_STEP) - f(-FD_STEP)) / (2.0 * FD_STEP);
                centers = centers.max(relative_error(analytic, numeric));
            }
            let num_rj = (loss(&xi, &xj, ri, rj + FD_STEP) - loss(&xi, &xj, ri, rj - FD_STEP)) / (2.0 * FD_STEP);
            let num_ri = (loss(&xi, &xj, ri + FD_STEP, rj) - loss(&xi, &xj, ri - FD_STEP, rj)) / (2.0 * FD_STEP);
            radii = radii.max(relative_error(-g, num_rj)).max(relative_error(g, num_ri));
        }
        out.push(PropertyCheck::new(
            format!("loss_grad_finite_difference_centers[{}]", s.label),
            centers,
            1e-4,
        ));
        out.push(PropertyCheck::new(
            format!("loss_grad_finite_difference_radii[{}]", s.label),
            radii,
            1e-4,
        ));
    }
    out
}

/// Gap between the best and second-best generator scores.
fn polyhedral_margin(sp: &QuasiMetricSpace, x: &[f64], y: &[f64]) -> f64 {
    let mut scores: Vec<f64> = sp
        .generators()
        .iter()
        .map(|w| w.iter().zip(x.iter().zip(y)).map(|(w, (a, b))| w * (a - b)).sum())
        .collect();
    scores.sort_by(|a, b| b.total_cmp(a));
    scores.get(1).map_or(f64::INFINITY, |s| scores[0] - s)
}

fn descent_and_gauge(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Vec<PropertyCheck> {
    let cfg = TrainConfig {
        learning_rate: 1e-3,
        ..Default::default()
    };
    let mut out = Vec::new();
    for s in spaces() {
        let sp = &s.space;
        let mut ascents = 0;
        let mut cases = 0;
        while cases < ctx.trials {
            let (mut t, positive, _) = active_pair(sp, cfg.margin, rng);
            // The subgradient is only a descent direction away from generator ties.
            if sp.kind() == GeometryKind::Polyhedral && polyhedral_margin(sp, t.center(1), t.center(0)) < 0.05 {
                continue;
            }
            cases += 1;
            let before = rsgd_step(&mut t, (0, 1), positive, &cfg).unwrap();
            let after = pair_loss(energy(&t, 0, 1).unwrap(), positive, cfg.margin);
            ascents += usize::from(after >= before);
        }
        out.push(PropertyCheck::count(format!("rsgd_descent[{}]", s.label), ascents));

        let mut t = random_table(sp, 20, rng);
        let before: Vec<f64> = (0..400).map(|k| t.energy_raw(k / 20, k % 20)).collect();
        t.shift_radii(rng.random_range(-3.0..3.0));
        let after: Vec<f64> = (0..400).map(|k| t.energy_raw(k / 20, k % 20)).collect();
        out.push(PropertyCheck::new(
            format!("energy_radius_shift[{}]", s.label),
            max_abs_diff(&before, &after),
            1e-12 * 8.0,
        ));
    }
    out
}

fn manifold_preservation(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Vec<PropertyCheck> {
    let cfg = TrainConfig {
        learning_rate: 0.05,
        ..Default::default()
    };
    let mut out = Vec::new();
    for s in spaces().into_iter().filter(|s| matches!(s.space.kind(), GeometryKind::Sphere | GeometryKind::Lorentz)) {
        let mut t = random_table(&s.space, 20, rng);
        for _ in 0..ctx.trials * 10 {
            let i = rng.random_range(0..20);
            let j = rng.random_range(0..20);
            rsgd_step(&mut t, (i, j), rng.random_bool(0.5), &cfg).unwrap();
        }
        let worst = (0..20).map(|k| s.space.membership_residual(t.center(k))).fold(0.0, f64::max);
        out.push(PropertyCheck::new(format!("manifold_preservation[{}]", s.label), worst, 1e-9));
    }
    out
}

fn orthant_point(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(0.1..2.0)).collect()
}

fn order_embeddings(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Vec<PropertyCheck> {
    let n = 4;
    let map = OrderEmbeddingMap::new(n, 1.0).unwrap();
    let sp = map.space();
    let (mut iso, mut ident, mut bound, mut eq_cond) = (0, 0.0f64, 0.0f64, 0);
    for k in 0..ctx.trials {
        let x = orthant_point(n, rng);
        // Every other pair is comparable by construction.
        let y: Vec<f64> = if k % 2 == 0 {
            x.iter().map(|c| c + rng.random_range(0.0..0.5)).collect()
        } else {
            orthant_point(n, rng)
        };
        let (px, py) = (map.phi_ord(&x).unwrap(), map.phi_ord(&y).unwrap());
        iso += usize::from(order_relation(&x, &y).unwrap() != contains(sp, &px, &py).unwrap());
        let l = protrusion(sp, &px, &py).unwrap();
        let direct = x.iter().zip(&y).map(|(a, b)| a - b).fold(f64::NEG_INFINITY, f64::max);
        ident = ident.max((direct - l).abs());
        let e = energy_order(&x, &y).unwrap();
        bound = bound.max(hinge(l).powi(2) - e);

        // Equality iff at most one coordinate of x - y is positive.
        let positives = rng.random_range(0..=n);
        let mut a = orthant_point(n, rng);
        let b = a.clone();
        for (idx, c) in a.iter_mut().enumerate() {
            *c += if idx < positives { rng.random_range(0.1..1.0) } else { -rng.random_range(0.0..0.05) };
        }
        let a = a.into_iter().map(|c| c.max(1e-3)).collect::<Vec<_>>();
        let la = protrusion(sp, &map.phi_ord(&a).unwrap(), &map.phi_ord(&b).unwrap()).unwrap();
        let gap = energy_order(&a, &b).unwrap() - hinge(la).powi(2);
        let equal = gap.abs() <= 1e-9;
        eq_cond += usize::from(equal != (positives <= 1));
    }
    vec![
        PropertyCheck::count("order_isomorphism", iso),
        PropertyCheck::new("order_protrusion_identity", ident, 1e-9),
        PropertyCheck::new("order_energy_lower_bound", bound.max(0.0), 1e-12),
        PropertyCheck::count("order_energy_equality_condition", eq_cond),
    ]
}

fn cone_pair(dim: usize, params: &ConeParams, rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>) {
    let lo = params.r_min() + 0.01;
    loop {
        let x = sample::ball_point(dim, lo, 0.95, rng);
        let y = sample::ball_point(dim, lo, 0.95, rng);
        if max_abs_diff(&x, &y) > 1e-9 {
            return (x, y);
        }
    }
}

fn hyperbolic_cones(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Vec<PropertyCheck> {
    let p = &ctx.cone;
    let (mut iso, mut agree, mut sign, mut rot, mut lin) = (0, 0.0f64, 0, 0.0f64, 0.0f64);
    for k in 0..ctx.trials {
        let dim = 2 + k % 2;
        let sphere = QuasiMetricSpace::sphere(dim).unwrap();
        let (x, y) = cone_pair(dim, p, rng);
        let (psi, xi) = cone_angles(&x, &y, p).unwrap();
        let (a, b) = (phi_hyp(&x, p).unwrap(), phi_hyp(&y, p).unwrap());
        let l = protrusion(&sphere, &a, &b).unwrap();
        if (psi - xi).abs() > 1e-12 {
            iso += usize::from((psi >= xi) != contains(&sphere, &a, &b).unwrap());
        }
        match energy_hyp_closed_form(&a, &b, p) {
            Ok(e) => {
                agree = agree.max((e - hinge(xi - psi)).abs());
                if l.abs() > 1e-12 {
                    sign += usize::from((e > 0.0) != (l > 0.0));
                }
            }
            Err(_) => agree = f64::INFINITY,
        }

        // Rotating the apex rotates the disk.
        let mut rx = x.clone();
        let mut reflections = Vec::new();
        for _ in 0..3 {
            let v = sample::gaussian(dim, rng);
            let vv = dot(&v, &v);
            let c = 2.0 * dot(&v, &rx) / vv;
            rx.iter_mut().zip(&v).for_each(|(r, vi)| *r -= c * vi);
            reflections.push((v, vv));
        }
        let mut rc = a.center.coords().to_vec();
        for (v, vv) in &reflections {
            let c = 2.0 * dot(v, &rc) / vv;
            rc.iter_mut().zip(v).for_each(|(r, vi)| *r -= c * vi);
        }
        let ra = phi_hyp(&rx, p).unwrap();
        rot = rot.max(max_abs_diff(ra.center.coords(), &rc)).max((ra.radius - a.radius).abs());
    }

    // Linearisation about d0 = r_i - r_j: the residual must shrink like the offset squared.
    let cases = ctx.trials.div_ceil(10).max(1);
    let mut done = 0;
    while done < cases {
        let r_i = rng.random_range(0.2..p.max_radius() - 0.05);
        let r_j = rng.random_range(0.05..r_i - 0.1);
        let d0 = r_i - r_j;
        let q0 = match hyp_cone_q(d0, r_i, r_j, p) {
            Ok(q) => q,
            Err(_) => continue,
        };
        let residual = |delta: f64| {
            energy_hyp_from_parts(d0 + delta, r_i, r_j, p).map(|e| (e - q0 * delta).abs())
        };
        let (Ok(big), Ok(small)) = (residual(2e-3), residual(1e-3)) else { continue };
        done += 1;
        if big > 1e-13 {
            lin = lin.max(((big / small).log2() - 2.0).abs());
        }
    }
    vec![
        PropertyCheck::count("cone_disk_isomorphism", iso),
        PropertyCheck::new("cone_energy_closed_form", agree, 1e-6),
        PropertyCheck::count("cone_energy_sign", sign),
        PropertyCheck::new("cone_energy_linearization_order", lin, 0.1),
        PropertyCheck::new("cone_map_rotation_equivariance", rot, 1e-12),
    ]
}

/// `sin(ψ - Ξ)` from the planar triangle of a Euclidean cone.
fn planar_cone_sine(r_x: f64, r_y: f64, d: f64, k: f64) -> f64 {
    let xi0 = k.asin();
    let x = k / (r_x + xi0).sin();
    let y = k / (r_y + xi0).sin();
    let (px, py) = (y * d.cos() - x, y * d.sin());
    let psi = (k / x).asin();
    let xi = (px / px.hypot(py)).clamp(-1.0, 1.0).acos();
    (psi - xi).sin()
}

fn euclidean_cones(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Vec<PropertyCheck> {
    let k = ctx.cone.k().min(0.99);
    let top = std::f64::consts::FRAC_PI_2 - k.asin();
    let mut worst = 0.0f64;
    let mut done = 0;
    while done < ctx.trials {
        let r_x = rng.random_range(0.01..top - 0.01);
        let r_y = rng.random_range(0.01..top - 0.01);
        let d = rng.random_range(0.01..PI - 0.01);
        let Ok(v) = euclidean_cone_angle_diff(r_x, r_y, d, k) else { continue };
        done += 1;
        worst = worst.max((v - planar_cone_sine(r_x, r_y, d, k)).abs());
    }
    vec![PropertyCheck::new("euclidean_cone_angle_formula", worst, 1e-6)]
}
