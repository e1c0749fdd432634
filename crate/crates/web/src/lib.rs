//! Browser demo. The plain functions and [`Session`] hold all the logic and
//! run natively; the `#[wasm_bindgen]` wrappers only move JSON across.

use diskembed::dag::{parse_edge_list, split_dataset, DagDataset, SplitParams};
use diskembed::equivalence::{cone_angles, energy_hyp_closed_form, phi_hyp, ConeParams};
use diskembed::model::{energy, TrainConfig, Trainer};
use diskembed::{contains, protrusion, FormalDisk, QuasiMetricSpace};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Debug, Clone, Serialize)]
pub struct DiskView {
    pub name: String,
    pub x: f64,
    pub y: f64,
    pub r: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrainView {
    pub epoch: usize,
    pub mean_loss: f64,
    /// F1 at threshold 0 over every ordered pair of distinct nodes.
    pub f1: f64,
    pub disks: Vec<DiskView>,
}

/// Training on the full transitive closure of a small graph, in the plane.
#[wasm_bindgen]
pub struct Session {
    dataset: DagDataset,
    trainer: Trainer,
    mean_loss: f64,
}

impl Session {
    pub fn create(edges: &str, seed: u64) -> Result<Session, String> {
        let dag = parse_edge_list(edges).map_err(|e| e.to_string())?;
        if dag.node_count() > 200 {
            return Err("the demo is limited to 200 nodes".into());
        }
        let params = SplitParams {
            percent_nonbasic: 1.0,
            ..Default::default()
        };
        let dataset = split_dataset(&dag, params).map_err(|e| e.to_string())?;
        let config = TrainConfig {
            learning_rate: 0.02,
            init_center_scale: 1.0,
            seed,
            ..Default::default()
        };
        let space = QuasiMetricSpace::euclidean(2).map_err(|e| e.to_string())?;
        let trainer = Trainer::new(&dataset, &space, &config).map_err(|e| e.to_string())?;
        Ok(Session {
            dataset,
            trainer,
            mean_loss: f64::NAN,
        })
    }

    pub fn advance(&mut self, epochs: usize) -> Result<TrainView, String> {
        for _ in 0..epochs {
            self.mean_loss = self.trainer.run_epoch().map_err(|e| e.to_string())?.mean_loss;
        }
        Ok(self.view())
    }

    pub fn view(&self) -> TrainView {
        let table = self.trainer.table();
        let n = table.len();
        let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
        for i in 0..n {
            for j in (0..n).filter(|&j| j != i) {
                let predicted = energy(table, i, j).map_or(false, |e| e <= 0.0);
                match (predicted, self.dataset.closure.contains((i, j))) {
                    (true, true) => tp += 1,
                    (true, false) => fp += 1,
                    (false, true) => fn_ += 1,
                    (false, false) => {}
                }
            }
        }
        let f1 = if tp == 0 { 0.0 } else { 2.0 * tp as f64 / (2 * tp + fp + fn_) as f64 };
        let disks = (0..n)
            .map(|i| DiskView {
                name: table.node_names()[i].clone(),
                x: table.center(i)[0],
                y: table.center(i)[1],
                r: table.radius(i),
            })
            .collect();
        TrainView {
            epoch: self.trainer.epoch(),
            mean_loss: self.mean_loss,
            f1,
            disks,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ArcView {
    /// Direction of the arc's midpoint on the unit circle.
    pub angle: f64,
    pub radius: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConeView {
    pub psi: f64,
    pub xi: f64,
    /// `y` lies in the entailment cone at `x`.
    pub in_cone: bool,
    pub arc_x: ArcView,
    pub arc_y: ArcView,
    pub arc_contains: bool,
    pub energy: f64,
}

fn arc(d: &FormalDisk) -> ArcView {
    let c = d.center.coords();
    ArcView {
        angle: c[1].atan2(c[0]),
        radius: d.radius,
    }
}

/// Entailment cone at `x` in the Poincare disk versus the boundary arcs the
/// two points map to.
pub fn cone_view(x: [f64; 2], y: [f64; 2], k: f64) -> Result<ConeView, String> {
    let params = ConeParams::new(k).map_err(|e| e.to_string())?;
    let (psi, xi) = cone_angles(&x, &y, &params).map_err(|e| e.to_string())?;
    let a = phi_hyp(&x, &params).map_err(|e| e.to_string())?;
    let b = phi_hyp(&y, &params).map_err(|e| e.to_string())?;
    let circle = QuasiMetricSpace::sphere(2).map_err(|e| e.to_string())?;
    Ok(ConeView {
        psi,
        xi,
        in_cone: psi >= xi,
        arc_x: arc(&a),
        arc_y: arc(&b),
        arc_contains: contains(&circle, &a, &b).map_err(|e| e.to_string())?,
        energy: energy_hyp_closed_form(&a, &b, &params).map_err(|e| e.to_string())?,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ProtrusionView {
    pub ab: f64,
    pub ba: f64,
    pub a_contains_b: bool,
    pub b_contains_a: bool,
    /// Axis-aligned extent `[xmin, xmax, ymin, ymax]` of each ball, for
    /// drawing the polyhedral case; `None` when the radius is negative.
    pub boxes: [Option<[f64; 4]>; 2],
}

/// Generators `2e1, -e1, e2, -e2`: an asymmetric quasi-metric on the plane.
fn skewed_plane() -> Result<QuasiMetricSpace, String> {
    QuasiMetricSpace::polyhedral(vec![vec![2.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]])
        .map_err(|e| e.to_string())
}

/// Protrusion both ways between disks `[x, y, r]` in `"euclidean"` or `"polyhedral"`.
pub fn protrusion_view(geometry: &str, a: [f64; 3], b: [f64; 3]) -> Result<ProtrusionView, String> {
    let space = match geometry {
        "euclidean" => QuasiMetricSpace::euclidean(2).map_err(|e| e.to_string())?,
        "polyhedral" => skewed_plane()?,
        other => return Err(format!("unknown geometry {other:?}")),
    };
    let disk = |v: [f64; 3]| -> Result<FormalDisk, String> {
        Ok(FormalDisk::new(space.point(vec![v[0], v[1]]).map_err(|e| e.to_string())?, v[2]))
    };
    let (da, db) = (disk(a)?, disk(b)?);
    let ab = protrusion(&space, &da, &db).map_err(|e| e.to_string())?;
    let ba = protrusion(&space, &db, &da).map_err(|e| e.to_string())?;
    // {p : d(c, p) <= r} is [cx - r/2, cx + r] x [cy - r, cy + r] under the skewed generators.
    let extent = |v: [f64; 3]| (v[2] >= 0.0).then(|| [v[0] - v[2] / 2.0, v[0] + v[2], v[1] - v[2], v[1] + v[2]]);
    Ok(ProtrusionView {
        ab,
        ba,
        a_contains_b: ab <= 0.0,
        b_contains_a: ba <= 0.0,
        boxes: [extent(a), extent(b)],
    })
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("views serialize")
}

#[wasm_bindgen]
impl Session {
    #[wasm_bindgen(constructor)]
    pub fn new(edges: &str, seed: u32) -> Result<Session, String> {
        Session::create(edges, u64::from(seed))
    }

    /// Runs `epochs` more epochs and returns the state as JSON.
    pub fn step(&mut self, epochs: u32) -> Result<String, String> {
        self.advance(epochs as usize).map(|v| to_json(&v))
    }

    pub fn state(&self) -> String {
        to_json(&self.view())
    }
}

#[wasm_bindgen]
pub fn cone(x0: f64, x1: f64, y0: f64, y1: f64, k: f64) -> Result<String, String> {
    cone_view([x0, x1], [y0, y1], k).map(|v| to_json(&v))
}

#[wasm_bindgen]
pub fn check_protrusion(
    geometry: &str,
    ax: f64,
    ay: f64,
    ar: f64,
    bx: f64,
    by: f64,
    br: f64,
) -> Result<String, String> {
    protrusion_view(geometry, [ax, ay, ar], [bx, by, br]).map(|v| to_json(&v))
}
