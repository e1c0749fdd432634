//! Embedding tables, the margin loss, negative sampling and Riemannian SGD.
//!
//! A pair `(i, j)` always means "node `i` is-a node `j`", so the ancestor disk
//! `j` should contain the descendant disk `i`. Its energy is the protrusion of
//! `j` over `i`: `d(x_j, x_i) - r_j + r_i`.

mod checkpoint;
mod table;
mod train;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use checkpoint::{read_checkpoint, write_checkpoint, Checkpoint};
pub use table::{init_embeddings, EmbeddingTable};
pub use train::{train, EpochRecord, TrainReport, Trainer};

use crate::dag::PairSet;
use crate::error::{invalid, Error, Result};
use crate::geometry::Wrt;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub margin: f64,
    pub learning_rate: f64,
    pub center_scale: f64,
    pub radius_scale: f64,
    pub negatives_per_positive: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub init_center_scale: f64,
    pub init_radius: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            margin: 0.1,
            learning_rate: 0.01,
            center_scale: 1.0,
            radius_scale: 1.0,
            negatives_per_positive: 10,
            epochs: 300,
            batch_size: 256,
            init_center_scale: 0.1,
            init_radius: 0.1,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("margin", self.margin),
            ("learning_rate", self.learning_rate),
            ("center_scale", self.center_scale),
            ("radius_scale", self.radius_scale),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be a positive number, got {v}")));
            }
        }
        if !(self.init_center_scale.is_finite() && self.init_center_scale >= 0.0) {
            return Err(Error::Config(format!(
                "init_center_scale must be non-negative, got {}",
                self.init_center_scale
            )));
        }
        if !self.init_radius.is_finite() {
            return Err(Error::Config("init_radius must be finite".into()));
        }
        if self.negatives_per_positive == 0 {
            return Err(Error::Config("negatives_per_positive must be >= 1".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch_size must be >= 1".into()));
        }
        Ok(())
    }
}

/// Energy of pair `(i, j)`: the protrusion of disk `j` over disk `i`.
pub fn energy(table: &EmbeddingTable, i: usize, j: usize) -> Result<f64> {
    table.check_index(i)?;
    table.check_index(j)?;
    Ok(table.energy_raw(i, j))
}

/// `h+(E)` for positives, `h+(margin - E)` for negatives.
pub fn pair_loss(energy: f64, is_positive: bool, margin: f64) -> f64 {
    if is_positive {
        energy.max(0.0)
    } else {
        (margin - energy).max(0.0)
    }
}

/// `dL/dE`, with zero subgradient at the kinks.
pub fn loss_slope(energy: f64, is_positive: bool, margin: f64) -> f64 {
    if is_positive {
        if energy > 0.0 {
            1.0
        } else {
            0.0
        }
    } else if energy < margin {
        -1.0
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NegativeSample {
    pub pair: (usize, usize),
    /// No true negative was found within the attempt budget.
    pub flagged: bool,
}

pub const NEGATIVE_ATTEMPTS: usize = 100;

/// `k` corrupted pairs per positive, in order. Each replaces the head or the
/// tail (probability 1/2 each) by a uniform node, resampling while the result
/// is a self-pair or lies in `closure`.
pub fn sample_negatives<R: Rng + ?Sized>(
    positives: &[(usize, usize)],
    closure: &PairSet,
    n_nodes: usize,
    k: usize,
    rng: &mut R,
) -> Result<Vec<NegativeSample>> {
    if n_nodes < 2 {
        return Err(invalid("negative sampling needs at least 2 nodes"));
    }
    let mut out = Vec::with_capacity(positives.len() * k);
    for &(i, j) in positives {
        for _ in 0..k {
            let mut pair = (i, j);
            let mut flagged = true;
            for _ in 0..NEGATIVE_ATTEMPTS {
                let node = rng.random_range(0..n_nodes);
                pair = if rng.random_bool(0.5) { (node, j) } else { (i, node) };
                if pair.0 != pair.1 && !closure.contains(pair) {
                    flagged = false;
                    break;
                }
            }
            out.push(NegativeSample { pair, flagged });
        }
    }
    Ok(out)
}

/// Scratch gradient buffers for [`rsgd_step_with`].
#[derive(Debug, Clone, Default)]
pub struct StepScratch {
    grad_j: Vec<f64>,
    grad_i: Vec<f64>,
}

/// One Riemannian SGD update on pair `(i, j)`. Returns the loss before the step.
pub fn rsgd_step(
    table: &mut EmbeddingTable,
    pair: (usize, usize),
    is_positive: bool,
    config: &TrainConfig,
) -> Result<f64> {
    table.check_index(pair.0)?;
    table.check_index(pair.1)?;
    Ok(rsgd_step_with(table, pair, is_positive, config, &mut StepScratch::default()))
}

pub(crate) fn rsgd_step_with(
    table: &mut EmbeddingTable,
    (i, j): (usize, usize),
    is_positive: bool,
    config: &TrainConfig,
    scratch: &mut StepScratch,
) -> f64 {
    let e = table.energy_raw(i, j);
    let loss = pair_loss(e, is_positive, config.margin);
    let g = loss_slope(e, is_positive, config.margin);
    if g == 0.0 {
        return loss;
    }
    let eta = config.learning_rate;
    let dim = table.space().dim();
    scratch.grad_j.resize(dim, 0.0);
    scratch.grad_i.resize(dim, 0.0);
    let space = table.space().clone();
    let ok_j = space.distance_grad_raw(table.center(j), table.center(i), Wrt::First, &mut scratch.grad_j);
    let ok_i = space.distance_grad_raw(table.center(j), table.center(i), Wrt::Second, &mut scratch.grad_i);
    if ok_j && ok_i && i != j {
        let step = -eta * config.center_scale * g;
        scratch.grad_j.iter_mut().for_each(|c| *c *= step);
        scratch.grad_i.iter_mut().for_each(|c| *c *= step);
        space.exp_map_raw(table.center_mut(j), &scratch.grad_j);
        space.exp_map_raw(table.center_mut(i), &scratch.grad_i);
    }
    *table.radius_mut(j) -= eta * config.radius_scale * g * -1.0;
    *table.radius_mut(i) -= eta * config.radius_scale * g;
    loss
}
