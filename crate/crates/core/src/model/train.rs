use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{init_embeddings, rsgd_step_with, sample_negatives, EmbeddingTable, StepScratch, TrainConfig};
use crate::dag::{DagDataset, PairSet};
use crate::error::{invalid, Result};
use crate::eval::{f1_at, tune_threshold};
use crate::geometry::QuasiMetricSpace;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpochRecord {
    /// 1-based.
    pub epoch: usize,
    pub mean_loss: f64,
    /// `None` when the validation set lacks a positive or a negative.
    pub valid_f1: Option<f64>,
    pub tau: Option<f64>,
    pub flagged_negatives: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainReport {
    pub epochs: Vec<EpochRecord>,
    pub duration: Duration,
}

impl TrainReport {
    pub fn last(&self) -> Option<&EpochRecord> {
        self.epochs.last()
    }

    /// `epoch,mean_loss,valid_f1,tau` with a header line; missing values are empty.
    pub fn metrics_csv(&self) -> String {
        let mut out = String::from("epoch,mean_loss,valid_f1,tau\n");
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in &self.epochs {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.epoch,
                r.mean_loss,
                opt(r.valid_f1),
                opt(r.tau)
            ));
        }
        out
    }
}

/// Stateful single-writer trainer. Work is done in batches of
/// `config.batch_size` samples so callers can interleave their own work.
#[derive(Debug, Clone)]
pub struct Trainer {
    table: EmbeddingTable,
    config: TrainConfig,
    positives: Vec<(usize, usize)>,
    closure: PairSet,
    valid: Option<(Vec<(usize, usize)>, Vec<bool>)>,
    rng: ChaCha8Rng,
    scratch: StepScratch,
    queue: Vec<((usize, usize), bool)>,
    cursor: usize,
    loss_sum: f64,
    flagged: usize,
    in_epoch: bool,
    epoch: usize,
}

impl Trainer {
    pub fn new(dataset: &DagDataset, space: &QuasiMetricSpace, config: &TrainConfig) -> Result<Self> {
        config.validate()?;
        if dataset.train_pos.is_empty() {
            return Err(invalid("training set has no positive pairs"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let table = init_embeddings(space, dataset.dag.node_count(), config, &mut rng)?
            .with_node_names(dataset.dag.node_names().to_vec())?;
        let (pairs, labels) = dataset.valid_labeled();
        let valid = (labels.contains(&true) && labels.contains(&false)).then_some((pairs, labels));
        Ok(Trainer {
            table,
            config: config.clone(),
            positives: dataset.train_pos.clone(),
            closure: dataset.closure.clone(),
            valid,
            rng,
            scratch: StepScratch::default(),
            queue: Vec::new(),
            cursor: 0,
            loss_sum: 0.0,
            flagged: 0,
            in_epoch: false,
            epoch: 0,
        })
    }

    pub fn table(&self) -> &EmbeddingTable {
        &self.table
    }

    pub fn into_table(self) -> EmbeddingTable {
        self.table
    }

    pub fn config(&self) -> &TrainConfig {
        &self.config
    }

    /// Completed epochs.
    pub fn epoch(&self) -> usize {
        self.epoch
    }

    fn start_epoch(&mut self) -> Result<()> {
        self.positives.shuffle(&mut self.rng);
        let negatives = sample_negatives(
            &self.positives,
            &self.closure,
            self.table.len(),
            self.config.negatives_per_positive,
            &mut self.rng,
        )?;
        let k = self.config.negatives_per_positive;
        self.queue.clear();
        self.flagged = 0;
        for (p, negs) in self.positives.iter().zip(negatives.chunks(k)) {
            self.queue.push((*p, true));
            for n in negs {
                self.flagged += n.flagged as usize;
                self.queue.push((n.pair, false));
            }
        }
        self.cursor = 0;
        self.loss_sum = 0.0;
        Ok(())
    }

    /// Applies up to `batch_size` updates; returns the record when an epoch ends.
    pub fn step_batch(&mut self) -> Result<Option<EpochRecord>> {
        if !self.in_epoch {
            self.start_epoch()?;
            self.in_epoch = true;
        }
        let end = (self.cursor + self.config.batch_size).min(self.queue.len());
        for k in self.cursor..end {
            let (pair, positive) = self.queue[k];
            self.loss_sum += rsgd_step_with(&mut self.table, pair, positive, &self.config, &mut self.scratch);
        }
        self.cursor = end;
        if self.cursor < self.queue.len() {
            return Ok(None);
        }
        self.epoch += 1;
        self.in_epoch = false;
        let mean_loss = self.loss_sum / self.queue.len() as f64;
        self.queue.clear();
        self.cursor = 0;
        self.loss_sum = 0.0;
        let (valid_f1, tau) = match self.validate()? {
            Some((f1, tau)) => (Some(f1), Some(tau)),
            None => (None, None),
        };
        Ok(Some(EpochRecord {
            epoch: self.epoch,
            mean_loss,
            valid_f1,
            tau,
            flagged_negatives: self.flagged,
        }))
    }

    pub fn run_epoch(&mut self) -> Result<EpochRecord> {
        loop {
            if let Some(r) = self.step_batch()? {
                return Ok(r);
            }
        }
    }

    /// Validation F1 at the tuned threshold, and the threshold.
    pub fn validate(&self) -> Result<Option<(f64, f64)>> {
        let Some((pairs, labels)) = &self.valid else {
            return Ok(None);
        };
        let scores: Vec<f64> = pairs.iter().map(|&(i, j)| self.table.energy_raw(i, j)).collect();
        let tau = tune_threshold(&scores, labels)?;
        Ok(Some((f1_at(&scores, labels, tau)?.f1, tau)))
    }
}

/// Runs `config.epochs` epochs from a seeded initialisation.
pub fn train(
    dataset: &DagDataset,
    space: &QuasiMetricSpace,
    config: &TrainConfig,
) -> Result<(EmbeddingTable, TrainReport)> {
    let start = Instant::now();
    let mut trainer = Trainer::new(dataset, space, config)?;
    let mut report = TrainReport::default();
    for _ in 0..config.epochs {
        report.epochs.push(trainer.run_epoch()?);
    }
    report.duration = start.elapsed();
    Ok((trainer.into_table(), report))
}
