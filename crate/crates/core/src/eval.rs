//! Pair scoring, threshold tuning and F1 reports.
//!
//! The decision rule is "predict positive iff score <= τ", where the score of
//! `(i, j)` is the raw (unclipped) energy of the pair.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::EmbeddingTable;
use crate::par::map_chunked;

/// Energy of every pair, in order. Lower means a stronger predicted relation.
pub fn score_pairs(table: &EmbeddingTable, pairs: &[(usize, usize)]) -> Result<Vec<f64>> {
    check_pairs(table, pairs)?;
    Ok(pairs.iter().map(|&(i, j)| table.energy_raw(i, j)).collect())
}

/// [`score_pairs`] split across `threads` scoped workers. Same output.
pub fn score_pairs_parallel(
    table: &EmbeddingTable,
    pairs: &[(usize, usize)],
    threads: usize,
) -> Result<Vec<f64>> {
    check_pairs(table, pairs)?;
    Ok(map_chunked(pairs, threads, |&(i, j)| table.energy_raw(i, j)))
}

fn check_pairs(table: &EmbeddingTable, pairs: &[(usize, usize)]) -> Result<()> {
    for &(i, j) in pairs {
        table.check_index(i)?;
        table.check_index(j)?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub split: String,
    pub tau: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub r#fn: usize,
}

impl EvalReport {
    pub const CSV_HEADER: &'static str = "split,tau,precision,recall,f1,tp,fp,tn,fn";

    pub fn with_split(mut self, split: &str) -> Self {
        self.split = split.to_string();
        self
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.split, self.tau, self.precision, self.recall, self.f1, self.tp, self.fp, self.tn, self.r#fn
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

fn f1_from_counts(tp: usize, fp: usize, fn_: usize) -> f64 {
    let denom = 2 * tp + fp + fn_;
    if tp == 0 {
        0.0
    } else {
        2.0 * tp as f64 / denom as f64
    }
}

/// Confusion counts and scores at threshold `tau`.
pub fn f1_at(scores: &[f64], labels: &[bool], tau: f64) -> Result<EvalReport> {
    if scores.len() != labels.len() {
        return Err(Error::InvalidArgument(format!(
            "{} scores but {} labels",
            scores.len(),
            labels.len()
        )));
    }
    let (mut tp, mut fp, mut tn, mut fn_) = (0, 0, 0, 0);
    for (&s, &l) in scores.iter().zip(labels) {
        match (s <= tau, l) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, false) => tn += 1,
            (false, true) => fn_ += 1,
        }
    }
    let precision = if tp + fp == 0 { 0.0 } else { tp as f64 / (tp + fp) as f64 };
    let recall = if tp + fn_ == 0 { 0.0 } else { tp as f64 / (tp + fn_) as f64 };
    Ok(EvalReport {
        split: String::new(),
        tau,
        precision,
        recall,
        f1: f1_from_counts(tp, fp, fn_),
        tp,
        fp,
        tn,
        r#fn: fn_,
    })
}

/// The F1-maximising threshold. Candidates are the midpoints between
/// consecutive distinct scores and the largest score; ties go to the smallest.
pub fn tune_threshold(scores: &[f64], labels: &[bool]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::InvalidArgument(format!(
            "{} scores but {} labels",
            scores.len(),
            labels.len()
        )));
    }
    let total_pos = labels.iter().filter(|&&l| l).count();
    if total_pos == 0 || total_pos == labels.len() {
        return Err(Error::Config(
            "threshold tuning needs both positive and negative labels".into(),
        ));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::InvalidArgument("scores contain NaN".into()));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut best = (f64::NEG_INFINITY, 0.0);
    let mut k = 0;
    while k < order.len() {
        let s = scores[order[k]];
        while k < order.len() && scores[order[k]] == s {
            if labels[order[k]] {
                tp += 1;
            } else {
                fp += 1;
            }
            k += 1;
        }
        let tau = match order.get(k) {
            Some(&next) => s + (scores[next] - s) / 2.0,
            None => s,
        };
        let f1 = f1_from_counts(tp, fp, total_pos - tp);
        if f1 > best.0 {
            best = (f1, tau);
        }
    }
    Ok(best.1)
}
