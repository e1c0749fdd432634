use std::collections::HashSet;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{pairs_to_tsv, transitive_closure, transitive_reduction, Dag, PairSet};
use crate::error::{Error, Result};
use crate::fsutil::write_atomic;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitParams {
    pub percent_nonbasic: f64,
    pub valid_count: usize,
    pub test_count: usize,
    pub neg_ratio: usize,
    pub seed: u64,
}

impl Default for SplitParams {
    fn default() -> Self {
        SplitParams {
            percent_nonbasic: 0.0,
            valid_count: 0,
            test_count: 0,
            neg_ratio: 10,
            seed: 0,
        }
    }
}

/// A graph together with its closure, reduction and evaluation splits.
#[derive(Debug, Clone, PartialEq)]
pub struct DagDataset {
    pub dag: Dag,
    pub closure: PairSet,
    pub reduction: PairSet,
    pub train_pos: Vec<(usize, usize)>,
    pub valid_pos: Vec<(usize, usize)>,
    pub valid_neg: Vec<(usize, usize)>,
    pub test_pos: Vec<(usize, usize)>,
    pub test_neg: Vec<(usize, usize)>,
    pub split_params: SplitParams,
}

impl DagDataset {
    /// Validation pairs with labels (positives first).
    pub fn valid_labeled(&self) -> (Vec<(usize, usize)>, Vec<bool>) {
        labeled(&self.valid_pos, &self.valid_neg)
    }

    pub fn test_labeled(&self) -> (Vec<(usize, usize)>, Vec<bool>) {
        labeled(&self.test_pos, &self.test_neg)
    }
}

pub(crate) fn labeled(pos: &[(usize, usize)], neg: &[(usize, usize)]) -> (Vec<(usize, usize)>, Vec<bool>) {
    let mut pairs = pos.to_vec();
    pairs.extend_from_slice(neg);
    let mut labels = vec![true; pos.len()];
    labels.resize(pos.len() + neg.len(), false);
    (pairs, labels)
}

/// Builds train/validation/test splits.
///
/// Training positives are the reduction plus `⌊percent_nonbasic · |closure \ reduction|⌋`
/// seeded non-basic pairs; validation and test positives come from the remaining
/// non-basic pairs. Negatives are distinct ordered non-closure pairs.
pub fn split_dataset(dag: &Dag, params: SplitParams) -> Result<DagDataset> {
    if !(0.0..=1.0).contains(&params.percent_nonbasic) {
        return Err(Error::Config(format!(
            "percent_nonbasic must lie in [0, 1], got {}",
            params.percent_nonbasic
        )));
    }
    let closure = transitive_closure(dag);
    let reduction = transitive_reduction(dag);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let mut nonbasic = closure.difference(&reduction).into_vec();
    nonbasic.shuffle(&mut rng);
    let train_extra = (params.percent_nonbasic * nonbasic.len() as f64).floor() as usize;
    let remaining = nonbasic.len() - train_extra;
    let wanted = params.valid_count + params.test_count;
    if wanted > remaining {
        return Err(Error::Config(format!(
            "insufficient non-basic pairs: {wanted} requested for validation/test but only {remaining} available after the training share"
        )));
    }
    let (train_part, rest) = nonbasic.split_at(train_extra);
    let (valid_part, rest) = rest.split_at(params.valid_count);
    let test_part = &rest[..params.test_count];

    let train_pos = reduction.union(&train_part.iter().copied().collect()).into_vec();
    let mut valid_pos = valid_part.to_vec();
    let mut test_pos = test_part.to_vec();
    valid_pos.sort_unstable();
    test_pos.sort_unstable();

    let n = dag.node_count();
    let valid_neg_count = params.neg_ratio * valid_pos.len();
    let test_neg_count = params.neg_ratio * test_pos.len();
    let mut negatives = sample_non_closure(
        n,
        &closure,
        valid_neg_count + test_neg_count,
        &mut rng,
    )?;
    let test_neg = negatives.split_off(valid_neg_count);
    let valid_neg = negatives;

    Ok(DagDataset {
        dag: dag.clone(),
        closure,
        reduction,
        train_pos,
        valid_pos,
        valid_neg,
        test_pos,
        test_neg,
        split_params: params,
    })
}

/// Distinct uniformly drawn ordered pairs `(u, v)`, `u != v`, outside `closure`.
fn sample_non_closure(
    n: usize,
    closure: &PairSet,
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<(usize, usize)>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    let total = n * n.saturating_sub(1);
    let available = total - closure.len();
    if count > available {
        return Err(Error::Config(format!(
            "insufficient negative pairs: {count} requested, {available} available"
        )));
    }
    if 2 * count > available {
        let mut all: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (0..n).map(move |v| (u, v)))
            .filter(|&(u, v)| u != v && !closure.contains((u, v)))
            .collect();
        all.shuffle(rng);
        all.truncate(count);
        return Ok(all);
    }
    let mut seen = HashSet::with_capacity(count);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u != v && !closure.contains((u, v)) && seen.insert((u, v)) {
            out.push((u, v));
        }
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct SplitCounts {
    nodes: usize,
    edges: usize,
    closure: usize,
    reduction: usize,
    train: usize,
    valid_pos: usize,
    valid_neg: usize,
    test_pos: usize,
    test_neg: usize,
}

#[derive(Serialize, Deserialize)]
struct SplitManifest {
    split_params: SplitParams,
    counts: SplitCounts,
}

const PAIR_FILES: [&str; 5] = [
    "train.tsv",
    "valid_pos.tsv",
    "valid_neg.tsv",
    "test_pos.tsv",
    "test_neg.tsv",
];

/// Writes the split manifest directory. Every file is written atomically.
///
/// Besides the pair files and `split.json`, `nodes.txt` (one name per id) and
/// `edges.tsv` (the input graph) let [`read_manifest`] rebuild the dataset.
pub fn write_manifest(dir: &Path, ds: &DagDataset) -> Result<()> {
    fs::create_dir_all(dir)?;
    let names = ds.dag.node_names();
    let mut nodes = names.join("\n");
    nodes.push('\n');
    write_atomic(&dir.join("nodes.txt"), nodes.as_bytes())?;
    write_atomic(&dir.join("edges.tsv"), ds.dag.to_tsv().as_bytes())?;
    let lists = [
        &ds.train_pos,
        &ds.valid_pos,
        &ds.valid_neg,
        &ds.test_pos,
        &ds.test_neg,
    ];
    for (file, pairs) in PAIR_FILES.iter().zip(lists) {
        write_atomic(&dir.join(file), pairs_to_tsv(names, pairs).as_bytes())?;
    }
    let manifest = SplitManifest {
        split_params: ds.split_params,
        counts: SplitCounts {
            nodes: ds.dag.node_count(),
            edges: ds.dag.edges().len(),
            closure: ds.closure.len(),
            reduction: ds.reduction.len(),
            train: ds.train_pos.len(),
            valid_pos: ds.valid_pos.len(),
            valid_neg: ds.valid_neg.len(),
            test_pos: ds.test_pos.len(),
            test_neg: ds.test_neg.len(),
        },
    };
    let mut json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    json.push('\n');
    write_atomic(&dir.join("split.json"), json.as_bytes())?;
    Ok(())
}

/// Reads a directory produced by [`write_manifest`].
pub fn read_manifest(dir: &Path) -> Result<DagDataset> {
    let read = |name: &str| -> Result<String> {
        fs::read_to_string(dir.join(name)).map_err(|e| {
            Error::Io(std::io::Error::new(
                e.kind(),
                format!("cannot open {}: {e}", dir.join(name).display()),
            ))
        })
    };
    let names: Vec<String> = read("nodes.txt")?
        .lines()
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect();
    let index: std::collections::HashMap<&str, usize> =
        names.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let parse_pairs = |file: &str| -> Result<Vec<(usize, usize)>> {
        let text = read(file)?;
        let mut out = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let lookup = |s: &str| {
                index.get(s).copied().ok_or_else(|| Error::Parse {
                    line: lineno + 1,
                    message: format!("{file}: unknown node {s:?}"),
                })
            };
            let (a, b) = line.split_once('\t').ok_or_else(|| Error::Parse {
                line: lineno + 1,
                message: format!("{file}: expected child<TAB>parent"),
            })?;
            out.push((lookup(a)?, lookup(b)?));
        }
        Ok(out)
    };
    let edges = parse_pairs("edges.tsv")?;
    let dag = Dag::new(names.clone(), edges)?;
    let manifest: SplitManifest = serde_json::from_str(&read("split.json")?)
        .map_err(|e| Error::Format(format!("split.json: {e}")))?;
    Ok(DagDataset {
        closure: transitive_closure(&dag),
        reduction: transitive_reduction(&dag),
        dag,
        train_pos: parse_pairs("train.tsv")?,
        valid_pos: parse_pairs("valid_pos.tsv")?,
        valid_neg: parse_pairs("valid_neg.tsv")?,
        test_pos: parse_pairs("test_pos.tsv")?,
        test_neg: parse_pairs("test_neg.tsv")?,
        split_params: manifest.split_params,
    })
}
