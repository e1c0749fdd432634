use std::fs;
use std::path::{Path, PathBuf};

use diskembed::dag::{parse_edge_list, read_manifest, split_dataset, write_manifest, DagDataset};
use diskembed::eval::{f1_at, score_pairs_parallel, tune_threshold, EvalReport};
use diskembed::fsutil::write_atomic;
use diskembed::model::{read_checkpoint, write_checkpoint, TrainReport, Trainer};
use diskembed::verify::{self, Fault, VerifyOptions};

use crate::config::RunConfig;
use crate::{CliError, EvalArgs, EvalSplit, InjectFault, ReverseArgs, SplitArgs, TrainArgs, VerifyArgs};

fn read_text(stage: &'static str, path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(stage, format!("cannot open {}: {e}", path.display())))
}

fn require(stage: &'static str, value: Option<PathBuf>, flag: &str) -> Result<PathBuf, CliError> {
    value.ok_or_else(|| CliError::config(stage, format!("missing {flag} (flag or config file)")))
}

fn write_file(stage: &'static str, path: &Path, contents: &str) -> Result<(), CliError> {
    write_atomic(path, contents.as_bytes()).map_err(|e| CliError::from_core(stage, e))
}

fn create_dir(stage: &'static str, dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(stage, format!("cannot create {}: {e}", dir.display())))
}

pub fn split(a: SplitArgs) -> Result<(), CliError> {
    let mut cfg = RunConfig::load(a.config.as_deref())?;
    let p = &mut cfg.split;
    if let Some(v) = a.percent_nonbasic {
        p.percent_nonbasic = v;
    }
    if let Some(v) = a.valid_count {
        p.valid_count = v;
    }
    if let Some(v) = a.test_count {
        p.test_count = v;
    }
    if let Some(v) = a.neg_ratio {
        p.neg_ratio = v;
    }
    if let Some(v) = a.seed {
        p.seed = v;
    }
    cfg.paths.edges = a.edges.or(cfg.paths.edges);
    cfg.paths.out = a.out.or(cfg.paths.out);
    let edges = require("split", cfg.paths.edges.clone(), "--edges")?;
    let out = require("split", cfg.paths.out.clone(), "--out")?;

    let text = read_text("split/read-edges", &edges)?;
    let dag = parse_edge_list(&text).map_err(|e| CliError::from_core("split/parse-edges", e))?;
    let ds = split_dataset(&dag, cfg.split).map_err(|e| CliError::from_core("split/sample", e))?;
    create_dir("split/write", &out)?;
    write_manifest(&out, &ds).map_err(|e| CliError::from_core("split/write", e))?;
    write_file("split/write", &out.join("config.json"), &cfg.to_json())?;

    println!("nodes: {}", dag.node_count());
    println!("edges: {}", dag.edges().len());
    println!("closure: {}", ds.closure.len());
    println!("reduction: {}", ds.reduction.len());
    println!("train_pos: {}", ds.train_pos.len());
    println!("valid_pos: {} valid_neg: {}", ds.valid_pos.len(), ds.valid_neg.len());
    println!("test_pos: {} test_neg: {}", ds.test_pos.len(), ds.test_neg.len());
    Ok(())
}

pub fn train(a: TrainArgs) -> Result<(), CliError> {
    let mut cfg = RunConfig::load(a.config.as_deref())?;
    if let Some(v) = a.geometry {
        cfg.geometry = v;
    }
    if let Some(v) = a.dim {
        cfg.dim = v;
    }
    let t = &mut cfg.train;
    let overrides = [
        (a.margin, &mut t.margin),
        (a.lr, &mut t.learning_rate),
        (a.lambda, &mut t.center_scale),
        (a.nu, &mut t.radius_scale),
        (a.init_center_scale, &mut t.init_center_scale),
        (a.init_radius, &mut t.init_radius),
    ];
    for (flag, field) in overrides {
        if let Some(v) = flag {
            *field = v;
        }
    }
    if let Some(v) = a.negatives {
        t.negatives_per_positive = v;
    }
    if let Some(v) = a.epochs {
        t.epochs = v;
    }
    if let Some(v) = a.batch_size {
        t.batch_size = v;
    }
    if let Some(v) = a.seed {
        t.seed = v;
    }
    if let Some(v) = a.threads {
        cfg.threads = v;
    }
    cfg.paths.split_dir = a.split.or(cfg.paths.split_dir);
    cfg.paths.out = a.out.or(cfg.paths.out);
    let split_dir = require("train", cfg.paths.split_dir.clone(), "--split")?;
    let out = require("train", cfg.paths.out.clone(), "--out")?;
    cfg.validate_train()?;
    let space = cfg.space()?;

    let ds = read_manifest(&split_dir).map_err(|e| CliError::from_core("train/read-split", e))?;
    let start = std::time::Instant::now();
    let mut trainer = Trainer::new(&ds, &space, &cfg.train).map_err(|e| CliError::from_core("train", e))?;
    let mut report = TrainReport::default();
    for _ in 0..cfg.train.epochs {
        let rec = trainer.run_epoch().map_err(|e| CliError::from_core("train", e))?;
        if rec.epoch % 50 == 0 || rec.epoch == cfg.train.epochs {
            eprintln!(
                "epoch {} mean_loss {:.6} valid_f1 {}",
                rec.epoch,
                rec.mean_loss,
                rec.valid_f1.map_or("-".to_string(), |f| format!("{f:.4}"))
            );
        }
        report.epochs.push(rec);
    }
    report.duration = start.elapsed();

    create_dir("train/write", &out)?;
    write_checkpoint(&out.join("checkpoint.jsonl"), trainer.table())
        .map_err(|e| CliError::from_core("train/write", e))?;
    write_file("train/write", &out.join("metrics.csv"), &report.metrics_csv())?;
    write_file("train/write", &out.join("config.json"), &cfg.to_json())?;
    eprintln!("trained {} epochs in {:.2?}", report.epochs.len(), report.duration);
    if let Some(last) = report.last() {
        println!(
            "final epoch {} mean_loss {} valid_f1 {}",
            last.epoch,
            last.mean_loss,
            last.valid_f1.map_or("-".to_string(), |f| f.to_string())
        );
    }
    Ok(())
}

fn eval_pairs(ds: &DagDataset, which: EvalSplit) -> (Vec<(usize, usize)>, Vec<bool>) {
    match which {
        EvalSplit::Valid => ds.valid_labeled(),
        EvalSplit::Test => ds.test_labeled(),
        EvalSplit::Train => {
            let mut neg = ds.valid_neg.clone();
            neg.extend_from_slice(&ds.test_neg);
            let mut pairs = ds.train_pos.clone();
            let mut labels = vec![true; pairs.len()];
            pairs.extend_from_slice(&neg);
            labels.resize(pairs.len(), false);
            (pairs, labels)
        }
    }
}

pub fn eval(a: EvalArgs) -> Result<(), CliError> {
    let mut cfg = RunConfig::load(a.config.as_deref())?;
    cfg.paths.checkpoint = a.checkpoint.or(cfg.paths.checkpoint);
    cfg.paths.split_dir = a.split.or(cfg.paths.split_dir);
    if let Some(v) = a.threads {
        cfg.threads = v;
    }
    let ckpt = require("eval", cfg.paths.checkpoint.clone(), "--checkpoint")?;
    let split_dir = require("eval", cfg.paths.split_dir.clone(), "--split")?;
    let out = match a.out.or(cfg.paths.out.clone()) {
        Some(o) => o,
        None => ckpt.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from(".")),
    };

    let table = read_checkpoint(&ckpt).map_err(|e| CliError::from_core("eval/read-checkpoint", e))?;
    let ds = read_manifest(&split_dir).map_err(|e| CliError::from_core("eval/read-split", e))?;
    if table.node_names() != ds.dag.node_names() {
        return Err(CliError::config(
            "eval",
            "checkpoint nodes do not match the split's nodes.txt",
        ));
    }
    let threads = cfg.threads.max(1);
    let score = |pairs: &[(usize, usize)]| {
        score_pairs_parallel(&table, pairs, threads).map_err(|e| CliError::from_core("eval/score", e))
    };

    let (vp, vl) = ds.valid_labeled();
    let tau = if vl.contains(&true) && vl.contains(&false) {
        tune_threshold(&score(&vp)?, &vl).map_err(|e| CliError::from_core("eval/tune", e))?
    } else {
        eprintln!("warning: validation split lacks positives or negatives; using tau = 0");
        0.0
    };
    let (pairs, labels) = eval_pairs(&ds, a.on);
    let scores = score(&pairs)?;
    let name = a.on.to_string();
    let tuned = f1_at(&scores, &labels, tau)
        .map_err(|e| CliError::from_core("eval", e))?
        .with_split(&name);
    let fixed = f1_at(&scores, &labels, 0.0)
        .map_err(|e| CliError::from_core("eval", e))?
        .with_split(&format!("{name}@tau0"));

    create_dir("eval/write", &out)?;
    let mut json = tuned.to_json();
    json.push('\n');
    write_file("eval/write", &out.join("report.json"), &json)?;
    let csv = format!("{}\n{}\n{}\n", EvalReport::CSV_HEADER, tuned.csv_row(), fixed.csv_row());
    write_file("eval/write", &out.join("report.csv"), &csv)?;
    print!("{json}");
    eprintln!("f1 at tau = 0: {}", fixed.f1);
    Ok(())
}

pub fn reverse(a: ReverseArgs) -> Result<(), CliError> {
    let text = read_text("reverse/read-edges", &a.edges)?;
    let dag = parse_edge_list(&text).map_err(|e| CliError::from_core("reverse/parse-edges", e))?;
    write_file("reverse/write", &a.out, &dag.reverse().to_tsv())
}

pub fn verify(a: VerifyArgs) -> Result<(), CliError> {
    let opts = VerifyOptions {
        trials: a.trials as usize,
        seed: a.seed,
        k: a.k,
        threads: a.threads,
        fault: a.inject_fault.map(|f| match f {
            InjectFault::GradientSign => Fault::GradientSign,
        }),
    };
    let report = verify::run(&opts).map_err(|e| CliError::from_core("verify", e))?;
    for check in &report.checks {
        println!("{check}");
    }
    let failed: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
    if failed.is_empty() {
        println!("all {} properties passed", report.checks.len());
        Ok(())
    } else {
        Err(CliError::verify(format!(
            "{} of {} properties failed: {}",
            failed.len(),
            report.checks.len(),
            failed.join(", ")
        )))
    }
}
