//! CSV and JSON file formats.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use arbandit::bounds::BoundCurvePoint;
use arbandit::env::{Stationary, Trajectory};
use arbandit::metrics::{quantile, summarize, RegretLedger};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{LabError, Result};
use crate::runner::{InstanceRecord, ResultRow};

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    let file = File::create(path).map_err(|e| LabError::io(path, e))?;
    Ok(csv::Writer::from_writer(BufWriter::new(file)))
}

fn finish(mut w: csv::Writer<BufWriter<File>>, path: &Path) -> Result<()> {
    w.flush().map_err(|e| LabError::io(path, e))
}

/// `t,arm,expected,realized`, one row per (round, arm).
pub fn write_trajectory(path: &Path, tr: &Trajectory) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["t", "arm", "expected", "realized"])?;
    for t in 0..tr.horizon() {
        for arm in 0..tr.arm_count() {
            w.serialize((t, arm, tr.expected(arm, t), tr.realized(arm, t)))?;
        }
    }
    finish(w, path)
}

/// `t,chosen_arm,oracle_reward,regret`.
pub fn write_ledger(path: &Path, ledger: &RegretLedger) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["t", "chosen_arm", "oracle_reward", "regret"])?;
    let rows = ledger
        .chosen()
        .iter()
        .zip(ledger.oracle_rewards())
        .zip(ledger.regrets());
    for (t, ((arm, oracle), reg)) in rows.enumerate() {
        w.serialize((t, arm, oracle, reg))?;
    }
    finish(w, path)
}

/// `regime,k,policy,mean_normalized_regret,std_normalized_regret,instances_used,instances_excluded`.
pub fn write_results(path: &Path, rows: &[ResultRow]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record([
        "regime",
        "k",
        "policy",
        "mean_normalized_regret",
        "std_normalized_regret",
        "instances_used",
        "instances_excluded",
    ])?;
    for r in rows {
        w.serialize((
            &r.regime,
            r.k,
            &r.policy,
            r.mean_normalized_regret,
            r.std_normalized_regret,
            r.instances_used,
            r.instances_excluded,
        ))?;
    }
    finish(w, path)
}

/// Wide layout: one row per (regime, k), one column per policy holding the
/// mean normalized regret.
pub fn write_table(path: &Path, rows: &[ResultRow], policies: &[String]) -> Result<()> {
    let mut w = csv_writer(path)?;
    let mut header = vec!["regime".to_string(), "k".to_string()];
    header.extend(policies.iter().cloned());
    w.write_record(&header)?;
    let mut cells: Vec<(&str, usize)> = Vec::new();
    for r in rows {
        if !cells.contains(&(r.regime.as_str(), r.k)) {
            cells.push((r.regime.as_str(), r.k));
        }
    }
    for (regime, k) in cells {
        let mut record = vec![regime.to_string(), k.to_string()];
        for p in policies {
            let v = rows
                .iter()
                .find(|r| r.regime == regime && r.k == k && &r.policy == p)
                .map(|r| r.mean_normalized_regret.to_string())
                .unwrap_or_default();
            record.push(v);
        }
        w.write_record(&record)?;
    }
    finish(w, path)
}

/// Per-instance normalized regret of every tuned policy.
pub fn write_instances(path: &Path, records: &[InstanceRecord]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record([
        "regime",
        "k",
        "alpha_noise_pct",
        "instance",
        "policy",
        "normalized_regret",
        "degenerate",
    ])?;
    for r in records {
        w.serialize((
            &r.regime,
            r.k,
            r.alpha_noise_pct,
            r.instance,
            &r.policy,
            r.normalized_regret,
            r.degenerate,
        ))?;
    }
    finish(w, path)
}

/// Distribution summary of one policy at one noise level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Quartiles {
    pub policy: String,
    pub p: f64,
    pub instances_used: usize,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

/// Box-plot statistics of the non-degenerate instances, per (policy, p).
pub fn quartiles(records: &[InstanceRecord]) -> Vec<Quartiles> {
    let mut keys: Vec<(String, f64)> = Vec::new();
    for r in records {
        let key = (r.policy.clone(), r.alpha_noise_pct);
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(policy, p)| {
            let v: Vec<f64> = records
                .iter()
                .filter(|r| r.policy == policy && r.alpha_noise_pct == p && !r.degenerate)
                .map(|r| r.normalized_regret)
                .collect();
            let s = summarize(&v);
            Quartiles {
                instances_used: v.len(),
                mean: s.mean,
                std: s.std,
                min: quantile(&v, 0.0),
                q1: quantile(&v, 0.25),
                median: quantile(&v, 0.5),
                q3: quantile(&v, 0.75),
                max: quantile(&v, 1.0),
                policy,
                p,
            }
        })
        .collect()
}

/// `policy,p,instances_used,mean,std,min,q1,median,q3,max`.
pub fn write_quartiles(path: &Path, rows: &[Quartiles]) -> Result<()> {
    let mut w = csv_writer(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    finish(w, path)
}

/// `alpha,sigma,k,lower,naive_upper,ar2_upper`.
pub fn write_bounds(path: &Path, points: &[BoundCurvePoint]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["alpha", "sigma", "k", "lower", "naive_upper", "ar2_upper"])?;
    for p in points {
        w.serialize((p.alpha, p.sigma, p.k, p.lower, p.naive_upper, p.ar2_upper))?;
    }
    finish(w, path)
}

/// `x,pdf,cdf` on `n` evenly spaced points of `[-R, R]`.
pub fn write_stationary(path: &Path, law: &Stationary, n: usize) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["x", "pdf", "cdf"])?;
    for x in grid_points(law.params().boundary(), n) {
        w.serialize((x, law.pdf(x), law.cdf(x)))?;
    }
    finish(w, path)
}

/// `n >= 2` evenly spaced points from `-r` to `r`, endpoints exact.
pub fn grid_points(r: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            if i + 1 == n {
                r
            } else {
                -r + 2.0 * r * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let file = File::create(path).map_err(|e| LabError::io(path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| LabError::Json {
        path: path.into(),
        source: e,
    })?;
    w.write_all(b"\n")
        .and_then(|_| w.flush())
        .map_err(|e| LabError::io(path, e))
}

pub fn sha256_bytes(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let mut file = File::open(path).map_err(|e| LabError::io(path, e))?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 1 << 16];
    loop {
        let n = file.read(&mut buf).map_err(|e| LabError::io(path, e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}
