//! Self-describing jobs and the manifests that replay them.
//!
//! Every command builds a [`Job`], executes it into an output directory and
//! records it in a [`Manifest`] next to its outputs. Executing the recorded
//! job again reproduces every listed output byte for byte.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use arbandit::bounds::{bound_point, QuadratureSpec};
use arbandit::env::Stationary;
use arbandit::ArParams;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{LabError, Result};
use crate::io;
use crate::runner::{run_experiment, tuned_ledger, CellOutcome, ResultRow, TunedChoice};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Job {
    /// One experiment cell.
    Simulate {
        config: ExperimentConfig,
    },
    /// Several cells summarized in a wide table.
    Table1 {
        cells: Vec<ExperimentConfig>,
    },
    /// Cells that differ in alpha noise; summarized as quartiles.
    Robustness {
        cells: Vec<ExperimentConfig>,
    },
    Bounds(BoundsJob),
    Stationary(StationaryJob),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsJob {
    pub file: String,
    pub k: usize,
    pub c: f64,
    #[serde(default = "unit")]
    pub boundary: f64,
    pub quadrature: QuadratureSpec,
    /// `(alpha, sigma)` pairs in output order.
    pub points: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StationaryJob {
    pub file: String,
    pub alpha: f64,
    pub sigma: f64,
    #[serde(default = "unit")]
    pub boundary: f64,
    pub grid: usize,
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSeed {
    pub regime: String,
    pub k: usize,
    pub alpha_noise_pct: f64,
    pub seed: u64,
}

/// What a job produced.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct JobReport {
    /// Output files relative to the output directory.
    pub files: Vec<String>,
    pub cells: Vec<CellOutcome>,
    pub cell_seeds: Vec<CellSeed>,
}

impl JobReport {
    pub fn rows(&self) -> Vec<ResultRow> {
        self.cells
            .iter()
            .flat_map(|c| c.rows.iter().cloned())
            .collect()
    }

    pub fn tuned(&self) -> Vec<TunedChoice> {
        self.cells
            .iter()
            .flat_map(|c| c.tuned.iter().cloned())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub job: Job,
    /// SHA-256 of the compact JSON encoding of `job`.
    pub job_sha256: String,
    pub cell_seeds: Vec<CellSeed>,
    pub tuned: Vec<TunedChoice>,
    /// SHA-256 of every output file, keyed by its relative path.
    pub outputs: BTreeMap<String, String>,
    pub threads: usize,
    pub wall_clock_seconds: f64,
}

impl Job {
    pub fn configs(&self) -> Vec<&ExperimentConfig> {
        match self {
            Job::Simulate { config } => vec![config],
            Job::Table1 { cells } | Job::Robustness { cells } => cells.iter().collect(),
            Job::Bounds(_) | Job::Stationary(_) => Vec::new(),
        }
    }

    /// Overrides the master seed of every experiment cell.
    pub fn set_seed(&mut self, seed: u64) {
        match self {
            Job::Simulate { config } => config.master_seed = seed,
            Job::Table1 { cells } | Job::Robustness { cells } => {
                cells.iter_mut().for_each(|c| c.master_seed = seed)
            }
            Job::Bounds(_) | Job::Stationary(_) => {}
        }
    }

    pub fn manifest_name(&self) -> String {
        match self {
            Job::Bounds(b) => format!("{}.manifest.json", b.file),
            Job::Stationary(s) => format!("{}.manifest.json", s.file),
            _ => "manifest.json".to_string(),
        }
    }

    pub fn sha256(&self) -> String {
        io::sha256_bytes(&serde_json::to_vec(self).expect("jobs always serialize"))
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Job::Simulate { config } => config.validate(),
            Job::Table1 { cells } | Job::Robustness { cells } => {
                if cells.is_empty() {
                    return Err(LabError::config("job has no cells"));
                }
                cells.iter().try_for_each(ExperimentConfig::validate)
            }
            Job::Bounds(b) => {
                check_file_name(&b.file)?;
                if b.k < 2 {
                    return Err(LabError::config("bounds need k >= 2"));
                }
                if !(b.c >= 0.0 && b.c.is_finite()) {
                    return Err(LabError::config(format!(
                        "constant C = {} must be non-negative",
                        b.c
                    )));
                }
                if b.quadrature.outer_nodes == 0 || b.quadrature.inner_nodes == 0 {
                    return Err(LabError::config("quadrature needs at least one node"));
                }
                if b.points.is_empty() {
                    return Err(LabError::config("bound grid is empty"));
                }
                for &[a, s] in &b.points {
                    params(a, s, b.boundary)?;
                    if a * s >= 1.0 {
                        return Err(LabError::config("alpha * sigma must be below 1"));
                    }
                }
                Ok(())
            }
            Job::Stationary(s) => {
                check_file_name(&s.file)?;
                params(s.alpha, s.sigma, s.boundary)?;
                if s.grid < 2 {
                    return Err(LabError::config("stationary grid needs at least 2 points"));
                }
                Ok(())
            }
        }
    }
}

fn check_file_name(name: &str) -> Result<()> {
    let p = Path::new(name);
    if name.is_empty() || p.file_name().map(|f| f != p.as_os_str()).unwrap_or(true) {
        return Err(LabError::config(format!(
            "output file {name:?} must be a plain file name"
        )));
    }
    Ok(())
}

fn params(alpha: f64, sigma: f64, boundary: f64) -> Result<ArParams> {
    ArParams::new(alpha, sigma, boundary).map_err(|e| LabError::config(e.to_string()))
}

/// Reads either a manifest (replaying its job) or a bare experiment config.
pub fn load_job(path: &Path) -> Result<Job> {
    let text = fs::read_to_string(path)
        .map_err(|e| LabError::config(format!("cannot read {}: {e}", path.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| LabError::Json {
        path: path.into(),
        source: e,
    })?;
    let job = if value.get("job").is_some() {
        let manifest: Manifest = serde_json::from_value(value)
            .map_err(|e| LabError::config(format!("{}: invalid manifest: {e}", path.display())))?;
        manifest.job
    } else {
        Job::Simulate {
            config: ExperimentConfig::from_json(&text)?,
        }
    };
    job.validate()?;
    Ok(job)
}

fn cell_prefix(cfg: &ExperimentConfig) -> String {
    if cfg.alpha_noise_pct == 0.0 {
        format!("{}_k{}", cfg.regime(), cfg.k)
    } else {
        format!("{}_k{}_p{}", cfg.regime(), cfg.k, cfg.alpha_noise_pct)
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))
}

fn run_cells(cells: &[ExperimentConfig], dir: &Path, report: &mut JobReport) -> Result<()> {
    for cfg in cells {
        let outcome = run_experiment(cfg)?;
        report.cell_seeds.push(CellSeed {
            regime: cfg.regime(),
            k: cfg.k,
            alpha_noise_pct: cfg.alpha_noise_pct,
            seed: outcome.seed,
        });
        export(cfg, &outcome, dir, report)?;
        report.cells.push(outcome);
    }
    let records: Vec<_> = report
        .cells
        .iter()
        .flat_map(|c| c.instances.iter().cloned())
        .collect();
    io::write_instances(&dir.join("instances.csv"), &records)?;
    report.files.push("instances.csv".into());
    Ok(())
}

fn export(
    cfg: &ExperimentConfig,
    outcome: &CellOutcome,
    dir: &Path,
    report: &mut JobReport,
) -> Result<()> {
    let prefix = cell_prefix(cfg);
    let cell = crate::instance::cell_seed(cfg.master_seed, cfg.alpha_law.target_mean, cfg.k);
    if cfg.export.trajectories {
        create_dir(&dir.join("trajectories"))?;
        for i in 0..cfg.instance_count {
            let spec = crate::instance::build_instance(cfg, cell, i)?;
            let name = format!("trajectories/{prefix}_i{i}.csv");
            io::write_trajectory(&dir.join(&name), &spec.trajectory(cfg.horizon)?)?;
            report.files.push(name);
        }
    }
    if cfg.export.ledgers {
        create_dir(&dir.join("ledgers"))?;
        for choice in &outcome.tuned {
            for i in 0..cfg.instance_count {
                let ledger = tuned_ledger(cfg, choice, i)?;
                let name = format!("ledgers/{prefix}_{}_i{i}.csv", choice.policy);
                io::write_ledger(&dir.join(&name), &ledger)?;
                report.files.push(name);
            }
        }
    }
    Ok(())
}

/// Runs `job`, writing its outputs into `dir`.
pub fn execute(job: &Job, dir: &Path) -> Result<JobReport> {
    job.validate()?;
    create_dir(dir)?;
    let mut report = JobReport::default();
    match job {
        Job::Simulate { config } => {
            run_cells(std::slice::from_ref(config), dir, &mut report)?;
            io::write_results(&dir.join("results.csv"), &report.rows())?;
            report.files.push("results.csv".into());
        }
        Job::Table1 { cells } => {
            run_cells(cells, dir, &mut report)?;
            let rows = report.rows();
            io::write_results(&dir.join("results.csv"), &rows)?;
            io::write_table(&dir.join("table1.csv"), &rows, &cells[0].labels())?;
            report.files.push("results.csv".into());
            report.files.push("table1.csv".into());
        }
        Job::Robustness { cells } => {
            run_cells(cells, dir, &mut report)?;
            let records: Vec<_> = report
                .cells
                .iter()
                .flat_map(|c| c.instances.iter().cloned())
                .collect();
            io::write_quartiles(&dir.join("robustness.csv"), &io::quartiles(&records))?;
            report.files.push("robustness.csv".into());
        }
        Job::Bounds(b) => {
            let points = b
                .points
                .iter()
                .map(|&[a, s]| {
                    bound_point(b.k, &params(a, s, b.boundary)?, b.c, b.quadrature)
                        .map_err(Into::into)
                })
                .collect::<Result<Vec<_>>>()?;
            io::write_bounds(&dir.join(&b.file), &points)?;
            report.files.push(b.file.clone());
        }
        Job::Stationary(s) => {
            let law = Stationary::new(params(s.alpha, s.sigma, s.boundary)?);
            io::write_stationary(&dir.join(&s.file), &law, s.grid)?;
            report.files.push(s.file.clone());
        }
    }
    report.files.sort();
    Ok(report)
}

/// Executes `job` and writes its manifest. Returns the report and the
/// manifest path.
pub fn execute_with_manifest(
    job: &Job,
    dir: &Path,
    threads: usize,
) -> Result<(JobReport, PathBuf)> {
    let start = std::time::Instant::now();
    let report = execute(job, dir)?;
    let mut outputs = BTreeMap::new();
    for f in &report.files {
        outputs.insert(f.clone(), io::sha256_file(&dir.join(f))?);
    }
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        job: job.clone(),
        job_sha256: job.sha256(),
        cell_seeds: report.cell_seeds.clone(),
        tuned: report.tuned(),
        outputs,
        threads,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    };
    let path = dir.join(job.manifest_name());
    io::write_json(&path, &manifest)?;
    Ok((report, path))
}
