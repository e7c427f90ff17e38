use std::path::{Path, PathBuf};
use std::process::ExitCode;

use arbandit::bounds::QuadratureSpec;
use arbandit_lab::jobs::{BoundsJob, JobReport, StationaryJob};
use arbandit_lab::{execute_with_manifest, load_job, protocol, Job, LabError, Result};
use clap::{Parser, Subcommand, ValueEnum};

/// Simulation laboratory for dynamic bandits with reflected AR-1 rewards.
#[derive(Parser)]
#[command(name = "arbandit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Regime {
    #[value(name = "0.4")]
    Low,
    #[value(name = "0.9")]
    High,
    Both,
}

impl Regime {
    fn means(self) -> Vec<f64> {
        match self {
            Regime::Low => vec![0.4],
            Regime::High => vec![0.9],
            Regime::Both => protocol::REGIMES.to_vec(),
        }
    }
}

#[derive(clap::Args)]
struct RunFlags {
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Instances per cell.
    #[arg(long, default_value_t = protocol::INSTANCES)]
    instances: usize,
    /// Rounds per instance.
    #[arg(long, default_value_t = protocol::HORIZON)]
    horizon: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config, or replay any manifest.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory (default: the config's output_dir).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Normalized regret of all seven policies over the canonical cells.
    Table1 {
        #[arg(long, value_enum, default_value = "both")]
        regime: Regime,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Lower bound and upper-bound orders over an alpha or sigma grid.
    Bounds {
        #[arg(long, default_value_t = 5)]
        k: usize,
        /// Noise level for an alpha sweep.
        #[arg(long, default_value_t = 0.2)]
        sigma: f64,
        /// AR coefficient for a sigma sweep.
        #[arg(long, default_value_t = 0.9)]
        alpha: f64,
        #[arg(long = "C", default_value_t = 0.4)]
        c: f64,
        /// LO:HI:STEP.
        #[arg(long, default_value = "0.05:0.95:0.05", conflicts_with = "sigma_grid")]
        alpha_grid: String,
        /// LO:HI:STEP; sweeps sigma at fixed --alpha instead of alpha.
        #[arg(long)]
        sigma_grid: Option<String>,
        /// Gauss-Legendre nodes per dimension.
        #[arg(long, default_value_t = 256)]
        nodes: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Stationary density and CDF on a grid over [-R, R].
    Stationary {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        sigma: f64,
        #[arg(long = "R", default_value_t = 1.0)]
        r: f64,
        #[arg(long, default_value_t = 1001)]
        grid: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// AR2, eps-greedy and mod-UCB under noisy knowledge of the alphas.
    Robustness {
        /// Noise levels in percent of the mean alpha.
        #[arg(long, value_delimiter = ',', default_value = "0,10,20")]
        p: Vec<f64>,
        #[arg(long, default_value_t = 0.9)]
        regime: f64,
        #[arg(long, default_value_t = 6)]
        k: usize,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        run: RunFlags,
    },
}

/// Parses `LO:HI:STEP` into evenly spaced values including both ends when
/// `HI - LO` is a multiple of `STEP`.
fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || LabError::config(format!("grid {spec:?} must be LO:HI:STEP"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let nums = parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<Vec<_>>>()?;
    let (lo, hi, step) = (nums[0], nums[1], nums[2]);
    if !(lo.is_finite() && hi >= lo && step > 0.0) {
        return Err(bad());
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|i| lo + step * i as f64).collect())
}

/// Splits `--out FILE` into a directory and a file name.
fn split_file(out: &Path) -> Result<(PathBuf, String)> {
    let name = out
        .file_name()
        .and_then(|n| n.to_str())
        .ok_or_else(|| LabError::config(format!("--out {} is not a file path", out.display())))?;
    let dir = out.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((dir, name.to_string()))
}

fn scaled(
    mut cells: Vec<arbandit_lab::ExperimentConfig>,
    run: &RunFlags,
) -> Vec<arbandit_lab::ExperimentConfig> {
    for c in &mut cells {
        c.instance_count = run.instances;
        c.horizon = run.horizon;
    }
    cells
}

fn run(job: Job, dir: &Path, threads: Option<usize>) -> Result<JobReport> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| LabError::Runtime(format!("thread pool: {e}")))?;
    let threads = pool.current_num_threads();
    let (report, manifest) = pool.install(|| execute_with_manifest(&job, dir, threads))?;
    for row in report.rows() {
        if row.instances_excluded > 0 {
            eprintln!(
                "warning: regime {} k {} {}: {} degenerate instance(s) excluded",
                row.regime, row.k, row.policy, row.instances_excluded
            );
        }
    }
    for f in &report.files {
        println!("{}", dir.join(f).display());
    }
    println!("{}", manifest.display());
    Ok(report)
}

fn main_inner(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate {
            config,
            seed,
            out,
            threads,
        } => {
            let mut job = load_job(&config)?;
            if let Some(s) = seed {
                job.set_seed(s);
            }
            let dir = match (out, &job) {
                (Some(d), _) => d,
                (None, Job::Simulate { config }) => config
                    .output_dir
                    .clone()
                    .ok_or_else(|| LabError::config("no --out and no output_dir in the config"))?,
                (None, _) => return Err(LabError::config("replaying a manifest needs --out")),
            };
            run(job, &dir, threads)?;
        }
        Command::Table1 {
            regime,
            out,
            run: flags,
        } => {
            let cells = scaled(
                protocol::table1_configs(&regime.means(), flags.seed),
                &flags,
            );
            run(Job::Table1 { cells }, &out, flags.threads)?;
        }
        Command::Bounds {
            k,
            sigma,
            alpha,
            c,
            alpha_grid,
            sigma_grid,
            nodes,
            out,
        } => {
            let points = match sigma_grid {
                Some(g) => parse_grid(&g)?.into_iter().map(|s| [alpha, s]).collect(),
                None => parse_grid(&alpha_grid)?
                    .into_iter()
                    .map(|a| [a, sigma])
                    .collect(),
            };
            let (dir, file) = split_file(&out)?;
            let job = Job::Bounds(BoundsJob {
                file,
                k,
                c,
                boundary: 1.0,
                quadrature: QuadratureSpec::square(nodes),
                points,
            });
            run(job, &dir, None)?;
        }
        Command::Stationary {
            alpha,
            sigma,
            r,
            grid,
            out,
        } => {
            let (dir, file) = split_file(&out)?;
            let job = Job::Stationary(StationaryJob {
                file,
                alpha,
                sigma,
                boundary: r,
                grid,
            });
            run(job, &dir, None)?;
        }
        Command::Robustness {
            p,
            regime,
            k,
            out,
            run: flags,
        } => {
            let cells = scaled(
                protocol::robustness_configs(regime, k, &p, flags.seed),
                &flags,
            );
            run(Job::Robustness { cells }, &out, flags.threads)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
