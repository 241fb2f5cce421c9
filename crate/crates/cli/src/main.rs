use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use calvol_cli::atomic::emit;
use calvol_cli::commands::{self, CalibrateOptions, CorrelateOptions, InputKind, SimulationConfig};
use calvol_cli::report::{curve_rows, to_csv};
use calvol_cli::{CohortManifest, Settings};
use calvol_core::cohort::MetricField;
use calvol_core::recalibration::PlattOptions;
use clap::{Args, Parser, Subcommand};

/// Calibration and volume-bias analysis of probabilistic segmentations.
#[derive(Debug, Parser)]
#[command(name = "calvol", version)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Number of equal-width reliability bins.
    #[arg(long, global = true, default_value_t = 20)]
    bins: usize,
    /// Score threshold for Dice and accuracy (`s >= threshold`).
    #[arg(long, global = true, default_value_t = 0.5)]
    threshold: f64,
    /// Worker threads (default: one per core). Output does not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Overrides the seed of a simulation spec.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// More diagnostics on stderr (repeat for debug output).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Per-subject calibration and volume metrics of a cohort.
    Analyze {
        #[arg(long)]
        manifest: PathBuf,
        /// Report CSV, or `-` for stdout.
        #[arg(long, default_value = "-")]
        out: String,
        /// Directory for one reliability-curve CSV per subject.
        #[arg(long)]
        curves: Option<PathBuf>,
    },
    /// Checks exact CE >= binned ECE >= |bias| per subject and pooled.
    /// Exits with status 2 if any chain fails.
    VerifyBound {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Fits Platt scaling on one cohort and applies it to another.
    Calibrate {
        /// Cohort to fit on.
        #[arg(long)]
        train: PathBuf,
        /// Cohort to recalibrate (defaults to the training cohort).
        #[arg(long)]
        apply: Option<PathBuf>,
        /// Whether `prob_path` holds probabilities or logits.
        #[arg(long, default_value = "prob")]
        input: InputKind,
        /// Use smoothed targets instead of hard labels.
        #[arg(long)]
        label_smoothing: bool,
        #[arg(long, default_value_t = 100)]
        max_iterations: usize,
        /// Output directory for parameters, volumes and manifest.
        #[arg(long)]
        out: PathBuf,
    },
    /// Correlation battery between two report columns.
    Correlate {
        /// Report written by `analyze`.
        #[arg(long)]
        report: PathBuf,
        #[arg(long, default_value = "true_volume_ml")]
        x: MetricField,
        #[arg(long, default_value = "bias_ml")]
        y: MetricField,
        /// Cohort manifest supplying subject tags.
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Also correlate within each value of this `key=value` tag.
        #[arg(long)]
        group_by: Option<String>,
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Generates a synthetic phantom cohort from a JSON spec.
    Simulate {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Writes the convex-combination counterexample and its summary.
    Counterexample {
        #[arg(long)]
        out: PathBuf,
    },
    /// Reliability curve of one subject, or of the pooled cohort.
    Curve {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        subject: Option<String>,
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Pareto front of models given their analysis reports.
    Pareto {
        /// Report CSVs; each file stem is used as the model id.
        #[arg(long = "report", required = true)]
        reports: Vec<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "ece,abs_bias")]
        objectives: Vec<MetricField>,
        #[arg(long, default_value = "-")]
        out: String,
    },
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let g = &cli.global;
    let settings = Settings {
        bins: g.bins,
        threshold: g.threshold,
        jobs: g.jobs,
    };
    match cli.command {
        Command::Analyze {
            manifest,
            out,
            curves,
        } => {
            let manifest = CohortManifest::load(&manifest)?;
            let report = commands::analyze(&manifest, &settings)?;
            if let Some(dir) = curves {
                std::fs::create_dir_all(&dir)
                    .with_context(|| format!("cannot create {}", dir.display()))?;
                for (row, curve) in report.subjects.iter().zip(&report.curves) {
                    let path = dir.join(format!("{}.csv", row.subject_id));
                    calvol_cli::atomic::write_atomic(&path, &to_csv(&curve_rows(curve))?)?;
                }
            }
            emit(&out, &report.to_csv()?)?;
        }
        Command::VerifyBound { manifest, out } => {
            let manifest = CohortManifest::load(&manifest)?;
            let table = commands::verify_bound(&manifest, &settings)?;
            emit(&out, &table.to_csv()?)?;
            let failed: Vec<&str> = table.violations().map(|r| r.subject_id.as_str()).collect();
            if !failed.is_empty() {
                log::error!("bound chain violated for: {}", failed.join(", "));
                return Ok(ExitCode::from(2));
            }
        }
        Command::Calibrate {
            train,
            apply,
            input,
            label_smoothing,
            max_iterations,
            out,
        } => {
            let train_manifest = CohortManifest::load(&train)?;
            let apply_manifest = match &apply {
                Some(p) => CohortManifest::load(p)?,
                None => train_manifest.clone(),
            };
            let opts = CalibrateOptions {
                input,
                platt: PlattOptions {
                    max_iterations,
                    label_smoothing,
                    ..PlattOptions::default()
                },
                ..CalibrateOptions::default()
            };
            let output = commands::calibrate(&train_manifest, &apply_manifest, &opts, &settings)?;
            let manifest_path = output.write(&out)?;
            log::info!("wrote {}", manifest_path.display());
        }
        Command::Correlate {
            report,
            x,
            y,
            manifest,
            group_by,
            out,
        } => {
            let manifest = manifest.as_deref().map(CohortManifest::load).transpose()?;
            let opts = CorrelateOptions { x, y, group_by };
            emit(&out, &commands::correlate(&report, manifest.as_ref(), &opts)?)?;
        }
        Command::Simulate { spec, out } => {
            let mut config = SimulationConfig::load(&spec)?;
            if let Some(seed) = g.seed {
                config.spec.seed = seed;
            }
            let path = commands::simulate(&config, &out, &settings)?;
            log::info!("wrote {}", path.display());
        }
        Command::Counterexample { out } => {
            let output = commands::counterexample(&out, &settings)?;
            emit("-", &to_csv(&output.summary)?)?;
        }
        Command::Curve {
            manifest,
            subject,
            out,
        } => {
            let manifest = CohortManifest::load(&manifest)?;
            let curve = commands::curve(&manifest, subject.as_deref(), &settings)?;
            emit(&out, &to_csv(&curve_rows(&curve))?)?;
        }
        Command::Pareto {
            reports,
            objectives,
            out,
        } => {
            let paths: Vec<&Path> = reports.iter().map(PathBuf::as_path).collect();
            let table = commands::pareto(&paths, &objectives)?;
            emit(&out, &table.to_csv()?)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.global.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
