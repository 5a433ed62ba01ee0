//! Command-line front end: flag parsing, the run manifest and the report
//! files.
//!
//! A run writes into its output directory:
//!
//! * `manifest.json`: the resolved configuration, keys sorted;
//! * `results.csv`: `trial_id,model,rmse,jitter,seconds`, one row per
//!   successful (trial, model);
//! * `summary.csv`: `model,n_trials,mean_rmse,se_mean_rmse`;
//! * `boxplot.csv`: `model,min,q1,median,q3,max` (linear-interpolation
//!   quartiles);
//! * `errors.log`: one line per failed trial or model, only when something
//!   failed;
//! * `loss_trial<t>_<model>.csv` (`epoch,train_mse`) with `--loss-traces`.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::Parser;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiment::{
    aggregate, boxplot, run_trials, ExperimentConfig, ModelSpec, Normalization, TrialReport,
};
use crate::nn::BatchSize;
use crate::parallel::Workers;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_IO: i32 = 3;

pub fn version_tag() -> String {
    format!("ntk-equiv {}", env!("CARGO_PKG_VERSION"))
}

/// Compares kernel predictors with trained wide ReLU networks on data drawn
/// from a neural tangent kernel Gaussian process.
#[derive(Debug, Parser)]
#[command(name = "ntk-equiv", version)]
pub struct Args {
    /// Number of trials.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Observations per trial.
    #[arg(long = "n-obs")]
    pub n_obs: Option<usize>,
    /// Input dimension.
    #[arg(long = "d-in")]
    pub d_in: Option<usize>,
    /// Master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Hidden width of the networks.
    #[arg(long)]
    pub width: Option<usize>,
    /// Learning rate of both networks.
    #[arg(long)]
    pub lr: Option<f64>,
    /// Training epochs of the one-hidden-layer network.
    #[arg(long)]
    pub epochs1: Option<usize>,
    /// Training epochs of the two-hidden-layer network.
    #[arg(long)]
    pub epochs2: Option<usize>,
    /// Ridge added to every kernel Gram matrix.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Comma-separated models (ntkb1,ntkb2,ntkj1,ntkj2,ntka1,ntka2,gp1,gp2,k1,nn1,nn2) or `all`.
    #[arg(long)]
    pub models: Option<String>,
    /// Worker threads; 0 uses all cores.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Output directory.
    #[arg(long = "out-dir")]
    pub out_dir: Option<PathBuf>,
    /// `observation` (unit-norm inputs) or `feature`.
    #[arg(long)]
    pub normalize: Option<String>,
    /// `full` or a mini-batch size.
    #[arg(long = "batch-size")]
    pub batch_size: Option<String>,
    /// Also write per-epoch training loss of every network.
    #[arg(long = "loss-traces")]
    pub loss_traces: bool,
    /// Start from a saved manifest.json; other flags override it.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub experiment: ExperimentConfig,
    pub out_dir: PathBuf,
    #[serde(default)]
    pub loss_traces: bool,
}

impl Default for RunManifest {
    fn default() -> Self {
        Self {
            version: version_tag(),
            experiment: ExperimentConfig::default(),
            out_dir: PathBuf::from("ntk-equiv-out"),
            loss_traces: false,
        }
    }
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_slice(&fs::read(path)?)?)
    }

    /// Pretty JSON with keys in sorted order.
    pub fn to_json(&self) -> Result<String> {
        // serde_json's map is ordered by key, so a round trip through
        // `Value` sorts every object.
        let value = serde_json::to_value(self)?;
        Ok(serde_json::to_string_pretty(&value)?)
    }
}

fn usage(flag: &str, msg: impl std::fmt::Display) -> Error {
    Error::InvalidConfig(format!("--{flag}: {msg}"))
}

fn parse_batch_size(s: &str) -> Result<BatchSize> {
    if s == "full" {
        return Ok(BatchSize::Full);
    }
    match s.parse::<usize>() {
        Ok(n) if n > 0 => Ok(BatchSize::Mini(n)),
        _ => Err(usage(
            "batch-size",
            format!("expected `full` or a positive integer, got `{s}`"),
        )),
    }
}

/// Applies flags over the defaults (or over `--manifest`) and validates.
pub fn manifest_from_args(args: Args) -> Result<RunManifest> {
    let mut m = match &args.manifest {
        Some(p) => RunManifest::load(p)?,
        None => RunManifest::default(),
    };
    m.version = version_tag();
    let e = &mut m.experiment;
    if let Some(v) = args.trials {
        if v == 0 {
            return Err(usage("trials", "must be positive"));
        }
        e.sim.n_trials = v;
    }
    if let Some(v) = args.n_obs {
        e.sim.n_obs = v;
    }
    if let Some(v) = args.d_in {
        if v == 0 {
            return Err(usage("d-in", "must be positive"));
        }
        e.sim.d_in = v;
        e.hyper.d_in = v;
    }
    if let Some(v) = args.seed {
        e.sim.master_seed = v;
    }
    if let Some(v) = args.width {
        if v == 0 {
            return Err(usage("width", "must be positive"));
        }
        e.network.width = v;
    }
    if let Some(v) = args.lr {
        if !(v > 0.0 && v.is_finite()) {
            return Err(usage("lr", "must be positive"));
        }
        e.network.train1.learning_rate = v;
        e.network.train2.learning_rate = v;
    }
    if let Some(v) = args.epochs1 {
        if v == 0 {
            return Err(usage("epochs1", "must be positive"));
        }
        e.network.train1.epochs = v;
    }
    if let Some(v) = args.epochs2 {
        if v == 0 {
            return Err(usage("epochs2", "must be positive"));
        }
        e.network.train2.epochs = v;
    }
    if let Some(v) = args.lambda {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(usage("lambda", "must be non-negative"));
        }
        e.lambda = v;
    }
    if let Some(v) = &args.models {
        e.models = ModelSpec::parse_list(v).map_err(|err| usage("models", err))?;
    }
    if let Some(v) = args.workers {
        e.workers = Workers::from_count(v);
    }
    if let Some(v) = &args.normalize {
        e.sim.normalization = v
            .parse::<Normalization>()
            .map_err(|err| usage("normalize", err))?;
    }
    if let Some(v) = &args.batch_size {
        let b = parse_batch_size(v)?;
        e.network.train1.batch_size = b;
        e.network.train2.batch_size = b;
    }
    if let Some(v) = args.out_dir {
        m.out_dir = v;
    }
    m.loss_traces |= args.loss_traces;
    m.experiment.validate()?;
    Ok(m)
}

/// Parses `argv` (including the program name).
pub fn parse_and_validate<I, T>(argv: I) -> Result<RunManifest>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = Args::try_parse_from(argv).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    manifest_from_args(args)
}

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    Ok(csv::Writer::from_writer(BufWriter::new(File::create(
        path,
    )?)))
}

pub fn write_results(path: &Path, reports: &[TrialReport]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["trial_id", "model", "rmse", "jitter", "seconds"])?;
    for r in reports {
        for m in &r.results {
            w.write_record([
                r.trial_id.to_string(),
                m.model.to_string(),
                m.rmse.to_string(),
                m.jitter.to_string(),
                format!("{:.3}", m.seconds),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary(path: &Path, reports: &[TrialReport]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["model", "n_trials", "mean_rmse", "se_mean_rmse"])?;
    for row in aggregate(reports)? {
        w.write_record([
            row.model.to_string(),
            row.n_trials.to_string(),
            row.mean_rmse.to_string(),
            row.se_mean_rmse.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_boxplot(path: &Path, reports: &[TrialReport]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["model", "min", "q1", "median", "q3", "max"])?;
    for row in boxplot(reports)? {
        w.write_record([
            row.model.to_string(),
            row.min.to_string(),
            row.q1.to_string(),
            row.median.to_string(),
            row.q3.to_string(),
            row.max.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_loss_trace(path: &Path, trace: &[f64]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["epoch", "train_mse"])?;
    for (epoch, mse) in trace.iter().enumerate() {
        w.write_record([epoch.to_string(), mse.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// What [`run`] produced.
#[derive(Debug)]
pub struct RunOutcome {
    pub reports: Vec<TrialReport>,
    /// Failed trials and models, one message each.
    pub errors: Vec<String>,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.errors.is_empty() {
            EXIT_OK
        } else {
            EXIT_NUMERICAL
        }
    }
}

/// Runs the experiment and writes every report file. Failed trials and
/// models are logged to `errors.log`; files for the rest are still written.
pub fn run(manifest: &RunManifest) -> Result<RunOutcome> {
    manifest.experiment.validate()?;
    let dir = &manifest.out_dir;
    fs::create_dir_all(dir)?;
    fs::write(dir.join("manifest.json"), manifest.to_json()? + "\n")?;

    let mut reports = Vec::new();
    let mut errors = Vec::new();
    for (t, outcome) in run_trials(&manifest.experiment)?.into_iter().enumerate() {
        match outcome {
            Ok(r) => reports.push(r),
            Err(e) => errors.push(format!("trial {t}: {e}")),
        }
    }
    for r in &reports {
        for f in &r.failures {
            errors.push(format!(
                "trial {} model {}: {}",
                r.trial_id, f.model, f.message
            ));
        }
    }

    write_results(&dir.join("results.csv"), &reports)?;
    if !reports.is_empty() {
        write_summary(&dir.join("summary.csv"), &reports)?;
        write_boxplot(&dir.join("boxplot.csv"), &reports)?;
    }
    if manifest.loss_traces {
        for r in &reports {
            for m in &r.results {
                if let Some(trace) = &m.loss_trace {
                    write_loss_trace(
                        &dir.join(format!("loss_trial{}_{}.csv", r.trial_id, m.model)),
                        trace,
                    )?;
                }
            }
        }
    }
    let log = dir.join("errors.log");
    if errors.is_empty() {
        if log.exists() {
            fs::remove_file(&log)?;
        }
    } else {
        let mut f = BufWriter::new(File::create(&log)?);
        for e in &errors {
            writeln!(f, "{e}")?;
        }
        f.flush()?;
    }
    Ok(RunOutcome { reports, errors })
}

/// Entry point of the binary; returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let manifest = match manifest_from_args(args) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {e}");
            return match e {
                Error::Io(_) => EXIT_IO,
                _ => EXIT_USAGE,
            };
        }
    };
    match manifest.to_json() {
        Ok(json) => println!("{json}"),
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_IO;
        }
    }
    match run(&manifest) {
        Ok(outcome) => {
            for e in &outcome.errors {
                eprintln!("error: {e}");
            }
            outcome.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                _ if e.is_numerical() => EXIT_NUMERICAL,
                Error::InvalidConfig(_) => EXIT_USAGE,
                _ => EXIT_IO,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::KernelId;

    #[test]
    fn defaults_match_the_reference_setup() {
        let m = parse_and_validate(["ntk-equiv"]).unwrap();
        let e = &m.experiment;
        assert_eq!((e.sim.d_in, e.sim.n_obs, e.sim.n_trials), (15, 1000, 50));
        assert_eq!(e.network.width, 10_000);
        assert_eq!(e.network.train1.learning_rate, 0.002);
        assert_eq!(
            (e.network.train1.epochs, e.network.train2.epochs),
            (3000, 6000)
        );
        assert_eq!(e.models.len(), 11);
    }

    #[test]
    fn zero_trials_rejected_naming_the_flag() {
        let err = parse_and_validate(["ntk-equiv", "--trials", "0"]).unwrap_err();
        assert!(err.to_string().contains("--trials"), "{err}");
    }

    #[test]
    fn model_subset() {
        let m =
            parse_and_validate(["ntk-equiv", "--models", "ntkb1,gp1,k1", "--trials", "5"]).unwrap();
        assert_eq!(
            m.experiment.models,
            vec![
                ModelSpec::Kernel(KernelId::NTKB1),
                ModelSpec::Kernel(KernelId::GP1),
                ModelSpec::Kernel(KernelId::LAPLACE)
            ]
        );
        assert_eq!(m.experiment.sim.n_trials, 5);
    }

    #[test]
    fn unknown_flag_and_bad_values_rejected() {
        assert!(parse_and_validate(["ntk-equiv", "--bogus"]).is_err());
        assert!(parse_and_validate(["ntk-equiv", "--models", "ntkq"]).is_err());
        assert!(parse_and_validate(["ntk-equiv", "--batch-size", "0"]).is_err());
        assert!(parse_and_validate(["ntk-equiv", "--normalize", "rows"]).is_err());
        assert!(parse_and_validate(["ntk-equiv", "--lambda", "-1"]).is_err());
    }

    #[test]
    fn manifest_json_round_trips_with_sorted_keys() {
        let m = parse_and_validate([
            "ntk-equiv",
            "--batch-size",
            "32",
            "--d-in",
            "4",
            "--workers",
            "3",
        ])
        .unwrap();
        let json = m.to_json().unwrap();
        let back: RunManifest = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
        let top: Vec<usize> = [
            "\"experiment\"",
            "\"loss_traces\"",
            "\"out_dir\"",
            "\"version\"",
        ]
        .iter()
        .map(|k| json.find(k).unwrap())
        .collect();
        assert!(top.windows(2).all(|w| w[0] < w[1]));
    }
}
