//! Command options shared between flags and TOML config files.
//!
//! Every subcommand accepts `--config <file>`. The file holds the same keys
//! as the long flags (kebab-case); flags given on the command line win.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::Deserialize;

/// Fills every `None` field of `self` from `other`.
macro_rules! merge_fields {
    ($self:ident, $other:ident; $($field:ident),+ $(,)?) => {
        $( if $self.$field.is_none() { $self.$field = $other.$field; } )+
    };
}

pub fn load<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config file {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing config file {}", path.display()))
}

pub fn required<T>(value: Option<T>, flag: &str) -> Result<T> {
    match value {
        Some(v) => Ok(v),
        None => bail!("missing --{flag} (flag or config key `{flag}`)"),
    }
}

#[derive(Debug, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct RunOptions {
    /// TOML file with defaults for any of these options.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// ridge-ea, leadingones-ea, onemax-rls, saps-cached or
    /// synthetic:<unimodal|plateau|sawtooth(α)|deceptive>.
    #[arg(long)]
    pub family: Option<String>,
    /// paramrls (default) or paramils.
    #[arg(long)]
    pub configurator: Option<String>,
    /// One or more of lstep, random, random-wr, harmonic (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub operator: Option<Vec<String>>,
    /// Strictly increasing space sizes (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    /// Repetitions per size [default: 50].
    #[arg(long)]
    pub reps: Option<usize>,
    /// Target runs per side of each comparison [default: 50].
    #[arg(long)]
    pub r: Option<u32>,
    /// Target-algorithm cutoff [default: per family].
    #[arg(long)]
    pub kappa: Option<u64>,
    /// Master seed [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Raw CSV output path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// ℓ of the ℓ-step operator [default: per family].
    #[arg(long)]
    pub max_step: Option<usize>,
    /// Harmonic direction: random-direction (default) or best-of-both.
    #[arg(long)]
    pub direction: Option<String>,
    /// Bit-string length of the benchmark families [default: 50].
    #[arg(long)]
    pub n: Option<usize>,
    /// Target-set size on cached landscapes [default: 5].
    #[arg(long)]
    pub top: Option<usize>,
    /// Cached landscape CSV for saps-cached.
    #[arg(long)]
    pub landscape: Option<PathBuf>,
    /// Calls after which a repetition is stopped and recorded as censored
    /// [default: 20·M].
    #[arg(long)]
    pub max_calls: Option<u64>,
    /// ParamILS: random configurations screened first [default: 0].
    #[arg(long)]
    pub ils_samples: Option<usize>,
    /// ParamILS: perturbation strength s [default: 3].
    #[arg(long)]
    pub ils_strength: Option<usize>,
    /// ParamILS: restart probability [default: 0.01].
    #[arg(long)]
    pub ils_restart: Option<f64>,
}

impl RunOptions {
    pub fn resolve(mut self) -> Result<Self> {
        if let Some(path) = self.config.clone() {
            let defaults: Self = load(&path)?;
            merge_fields!(self, defaults; family, configurator, operator, sizes, reps, r, kappa, seed,
                out, max_step, direction, n, top, landscape, max_calls, ils_samples, ils_strength, ils_restart);
        }
        Ok(self)
    }
}

#[derive(Debug, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct SummarizeOptions {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Raw CSV file(s); repeat or comma separate to combine runs.
    #[arg(long, value_delimiter = ',')]
    pub raw: Option<Vec<PathBuf>>,
    #[arg(long)]
    pub baseline: Option<String>,
    #[arg(long)]
    pub candidate: Option<String>,
    /// Summary CSV output path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl SummarizeOptions {
    pub fn resolve(mut self) -> Result<Self> {
        if let Some(path) = self.config.clone() {
            let defaults: Self = load(&path)?;
            merge_fields!(self, defaults; raw, baseline, candidate, out);
        }
        Ok(self)
    }
}

#[derive(Debug, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct CheckOptions {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Landscape CSV (`dim1,...,quality`).
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// α to check; with β, reports pass or a witness instead of the
    /// minimal certificates.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<usize>,
    /// Grid step of the α search [default: 0.01].
    #[arg(long)]
    pub step: Option<f64>,
}

impl CheckOptions {
    pub fn resolve(mut self) -> Result<Self> {
        if let Some(path) = self.config.clone() {
            let defaults: Self = load(&path)?;
            merge_fields!(self, defaults; file, alpha, beta, step);
        }
        Ok(self)
    }
}

#[derive(Debug, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct EvaluateOptions {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// DIMACS CNF instance files (comma separated or repeated).
    #[arg(long, value_delimiter = ',')]
    pub instances: Option<Vec<PathBuf>>,
    /// Number of planted random 3-SAT instances to generate instead.
    #[arg(long)]
    pub generate: Option<usize>,
    /// Variables per generated instance [default: 400].
    #[arg(long)]
    pub vars: Option<usize>,
    /// Clauses per generated instance [default: 1704].
    #[arg(long)]
    pub clauses: Option<usize>,
    /// Number of α values, 16/15 upwards in steps of 1/15 [default: 30].
    #[arg(long)]
    pub alphas: Option<usize>,
    /// SAPS runs per instance and cell [default: 10].
    #[arg(long)]
    pub reps: Option<u32>,
    /// SAPS step cutoff [default: 1000].
    #[arg(long)]
    pub kappa: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Landscape CSV output path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl EvaluateOptions {
    pub fn resolve(mut self) -> Result<Self> {
        if let Some(path) = self.config.clone() {
            let defaults: Self = load(&path)?;
            merge_fields!(self, defaults; instances, generate, vars, clauses, alphas, reps, kappa, seed, out);
        }
        Ok(self)
    }
}
