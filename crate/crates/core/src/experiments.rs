//! Scenario engine: growing parameter spaces, repeated configurator runs,
//! call counting and summary statistics.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::configurators::{
    run_param_ils, run_param_rls, EvalProtocol, Objective, ParamIlsSettings, Problem, StopRule,
    TargetSet,
};
use crate::error::{Error, Result};
use crate::landscape::{generate_synthetic, Landscape, SyntheticKind};
use crate::operators::{DirectionMode, Operator};
use crate::rng::{derive_seed, rng_from_seed};
use crate::space::{Configuration, ParameterDim, ParameterSpace};
use crate::stats::{compare, mean_stderr};
use crate::targets::{Benchmark, InitRule, TargetAlgorithm, TargetObjective};

/// Default call cap per unit of total range M.
pub const CAP_PER_RANGE: u64 = 20;

/// Environment variable capping the worker pool.
pub const THREADS_ENV: &str = "TUNE_THREADS";

/// Worker count requested through [`THREADS_ENV`], if any.
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n >= 1)
            .map(Some)
            .ok_or_else(|| {
                Error::config(format!(
                    "{THREADS_ENV} must be a positive integer, got `{v}`"
                ))
            }),
        Err(_) => Ok(None),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Family {
    RidgeEa,
    LeadingOnesEa,
    OneMaxRls,
    SapsCached,
    Synthetic(SyntheticKind),
}

impl Family {
    pub fn id(&self) -> String {
        match self {
            Family::RidgeEa => "ridge-ea".into(),
            Family::LeadingOnesEa => "leadingones-ea".into(),
            Family::OneMaxRls => "onemax-rls".into(),
            Family::SapsCached => "saps-cached".into(),
            Family::Synthetic(kind) => format!("synthetic:{}", kind.id()),
        }
    }

    /// ℓ used by the ℓ-step operator unless overridden.
    pub fn default_max_step(&self) -> usize {
        match self {
            Family::OneMaxRls => 2,
            _ => 1,
        }
    }

    pub fn default_kappa(&self) -> u64 {
        match self {
            Family::RidgeEa | Family::LeadingOnesEa => 2500,
            Family::OneMaxRls => 200,
            Family::SapsCached | Family::Synthetic(_) => 10_000,
        }
    }

    /// Whether the family can be grown to `size` configurations.
    pub fn accepts_size(&self, size: usize) -> bool {
        match self {
            Family::RidgeEa | Family::LeadingOnesEa | Family::OneMaxRls => {
                size.is_multiple_of(5) && (5..=50).contains(&size)
            }
            Family::SapsCached => size.is_multiple_of(16) && (48..=480).contains(&size),
            Family::Synthetic(_) => size >= 2,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ridge-ea" => Ok(Family::RidgeEa),
            "leadingones-ea" => Ok(Family::LeadingOnesEa),
            "onemax-rls" => Ok(Family::OneMaxRls),
            "saps-cached" => Ok(Family::SapsCached),
            "synthetic" => Ok(Family::Synthetic(SyntheticKind::Unimodal)),
            _ => match s.strip_prefix("synthetic:") {
                Some(kind) => Ok(Family::Synthetic(SyntheticKind::parse(kind)?)),
                None => Err(Error::config(format!("unknown scenario family `{s}`"))),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConfiguratorKind {
    ParamRls,
    ParamIls,
}

impl ConfiguratorKind {
    pub fn id(self) -> &'static str {
        match self {
            ConfiguratorKind::ParamRls => "paramrls",
            ConfiguratorKind::ParamIls => "paramils",
        }
    }
}

impl FromStr for ConfiguratorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paramrls" => Ok(ConfiguratorKind::ParamRls),
            "paramils" => Ok(ConfiguratorKind::ParamIls),
            _ => Err(Error::config(format!("unknown configurator `{s}`"))),
        }
    }
}

/// Everything needed to run one experiment over a schedule of sizes.
#[derive(Debug, Clone)]
pub struct ScenarioSpec {
    pub family: Family,
    pub configurator: ConfiguratorKind,
    /// Operator id: `lstep`, `random`, `random-wr` or `harmonic`.
    pub operator: String,
    /// ℓ for `lstep`; the family default when `None`.
    pub max_step: Option<usize>,
    pub direction: DirectionMode,
    /// ParamILS settings; the operator field is replaced by the chosen one.
    pub ils: ParamIlsSettings,
    pub sizes: Vec<usize>,
    pub repetitions: usize,
    /// r, target runs per side of each comparison.
    pub runs: u32,
    /// Target-algorithm cutoff; the family default when `None`.
    pub kappa: Option<u64>,
    /// Bit-string length of the benchmark families.
    pub n: usize,
    /// Size of the target set for cached landscapes.
    pub top: usize,
    pub master_seed: u64,
    /// Full cached landscape for `saps-cached`.
    pub cached: Option<Arc<Landscape>>,
    /// Calls after which a repetition that has not sampled an optimum is
    /// stopped and recorded as censored; `CAP_PER_RANGE · M` when `None`.
    pub max_calls: Option<u64>,
}

impl ScenarioSpec {
    pub fn new(family: Family, configurator: ConfiguratorKind, operator: &str) -> Self {
        Self {
            family,
            configurator,
            operator: operator.to_owned(),
            max_step: None,
            direction: DirectionMode::default(),
            ils: ParamIlsSettings::default(),
            sizes: Vec::new(),
            repetitions: 50,
            runs: 50,
            kappa: None,
            n: 50,
            top: 5,
            master_seed: 0,
            cached: None,
            max_calls: None,
        }
    }

    /// Call cap for a space of total range `m`.
    pub fn call_cap(&self, m: usize) -> u64 {
        self.max_calls.unwrap_or(CAP_PER_RANGE * m as u64)
    }

    pub fn operator(&self) -> Result<Operator> {
        let max_step = self
            .max_step
            .unwrap_or_else(|| self.family.default_max_step());
        Operator::parse(&self.operator, max_step, self.direction)
    }

    pub fn kappa(&self) -> u64 {
        self.kappa.unwrap_or_else(|| self.family.default_kappa())
    }

    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::config("repetitions must be at least 1"));
        }
        if self.sizes.is_empty() {
            return Err(Error::config("the size schedule is empty"));
        }
        if self.sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::config(format!(
                "the size schedule must be strictly increasing, got {:?}",
                self.sizes
            )));
        }
        if self.runs == 0 {
            return Err(Error::config("runs per comparison must be at least 1"));
        }
        if self.top == 0 {
            return Err(Error::config("target set size must be at least 1"));
        }
        if self.max_calls == Some(0) {
            return Err(Error::config("the call cap must be at least 1"));
        }
        if self.kappa() == 0 {
            return Err(Error::config("cutoff κ must be at least 1"));
        }
        self.operator()?;
        self.ils.validate()?;
        if self.family == Family::SapsCached && self.cached.is_none() {
            return Err(Error::config("saps-cached needs a cached landscape file"));
        }
        Ok(())
    }

    /// Tags describing how calls were counted and which unstated defaults
    /// were used, joined with `;`.
    pub fn accounting_mode(&self) -> Result<String> {
        let mut tags = vec!["first-sampled-charged".to_owned()];
        if let Operator::Harmonic {
            mode: DirectionMode::BestOfBoth,
        } = self.operator()?
        {
            tags.push("intra-mutation-counted".into());
        }
        if self.configurator == ConfiguratorKind::ParamIls {
            tags.push(format!(
                "ils:R={}:s={}:p_restart={}",
                self.ils.initial_samples,
                self.ils.perturbation_strength,
                self.ils.restart_probability
            ));
        }
        match self.family {
            Family::SapsCached | Family::Synthetic(_) => {}
            _ => tags.push(format!(
                "r={}:kappa={}:n={}",
                self.runs,
                self.kappa(),
                self.n
            )),
        }
        Ok(tags.join(";"))
    }
}

/// What one repetition is run against.
#[derive(Clone)]
enum Source {
    Fixed {
        objective: Arc<dyn Objective>,
        targets: TargetSet,
    },
    Synthetic(SyntheticKind),
}

/// A family materialized at one space size.
#[derive(Clone)]
pub struct Scenario {
    pub family: Family,
    pub size: usize,
    pub space: ParameterSpace,
    pub kappa: u64,
    pub max_step: usize,
    pub init: InitRule,
    source: Source,
}

impl fmt::Debug for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Scenario")
            .field("family", &self.family)
            .field("size", &self.size)
            .field("space", &self.space)
            .field("kappa", &self.kappa)
            .field("max_step", &self.max_step)
            .field("init", &self.init)
            .finish_non_exhaustive()
    }
}

impl Scenario {
    /// The declared optimal configurations; `None` for synthetic families,
    /// whose optimum is drawn per repetition.
    pub fn targets(&self) -> Option<&TargetSet> {
        match &self.source {
            Source::Fixed { targets, .. } => Some(targets),
            Source::Synthetic(_) => None,
        }
    }
}

fn single_target(index: usize) -> TargetSet {
    std::iter::once(Configuration::new(vec![index])).collect()
}

/// Materializes `family` at `size` with the spec's overrides.
pub fn build_scenario(spec: &ScenarioSpec, size: usize) -> Result<Scenario> {
    let family = spec.family;
    if !family.accepts_size(size) {
        return Err(Error::config(format!(
            "size {size} is not in the schedule of {family}"
        )));
    }
    let kappa = spec.kappa();
    let max_step = spec.max_step.unwrap_or_else(|| family.default_max_step());
    let target = |algorithm, benchmark, init, dim: ParameterDim, optimum| -> Result<Scenario> {
        let space = ParameterSpace::new(vec![dim])?;
        let objective = TargetObjective {
            algorithm,
            benchmark,
            n: spec.n,
            kappa,
            init,
            space: space.clone(),
        };
        // Every value of the grid must be a legal parameter.
        for config in space.iter() {
            objective.variation(&config)?;
        }
        Ok(Scenario {
            family,
            size,
            space,
            kappa,
            max_step,
            init,
            source: Source::Fixed {
                objective: Arc::new(objective),
                targets: single_target(optimum),
            },
        })
    };
    match family {
        Family::RidgeEa => target(
            TargetAlgorithm::OnePlusOneEa,
            Benchmark::Ridge,
            InitRule::RidgeStart,
            ParameterDim::new("chi", size, 0.0, 0.5)?,
            2,
        ),
        Family::LeadingOnesEa => target(
            TargetAlgorithm::OnePlusOneEa,
            Benchmark::LeadingOnes,
            InitRule::Uniform,
            ParameterDim::new("chi", size, 0.1, 0.5)?,
            3,
        ),
        Family::OneMaxRls => target(
            TargetAlgorithm::RlsK,
            Benchmark::OneMax,
            InitRule::Uniform,
            ParameterDim::new("k", size, 0.0, 1.0)?,
            1,
        ),
        Family::SapsCached => {
            let full = spec
                .cached
                .as_ref()
                .ok_or_else(|| Error::config("saps-cached needs a cached landscape file"))?;
            let ranges = full.space().ranges();
            if ranges.len() != 2 || ranges[1] != 16 || size / 16 > ranges[0] {
                return Err(Error::config(format!(
                    "cached landscape of shape {ranges:?} cannot provide size {size} (α × 16 ρ values)"
                )));
            }
            let sub = full.restrict(&[size / 16, 16], spec.top)?;
            Ok(Scenario {
                family,
                size,
                space: sub.space().clone(),
                kappa,
                max_step,
                init: InitRule::Uniform,
                source: Source::Fixed {
                    targets: sub.targets().clone(),
                    objective: Arc::new(sub),
                },
            })
        }
        Family::Synthetic(kind) => Ok(Scenario {
            family,
            size,
            space: ParameterSpace::single("x", size)?,
            kappa,
            max_step,
            init: InitRule::Uniform,
            source: Source::Synthetic(kind),
        }),
    }
}

/// One configurator run of an experiment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub family: String,
    pub configurator: String,
    pub operator: String,
    pub space_size: usize,
    pub repetition: usize,
    pub seed: u64,
    /// Calls to `better()` until an optimal configuration was first
    /// sampled (the cap for censored runs); empty when the repetition
    /// failed.
    pub better_calls: Option<u64>,
    pub accounting_mode: String,
}

impl TrialRecord {
    /// Whether the repetition hit the call cap before sampling an optimum.
    pub fn is_censored(&self) -> bool {
        self.accounting_mode.contains("censored-at=")
    }
}

/// Seed of repetition `rep` at `size`; shared by all operators and
/// configurators so that they face the same landscapes.
pub fn repetition_seed(master: u64, size: usize, rep: usize) -> u64 {
    derive_seed(derive_seed(master, size as u64), rep as u64)
}

/// How a repetition ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrialOutcome {
    /// Calls until an optimal configuration was first sampled.
    Hit(u64),
    /// The call cap was reached first (for instance, stuck on a plateau).
    Censored(u64),
}

/// Runs one repetition.
pub fn run_trial(spec: &ScenarioSpec, scenario: &Scenario, seed: u64) -> Result<TrialOutcome> {
    let operator = spec.operator()?;
    let (objective, targets): (Arc<dyn Objective>, TargetSet) = match &scenario.source {
        Source::Fixed { objective, targets } => (objective.clone(), targets.clone()),
        Source::Synthetic(kind) => {
            let mut rng = rng_from_seed(derive_seed(seed, 1));
            let land = generate_synthetic(*kind, scenario.size, &mut rng)?;
            let targets = land.targets().clone();
            (Arc::new(land), targets)
        }
    };
    let eval = EvalProtocol::new(objective, spec.runs)?;
    let problem = Problem {
        space: &scenario.space,
        eval: &eval,
        targets: Some(&targets),
    };
    let run_seed = derive_seed(seed, 0);
    let cap = spec.call_cap(scenario.space.total_range());
    let stop = StopRule::FirstOptimumWithin(cap);
    let trace = match spec.configurator {
        ConfiguratorKind::ParamRls => run_param_rls(&problem, operator, stop, run_seed)?,
        ConfiguratorKind::ParamIls => {
            let settings = ParamIlsSettings {
                operator,
                ..spec.ils
            };
            run_param_ils(&problem, &settings, stop, run_seed)?
        }
    };
    Ok(match trace.first_sampled_optimum_at {
        Some(calls) => TrialOutcome::Hit(calls),
        None => TrialOutcome::Censored(trace.better_calls),
    })
}

/// Runs every repetition at every size of the schedule. Records come back
/// sorted by (size, repetition) whatever the execution order.
pub fn run_scenario(spec: &ScenarioSpec) -> Result<Vec<TrialRecord>> {
    spec.validate()?;
    let mode = spec.accounting_mode()?;
    let scenarios = spec
        .sizes
        .iter()
        .map(|&size| build_scenario(spec, size))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, usize)> = (0..scenarios.len())
        .flat_map(|s| (0..spec.repetitions).map(move |r| (s, r)))
        .collect();
    let mut records: Vec<TrialRecord> = jobs
        .par_iter()
        .map(|&(s, rep)| {
            let scenario = &scenarios[s];
            let seed = repetition_seed(spec.master_seed, scenario.size, rep);
            let (better_calls, accounting_mode) = match run_trial(spec, scenario, seed) {
                Ok(TrialOutcome::Hit(calls)) => (Some(calls), mode.clone()),
                Ok(TrialOutcome::Censored(calls)) => {
                    (Some(calls), format!("{mode};censored-at={calls}"))
                }
                Err(e) => (None, format!("{mode};failed={e}")),
            };
            TrialRecord {
                family: spec.family.id(),
                configurator: spec.configurator.id().into(),
                operator: spec.operator.clone(),
                space_size: scenario.size,
                repetition: rep,
                seed,
                better_calls,
                accounting_mode,
            }
        })
        .collect();
    records.sort_by_key(|r| (r.space_size, r.repetition));
    Ok(records)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub family: String,
    pub configurator: String,
    pub operator: String,
    pub space_size: usize,
    pub mean: f64,
    pub stderr: f64,
    /// Mann-Whitney p of the candidate against the baseline; empty on
    /// baseline rows.
    pub p_value: Option<f64>,
    /// Cliff's delta of baseline calls against candidate calls: positive
    /// when the candidate needs fewer calls.
    pub cliffs_delta: Option<f64>,
    pub n: usize,
}

/// Per (family, configurator, size): baseline and candidate means with the
/// candidate's significance and effect size against the baseline.
pub fn summarize(
    records: &[TrialRecord],
    baseline: &str,
    candidate: &str,
) -> Result<Vec<SummaryRow>> {
    type Key = (String, String, usize);
    let mut groups: BTreeMap<Key, BTreeMap<String, Vec<f64>>> = BTreeMap::new();
    for r in records {
        if r.operator != baseline && r.operator != candidate {
            continue;
        }
        let calls = groups
            .entry((r.family.clone(), r.configurator.clone(), r.space_size))
            .or_default()
            .entry(r.operator.clone())
            .or_default();
        if let Some(c) = r.better_calls {
            calls.push(c as f64);
        }
    }
    if groups.is_empty() {
        return Err(Error::config(format!(
            "no records for operators `{baseline}` or `{candidate}`"
        )));
    }
    let mut rows = Vec::new();
    for ((family, configurator, size), by_op) in groups {
        let sample = |op: &str| -> Result<&Vec<f64>> {
            by_op.get(op).filter(|v| !v.is_empty()).ok_or_else(|| {
                Error::config(format!(
                    "no successful `{op}` records for {family}/{configurator} at size {size}"
                ))
            })
        };
        let base = sample(baseline)?;
        let cand = sample(candidate)?;
        let cmp = compare(base, cand)?;
        for (op, xs, is_candidate) in [(baseline, base, false), (candidate, cand, true)] {
            let (mean, stderr) = mean_stderr(xs)?;
            rows.push(SummaryRow {
                family: family.clone(),
                configurator: configurator.clone(),
                operator: op.to_owned(),
                space_size: size,
                mean,
                stderr,
                p_value: is_candidate.then_some(cmp.p_value),
                cliffs_delta: is_candidate.then_some(cmp.cliffs_delta),
                n: xs.len(),
            });
        }
    }
    Ok(rows)
}

pub const RAW_HEADER: [&str; 8] = [
    "family",
    "configurator",
    "operator",
    "space_size",
    "repetition",
    "seed",
    "better_calls",
    "accounting_mode",
];

pub const SUMMARY_HEADER: [&str; 9] = [
    "family",
    "configurator",
    "operator",
    "space_size",
    "mean",
    "stderr",
    "p_value",
    "cliffs_delta",
    "n",
];

fn write_rows<T: Serialize, W: std::io::Write>(
    header: &[&str],
    rows: &[T],
    writer: W,
) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    w.write_record(header)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

fn read_rows<T: serde::de::DeserializeOwned, R: std::io::Read>(
    header: &[&str],
    reader: R,
) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_reader(reader);
    let found = r
        .headers()
        .map_err(|e| Error::config(format!("unreadable CSV header: {e}")))?
        .clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(Error::config(format!(
            "expected CSV header `{}`, found `{}`",
            header.join(","),
            found.iter().collect::<Vec<_>>().join(",")
        )));
    }
    r.deserialize()
        .enumerate()
        .map(|(i, row)| row.map_err(|e| Error::config(format!("CSV row {}: {e}", i + 2))))
        .collect()
}

pub fn write_records<W: std::io::Write>(records: &[TrialRecord], writer: W) -> csv::Result<()> {
    write_rows(&RAW_HEADER, records, writer)
}

pub fn read_records<R: std::io::Read>(reader: R) -> Result<Vec<TrialRecord>> {
    read_rows(&RAW_HEADER, reader)
}

pub fn write_summary<W: std::io::Write>(rows: &[SummaryRow], writer: W) -> csv::Result<()> {
    write_rows(&SUMMARY_HEADER, rows, writer)
}

pub fn read_summary<R: std::io::Read>(reader: R) -> Result<Vec<SummaryRow>> {
    read_rows(&SUMMARY_HEADER, reader)
}

/// Writes raw records to `path`.
pub fn emit_records(records: &[TrialRecord], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_records(records, file).map_err(|e| Error::csv(path, e))
}

/// Writes summary rows to `path`.
pub fn emit_summary(rows: &[SummaryRow], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_summary(rows, file).map_err(|e| Error::csv(path, e))
}

pub fn load_records(path: &Path) -> Result<Vec<TrialRecord>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_records(file)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(family: Family, op: &str, sizes: Vec<usize>, reps: usize) -> ScenarioSpec {
        ScenarioSpec {
            sizes,
            repetitions: reps,
            master_seed: 99,
            ..ScenarioSpec::new(family, ConfiguratorKind::ParamRls, op)
        }
    }

    #[test]
    fn ridge_grid() {
        let s = spec(Family::RidgeEa, "lstep", vec![10], 1);
        let sc = build_scenario(&s, 10).unwrap();
        let chis: Vec<f64> = sc.space.iter().map(|c| sc.space.decode(&c)[0]).collect();
        assert_eq!(chis.first(), Some(&0.5));
        assert!((chis.last().unwrap() - 5.0).abs() < 1e-12);
        let opt = sc.targets().unwrap().iter().next().unwrap().clone();
        assert_eq!(opt, Configuration::new(vec![2]));
        assert_eq!(sc.space.decode(&opt)[0], 1.0);
        assert_eq!(
            (sc.kappa, sc.max_step, sc.init),
            (2500, 1, InitRule::RidgeStart)
        );
        let full = build_scenario(&s, 50).unwrap();
        assert!((full.space.decode(&Configuration::new(vec![50]))[0] - 25.0).abs() < 1e-12);
    }

    #[test]
    fn leadingones_grid() {
        let s = spec(Family::LeadingOnesEa, "lstep", vec![50], 1);
        let sc = build_scenario(&s, 50).unwrap();
        let opt = sc.targets().unwrap().iter().next().unwrap().clone();
        assert!((sc.space.decode(&opt)[0] - 1.6).abs() < 1e-12);
        assert!((sc.space.decode(&Configuration::new(vec![1]))[0] - 0.6).abs() < 1e-12);
        assert!((sc.space.decode(&Configuration::new(vec![50]))[0] - 25.1).abs() < 1e-12);
    }

    #[test]
    fn onemax_grid() {
        let s = spec(Family::OneMaxRls, "lstep", vec![10], 1);
        let sc = build_scenario(&s, 10).unwrap();
        let ks: Vec<f64> = sc.space.iter().map(|c| sc.space.decode(&c)[0]).collect();
        assert_eq!(ks, (1..=10).map(f64::from).collect::<Vec<_>>());
        assert_eq!((sc.kappa, sc.max_step), (200, 2));
        assert_eq!(s.operator().unwrap(), Operator::LStep { max_step: 2 });
    }

    #[test]
    fn saps_sizes() {
        let grid = crate::sat::saps_grid(30).unwrap();
        let values: Vec<f64> = (0..480).map(|i| ((i * 37) % 101) as f64).collect();
        let land = Landscape::cached(grid, values, 5).unwrap();
        let mut s = spec(Family::SapsCached, "harmonic", vec![48], 1);
        s.cached = Some(Arc::new(land));
        let sc = build_scenario(&s, 48).unwrap();
        assert_eq!(sc.space.ranges(), vec![3, 16]);
        assert_eq!(sc.targets().unwrap().len(), 5);
        assert!(build_scenario(&s, 50).is_err());
    }

    #[test]
    fn bad_specs() {
        assert!(build_scenario(&spec(Family::RidgeEa, "lstep", vec![7], 1), 7).is_err());
        assert!(run_scenario(&spec(Family::RidgeEa, "lstep", vec![10], 0)).is_err());
        assert!(run_scenario(&spec(Family::RidgeEa, "lstep", vec![10, 5], 1)).is_err());
        assert!(run_scenario(&spec(Family::RidgeEa, "nope", vec![10], 1)).is_err());
        assert!("synthetic:weird".parse::<Family>().is_err());
        assert_eq!(
            "synthetic:sawtooth(2)".parse::<Family>().unwrap(),
            Family::Synthetic(SyntheticKind::Sawtooth(2.0))
        );
    }

    #[test]
    fn two_value_space_averages_half_a_call() {
        let s = spec(
            Family::Synthetic(SyntheticKind::Unimodal),
            "lstep",
            vec![2],
            10_000,
        );
        let records = run_scenario(&s).unwrap();
        let calls: Vec<f64> = records
            .iter()
            .map(|r| r.better_calls.unwrap() as f64)
            .collect();
        let (mean, _) = mean_stderr(&calls).unwrap();
        assert!((mean - 0.5).abs() < 0.02, "{mean}");
    }

    #[test]
    fn records_are_deterministic_and_round_trip() {
        let s = spec(
            Family::Synthetic(SyntheticKind::Unimodal),
            "harmonic",
            vec![8, 16],
            20,
        );
        let a = run_scenario(&s).unwrap();
        let b = run_scenario(&s).unwrap();
        assert_eq!(a, b);
        let mut buf = Vec::new();
        write_records(&a, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().count(), 41);
        assert!(!text.contains('\r'));
        assert_eq!(read_records(buf.as_slice()).unwrap(), a);
    }

    #[test]
    fn empty_and_small_csv() {
        let mut buf = Vec::new();
        write_records(&[], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            format!("{}\n", RAW_HEADER.join(","))
        );
        let record = |rep| TrialRecord {
            family: "ridge-ea".into(),
            configurator: "paramrls".into(),
            operator: "lstep".into(),
            space_size: 10,
            repetition: rep,
            seed: 1,
            better_calls: if rep == 1 { None } else { Some(3) },
            accounting_mode: "first-sampled-charged;r=50".into(),
        };
        let recs = vec![record(0), record(1), record(2)];
        let mut buf = Vec::new();
        write_records(&recs, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap().lines().count(), 4);
        assert_eq!(read_records(buf.as_slice()).unwrap(), recs);
    }

    #[test]
    fn summary_conventions() {
        let mk = |op: &str, rep: usize, calls: u64| TrialRecord {
            family: "f".into(),
            configurator: "paramrls".into(),
            operator: op.into(),
            space_size: 10,
            repetition: rep,
            seed: rep as u64,
            better_calls: Some(calls),
            accounting_mode: String::new(),
        };
        let mut same = Vec::new();
        for rep in 0..20 {
            same.push(mk("lstep", rep, rep as u64 % 7));
            same.push(mk("harmonic", rep, rep as u64 % 7));
        }
        let rows = summarize(&same, "lstep", "harmonic").unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[1].cliffs_delta, Some(0.0));
        assert!(rows[1].p_value.unwrap() > 0.99);

        let mut worse = Vec::new();
        for rep in 0..20 {
            worse.push(mk("lstep", rep, rep as u64));
            worse.push(mk("harmonic", rep, 100 + rep as u64));
        }
        let rows = summarize(&worse, "lstep", "harmonic").unwrap();
        assert!(rows[1].cliffs_delta.unwrap() < 0.0);

        let only_one: Vec<_> = (0..5).map(|r| mk("lstep", r, 1)).collect();
        let err = summarize(&only_one, "lstep", "harmonic")
            .unwrap_err()
            .to_string();
        assert!(err.contains("harmonic") && err.contains("size 10"), "{err}");

        let mut buf = Vec::new();
        write_summary(&rows, &mut buf).unwrap();
        assert_eq!(read_summary(buf.as_slice()).unwrap(), rows);
    }

    #[test]
    fn infeasible_grid_is_rejected() {
        let mut s = spec(Family::OneMaxRls, "lstep", vec![10], 2);
        s.n = 8;
        // k = 9, 10 exceed n: the scenario is rejected before any run.
        assert!(run_scenario(&s).is_err());
    }
}
