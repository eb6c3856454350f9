//! Configurator drivers: ParamRLS (ParamHS with the harmonic operator) and
//! ParamILS with IterativeFirstImprovement, all counting `better()` calls.
//!
//! A run is driven through a [`Session`], which owns the shared `better()`
//! counter, the stop rule and the trace. Reaching the stop condition surfaces
//! as [`Interrupt::Halt`] so that the algorithms can be written as plain
//! loops and unwound with `?` from any depth.

use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{harmonic_tables, HarmonicDistribution, Mutator, Operator};
use crate::rng::{derive_seed, rng_from_seed, Rng as StdRng};
use crate::space::{Configuration, ParameterSpace};

/// Something whose configurations can be scored; higher is better.
pub trait Objective: Send + Sync {
    /// Mean performance of `config` over `runs` runs. `seed` fully determines
    /// the randomness used.
    fn estimate(&self, config: &Configuration, runs: u32, seed: u64) -> Result<f64>;
}

/// The `better()` contract: what is run and how many times per comparison.
#[derive(Clone)]
pub struct EvalProtocol {
    objective: Arc<dyn Objective>,
    runs: u32,
}

impl EvalProtocol {
    pub fn new(objective: Arc<dyn Objective>, runs: u32) -> Result<Self> {
        if runs == 0 {
            return Err(Error::config("runs per comparison must be at least 1"));
        }
        Ok(Self { objective, runs })
    }

    pub fn runs(&self) -> u32 {
        self.runs
    }

    pub fn objective(&self) -> &dyn Objective {
        self.objective.as_ref()
    }
}

impl std::fmt::Debug for EvalProtocol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EvalProtocol")
            .field("runs", &self.runs)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Winner {
    First,
    Second,
}

/// One uncounted comparison: `Second` iff the mean of `b` strictly exceeds
/// the mean of `a`. Each side gets its own stream derived from `seed`.
pub fn better(
    eval: &EvalProtocol,
    a: &Configuration,
    b: &Configuration,
    seed: u64,
) -> Result<Winner> {
    let qa = eval
        .objective
        .estimate(a, eval.runs, derive_seed(seed, 0))?;
    let qb = eval
        .objective
        .estimate(b, eval.runs, derive_seed(seed, 1))?;
    Ok(if qb > qa {
        Winner::Second
    } else {
        Winner::First
    })
}

/// Configurations counting as "optimal" for the first-sampled stop rule.
pub type TargetSet = BTreeSet<Configuration>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopRule {
    /// Halt when a member of the target set is first generated.
    FirstOptimumSampled,
    /// Halt once this many `better()` calls have been made.
    Budget(u64),
    /// Halt when a target is first generated, or after this many calls
    /// without one (the run is then censored).
    FirstOptimumWithin(u64),
}

impl StopRule {
    fn halts_on_target(&self) -> bool {
        matches!(
            self,
            StopRule::FirstOptimumSampled | StopRule::FirstOptimumWithin(_)
        )
    }

    fn call_limit(&self) -> Option<u64> {
        match *self {
            StopRule::Budget(n) | StopRule::FirstOptimumWithin(n) => Some(n),
            StopRule::FirstOptimumSampled => None,
        }
    }

    pub fn validate(&self, targets: Option<&TargetSet>) -> Result<()> {
        match self {
            StopRule::FirstOptimumSampled | StopRule::FirstOptimumWithin(_)
                if targets.is_none_or(BTreeSet::is_empty) =>
            {
                Err(Error::config(
                    "first-optimum stopping needs a non-empty target set",
                ))
            }
            StopRule::Budget(0) | StopRule::FirstOptimumWithin(0) => {
                Err(Error::config("call budget must be at least 1"))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub better_calls: u64,
    /// Calls charged when a target configuration was first generated: 0 when
    /// the initial configuration is a target, otherwise the count including
    /// the comparison that evaluates it.
    pub first_sampled_optimum_at: Option<u64>,
    /// `(calls so far, incumbent)` at every incumbent change, when recorded.
    pub history: Vec<(u64, Configuration)>,
    pub incumbent: Option<Configuration>,
}

/// Why a run stopped early.
#[derive(Debug)]
pub enum Interrupt {
    Halt,
    Failed(Error),
}

impl From<Error> for Interrupt {
    fn from(e: Error) -> Self {
        Interrupt::Failed(e)
    }
}

/// Per-run evaluation context: the counted `better()` and the stop rule.
pub struct Session<'a> {
    eval: &'a EvalProtocol,
    targets: Option<&'a TargetSet>,
    stop: StopRule,
    seed: u64,
    record_history: bool,
    pending_target: bool,
    trace: RunTrace,
}

impl<'a> Session<'a> {
    pub fn new(
        eval: &'a EvalProtocol,
        targets: Option<&'a TargetSet>,
        stop: StopRule,
        seed: u64,
    ) -> Result<Self> {
        stop.validate(targets)?;
        Ok(Self {
            eval,
            targets,
            stop,
            seed,
            record_history: false,
            pending_target: false,
            trace: RunTrace::default(),
        })
    }

    pub fn with_history(mut self, on: bool) -> Self {
        self.record_history = on;
        self
    }

    pub fn calls(&self) -> u64 {
        self.trace.better_calls
    }

    pub fn trace(&self) -> &RunTrace {
        &self.trace
    }

    pub fn into_trace(self) -> RunTrace {
        self.trace
    }

    fn is_target(&self, config: &Configuration) -> bool {
        self.trace.first_sampled_optimum_at.is_none()
            && self.targets.is_some_and(|t| t.contains(config))
    }

    /// Reports an initial configuration (drawn before any comparison).
    pub fn initialized(&mut self, config: &Configuration) -> Result<(), Interrupt> {
        if self.trace.better_calls == 0 && self.is_target(config) {
            self.trace.first_sampled_optimum_at = Some(0);
            if self.stop.halts_on_target() {
                return Err(Interrupt::Halt);
            }
            return Ok(());
        }
        self.generated(config)
    }

    /// Reports a freshly generated candidate.
    pub fn generated(&mut self, config: &Configuration) -> Result<(), Interrupt> {
        if !self.is_target(config) {
            return Ok(());
        }
        if self.stop.halts_on_target() {
            if self
                .stop
                .call_limit()
                .is_some_and(|n| self.trace.better_calls >= n)
            {
                return Err(Interrupt::Halt);
            }
            // Charge the comparison that would evaluate the candidate.
            self.trace.better_calls += 1;
            self.trace.first_sampled_optimum_at = Some(self.trace.better_calls);
            Err(Interrupt::Halt)
        } else {
            self.pending_target = true;
            Ok(())
        }
    }

    /// The counted `better()`; ties keep `a`.
    pub fn better(&mut self, a: &Configuration, b: &Configuration) -> Result<Winner, Interrupt> {
        if let Some(limit) = self.stop.call_limit() {
            if self.trace.better_calls >= limit {
                return Err(Interrupt::Halt);
            }
        }
        let call_seed = derive_seed(self.seed, self.trace.better_calls);
        let winner = better(self.eval, a, b, call_seed)?;
        self.trace.better_calls += 1;
        if self.pending_target {
            self.pending_target = false;
            self.trace.first_sampled_optimum_at = Some(self.trace.better_calls);
        }
        Ok(winner)
    }

    /// Whether `challenger` strictly beats `incumbent`.
    pub fn improves(
        &mut self,
        incumbent: &Configuration,
        challenger: &Configuration,
    ) -> Result<bool, Interrupt> {
        Ok(self.better(incumbent, challenger)? == Winner::Second)
    }

    pub fn incumbent_changed(&mut self, config: &Configuration) {
        if self.record_history {
            self.trace
                .history
                .push((self.trace.better_calls, config.clone()));
        }
    }

    fn finish(
        mut self,
        outcome: Result<(), Interrupt>,
        incumbent: Configuration,
    ) -> Result<RunTrace> {
        match outcome {
            Ok(()) | Err(Interrupt::Halt) => {
                self.trace.incumbent = Some(incumbent);
                Ok(self.trace)
            }
            Err(Interrupt::Failed(e)) => Err(e),
        }
    }
}

/// What a configurator tunes: the space, the comparison protocol and the
/// optimal configurations (when known).
#[derive(Clone, Copy)]
pub struct Problem<'a> {
    pub space: &'a ParameterSpace,
    pub eval: &'a EvalProtocol,
    pub targets: Option<&'a TargetSet>,
}

fn streams(seed: u64) -> (StdRng, u64) {
    (rng_from_seed(derive_seed(seed, 0)), derive_seed(seed, 1))
}

/// ParamRLS with the given mutation operator (ParamHS with `harmonic`).
pub fn run_param_rls(
    problem: &Problem<'_>,
    operator: Operator,
    stop: StopRule,
    seed: u64,
) -> Result<RunTrace> {
    run_param_rls_with(problem, operator, stop, seed, false)
}

pub fn run_param_rls_with(
    problem: &Problem<'_>,
    operator: Operator,
    stop: StopRule,
    seed: u64,
    record_history: bool,
) -> Result<RunTrace> {
    let (mut rng, eval_seed) = streams(seed);
    let space = problem.space;
    let mut session =
        Session::new(problem.eval, problem.targets, stop, eval_seed)?.with_history(record_history);
    let mut theta = space.sample_uniform(&mut rng);
    let mut mutator = Mutator::new(operator, space, &theta)?;
    session.incumbent_changed(&theta);

    let outcome = (|| -> Result<(), Interrupt> {
        session.initialized(&theta)?;
        loop {
            let candidate = mutator.propose(space, &theta, &mut rng, |a, b| {
                session.generated(a)?;
                session.generated(b)?;
                session.improves(a, b)
            })?;
            session.generated(&candidate)?;
            if session.improves(&theta, &candidate)? {
                theta = candidate;
                session.incumbent_changed(&theta);
            }
        }
    })();
    session.finish(outcome, theta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamIlsSettings {
    /// R, random configurations screened before local search.
    pub initial_samples: usize,
    /// s, random neighbor steps per perturbation.
    pub perturbation_strength: usize,
    pub restart_probability: f64,
    /// Orders the local-search neighborhood scan.
    pub operator: Operator,
}

impl Default for ParamIlsSettings {
    fn default() -> Self {
        Self {
            initial_samples: 0,
            perturbation_strength: 3,
            restart_probability: 0.01,
            operator: Operator::Random {
                without_replacement: true,
            },
        }
    }
}

impl ParamIlsSettings {
    pub fn validate(&self) -> Result<()> {
        if self.perturbation_strength == 0 {
            return Err(Error::config(
                "ParamILS perturbation strength s must be ≥ 1",
            ));
        }
        if !(0.0..=1.0).contains(&self.restart_probability) {
            return Err(Error::config(
                "ParamILS restart probability must lie in [0, 1]",
            ));
        }
        self.operator.validate()
    }
}

/// Local search state shared between ParamILS and its first-improvement
/// procedure.
pub struct LocalSearch<'a> {
    space: &'a ParameterSpace,
    operator: Operator,
    tables: Vec<HarmonicDistribution>,
    /// Configurations that have taken part in a comparison since the last
    /// restart.
    pub discovered: HashSet<Configuration>,
}

impl<'a> LocalSearch<'a> {
    pub fn new(space: &'a ParameterSpace, operator: Operator) -> Self {
        Self {
            space,
            operator,
            tables: harmonic_tables(space),
            discovered: HashSet::new(),
        }
    }

    /// Moves to the first strictly improving undiscovered neighbor, scanning
    /// in an order drawn from the operator's proposal weights without
    /// replacement, until a scan finds no improvement.
    pub fn iterative_first_improvement<R: Rng + ?Sized>(
        &mut self,
        start: Configuration,
        session: &mut Session<'_>,
        rng: &mut R,
    ) -> Result<Configuration, Interrupt> {
        let mut theta = start;
        loop {
            let current = theta.clone();
            let mut pool: Vec<(Configuration, f64)> = self
                .space
                .neighborhood(&current)
                .into_iter()
                .filter(|n| !self.discovered.contains(n))
                .filter_map(|n| {
                    let w = self.operator.scan_weight(&self.tables, &current, &n);
                    (w > 0.0).then_some((n, w))
                })
                .collect();
            while !pool.is_empty() {
                let (candidate, _) = pool.swap_remove(weighted_pick(&pool, rng));
                session.generated(&candidate)?;
                self.discovered.insert(current.clone());
                self.discovered.insert(candidate.clone());
                if session.improves(&current, &candidate)? {
                    theta = candidate;
                    break;
                }
            }
            if theta == current {
                return Ok(theta);
            }
        }
    }
}

fn weighted_pick<R: Rng + ?Sized>(pool: &[(Configuration, f64)], rng: &mut R) -> usize {
    let total: f64 = pool.iter().map(|(_, w)| w).sum();
    let mut u = rng.gen::<f64>() * total;
    for (i, (_, w)) in pool.iter().enumerate() {
        if u < *w {
            return i;
        }
        u -= w;
    }
    pool.len() - 1
}

/// ParamILS (BasicILS: every comparison uses the protocol's fixed `r`).
pub fn run_param_ils(
    problem: &Problem<'_>,
    settings: &ParamIlsSettings,
    stop: StopRule,
    seed: u64,
) -> Result<RunTrace> {
    run_param_ils_with(problem, settings, stop, seed, false)
}

pub fn run_param_ils_with(
    problem: &Problem<'_>,
    settings: &ParamIlsSettings,
    stop: StopRule,
    seed: u64,
    record_history: bool,
) -> Result<RunTrace> {
    settings.validate()?;
    let (mut rng, eval_seed) = streams(seed);
    let space = problem.space;
    let mut session =
        Session::new(problem.eval, problem.targets, stop, eval_seed)?.with_history(record_history);
    let mut search = LocalSearch::new(space, settings.operator);
    let mut theta0 = space.sample_uniform(&mut rng);
    let mut incumbent = theta0.clone();

    let outcome = (|| -> Result<(), Interrupt> {
        session.initialized(&theta0)?;
        for _ in 0..settings.initial_samples {
            let theta = space.sample_uniform(&mut rng);
            session.generated(&theta)?;
            search.discovered.insert(theta.clone());
            search.discovered.insert(theta0.clone());
            if session.improves(&theta0, &theta)? {
                theta0 = theta;
            }
        }
        incumbent = theta0.clone();
        session.incumbent_changed(&incumbent);
        let mut ils = search.iterative_first_improvement(theta0.clone(), &mut session, &mut rng)?;
        incumbent = ils.clone();
        session.incumbent_changed(&incumbent);

        loop {
            let mut theta = ils.clone();
            for _ in 0..settings.perturbation_strength {
                theta = random_neighbor(space, &theta, &mut rng);
                session.generated(&theta)?;
            }
            theta = search.iterative_first_improvement(theta, &mut session, &mut rng)?;
            if session.improves(&ils, &theta)? {
                ils = theta;
            }
            if session.improves(&incumbent, &ils)? {
                incumbent = ils.clone();
                session.incumbent_changed(&incumbent);
            }
            if rng.gen_bool(settings.restart_probability) {
                ils = space.sample_uniform(&mut rng);
                search.discovered.clear();
                session.generated(&ils)?;
            }
        }
    })();
    session.finish(outcome, incumbent)
}

/// Standalone first-improvement local search from `start`.
pub fn iterative_first_improvement(
    problem: &Problem<'_>,
    operator: Operator,
    start: Configuration,
    discovered: &mut HashSet<Configuration>,
    seed: u64,
) -> Result<(Configuration, RunTrace)> {
    let (mut rng, eval_seed) = streams(seed);
    let mut session = Session::new(
        problem.eval,
        problem.targets,
        StopRule::Budget(u64::MAX),
        eval_seed,
    )?;
    let mut search = LocalSearch::new(problem.space, operator);
    search.discovered = std::mem::take(discovered);
    let result = search.iterative_first_improvement(start, &mut session, &mut rng);
    *discovered = search.discovered;
    match result {
        Ok(c) => Ok((c, session.into_trace())),
        Err(Interrupt::Failed(e)) => Err(e),
        Err(Interrupt::Halt) => unreachable!("unbounded budget never halts"),
    }
}

/// A uniformly random member of the neighborhood.
fn random_neighbor<R: Rng + ?Sized>(
    space: &ParameterSpace,
    theta: &Configuration,
    rng: &mut R,
) -> Configuration {
    let size = space.total_range() - space.num_dims();
    let mut pick = rng.gen_range(0..size);
    for (d, dim) in space.dims().iter().enumerate() {
        let others = dim.count() - 1;
        if pick < others {
            let mut value = pick + 1;
            if value >= theta.get(d) {
                value += 1;
            }
            return theta.with(d, value);
        }
        pick -= others;
    }
    unreachable!("pick is below the neighborhood size")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::landscape::Landscape;
    use crate::operators::DirectionMode;

    fn cfg(v: &[usize]) -> Configuration {
        Configuration::new(v.to_vec())
    }

    fn exact(values: &[f64]) -> (Landscape, EvalProtocol) {
        let land = Landscape::exact_1d(values.to_vec()).unwrap();
        let eval = EvalProtocol::new(Arc::new(land.clone()), 1).unwrap();
        (land, eval)
    }

    /// Counts calls to `estimate`.
    struct Counting(std::sync::atomic::AtomicU64);

    impl Objective for Counting {
        fn estimate(&self, c: &Configuration, _: u32, _: u64) -> Result<f64> {
            self.0.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
            Ok(-(c.get(0) as f64 - 7.0).abs())
        }
    }

    #[test]
    fn better_examples() {
        // f = (3, 2, 1) minimised, so quality = −f.
        let (_, eval) = exact(&[-3.0, -2.0, -1.0]);
        assert_eq!(
            better(&eval, &cfg(&[1]), &cfg(&[3]), 0).unwrap(),
            Winner::Second
        );
        assert_eq!(
            better(&eval, &cfg(&[3]), &cfg(&[1]), 0).unwrap(),
            Winner::First
        );
        assert_eq!(
            better(&eval, &cfg(&[2]), &cfg(&[2]), 0).unwrap(),
            Winner::First
        );
    }

    #[test]
    fn protocol_rejects_zero_runs() {
        let (land, _) = exact(&[1.0, 2.0]);
        assert!(EvalProtocol::new(Arc::new(land), 0).is_err());
    }

    #[test]
    fn first_optimum_rule_needs_targets() {
        let (_, eval) = exact(&[1.0, 2.0]);
        assert!(Session::new(&eval, None, StopRule::FirstOptimumSampled, 0).is_err());
        let empty = TargetSet::new();
        assert!(Session::new(&eval, Some(&empty), StopRule::FirstOptimumSampled, 0).is_err());
        assert!(Session::new(&eval, None, StopRule::Budget(0), 0).is_err());
    }

    #[test]
    fn initial_hit_costs_nothing() {
        let (land, eval) = exact(&[1.0, 2.0]);
        let space = ParameterSpace::single("x", 2).unwrap();
        let problem = Problem {
            space: &space,
            eval: &eval,
            targets: Some(land.targets()),
        };
        let mut zero = 0;
        for seed in 0..200 {
            let t = run_param_rls(
                &problem,
                Operator::LStep { max_step: 1 },
                StopRule::FirstOptimumSampled,
                seed,
            )
            .unwrap();
            let at = t.first_sampled_optimum_at.unwrap();
            assert!(at <= t.better_calls);
            if at == 0 {
                zero += 1;
                assert_eq!(t.better_calls, 0);
            } else {
                assert_eq!(at, 1);
            }
        }
        assert!(zero > 60 && zero < 140);
    }

    #[test]
    fn budget_bounds_calls() {
        let (land, eval) = exact(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        let space = land.space().clone();
        let problem = Problem {
            space: &space,
            eval: &eval,
            targets: None,
        };
        for op in [
            Operator::LStep { max_step: 1 },
            Operator::Harmonic {
                mode: DirectionMode::BestOfBoth,
            },
        ] {
            let t = run_param_rls(&problem, op, StopRule::Budget(100), 3).unwrap();
            assert_eq!(t.better_calls, 100);
            let t = run_param_ils(
                &problem,
                &ParamIlsSettings::default(),
                StopRule::Budget(100),
                3,
            )
            .unwrap();
            assert!(t.better_calls <= 100);
        }
    }

    #[test]
    fn budget_run_still_records_first_sample() {
        let (land, eval) = exact(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]);
        let problem = Problem {
            space: land.space(),
            eval: &eval,
            targets: Some(land.targets()),
        };
        let t = run_param_rls(
            &problem,
            Operator::LStep { max_step: 1 },
            StopRule::Budget(500),
            1,
        )
        .unwrap();
        assert_eq!(t.better_calls, 500);
        let at = t.first_sampled_optimum_at.unwrap();
        assert!(at <= t.better_calls);
        assert_eq!(t.incumbent, Some(cfg(&[8])));
    }

    #[test]
    fn capped_run_is_censored_on_a_plateau() {
        // Ties keep the incumbent, so ℓ=1 can never leave the flat region.
        let (land, eval) = exact(&[9.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let problem = Problem {
            space: land.space(),
            eval: &eval,
            targets: Some(land.targets()),
        };
        let mut censored = 0;
        for seed in 0..100 {
            let t = run_param_rls(
                &problem,
                Operator::LStep { max_step: 1 },
                StopRule::FirstOptimumWithin(40),
                seed,
            )
            .unwrap();
            assert!(t.better_calls <= 40);
            match t.first_sampled_optimum_at {
                Some(at) => assert!(at <= 40),
                None => {
                    assert_eq!(t.better_calls, 40);
                    censored += 1;
                }
            }
        }
        // Only starts at positions 1 and 2 reach the optimum.
        assert!(censored > 50, "{censored}");
        assert!(Session::new(
            &eval,
            Some(land.targets()),
            StopRule::FirstOptimumWithin(0),
            0
        )
        .is_err());
    }

    #[test]
    fn every_comparison_hits_the_counter() {
        let objective = Arc::new(Counting(Default::default()));
        let eval = EvalProtocol::new(objective.clone(), 1).unwrap();
        let space = ParameterSpace::single("x", 30).unwrap();
        let problem = Problem {
            space: &space,
            eval: &eval,
            targets: None,
        };
        let runs: Vec<Box<dyn Fn(u64) -> RunTrace>> = vec![
            Box::new(|s| {
                run_param_rls(
                    &problem,
                    Operator::Harmonic {
                        mode: DirectionMode::BestOfBoth,
                    },
                    StopRule::Budget(300),
                    s,
                )
                .unwrap()
            }),
            Box::new(|s| {
                run_param_ils(
                    &problem,
                    &ParamIlsSettings::default(),
                    StopRule::Budget(300),
                    s,
                )
                .unwrap()
            }),
        ];
        for run in runs {
            objective.0.store(0, std::sync::atomic::Ordering::Relaxed);
            let t = run(9);
            // Two estimates per comparison.
            assert_eq!(
                objective.0.load(std::sync::atomic::Ordering::Relaxed),
                2 * t.better_calls
            );
        }
    }

    #[test]
    fn param_rls_is_elitist() {
        let values: Vec<f64> = (0..40)
            .map(|i| ((i * 37) % 17) as f64 + i as f64 * 0.01)
            .collect();
        let (land, eval) = exact(&values);
        let problem = Problem {
            space: land.space(),
            eval: &eval,
            targets: None,
        };
        for op in [
            Operator::LStep { max_step: 2 },
            Operator::Random {
                without_replacement: false,
            },
            Operator::Harmonic {
                mode: DirectionMode::RandomDirection,
            },
        ] {
            let t = run_param_rls_with(&problem, op, StopRule::Budget(400), 4, true).unwrap();
            let qualities: Vec<f64> = t.history.iter().map(|(_, c)| land.quality(c)).collect();
            assert!(qualities.windows(2).all(|w| w[1] > w[0]), "{op}");
        }
    }

    #[test]
    fn param_ils_incumbent_never_worsens() {
        let space = ParameterSpace::with_ranges(&[8, 6]).unwrap();
        let values: Vec<f64> = (0..48)
            .map(|i| ((i * 29) % 23) as f64 + i as f64 * 1e-3)
            .collect();
        let land = Landscape::exact(space.clone(), values, 1).unwrap();
        let eval = EvalProtocol::new(Arc::new(land.clone()), 1).unwrap();
        let problem = Problem {
            space: &space,
            eval: &eval,
            targets: None,
        };
        for op in [
            Operator::Random {
                without_replacement: true,
            },
            Operator::Harmonic {
                mode: DirectionMode::RandomDirection,
            },
        ] {
            let settings = ParamIlsSettings {
                operator: op,
                restart_probability: 0.2,
                ..Default::default()
            };
            let t =
                run_param_ils_with(&problem, &settings, StopRule::Budget(500), 5, true).unwrap();
            let q: Vec<f64> = t.history.iter().map(|(_, c)| land.quality(c)).collect();
            assert!(q.windows(2).all(|w| w[1] >= w[0]));
        }
    }

    #[test]
    fn ifi_examples() {
        let (land, eval) = exact(&[-1.0, -2.0, -3.0]);
        let problem = Problem {
            space: land.space(),
            eval: &eval,
            targets: None,
        };
        let op = Operator::Random {
            without_replacement: true,
        };
        for seed in 0..50 {
            let mut discovered = HashSet::new();
            let (end, trace) =
                iterative_first_improvement(&problem, op, cfg(&[3]), &mut discovered, seed)
                    .unwrap();
            assert_eq!(end, cfg(&[1]));
            assert!(trace.better_calls <= 3);
        }
        // Already optimal.
        let mut discovered = HashSet::new();
        let (end, _) =
            iterative_first_improvement(&problem, op, cfg(&[1]), &mut discovered, 0).unwrap();
        assert_eq!(end, cfg(&[1]));
        // Nothing undiscovered: immediate return without comparisons.
        let mut discovered: HashSet<_> = [cfg(&[1]), cfg(&[2])].into_iter().collect();
        let (end, trace) =
            iterative_first_improvement(&problem, op, cfg(&[3]), &mut discovered, 0).unwrap();
        assert_eq!(end, cfg(&[3]));
        assert_eq!(trace.better_calls, 0);
    }

    #[test]
    fn ils_phi_2_needs_at_most_one_mutation() {
        let (land, eval) = exact(&[0.0, 1.0]);
        let problem = Problem {
            space: land.space(),
            eval: &eval,
            targets: Some(land.targets()),
        };
        let mut total = 0;
        for seed in 0..1000 {
            let t = run_param_ils(
                &problem,
                &ParamIlsSettings::default(),
                StopRule::FirstOptimumSampled,
                seed,
            )
            .unwrap();
            assert!(t.better_calls <= 1);
            total += t.better_calls;
        }
        assert!(total as f64 / 1000.0 <= 2.0);
    }

    #[test]
    fn random_neighbor_is_uniform() {
        let space = ParameterSpace::with_ranges(&[3, 4]).unwrap();
        let theta = cfg(&[2, 2]);
        let mut rng = rng_from_seed(1);
        let mut counts = std::collections::BTreeMap::new();
        for _ in 0..50_000 {
            *counts
                .entry(random_neighbor(&space, &theta, &mut rng))
                .or_insert(0) += 1;
        }
        assert_eq!(counts.len(), 5);
        for (_, c) in counts {
            assert!((c as f64 / 50_000.0 - 0.2).abs() < 0.01);
        }
    }
}
