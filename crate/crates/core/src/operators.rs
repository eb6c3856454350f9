//! Mutation operators for perturbative configurators.
//!
//! Each operator changes exactly one parameter of the incumbent:
//!
//! * `lstep`: step size `d ∈ {1, …, ℓ}` and direction uniformly at random.
//! * `random` / `random-wr`: a new value uniformly at random, without or with
//!   replacement over the values already proposed in the run.
//! * `harmonic`: step size `d` with probability `1 / (d · H_{φ−1})`.
//!
//! Infeasible draws are rejected and the whole `(dimension, step, direction)`
//! triple is resampled, so an operator never returns the incumbent.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{Configuration, ParameterSpace};

/// H_m = Σ_{k=1}^{m} 1/k.
pub fn harmonic_number(m: usize) -> f64 {
    (1..=m).map(|k| 1.0 / k as f64).sum()
}

/// Step sizes `d ∈ {1, …, φ−1}` with `P(d) = 1 / (d · H_{φ−1})`.
#[derive(Debug, Clone)]
pub struct HarmonicDistribution {
    phi: usize,
    harmonic: f64,
    /// `cumulative[d - 1] = P(step ≤ d)`, the last entry pinned to 1.
    cumulative: Vec<f64>,
}

impl HarmonicDistribution {
    pub fn new(phi: usize) -> Result<Self> {
        if phi < 2 {
            return Err(Error::config(format!(
                "harmonic step distribution needs φ ≥ 2, got {phi}"
            )));
        }
        let harmonic = harmonic_number(phi - 1);
        let mut acc = 0.0;
        let mut cumulative: Vec<f64> = (1..phi)
            .map(|d| {
                acc += 1.0 / (d as f64 * harmonic);
                acc
            })
            .collect();
        *cumulative.last_mut().expect("φ ≥ 2") = 1.0;
        Ok(Self {
            phi,
            harmonic,
            cumulative,
        })
    }

    pub fn phi(&self) -> usize {
        self.phi
    }

    /// H_{φ−1}.
    pub fn harmonic(&self) -> f64 {
        self.harmonic
    }

    pub fn probability(&self, d: usize) -> f64 {
        if d == 0 || d >= self.phi {
            0.0
        } else {
            1.0 / (d as f64 * self.harmonic)
        }
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        self.cumulative.partition_point(|&c| c <= u) + 1
    }
}

/// How the harmonic operator resolves the two candidates at distance ±d.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum DirectionMode {
    /// One feasible direction uniformly at random.
    #[default]
    RandomDirection,
    /// When both directions are feasible, the better of the two according to
    /// one counted `better()` call.
    BestOfBoth,
}

impl DirectionMode {
    pub fn id(self) -> &'static str {
        match self {
            DirectionMode::RandomDirection => "random-direction",
            DirectionMode::BestOfBoth => "best-of-both",
        }
    }
}

impl FromStr for DirectionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random-direction" => Ok(DirectionMode::RandomDirection),
            "best-of-both" => Ok(DirectionMode::BestOfBoth),
            other => Err(Error::config(format!(
                "unknown harmonic direction mode `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Operator {
    LStep { max_step: usize },
    Random { without_replacement: bool },
    Harmonic { mode: DirectionMode },
}

impl Operator {
    pub fn id(&self) -> &'static str {
        match self {
            Operator::LStep { .. } => "lstep",
            Operator::Random {
                without_replacement: true,
            } => "random",
            Operator::Random {
                without_replacement: false,
            } => "random-wr",
            Operator::Harmonic { .. } => "harmonic",
        }
    }

    /// Parses an operator id; `max_step` applies to `lstep` and `mode` to
    /// `harmonic`.
    pub fn parse(id: &str, max_step: usize, mode: DirectionMode) -> Result<Self> {
        let op = match id {
            "lstep" => Operator::LStep { max_step },
            "random" => Operator::Random {
                without_replacement: true,
            },
            "random-wr" => Operator::Random {
                without_replacement: false,
            },
            "harmonic" => Operator::Harmonic { mode },
            other => return Err(Error::config(format!("unknown operator `{other}`"))),
        };
        op.validate()?;
        Ok(op)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Operator::LStep { max_step: 0 } => Err(Error::config("ℓ-step operator needs ℓ ≥ 1")),
            _ => Ok(()),
        }
    }

    /// Relative weight with which this operator proposes `neighbor` from
    /// `theta`; 0 when it never does. Used to order local-search scans.
    pub fn scan_weight(
        &self,
        tables: &[HarmonicDistribution],
        theta: &Configuration,
        neighbor: &Configuration,
    ) -> f64 {
        let Some((dim, distance)) = single_change(theta, neighbor) else {
            return 0.0;
        };
        match *self {
            Operator::Random { .. } => 1.0,
            Operator::LStep { max_step } => {
                if distance <= max_step {
                    1.0
                } else {
                    0.0
                }
            }
            Operator::Harmonic { .. } => {
                tables[dim].probability(distance) / (2.0 * tables.len() as f64)
            }
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

fn single_change(a: &Configuration, b: &Configuration) -> Option<(usize, usize)> {
    let mut found = None;
    for (dim, (&x, &y)) in a.indices().iter().zip(b.indices()).enumerate() {
        if x != y {
            if found.is_some() {
                return None;
            }
            found = Some((dim, x.abs_diff(y)));
        }
    }
    found
}

/// One harmonic table per dimension of `space`.
pub fn harmonic_tables(space: &ParameterSpace) -> Vec<HarmonicDistribution> {
    space
        .dims()
        .iter()
        .map(|dim| HarmonicDistribution::new(dim.count()).expect("dimensions have φ ≥ 2"))
        .collect()
}

/// Values not yet proposed in each dimension, for sampling without
/// replacement. Reset explicitly at the start of a run or on restart.
#[derive(Debug, Clone)]
pub struct OperatorState {
    remaining: Vec<Vec<usize>>,
}

impl OperatorState {
    /// Fresh state where only the values of `theta` count as proposed.
    pub fn new(space: &ParameterSpace, theta: &Configuration) -> Self {
        let mut state = Self {
            remaining: Vec::new(),
        };
        state.reset(space, theta);
        state
    }

    pub fn reset(&mut self, space: &ParameterSpace, theta: &Configuration) {
        self.remaining = space
            .dims()
            .iter()
            .enumerate()
            .map(|(d, dim)| (1..=dim.count()).filter(|&v| v != theta.get(d)).collect())
            .collect();
    }

    /// Marks `value` of dimension `dim` as proposed.
    pub fn mark(&mut self, dim: usize, value: usize) {
        let pool = &mut self.remaining[dim];
        if let Some(pos) = pool.iter().position(|&v| v == value) {
            pool.swap_remove(pos);
        }
    }

    pub fn is_proposed(&self, dim: usize, value: usize) -> bool {
        !self.remaining[dim].contains(&value)
    }

    pub fn remaining(&self, dim: usize) -> &[usize] {
        &self.remaining[dim]
    }

    pub fn all_exhausted(&self) -> bool {
        self.remaining.iter().all(Vec::is_empty)
    }
}

/// Every value of the chosen dimension has already been proposed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("no unproposed value left in dimension {dim}")]
pub struct NeighborhoodExhausted {
    pub dim: usize,
}

/// ℓ-step mutation: uniform dimension, uniform `d ∈ 1..=ℓ`, uniform sign.
pub fn mutate_l_step<R: Rng + ?Sized>(
    space: &ParameterSpace,
    theta: &Configuration,
    max_step: usize,
    rng: &mut R,
) -> Configuration {
    assert!(max_step >= 1, "ℓ-step operator needs ℓ ≥ 1");
    loop {
        let dim = rng.gen_range(0..space.num_dims());
        let d = rng.gen_range(1..=max_step);
        if let Some(value) = offset(theta.get(dim), d, rng.gen(), space.dim(dim).count()) {
            return theta.with(dim, value);
        }
    }
}

/// Uniform-value mutation of one uniformly chosen dimension.
///
/// With `state`, values are drawn without replacement and recorded; without
/// it, any value other than the current one is eligible.
pub fn mutate_random<R: Rng + ?Sized>(
    space: &ParameterSpace,
    theta: &Configuration,
    state: Option<&mut OperatorState>,
    rng: &mut R,
) -> Result<Configuration, NeighborhoodExhausted> {
    let dim = rng.gen_range(0..space.num_dims());
    let current = theta.get(dim);
    match state {
        None => {
            let mut value = rng.gen_range(1..space.dim(dim).count());
            if value >= current {
                value += 1;
            }
            Ok(theta.with(dim, value))
        }
        Some(state) => {
            let pool = &mut state.remaining[dim];
            loop {
                if pool.is_empty() {
                    return Err(NeighborhoodExhausted { dim });
                }
                let pick = rng.gen_range(0..pool.len());
                let value = pool.swap_remove(pick);
                // A caller may have moved `theta` to a value it never proposed.
                if value != current {
                    return Ok(theta.with(dim, value));
                }
            }
        }
    }
}

/// Harmonic-step mutation.
///
/// `prefer_second(first, second)` is only invoked in
/// [`DirectionMode::BestOfBoth`] when both `θ ± d` are feasible; it must
/// return whether `second` beats `first`. The two candidates are passed in a
/// uniformly random order.
pub fn mutate_harmonic<R, E, F>(
    space: &ParameterSpace,
    theta: &Configuration,
    tables: &[HarmonicDistribution],
    mode: DirectionMode,
    rng: &mut R,
    mut prefer_second: F,
) -> Result<Configuration, E>
where
    R: Rng + ?Sized,
    F: FnMut(&Configuration, &Configuration) -> Result<bool, E>,
{
    loop {
        let dim = rng.gen_range(0..space.num_dims());
        let d = tables[dim].sample(rng);
        let current = theta.get(dim);
        let phi = space.dim(dim).count();
        match mode {
            DirectionMode::RandomDirection => {
                if let Some(value) = offset(current, d, rng.gen(), phi) {
                    return Ok(theta.with(dim, value));
                }
            }
            DirectionMode::BestOfBoth => {
                let up = (current + d <= phi).then(|| current + d);
                let down = (current > d).then(|| current - d);
                match (down, up) {
                    (None, None) => continue,
                    (Some(v), None) | (None, Some(v)) => return Ok(theta.with(dim, v)),
                    (Some(lo), Some(hi)) => {
                        let (a, b) = if rng.gen() { (lo, hi) } else { (hi, lo) };
                        let first = theta.with(dim, a);
                        let second = theta.with(dim, b);
                        return Ok(if prefer_second(&first, &second)? {
                            second
                        } else {
                            first
                        });
                    }
                }
            }
        }
    }
}

fn offset(current: usize, d: usize, upward: bool, phi: usize) -> Option<usize> {
    if upward {
        (current + d <= phi).then(|| current + d)
    } else {
        (current > d).then(|| current - d)
    }
}

/// An operator bound to a space, owning its per-run state.
#[derive(Debug, Clone)]
pub struct Mutator {
    operator: Operator,
    tables: Vec<HarmonicDistribution>,
    state: Option<OperatorState>,
}

impl Mutator {
    pub fn new(operator: Operator, space: &ParameterSpace, theta: &Configuration) -> Result<Self> {
        operator.validate()?;
        let state = matches!(
            operator,
            Operator::Random {
                without_replacement: true
            }
        )
        .then(|| OperatorState::new(space, theta));
        Ok(Self {
            operator,
            tables: harmonic_tables(space),
            state,
        })
    }

    pub fn operator(&self) -> Operator {
        self.operator
    }

    pub fn tables(&self) -> &[HarmonicDistribution] {
        &self.tables
    }

    /// Forgets proposal history (random restart).
    pub fn reset(&mut self, space: &ParameterSpace, theta: &Configuration) {
        if let Some(state) = &mut self.state {
            state.reset(space, theta);
        }
    }

    /// Draws a candidate. Without-replacement exhaustion of the chosen
    /// dimension redraws the dimension; once every dimension is exhausted the
    /// proposal history is cleared.
    pub fn propose<R, E, F>(
        &mut self,
        space: &ParameterSpace,
        theta: &Configuration,
        rng: &mut R,
        prefer_second: F,
    ) -> Result<Configuration, E>
    where
        R: Rng + ?Sized,
        F: FnMut(&Configuration, &Configuration) -> Result<bool, E>,
    {
        match self.operator {
            Operator::LStep { max_step } => Ok(mutate_l_step(space, theta, max_step, rng)),
            Operator::Harmonic { mode } => {
                mutate_harmonic(space, theta, &self.tables, mode, rng, prefer_second)
            }
            Operator::Random { .. } => loop {
                match mutate_random(space, theta, self.state.as_mut(), rng) {
                    Ok(candidate) => return Ok(candidate),
                    Err(NeighborhoodExhausted { .. }) => {
                        let state = self
                            .state
                            .as_mut()
                            .expect("only stateful sampling exhausts");
                        if state.all_exhausted() {
                            state.reset(space, theta);
                        }
                    }
                }
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use std::collections::{BTreeMap, HashSet};
    use std::convert::Infallible;

    fn cfg(v: &[usize]) -> Configuration {
        Configuration::new(v.to_vec())
    }

    fn never(_: &Configuration, _: &Configuration) -> Result<bool, Infallible> {
        unreachable!("random-direction mode never compares")
    }

    fn frequencies(
        draws: usize,
        mut f: impl FnMut() -> Configuration,
    ) -> BTreeMap<Configuration, f64> {
        let mut counts = BTreeMap::new();
        for _ in 0..draws {
            *counts.entry(f()).or_insert(0usize) += 1;
        }
        counts
            .into_iter()
            .map(|(k, v)| (k, v as f64 / draws as f64))
            .collect()
    }

    #[test]
    fn harmonic_table_phi_4() {
        let dist = HarmonicDistribution::new(4).unwrap();
        assert!((dist.harmonic() - 11.0 / 6.0).abs() < 1e-15);
        assert!((dist.probability(1) - 6.0 / 11.0).abs() < 1e-15);
        assert!((dist.probability(2) - 3.0 / 11.0).abs() < 1e-15);
        assert!((dist.probability(3) - 2.0 / 11.0).abs() < 1e-15);
        assert_eq!(dist.probability(4), 0.0);
    }

    #[test]
    fn harmonic_phi_2_always_one() {
        let dist = HarmonicDistribution::new(2).unwrap();
        let mut rng = rng_from_seed(0);
        assert!((0..1000).all(|_| dist.sample(&mut rng) == 1));
        assert!(HarmonicDistribution::new(1).is_err());
    }

    #[test]
    fn harmonic_cumulative_matches_closed_form() {
        for phi in [2, 3, 4, 7, 50, 1000] {
            let dist = HarmonicDistribution::new(phi).unwrap();
            let total: f64 = (1..phi).map(|d| dist.probability(d)).sum();
            assert!((total - 1.0).abs() < 1e-12);
            let mut prev = 0.0;
            for d in 1..phi {
                let mass = dist.cumulative()[d - 1] - prev;
                assert!((mass - dist.probability(d)).abs() < 1e-12, "φ={phi} d={d}");
                prev = dist.cumulative()[d - 1];
            }
        }
    }

    #[test]
    fn harmonic_samples_stay_in_range() {
        let mut rng = rng_from_seed(5);
        for phi in [2, 3, 10, 1024] {
            let dist = HarmonicDistribution::new(phi).unwrap();
            for _ in 0..10_000 {
                let d = dist.sample(&mut rng);
                assert!((1..phi).contains(&d));
            }
        }
    }

    #[test]
    fn lstep_examples() {
        let space = ParameterSpace::single("x", 10).unwrap();
        let mut rng = rng_from_seed(6);
        let f = frequencies(40_000, || mutate_l_step(&space, &cfg(&[5]), 1, &mut rng));
        assert_eq!(f.len(), 2);
        for v in [4, 6] {
            assert!((f[&cfg(&[v])] - 0.5).abs() < 0.01);
        }
        assert!((0..1000).all(|_| mutate_l_step(&space, &cfg(&[1]), 1, &mut rng) == cfg(&[2])));
        let f = frequencies(80_000, || mutate_l_step(&space, &cfg(&[5]), 2, &mut rng));
        assert_eq!(f.len(), 4);
        for v in [3, 4, 6, 7] {
            assert!((f[&cfg(&[v])] - 0.25).abs() < 0.01);
        }
    }

    #[test]
    fn random_examples() {
        let space = ParameterSpace::single("x", 3).unwrap();
        let mut rng = rng_from_seed(7);
        let f = frequencies(40_000, || {
            mutate_random(&space, &cfg(&[2]), None, &mut rng).unwrap()
        });
        assert!((f[&cfg(&[1])] - 0.5).abs() < 0.01);
        assert!((f[&cfg(&[3])] - 0.5).abs() < 0.01);

        let space = ParameterSpace::with_ranges(&[2, 2]).unwrap();
        let f = frequencies(40_000, || {
            mutate_random(&space, &cfg(&[1, 1]), None, &mut rng).unwrap()
        });
        assert!((f[&cfg(&[2, 1])] - 0.5).abs() < 0.01);
        assert!((f[&cfg(&[1, 2])] - 0.5).abs() < 0.01);
    }

    #[test]
    fn random_without_replacement_excludes_proposed() {
        let space = ParameterSpace::single("x", 4).unwrap();
        let mut rng = rng_from_seed(8);
        let f = frequencies(40_000, || {
            let mut state = OperatorState::new(&space, &cfg(&[2]));
            state.mark(0, 4);
            mutate_random(&space, &cfg(&[2]), Some(&mut state), &mut rng).unwrap()
        });
        assert_eq!(f.len(), 2);
        assert!((f[&cfg(&[1])] - 0.5).abs() < 0.01);
        assert!((f[&cfg(&[3])] - 0.5).abs() < 0.01);
    }

    #[test]
    fn random_without_replacement_signals_exhaustion() {
        let space = ParameterSpace::single("x", 3).unwrap();
        let mut rng = rng_from_seed(9);
        let mut state = OperatorState::new(&space, &cfg(&[1]));
        let mut seen = HashSet::new();
        for _ in 0..2 {
            let c = mutate_random(&space, &cfg(&[1]), Some(&mut state), &mut rng).unwrap();
            assert!(seen.insert(c));
        }
        assert_eq!(
            mutate_random(&space, &cfg(&[1]), Some(&mut state), &mut rng),
            Err(NeighborhoodExhausted { dim: 0 })
        );
    }

    #[test]
    fn without_replacement_never_repeats_a_dimension_value() {
        let space = ParameterSpace::with_ranges(&[6, 9]).unwrap();
        let mut rng = rng_from_seed(10);
        let mut theta = space.sample_uniform(&mut rng);
        let mut state = OperatorState::new(&space, &theta);
        let mut proposed: HashSet<(usize, usize)> = (0..2).map(|d| (d, theta.get(d))).collect();
        while let Ok(c) = mutate_random(&space, &theta, Some(&mut state), &mut rng) {
            let (dim, _) = single_change(&theta, &c).unwrap();
            assert!(proposed.insert((dim, c.get(dim))), "repeated proposal {c}");
            if rng.gen_bool(0.3) {
                theta = c;
            }
            if state.all_exhausted() {
                break;
            }
        }
    }

    #[test]
    fn harmonic_phi_2_moves_to_other_value() {
        let space = ParameterSpace::single("x", 2).unwrap();
        let tables = harmonic_tables(&space);
        let mut rng = rng_from_seed(11);
        for _ in 0..1000 {
            let c = mutate_harmonic(
                &space,
                &cfg(&[1]),
                &tables,
                DirectionMode::RandomDirection,
                &mut rng,
                never,
            )
            .unwrap();
            assert_eq!(c, cfg(&[2]));
        }
    }

    #[test]
    fn harmonic_phi_5_from_centre() {
        // Per attempt, (2) is produced by d = 1 (12/25) and a downward sign
        // (1/2): 6/25. Steps 3 and 4 are infeasible both ways from 3 and are
        // redrawn, so after rejection P((2)) = (6/25) / (18/25) = 1/3.
        let dist = HarmonicDistribution::new(5).unwrap();
        assert!((dist.harmonic() - 25.0 / 12.0).abs() < 1e-15);
        assert!((dist.probability(1) * 0.5 - 6.0 / 25.0).abs() < 1e-15);
        let feasible = dist.probability(1) + dist.probability(2);
        assert!((feasible - 18.0 / 25.0).abs() < 1e-15);

        let space = ParameterSpace::single("x", 5).unwrap();
        let tables = harmonic_tables(&space);
        let mut rng = rng_from_seed(12);
        let f = frequencies(90_000, || {
            mutate_harmonic(
                &space,
                &cfg(&[3]),
                &tables,
                DirectionMode::RandomDirection,
                &mut rng,
                never,
            )
            .unwrap()
        });
        assert!((f[&cfg(&[2])] - 1.0 / 3.0).abs() < 0.01);
        assert!((f[&cfg(&[4])] - 1.0 / 3.0).abs() < 0.01);
        assert!((f[&cfg(&[1])] - 1.0 / 6.0).abs() < 0.01);
        assert!((f[&cfg(&[5])] - 1.0 / 6.0).abs() < 0.01);
    }

    #[test]
    fn best_of_both_compares_only_when_both_feasible() {
        let space = ParameterSpace::single("x", 5).unwrap();
        let tables = harmonic_tables(&space);
        let mut rng = rng_from_seed(13);
        for _ in 0..2000 {
            let mut calls = 0;
            let c = mutate_harmonic(
                &space,
                &cfg(&[3]),
                &tables,
                DirectionMode::BestOfBoth,
                &mut rng,
                |a, b| {
                    calls += 1;
                    // Higher index wins.
                    Ok::<_, Infallible>(b.get(0) > a.get(0))
                },
            )
            .unwrap();
            assert_eq!(calls, 1);
            assert!(c == cfg(&[4]) || c == cfg(&[5]));
        }
        for _ in 0..200 {
            let c = mutate_harmonic(
                &space,
                &cfg(&[1]),
                &tables,
                DirectionMode::BestOfBoth,
                &mut rng,
                never,
            )
            .unwrap();
            assert!(c.get(0) > 1);
        }
    }

    #[test]
    fn every_mutation_changes_exactly_one_dimension() {
        let space = ParameterSpace::with_ranges(&[2, 7, 30]).unwrap();
        let mut rng = rng_from_seed(14);
        let ops = [
            Operator::LStep { max_step: 1 },
            Operator::LStep { max_step: 3 },
            Operator::Random {
                without_replacement: true,
            },
            Operator::Random {
                without_replacement: false,
            },
            Operator::Harmonic {
                mode: DirectionMode::RandomDirection,
            },
        ];
        for op in ops {
            let mut theta = space.sample_uniform(&mut rng);
            let mut mutator = Mutator::new(op, &space, &theta).unwrap();
            for _ in 0..2000 {
                let c = mutator.propose(&space, &theta, &mut rng, never).unwrap();
                assert!(space.contains(&c));
                assert!(single_change(&theta, &c).is_some(), "{op}: {theta} -> {c}");
                if rng.gen_bool(0.5) {
                    theta = c;
                }
            }
        }
    }

    #[test]
    fn scan_weights_follow_operator() {
        let space = ParameterSpace::single("x", 10).unwrap();
        let tables = harmonic_tables(&space);
        let theta = cfg(&[5]);
        let h = Operator::Harmonic {
            mode: DirectionMode::RandomDirection,
        };
        let w1 = h.scan_weight(&tables, &theta, &cfg(&[4]));
        let w3 = h.scan_weight(&tables, &theta, &cfg(&[8]));
        assert!((w1 / w3 - 3.0).abs() < 1e-12);
        let l = Operator::LStep { max_step: 2 };
        assert_eq!(l.scan_weight(&tables, &theta, &cfg(&[7])), 1.0);
        assert_eq!(l.scan_weight(&tables, &theta, &cfg(&[8])), 0.0);
        assert_eq!(l.scan_weight(&tables, &theta, &theta), 0.0);
    }

    #[test]
    fn parse_ids() {
        for id in ["lstep", "random", "random-wr", "harmonic"] {
            let op = Operator::parse(id, 2, DirectionMode::default()).unwrap();
            assert_eq!(op.id(), id);
        }
        assert!(Operator::parse("tabu", 1, DirectionMode::default()).is_err());
        assert!(Operator::parse("lstep", 0, DirectionMode::default()).is_err());
    }
}
