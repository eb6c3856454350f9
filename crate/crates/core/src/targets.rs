//! Target algorithms being configured: the (1+1) EA and RLS_k on the
//! OneMax, LeadingOnes and Ridge benchmarks.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::configurators::Objective;
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;
use crate::space::{Configuration, ParameterSpace};

/// A fixed-length bit string packed into 64-bit words, bit `i` of the
/// string at bit `i % 64` of word `i / 64`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitString {
    words: Vec<u64>,
    n: usize,
}

impl BitString {
    pub fn zeros(n: usize) -> Self {
        Self {
            words: vec![0; n.div_ceil(64)],
            n,
        }
    }

    pub fn ones(n: usize) -> Self {
        let mut x = Self::zeros(n);
        for w in &mut x.words {
            *w = u64::MAX;
        }
        x.clear_tail();
        x
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut x = Self::zeros(n);
        for w in &mut x.words {
            *w = rng.gen();
        }
        x.clear_tail();
        x
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut x = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                x.flip(i);
            }
        }
        x
    }

    fn clear_tail(&mut self) {
        let r = self.n % 64;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.n, "bit {i} out of range for length {}", self.n);
        self.words[i / 64] ^= 1 << (i % 64);
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Length of the all-ones prefix.
    pub fn leading_ones(&self) -> usize {
        let mut total = 0;
        for w in &self.words {
            let t = w.trailing_ones() as usize;
            total += t;
            if t < 64 {
                break;
            }
        }
        total.min(self.n)
    }

    pub fn to_bits(&self) -> Vec<bool> {
        (0..self.n).map(|i| self.get(i)).collect()
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::config(format!("`{s}` is not a bit string"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_bits(&bits))
    }
}

pub fn eval_onemax(x: &BitString) -> u64 {
    x.count_ones() as u64
}

pub fn eval_leadingones(x: &BitString) -> u64 {
    x.leading_ones() as u64
}

/// `n + i` on ridge points `1^i 0^(n−i)`, otherwise `n − |x|₁`.
pub fn eval_ridge(x: &BitString) -> u64 {
    let ones = x.count_ones();
    if x.leading_ones() == ones {
        (x.len() + ones) as u64
    } else {
        (x.len() - ones) as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Benchmark {
    OneMax,
    LeadingOnes,
    Ridge,
}

impl Benchmark {
    pub fn id(self) -> &'static str {
        match self {
            Benchmark::OneMax => "onemax",
            Benchmark::LeadingOnes => "leadingones",
            Benchmark::Ridge => "ridge",
        }
    }

    pub fn evaluate(self, x: &BitString) -> u64 {
        match self {
            Benchmark::OneMax => eval_onemax(x),
            Benchmark::LeadingOnes => eval_leadingones(x),
            Benchmark::Ridge => eval_ridge(x),
        }
    }

    pub fn max_fitness(self, n: usize) -> u64 {
        match self {
            Benchmark::OneMax | Benchmark::LeadingOnes => n as u64,
            Benchmark::Ridge => 2 * n as u64,
        }
    }
}

impl FromStr for Benchmark {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "onemax" => Ok(Benchmark::OneMax),
            "leadingones" => Ok(Benchmark::LeadingOnes),
            "ridge" => Ok(Benchmark::Ridge),
            _ => Err(Error::config(format!("unknown benchmark `{s}`"))),
        }
    }
}

/// How the first individual is chosen.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum InitRule {
    #[default]
    Uniform,
    /// The all-zeros string, the start of the Ridge path.
    RidgeStart,
}

impl InitRule {
    pub fn id(self) -> &'static str {
        match self {
            InitRule::Uniform => "uniform",
            InitRule::RidgeStart => "ridge-start",
        }
    }

    fn initial<R: Rng + ?Sized>(self, n: usize, rng: &mut R) -> BitString {
        match self {
            InitRule::Uniform => BitString::random(n, rng),
            InitRule::RidgeStart => BitString::zeros(n),
        }
    }
}

impl FromStr for InitRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(InitRule::Uniform),
            "ridge-start" => Ok(InitRule::RidgeStart),
            _ => Err(Error::config(format!("unknown init rule `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetRunResult {
    pub final_fitness: f64,
    pub iterations_used: u64,
}

/// Gaps between successive flipped positions under independent flips
/// with probability `p`: `⌊ln U / ln(1 − p)⌋` for `U` uniform on (0, 1].
#[derive(Debug, Clone, Copy)]
struct FlipGaps {
    inv_log_q: f64,
}

impl FlipGaps {
    fn new(p: f64) -> Self {
        Self {
            inv_log_q: (-p).ln_1p().recip(),
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let u = 1.0 - rng.gen::<f64>();
        let gap = u.ln() * self.inv_log_q;
        if gap >= u64::MAX as f64 {
            u64::MAX
        } else {
            gap as u64
        }
    }
}

/// Elitist acceptance: offspring of equal fitness replace the parent.
pub fn accepts(parent: u64, offspring: u64) -> bool {
    offspring >= parent
}

/// Variation operator of a target algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Variation {
    /// Independent bit flips with probability χ/n.
    StandardBit { chi: f64 },
    /// Exactly k distinct bits.
    KBit { k: usize },
}

impl Variation {
    fn validate(self, n: usize) -> Result<()> {
        match self {
            Variation::StandardBit { chi } if !(chi > 0.0 && chi < n as f64) => Err(Error::config(
                format!("mutation numerator χ must lie in (0, {n}), got {chi}"),
            )),
            Variation::KBit { k } if !(1..=n).contains(&k) => {
                Err(Error::config(format!("RLS_k needs 1 ≤ k ≤ {n}, got {k}")))
            }
            _ => Ok(()),
        }
    }
}

/// Runs an elitist single-individual heuristic for up to κ iterations,
/// reporting the parent fitness after every iteration to `observe`.
///
/// The run stops early once the benchmark's maximum is reached, since no
/// later iteration can change the fitness.
pub fn run_target<R: Rng + ?Sized>(
    benchmark: Benchmark,
    n: usize,
    variation: Variation,
    kappa: u64,
    init: InitRule,
    rng: &mut R,
    mut observe: impl FnMut(u64),
) -> Result<TargetRunResult> {
    if n == 0 {
        return Err(Error::config("bit strings need n ≥ 1"));
    }
    variation.validate(n)?;
    let mut parent = init.initial(n, rng);
    let mut fitness = benchmark.evaluate(&parent);
    let max = benchmark.max_fitness(n);
    let mut flips: Vec<usize> = Vec::new();
    let mut used = 0;
    match variation {
        Variation::StandardBit { chi } => {
            // Bit j of iteration t sits at position t·n + j of one Bernoulli
            // stream, so iterations without flips are skipped in one jump.
            let gaps = FlipGaps::new(chi / n as f64);
            let n64 = n as u64;
            let mut next = gaps.sample(rng);
            while used < kappa && fitness < max {
                if needs_contiguous_flips(benchmark, n, fitness) {
                    // A parent on the ridge never leaves it.
                    ridge_chain(
                        &mut parent,
                        &mut fitness,
                        &mut used,
                        chi / n as f64,
                        kappa,
                        rng,
                        &mut observe,
                    );
                    break;
                }
                let iteration = (next / n64).min(kappa);
                while used < iteration {
                    used += 1;
                    observe(fitness);
                }
                if used == kappa {
                    break;
                }
                let start = iteration * n64;
                let end = start.saturating_add(n64);
                let contiguous = needs_contiguous_flips(benchmark, n, fitness);
                let mut rejected =
                    first_flip_rejects(benchmark, n, fitness, (next - start) as usize);
                flips.clear();
                while !rejected && next < end {
                    let pos = (next - start) as usize;
                    if contiguous && flips.last().is_some_and(|&last| pos != last + 1) {
                        rejected = true;
                        break;
                    }
                    flips.push(pos);
                    next = next.saturating_add(1 + gaps.sample(rng));
                }
                used += 1;
                if rejected {
                    // The rest of this iteration's flips cannot matter, and
                    // the stream is memoryless, so restart it at the next one.
                    observe(fitness);
                    next = end.saturating_add(gaps.sample(rng));
                    continue;
                }
                if let Some(f) = offspring_fitness(benchmark, &mut parent, &flips, fitness) {
                    fitness = f;
                }
                observe(fitness);
            }
        }
        Variation::KBit { k } => {
            while used < kappa && fitness < max {
                used += 1;
                flips.clear();
                flips.extend(index::sample(rng, n, k).iter());
                if let Some(f) = offspring_fitness(benchmark, &mut parent, &flips, fitness) {
                    fitness = f;
                }
                observe(fitness);
            }
        }
    }
    Ok(TargetRunResult {
        final_fitness: fitness as f64,
        iterations_used: used,
    })
}

/// Applies `flips` to `parent` if the offspring is accepted and returns
/// its fitness; otherwise leaves `parent` untouched.
fn offspring_fitness(
    benchmark: Benchmark,
    parent: &mut BitString,
    flips: &[usize],
    fitness: u64,
) -> Option<u64> {
    let first = *flips.iter().min()?;
    if first_flip_rejects(benchmark, parent.len(), fitness, first) {
        return None;
    }
    for &i in flips {
        parent.flip(i);
    }
    let child = benchmark.evaluate(parent);
    if accepts(fitness, child) {
        Some(child)
    } else {
        for &i in flips {
            parent.flip(i);
        }
        None
    }
}

/// True when any offspring whose lowest flipped position is `first` must be
/// rejected by a parent of fitness `fitness`.
///
/// On LeadingOnes, flipping inside the prefix loses. On Ridge, a parent on
/// the ridge at `1^i 0^(n−i)` only accepts ridge points further along,
/// which flip exactly the positions `i..j`.
fn first_flip_rejects(benchmark: Benchmark, n: usize, fitness: u64, first: usize) -> bool {
    match benchmark {
        Benchmark::LeadingOnes => (first as u64) < fitness,
        Benchmark::Ridge if fitness >= n as u64 => first as u64 != fitness - n as u64,
        _ => false,
    }
}

/// True when only offspring flipping a contiguous run of positions can be
/// accepted (a parent on the Ridge).
fn needs_contiguous_flips(benchmark: Benchmark, n: usize, fitness: u64) -> bool {
    benchmark == Benchmark::Ridge && fitness >= n as u64
}

/// Runs the (1+1) EA from a ridge point to the end of the budget.
///
/// From `1^i 0^(n−i)` the only accepted offspring are `1^(i+m) 0^(n−i−m)`,
/// each produced with probability `p^m (1−p)^(n−m)`. The chain therefore
/// waits a geometric number of iterations for any of them and then jumps
/// by `m` drawn proportionally to those probabilities.
fn ridge_chain<R: Rng + ?Sized>(
    parent: &mut BitString,
    fitness: &mut u64,
    used: &mut u64,
    p: f64,
    kappa: u64,
    rng: &mut R,
    observe: &mut impl FnMut(u64),
) {
    let n = parent.len();
    let (ln_p, ln_q) = (p.ln(), (-p).ln_1p());
    let mut log_w: Vec<f64> = Vec::with_capacity(n);
    while *used < kappa {
        let i = (*fitness - n as u64) as usize;
        if i == n {
            break;
        }
        log_w.clear();
        log_w.extend((1..=n - i).map(|m| m as f64 * ln_p + (n - m) as f64 * ln_q));
        let accept: f64 = log_w.iter().map(|l| l.exp()).sum();
        let wait = if accept > 0.0 {
            let u = 1.0 - rng.gen::<f64>();
            let extra = u.ln() / (-accept).ln_1p();
            if extra < (kappa - *used) as f64 {
                1 + extra as u64
            } else {
                u64::MAX
            }
        } else {
            u64::MAX
        };
        let idle = wait.saturating_sub(1).min(kappa - *used);
        for _ in 0..idle {
            *used += 1;
            observe(*fitness);
        }
        if *used == kappa {
            break;
        }
        let mut pick = rng.gen::<f64>() * accept;
        let mut m = log_w.len();
        for (j, l) in log_w.iter().enumerate() {
            pick -= l.exp();
            if pick < 0.0 {
                m = j + 1;
                break;
            }
        }
        for bit in i..i + m {
            parent.flip(bit);
        }
        *fitness += m as u64;
        *used += 1;
        observe(*fitness);
    }
}

/// (1+1) EA with standard bit mutation at rate χ/n.
pub fn run_one_plus_one_ea<R: Rng + ?Sized>(
    benchmark: Benchmark,
    n: usize,
    chi: f64,
    kappa: u64,
    init: InitRule,
    rng: &mut R,
) -> Result<TargetRunResult> {
    run_target(
        benchmark,
        n,
        Variation::StandardBit { chi },
        kappa,
        init,
        rng,
        |_| {},
    )
}

/// RLS_k: each offspring flips exactly k distinct uniformly chosen bits.
pub fn run_rls_k<R: Rng + ?Sized>(
    benchmark: Benchmark,
    n: usize,
    k: usize,
    kappa: u64,
    init: InitRule,
    rng: &mut R,
) -> Result<TargetRunResult> {
    run_target(
        benchmark,
        n,
        Variation::KBit { k },
        kappa,
        init,
        rng,
        |_| {},
    )
}

/// Mean final fitness, higher is better.
pub fn performance_metric(results: &[TargetRunResult]) -> Result<f64> {
    if results.is_empty() {
        return Err(Error::contract("performance metric of zero runs"));
    }
    Ok(results.iter().map(|r| r.final_fitness).sum::<f64>() / results.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TargetAlgorithm {
    OnePlusOneEa,
    RlsK,
}

/// A target algorithm on a benchmark, tuned through a single parameter
/// (χ for the EA, k for RLS_k) decoded from the configuration.
#[derive(Debug, Clone)]
pub struct TargetObjective {
    pub algorithm: TargetAlgorithm,
    pub benchmark: Benchmark,
    pub n: usize,
    pub kappa: u64,
    pub init: InitRule,
    pub space: ParameterSpace,
}

impl TargetObjective {
    pub fn variation(&self, config: &Configuration) -> Result<Variation> {
        self.space.validate(config)?;
        let value = self.space.decode(config)[0];
        let variation = match self.algorithm {
            TargetAlgorithm::OnePlusOneEa => Variation::StandardBit { chi: value },
            TargetAlgorithm::RlsK => {
                let k = value.round();
                if (k - value).abs() > 1e-9 || k < 1.0 {
                    return Err(Error::config(format!(
                        "k = {value} is not a positive integer"
                    )));
                }
                Variation::KBit { k: k as usize }
            }
        };
        variation.validate(self.n)?;
        Ok(variation)
    }
}

impl Objective for TargetObjective {
    fn estimate(&self, config: &Configuration, runs: u32, seed: u64) -> Result<f64> {
        let variation = self.variation(config)?;
        let mut rng = rng_from_seed(seed);
        let mut total = 0.0;
        for _ in 0..runs {
            let r = run_target(
                self.benchmark,
                self.n,
                variation,
                self.kappa,
                self.init,
                &mut rng,
                |_| {},
            )
            .map_err(|e| Error::Evaluation {
                instance: format!("{}-n{}", self.benchmark.id(), self.n),
                message: e.to_string(),
            })?;
            total += r.final_fitness;
        }
        Ok(total / runs.max(1) as f64)
    }
}
