//! DIMACS CNF formulas, the SAPS clause-weighting local search solver and
//! exhaustive evaluation of its (α, ρ) landscape on MAX-SAT instances.

use std::fmt;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{Error, Result};
use crate::landscape::Landscape;
use crate::rng::{derive_seed, rng_from_seed};
use crate::space::{ParameterDim, ParameterSpace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("DIMACS line {line}: {message}")]
pub struct DimacsError {
    pub line: usize,
    pub message: String,
}

fn dimacs_err(line: usize, message: impl Into<String>) -> DimacsError {
    DimacsError {
        line,
        message: message.into(),
    }
}

/// A CNF formula over variables `1..=num_vars`; literals are signed
/// variable indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnfFormula {
    num_vars: usize,
    clauses: Vec<Vec<i32>>,
}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<Vec<i32>>) -> Result<Self> {
        for (i, clause) in clauses.iter().enumerate() {
            if clause.is_empty() {
                return Err(Error::contract(format!("clause {} is empty", i + 1)));
            }
            if let Some(&lit) = clause
                .iter()
                .find(|&&l| l == 0 || l.unsigned_abs() as usize > num_vars)
            {
                return Err(Error::contract(format!(
                    "literal {lit} in clause {} outside 1..={num_vars}",
                    i + 1
                )));
            }
        }
        Ok(Self { num_vars, clauses })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Vec<i32>] {
        &self.clauses
    }

    pub fn to_dimacs(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for CnfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "p cnf {} {}", self.num_vars, self.clauses.len())?;
        for clause in &self.clauses {
            for lit in clause {
                write!(f, "{lit} ")?;
            }
            writeln!(f, "0")?;
        }
        Ok(())
    }
}

/// Parses DIMACS CNF. Clauses may span lines; a final clause missing its
/// terminating `0` is accepted. A `%` line ends the body.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula, DimacsError> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<i32> = Vec::new();
    let mut last_line = 0;
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        last_line = lineno;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        if trimmed.starts_with('%') {
            break;
        }
        if trimmed.starts_with('p') {
            if header.is_some() {
                return Err(dimacs_err(lineno, "second problem line"));
            }
            let parts: Vec<&str> = trimmed.split_whitespace().collect();
            if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                return Err(dimacs_err(lineno, "expected `p cnf <vars> <clauses>`"));
            }
            let vars = parts[2]
                .parse()
                .map_err(|_| dimacs_err(lineno, format!("bad variable count `{}`", parts[2])))?;
            let count = parts[3]
                .parse()
                .map_err(|_| dimacs_err(lineno, format!("bad clause count `{}`", parts[3])))?;
            header = Some((vars, count, lineno));
            continue;
        }
        let Some((vars, _, _)) = header else {
            return Err(dimacs_err(lineno, "clause before the problem line"));
        };
        for token in trimmed.split_whitespace() {
            let lit: i64 = token
                .parse()
                .map_err(|_| dimacs_err(lineno, format!("bad literal `{token}`")))?;
            if lit == 0 {
                if current.is_empty() {
                    return Err(dimacs_err(lineno, "empty clause"));
                }
                clauses.push(std::mem::take(&mut current));
            } else if lit.unsigned_abs() as usize > vars {
                return Err(dimacs_err(
                    lineno,
                    format!("literal {lit} outside 1..={vars}"),
                ));
            } else {
                current.push(lit as i32);
            }
        }
    }
    let Some((vars, count, _)) = header else {
        return Err(dimacs_err(last_line.max(1), "missing problem line"));
    };
    if !current.is_empty() {
        clauses.push(current);
    }
    if clauses.len() != count {
        return Err(dimacs_err(
            last_line,
            format!(
                "header declares {count} clauses, body has {}",
                clauses.len()
            ),
        ));
    }
    Ok(CnfFormula {
        num_vars: vars,
        clauses,
    })
}

/// Number of clauses with at least one true literal; `assignment[v − 1]`
/// is the value of variable `v`.
pub fn count_satisfied(formula: &CnfFormula, assignment: &[bool]) -> Result<usize> {
    if assignment.len() != formula.num_vars {
        return Err(Error::contract(format!(
            "assignment has {} values for {} variables",
            assignment.len(),
            formula.num_vars
        )));
    }
    Ok(formula
        .clauses
        .iter()
        .filter(|c| c.iter().any(|&l| literal_true(l, assignment)))
        .count())
}

fn literal_true(lit: i32, assignment: &[bool]) -> bool {
    assignment[lit.unsigned_abs() as usize - 1] == (lit > 0)
}

/// A satisfiable random 3-SAT formula: clauses over three distinct
/// variables with uniform signs, rejected unless a hidden assignment
/// satisfies them. Returns the formula and the hidden assignment.
pub fn planted_3sat<R: Rng + ?Sized>(
    num_vars: usize,
    num_clauses: usize,
    rng: &mut R,
) -> Result<(CnfFormula, Vec<bool>)> {
    if num_vars < 3 {
        return Err(Error::config("3-SAT needs at least 3 variables"));
    }
    let hidden: Vec<bool> = (0..num_vars).map(|_| rng.gen()).collect();
    let mut clauses = Vec::with_capacity(num_clauses);
    while clauses.len() < num_clauses {
        let vars = rand::seq::index::sample(rng, num_vars, 3);
        let clause: Vec<i32> = vars
            .iter()
            .map(|v| {
                if rng.gen() {
                    v as i32 + 1
                } else {
                    -(v as i32 + 1)
                }
            })
            .collect();
        if clause.iter().any(|&l| literal_true(l, &hidden)) {
            clauses.push(clause);
        }
    }
    Ok((CnfFormula::new(num_vars, clauses)?, hidden))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SapsParams {
    /// Scaling factor applied to unsatisfied clause weights, > 1.
    pub alpha_s: f64,
    /// Smoothing factor in [0, 1].
    pub rho: f64,
    /// Probability of smoothing after a scaling step.
    pub ps: f64,
    /// Random-walk probability when no flip improves.
    pub wp: f64,
}

impl Default for SapsParams {
    fn default() -> Self {
        Self {
            alpha_s: 1.3,
            rho: 0.8,
            ps: 0.05,
            wp: 0.01,
        }
    }
}

impl SapsParams {
    pub fn with_alpha_rho(alpha_s: f64, rho: f64) -> Self {
        Self {
            alpha_s,
            rho,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if !(self.alpha_s > 1.0 && self.alpha_s.is_finite()) {
            return Err(Error::config(format!(
                "SAPS α must exceed 1, got {}",
                self.alpha_s
            )));
        }
        if !unit(self.rho) || !unit(self.ps) || !unit(self.wp) {
            return Err(Error::config(format!(
                "SAPS ρ, ps and wp must lie in [0, 1], got {}, {}, {}",
                self.rho, self.ps, self.wp
            )));
        }
        Ok(())
    }
}

/// Weights are renormalised once their total exceeds this.
const WEIGHT_CEILING: f64 = 1e150;

/// SAPS search state over one formula.
pub struct Saps<'f> {
    formula: &'f CnfFormula,
    params: SapsParams,
    /// Working clauses: deduplicated literals, tautologies removed.
    clauses: Vec<Vec<i32>>,
    tautologies: usize,
    occurrences: Vec<Vec<(u32, bool)>>,
    assignment: Vec<bool>,
    num_true: Vec<u32>,
    /// XOR of the variables of true literals; the critical variable when
    /// exactly one literal is true.
    critical: Vec<u32>,
    weights: Vec<f64>,
    total_weight: f64,
    make: Vec<f64>,
    brk: Vec<f64>,
    unsat: Vec<u32>,
    unsat_pos: Vec<u32>,
    stamp: Vec<u64>,
    candidates: Vec<u32>,
    steps: u64,
    best: usize,
}

const NOT_LISTED: u32 = u32::MAX;

impl<'f> Saps<'f> {
    pub fn new<R: Rng + ?Sized>(
        formula: &'f CnfFormula,
        params: SapsParams,
        rng: &mut R,
    ) -> Result<Self> {
        params.validate()?;
        let n = formula.num_vars;
        let mut clauses = Vec::with_capacity(formula.clauses.len());
        let mut tautologies = 0;
        for clause in &formula.clauses {
            let mut c = clause.clone();
            c.sort_unstable();
            c.dedup();
            if c.iter().any(|&l| c.binary_search(&-l).is_ok()) {
                tautologies += 1;
            } else {
                clauses.push(c);
            }
        }
        let mut occurrences = vec![Vec::new(); n];
        for (ci, c) in clauses.iter().enumerate() {
            for &l in c {
                occurrences[l.unsigned_abs() as usize - 1].push((ci as u32, l > 0));
            }
        }
        let m = clauses.len();
        let mut saps = Self {
            formula,
            params,
            clauses,
            tautologies,
            occurrences,
            assignment: (0..n).map(|_| rng.gen()).collect(),
            num_true: vec![0; m],
            critical: vec![0; m],
            weights: vec![1.0; m],
            total_weight: m as f64,
            make: vec![0.0; n],
            brk: vec![0.0; n],
            unsat: Vec::new(),
            unsat_pos: vec![NOT_LISTED; m],
            stamp: vec![0; n],
            candidates: Vec::new(),
            steps: 0,
            best: 0,
        };
        saps.rebuild();
        saps.best = saps.satisfied();
        Ok(saps)
    }

    /// Recomputes clause states and scores from the assignment and weights.
    fn rebuild(&mut self) {
        self.make.iter_mut().for_each(|x| *x = 0.0);
        self.brk.iter_mut().for_each(|x| *x = 0.0);
        self.unsat.clear();
        for (ci, c) in self.clauses.iter().enumerate() {
            let mut t = 0;
            let mut crit = 0;
            for &l in c {
                if literal_true(l, &self.assignment) {
                    t += 1;
                    crit ^= l.unsigned_abs() - 1;
                }
            }
            self.num_true[ci] = t;
            self.critical[ci] = crit;
            let w = self.weights[ci];
            match t {
                0 => {
                    self.unsat_pos[ci] = self.unsat.len() as u32;
                    self.unsat.push(ci as u32);
                    for &l in c {
                        self.make[l.unsigned_abs() as usize - 1] += w;
                    }
                }
                1 => {
                    self.unsat_pos[ci] = NOT_LISTED;
                    self.brk[crit as usize] += w;
                }
                _ => self.unsat_pos[ci] = NOT_LISTED,
            }
        }
        self.total_weight = self.weights.iter().sum();
    }

    pub fn formula(&self) -> &CnfFormula {
        self.formula
    }

    pub fn num_clauses(&self) -> usize {
        self.formula.clauses.len()
    }

    pub fn satisfied(&self) -> usize {
        self.num_clauses() - self.unsat.len()
    }

    /// Best satisfied-clause count seen so far.
    pub fn best(&self) -> usize {
        self.best
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn assignment(&self) -> &[bool] {
        &self.assignment
    }

    /// Weighted decrease in unsatisfied cost from flipping `v` (0-based).
    pub fn score(&self, v: usize) -> f64 {
        self.make[v] - self.brk[v]
    }

    fn flip(&mut self, v: usize) {
        self.assignment[v] = !self.assignment[v];
        let value = self.assignment[v];
        let vid = v as u32;
        for k in 0..self.occurrences[v].len() {
            let (c, positive) = self.occurrences[v][k];
            let ci = c as usize;
            let w = self.weights[ci];
            if positive == value {
                self.num_true[ci] += 1;
                match self.num_true[ci] {
                    1 => {
                        self.remove_unsat(ci);
                        for &l in &self.clauses[ci] {
                            self.make[l.unsigned_abs() as usize - 1] -= w;
                        }
                        self.brk[v] += w;
                    }
                    2 => self.brk[self.critical[ci] as usize] -= w,
                    _ => {}
                }
                self.critical[ci] ^= vid;
            } else {
                self.num_true[ci] -= 1;
                self.critical[ci] ^= vid;
                match self.num_true[ci] {
                    0 => {
                        self.unsat_pos[ci] = self.unsat.len() as u32;
                        self.unsat.push(c);
                        self.brk[v] -= w;
                        for &l in &self.clauses[ci] {
                            self.make[l.unsigned_abs() as usize - 1] += w;
                        }
                    }
                    1 => self.brk[self.critical[ci] as usize] += w,
                    _ => {}
                }
            }
        }
        self.best = self.best.max(self.satisfied());
    }

    fn remove_unsat(&mut self, ci: usize) {
        let pos = self.unsat_pos[ci] as usize;
        self.unsat.swap_remove(pos);
        if let Some(&moved) = self.unsat.get(pos) {
            self.unsat_pos[moved as usize] = pos as u32;
        }
        self.unsat_pos[ci] = NOT_LISTED;
    }

    fn scale_and_smooth<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let factor = self.params.alpha_s - 1.0;
        for k in 0..self.unsat.len() {
            let ci = self.unsat[k] as usize;
            let delta = self.weights[ci] * factor;
            self.weights[ci] += delta;
            self.total_weight += delta;
            for &l in &self.clauses[ci] {
                self.make[l.unsigned_abs() as usize - 1] += delta;
            }
        }
        let smooth = rng.gen::<f64>() < self.params.ps;
        if smooth {
            let mean = self.total_weight / self.weights.len() as f64;
            let rho = self.params.rho;
            for w in &mut self.weights {
                *w = rho * *w + (1.0 - rho) * mean;
            }
        }
        if self.total_weight > WEIGHT_CEILING {
            let s = self.weights.len() as f64 / self.total_weight;
            self.weights.iter_mut().for_each(|w| *w *= s);
        }
        if smooth || self.total_weight > WEIGHT_CEILING {
            self.rebuild();
        }
    }

    /// One SAPS iteration: a greedy flip, a random-walk flip, or a scaling
    /// (and possibly smoothing) event. Returns false once every clause is
    /// satisfied.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> bool {
        if self.unsat.is_empty() {
            return false;
        }
        self.steps += 1;
        let tick = self.steps;
        let threshold = 1e-9 * self.total_weight / self.weights.len() as f64;
        let mut best_score = f64::NEG_INFINITY;
        self.candidates.clear();
        for &c in &self.unsat {
            for &l in &self.clauses[c as usize] {
                let v = l.unsigned_abs() as usize - 1;
                if self.stamp[v] == tick {
                    continue;
                }
                self.stamp[v] = tick;
                let s = self.make[v] - self.brk[v];
                if s > best_score + threshold {
                    best_score = s;
                    self.candidates.clear();
                    self.candidates.push(v as u32);
                } else if s >= best_score - threshold {
                    self.candidates.push(v as u32);
                }
            }
        }
        if best_score > threshold {
            let v = self.candidates[rng.gen_range(0..self.candidates.len())] as usize;
            self.flip(v);
        } else if rng.gen::<f64>() < self.params.wp {
            let c = self.unsat[rng.gen_range(0..self.unsat.len())] as usize;
            let clause = &self.clauses[c];
            let v = clause[rng.gen_range(0..clause.len())].unsigned_abs() as usize - 1;
            self.flip(v);
        } else {
            self.scale_and_smooth(rng);
        }
        true
    }
}

impl fmt::Debug for Saps<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Saps")
            .field("params", &self.params)
            .field("steps", &self.steps)
            .field("satisfied", &self.satisfied())
            .field("best", &self.best)
            .field("tautologies", &self.tautologies)
            .finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SapsOutcome {
    pub best_satisfied: usize,
    pub steps_used: u64,
}

/// Runs SAPS for at most κ iterations and returns the best satisfied-clause
/// count seen.
pub fn run_saps<R: Rng + ?Sized>(
    formula: &CnfFormula,
    params: SapsParams,
    kappa: u64,
    rng: &mut R,
) -> Result<SapsOutcome> {
    if kappa == 0 {
        return Err(Error::config("SAPS cutoff must be at least 1"));
    }
    let mut saps = Saps::new(formula, params, rng)?;
    while saps.steps() < kappa && saps.step(rng) {}
    Ok(SapsOutcome {
        best_satisfied: saps.best(),
        steps_used: saps.steps(),
    })
}

/// The (α, ρ) grid: α ∈ {16/15, …, (15 + alphas)/15} and
/// ρ ∈ {0, 1/15, …, 1}.
pub fn saps_grid(alphas: usize) -> Result<ParameterSpace> {
    ParameterSpace::new(vec![
        ParameterDim::new("alpha_s", alphas, 1.0, 1.0 / 15.0)?,
        ParameterDim::new("rho", 16, -1.0 / 15.0, 1.0 / 15.0)?,
    ])
}

/// Mean best satisfied-clause count of every (α, ρ) cell over all
/// instances and `reps` runs each, as a cached landscape targeting its
/// `top` best cells.
pub fn evaluate_saps_landscape(
    instances: &[CnfFormula],
    grid: &ParameterSpace,
    reps: u32,
    kappa: u64,
    seed: u64,
    top: usize,
) -> Result<Landscape> {
    if grid.num_dims() != 2 {
        return Err(Error::config(
            "the SAPS grid must have exactly two dimensions (α, ρ)",
        ));
    }
    if reps == 0 {
        return Err(Error::config("landscape evaluation needs reps ≥ 1"));
    }
    if instances.is_empty() {
        return Err(Error::config(
            "landscape evaluation needs at least one instance",
        ));
    }
    let cells: Vec<_> = grid.iter().collect();
    let quality = cells
        .par_iter()
        .enumerate()
        .map(|(cell, config)| {
            let values = grid.decode(config);
            let params = SapsParams::with_alpha_rho(values[0], values[1]);
            let cell_seed = derive_seed(seed, cell as u64);
            let mut total = 0.0;
            for (i, formula) in instances.iter().enumerate() {
                let instance_seed = derive_seed(cell_seed, i as u64);
                for rep in 0..reps {
                    let mut rng = rng_from_seed(derive_seed(instance_seed, rep as u64));
                    total += run_saps(formula, params, kappa, &mut rng)?.best_satisfied as f64;
                }
            }
            Ok(total / (instances.len() as f64 * reps as f64))
        })
        .collect::<Result<Vec<f64>>>()?;
    Landscape::cached(grid.clone(), quality, top)
}
