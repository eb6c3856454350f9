//! Quality landscapes and (α, β)-approximate unimodality.
//!
//! Qualities are higher-is-better throughout. The unimodality condition is
//! stated for a minimised function `f`, so the checker works on
//! `f = −quality`: a 1-D landscape with a unique optimum `o` is
//! (α, β)-approximately unimodal when every position `x` at distance
//! `i = |x − o| ≥ β` is strictly better than every position `y` at distance
//! `j > α·i`. Ties count as violations.

use std::collections::BTreeMap;
use std::fs::File;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::configurators::{Objective, TargetSet};
use crate::error::{Error, Result};
use crate::space::{Configuration, ParameterDim, ParameterSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LandscapeKind {
    Exact,
    CachedEmpirical,
}

/// A total quality map over a parameter space with a declared target set.
#[derive(Debug, Clone)]
pub struct Landscape {
    space: ParameterSpace,
    /// Indexed by [`ParameterSpace::linear_index`].
    quality: Vec<f64>,
    targets: TargetSet,
    kind: LandscapeKind,
}

impl Landscape {
    /// An exact landscape whose target set is the `top` best configurations.
    pub fn exact(space: ParameterSpace, quality: Vec<f64>, top: usize) -> Result<Self> {
        Self::build(space, quality, top, LandscapeKind::Exact)
    }

    /// An exact 1-D landscape over `1..=values.len()` targeting its argmax.
    pub fn exact_1d(values: Vec<f64>) -> Result<Self> {
        let space = ParameterSpace::single("x", values.len())?;
        Self::exact(space, values, 1)
    }

    pub fn cached(space: ParameterSpace, quality: Vec<f64>, top: usize) -> Result<Self> {
        Self::build(space, quality, top, LandscapeKind::CachedEmpirical)
    }

    fn build(
        space: ParameterSpace,
        quality: Vec<f64>,
        top: usize,
        kind: LandscapeKind,
    ) -> Result<Self> {
        if quality.len() != space.cardinality() {
            return Err(Error::Landscape(format!(
                "{} qualities for a space of {} configurations",
                quality.len(),
                space.cardinality()
            )));
        }
        if let Some(i) = quality.iter().position(|q| !q.is_finite()) {
            return Err(Error::Landscape(format!(
                "quality of {} is not finite",
                space.configuration_at(i)
            )));
        }
        if top == 0 {
            return Err(Error::config("target set size must be at least 1"));
        }
        let targets = top_configurations(&space, &quality, top);
        Ok(Self {
            space,
            quality,
            targets,
            kind,
        })
    }

    /// Replaces the target set.
    pub fn with_targets(mut self, targets: TargetSet) -> Result<Self> {
        if targets.is_empty() {
            return Err(Error::config("target set must not be empty"));
        }
        for t in &targets {
            self.space.validate(t)?;
        }
        self.targets = targets;
        Ok(self)
    }

    pub fn space(&self) -> &ParameterSpace {
        &self.space
    }

    pub fn kind(&self) -> LandscapeKind {
        self.kind
    }

    pub fn targets(&self) -> &TargetSet {
        &self.targets
    }

    pub fn qualities(&self) -> &[f64] {
        &self.quality
    }

    pub fn quality(&self, config: &Configuration) -> f64 {
        self.quality[self.space.linear_index(config)]
    }

    /// The sub-landscape keeping the first `counts[d]` values of each
    /// dimension, targeting its own `top` best cells.
    pub fn restrict(&self, counts: &[usize], top: usize) -> Result<Self> {
        if counts.len() != self.space.num_dims() {
            return Err(Error::contract("restriction needs one count per dimension"));
        }
        let dims = self
            .space
            .dims()
            .iter()
            .zip(counts)
            .map(|(dim, &c)| dim.truncated(c))
            .collect::<Result<Vec<_>>>()?;
        let sub = ParameterSpace::new(dims)?;
        let quality = sub.iter().map(|c| self.quality(&c)).collect();
        Self::build(sub, quality, top, self.kind)
    }

    /// 1-based position of the unique best configuration of a 1-D landscape.
    pub fn optimum_position(&self) -> Result<usize> {
        if self.space.num_dims() != 1 {
            return Err(Error::contract("unimodality is defined for 1-D landscapes"));
        }
        unique_argmax(&self.quality).map(|i| i + 1)
    }

    /// Axis-parallel 1-D slices: for each dimension and each fixed setting
    /// of the other dimensions, the line through the grid along it.
    pub fn slices(&self) -> Vec<Slice> {
        let mut out = Vec::new();
        for axis in 0..self.space.num_dims() {
            let mut lines: BTreeMap<Vec<usize>, Vec<f64>> = BTreeMap::new();
            for (i, c) in self.space.iter().enumerate() {
                let mut key = c.indices().to_vec();
                key[axis] = 0;
                lines.entry(key).or_default().push(self.quality[i]);
            }
            for (key, values) in lines {
                out.push(Slice {
                    axis,
                    fixed: key,
                    values,
                });
            }
        }
        out
    }

    /// Writes the landscape CSV: header `dim1,…,dimD,quality`, one row per
    /// configuration with 1-based indices.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv_to(file).map_err(|e| Error::csv(path, e))
    }

    pub fn write_csv_to<W: std::io::Write>(&self, writer: W) -> csv::Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(writer);
        let mut header: Vec<String> = self
            .space
            .dims()
            .iter()
            .map(|d| d.name().to_owned())
            .collect();
        header.push("quality".into());
        w.write_record(&header)?;
        for (c, q) in self.space.iter().zip(&self.quality) {
            let mut row: Vec<String> = c.indices().iter().map(usize::to_string).collect();
            row.push(format!("{q}"));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

impl Objective for Landscape {
    fn estimate(&self, config: &Configuration, _runs: u32, _seed: u64) -> Result<f64> {
        self.space.validate(config)?;
        Ok(self.quality(config))
    }
}

/// One axis-parallel line of a landscape.
#[derive(Debug, Clone, PartialEq)]
pub struct Slice {
    pub axis: usize,
    /// Indices of the other dimensions; the entry at `axis` is 0.
    pub fixed: Vec<usize>,
    pub values: Vec<f64>,
}

fn top_configurations(space: &ParameterSpace, quality: &[f64], top: usize) -> TargetSet {
    let mut order: Vec<usize> = (0..quality.len()).collect();
    order.sort_by(|&a, &b| quality[b].total_cmp(&quality[a]).then(a.cmp(&b)));
    order
        .into_iter()
        .take(top)
        .map(|i| space.configuration_at(i))
        .collect()
}

fn unique_argmax(values: &[f64]) -> Result<usize> {
    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut hits = values.iter().enumerate().filter(|(_, &v)| v == best);
    let (first, _) = hits
        .next()
        .ok_or_else(|| Error::Landscape("empty landscape".into()))?;
    if let Some((second, _)) = hits.next() {
        return Err(Error::Landscape(format!(
            "optimum is not unique (positions {} and {})",
            first + 1,
            second + 1
        )));
    }
    Ok(first)
}

/// Outcome of an (α, β) check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unimodality {
    Pass,
    /// 1-based positions with `dist(x) ≥ β`, `dist(y) > α·dist(x)` and
    /// `quality(x) ≤ quality(y)`.
    Witness {
        x: usize,
        y: usize,
    },
}

impl Unimodality {
    pub fn passed(&self) -> bool {
        matches!(self, Unimodality::Pass)
    }
}

/// Checks (α, β)-approximate unimodality of a 1-D landscape.
///
/// The reported witness is the smallest violating pair ordered by
/// `(dist(x), dist(y), x, y)`.
pub fn check_approx_unimodal(
    landscape: &Landscape,
    alpha: f64,
    beta: usize,
) -> Result<Unimodality> {
    let opt = landscape.optimum_position()?;
    check_values(landscape.qualities(), opt, alpha, beta)
}

/// [`check_approx_unimodal`] on raw higher-is-better values with the
/// optimum at 1-based position `opt`.
pub fn check_values(values: &[f64], opt: usize, alpha: f64, beta: usize) -> Result<Unimodality> {
    let m = values.len();
    if !(1..=m).contains(&opt) {
        return Err(Error::contract(format!(
            "optimum position {opt} outside 1..={m}"
        )));
    }
    if alpha.is_nan() || alpha < 1.0 {
        return Err(Error::contract(format!("α must be ≥ 1, got {alpha}")));
    }
    if !(1..=m).contains(&beta) {
        return Err(Error::contract(format!(
            "β must lie in 1..={m}, got {beta}"
        )));
    }
    let by_distance = DistanceIndex::new(values, opt);
    for i in beta..=by_distance.max_distance() {
        let Some(worst_x) = by_distance.worst_at(i) else {
            continue;
        };
        // Smallest distance j with j > α·i.
        let j_min = (alpha * i as f64).floor() as usize + 1;
        if j_min > by_distance.max_distance() {
            break;
        }
        if by_distance.best_beyond(j_min) < worst_x {
            continue;
        }
        // Some pair at distance i violates; find the first in order.
        for x in by_distance.positions_at(i) {
            let fx = values[x - 1];
            for j in j_min..=by_distance.max_distance() {
                if let Some(y) = by_distance
                    .positions_at(j)
                    .into_iter()
                    .find(|&y| values[y - 1] >= fx)
                {
                    return Ok(Unimodality::Witness { x, y });
                }
            }
        }
        unreachable!("a violation at distance {i} was detected");
    }
    Ok(Unimodality::Pass)
}

/// Positions grouped by distance to the optimum, with per-distance extremes
/// and suffix maxima over distance.
struct DistanceIndex {
    opt: usize,
    m: usize,
    worst: Vec<f64>,
    best_suffix: Vec<f64>,
}

impl DistanceIndex {
    fn new(values: &[f64], opt: usize) -> Self {
        let m = values.len();
        let max_d = (opt - 1).max(m - opt);
        let mut worst = vec![f64::INFINITY; max_d + 1];
        let mut best = vec![f64::NEG_INFINITY; max_d + 2];
        for (p, &v) in values.iter().enumerate() {
            let d = (p + 1).abs_diff(opt);
            worst[d] = worst[d].min(v);
            best[d] = best[d].max(v);
        }
        for d in (0..=max_d).rev() {
            best[d] = best[d].max(best[d + 1]);
        }
        Self {
            opt,
            m,
            worst,
            best_suffix: best,
        }
    }

    fn max_distance(&self) -> usize {
        self.worst.len() - 1
    }

    fn worst_at(&self, d: usize) -> Option<f64> {
        self.worst.get(d).copied().filter(|w| w.is_finite())
    }

    fn best_beyond(&self, d: usize) -> f64 {
        self.best_suffix
            .get(d)
            .copied()
            .unwrap_or(f64::NEG_INFINITY)
    }

    fn positions_at(&self, d: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(2);
        if d < self.opt {
            out.push(self.opt - d);
        }
        if d > 0 && self.opt + d <= self.m {
            out.push(self.opt + d);
        }
        out
    }
}

/// A passing (α, β) pair plus, when α > 1, a witness that `α − step` fails.
#[derive(Debug, Clone, PartialEq)]
pub struct UnimodalityCertificate {
    pub alpha: f64,
    pub beta: usize,
    pub witness_below: Option<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateReport {
    /// The smallest grid α for every β in `1..=m`.
    pub per_beta: Vec<UnimodalityCertificate>,
    /// Pairs not dominated in both α and β.
    pub pareto: Vec<UnimodalityCertificate>,
}

/// Smallest α on a grid of the given step (in `1 + k·step`) for each β.
pub fn minimal_certificate(landscape: &Landscape, step: f64) -> Result<CertificateReport> {
    let opt = landscape.optimum_position()?;
    minimal_certificate_values(landscape.qualities(), opt, step)
}

pub fn minimal_certificate_values(
    values: &[f64],
    opt: usize,
    step: f64,
) -> Result<CertificateReport> {
    if step.is_nan() || step <= 0.0 {
        return Err(Error::contract("α grid step must be positive"));
    }
    let m = values.len();
    let index = DistanceIndex::new(values, opt);
    // For each distance i, the largest distance j > i holding a point at
    // least as good as the worst point at distance i.
    let max_d = index.max_distance();
    let mut far_bad = vec![0usize; max_d + 1];
    for (i, slot) in far_bad.iter_mut().enumerate().skip(1) {
        let Some(w) = index.worst_at(i) else { continue };
        for j in (i + 1..=max_d).rev() {
            if index.positions_at(j).iter().any(|&y| values[y - 1] >= w) {
                *slot = j;
                break;
            }
        }
    }
    let mut per_beta = Vec::with_capacity(m);
    for beta in 1..=m {
        // α must satisfy α·i ≥ j for every bad pair with i ≥ β.
        let ratio = (beta..=max_d)
            .filter(|&i| far_bad[i] > 0)
            .map(|i| far_bad[i] as f64 / i as f64)
            .fold(1.0, f64::max);
        let mut alpha = grid_ceil(ratio, step);
        // Guard against rounding at the grid boundary.
        while !check_values(values, opt, alpha, beta)?.passed() {
            alpha = grid_value(((alpha - 1.0) / step).round() as usize + 1, step);
        }
        let witness_below = if alpha > 1.0 {
            let below = grid_value(((alpha - 1.0) / step).round() as usize - 1, step);
            match check_values(values, opt, below, beta)? {
                Unimodality::Witness { x, y } => Some((x, y)),
                Unimodality::Pass => None,
            }
        } else {
            None
        };
        per_beta.push(UnimodalityCertificate {
            alpha,
            beta,
            witness_below,
        });
    }
    let mut pareto: Vec<UnimodalityCertificate> = Vec::new();
    for cert in &per_beta {
        if pareto.last().is_none_or(|p| cert.alpha < p.alpha) {
            pareto.push(cert.clone());
        }
    }
    Ok(CertificateReport { per_beta, pareto })
}

fn grid_value(k: usize, step: f64) -> f64 {
    1.0 + k as f64 * step
}

fn grid_ceil(ratio: f64, step: f64) -> f64 {
    let k = ((ratio - 1.0) / step - 1e-9).ceil().max(0.0) as usize;
    grid_value(k, step)
}

/// Per-slice result of checking a multi-dimensional landscape.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceReport {
    pub axis: usize,
    pub fixed: Vec<usize>,
    /// `Err` carries the reason the slice could not be checked.
    pub outcome: std::result::Result<Unimodality, String>,
}

/// Checks (α, β) along every axis-parallel slice.
pub fn check_slices(landscape: &Landscape, alpha: f64, beta: usize) -> Vec<SliceReport> {
    landscape
        .slices()
        .into_iter()
        .map(|s| {
            let outcome = unique_argmax(&s.values)
                .and_then(|opt| check_values(&s.values, opt + 1, alpha, beta.min(s.values.len())))
                .map_err(|e| e.to_string());
            SliceReport {
                axis: s.axis,
                fixed: s.fixed,
                outcome,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SyntheticKind {
    /// Quality −dist: a symmetric V.
    Unimodal,
    /// Flat everywhere except a single better optimum.
    Plateau,
    /// Zig-zag that is (α, 1)-approximately unimodal but not unimodal.
    Sawtooth(f64),
    /// Quality grows away from an isolated optimum.
    Deceptive,
}

impl SyntheticKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "unimodal" => Ok(SyntheticKind::Unimodal),
            "plateau" => Ok(SyntheticKind::Plateau),
            "deceptive" => Ok(SyntheticKind::Deceptive),
            _ => {
                let alpha = s
                    .strip_prefix("sawtooth")
                    .map(|rest| rest.trim_start_matches(['(', ':']).trim_end_matches(')'))
                    .map(|a| {
                        if a.is_empty() {
                            Ok(2.0)
                        } else {
                            a.parse::<f64>()
                        }
                    });
                match alpha {
                    Some(Ok(a)) if a >= 1.0 => Ok(SyntheticKind::Sawtooth(a)),
                    _ => Err(Error::config(format!("unknown synthetic landscape `{s}`"))),
                }
            }
        }
    }

    pub fn id(&self) -> String {
        match self {
            SyntheticKind::Unimodal => "unimodal".into(),
            SyntheticKind::Plateau => "plateau".into(),
            SyntheticKind::Sawtooth(a) => format!("sawtooth({a})"),
            SyntheticKind::Deceptive => "deceptive".into(),
        }
    }
}

/// An exact 1-D landscape on `1..=m` whose optimum position is drawn
/// uniformly from `rng`.
pub fn generate_synthetic<R: Rng + ?Sized>(
    kind: SyntheticKind,
    m: usize,
    rng: &mut R,
) -> Result<Landscape> {
    if m < 2 {
        return Err(Error::config("synthetic landscapes need m ≥ 2"));
    }
    let opt = rng.gen_range(1..=m);
    synthetic_with_optimum(kind, m, opt)
}

/// [`generate_synthetic`] with a fixed optimum position.
pub fn synthetic_with_optimum(kind: SyntheticKind, m: usize, opt: usize) -> Result<Landscape> {
    if m < 2 || !(1..=m).contains(&opt) {
        return Err(Error::config(format!(
            "invalid synthetic landscape m={m}, optimum {opt}"
        )));
    }
    let max_d = (opt - 1).max(m - opt) as f64;
    let values = (1..=m)
        .map(|p| {
            let d = p.abs_diff(opt) as f64;
            match kind {
                SyntheticKind::Unimodal => -d,
                SyntheticKind::Plateau => {
                    if d == 0.0 {
                        1.0
                    } else {
                        0.0
                    }
                }
                // Even distances dip to d/α; any j > α·i stays strictly worse.
                SyntheticKind::Sawtooth(alpha) => {
                    if (d as usize).is_multiple_of(2) {
                        -d / alpha
                    } else {
                        -d
                    }
                }
                SyntheticKind::Deceptive => {
                    if d == 0.0 {
                        max_d + 1.0
                    } else {
                        d
                    }
                }
            }
        })
        .collect();
    Landscape::exact_1d(values)
}

/// Reads a cached landscape CSV and targets its `top` best cells.
pub fn load_cached_landscape(path: &Path, top: usize) -> Result<Landscape> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_cached_landscape(file, top).map_err(|e| match e {
        Error::Landscape(msg) => Error::Landscape(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn read_cached_landscape<R: std::io::Read>(reader: R, top: usize) -> Result<Landscape> {
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = r
        .headers()
        .map_err(|e| Error::Landscape(format!("unreadable header: {e}")))?
        .clone();
    if header.len() < 2 || header.get(header.len() - 1) != Some("quality") {
        return Err(Error::Landscape(
            "header must be `dim1,...,dimD,quality`".into(),
        ));
    }
    let num_dims = header.len() - 1;
    let mut cells: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
    for (line, record) in r.records().enumerate() {
        let row = line + 2;
        let record = record.map_err(|e| Error::Landscape(format!("row {row}: {e}")))?;
        if record.len() != header.len() {
            return Err(Error::Landscape(format!(
                "row {row}: expected {} fields, found {}",
                header.len(),
                record.len()
            )));
        }
        let mut indices = Vec::with_capacity(num_dims);
        for field in record.iter().take(num_dims) {
            let v: usize = field
                .parse()
                .map_err(|_| Error::Landscape(format!("row {row}: bad index `{field}`")))?;
            if v == 0 {
                return Err(Error::Landscape(format!("row {row}: indices are 1-based")));
            }
            indices.push(v);
        }
        let q: f64 = record[num_dims].parse().map_err(|_| {
            Error::Landscape(format!("row {row}: bad quality `{}`", &record[num_dims]))
        })?;
        if cells.insert(indices.clone(), q).is_some() {
            return Err(Error::Landscape(format!(
                "duplicate cell {}",
                Configuration::new(indices)
            )));
        }
    }
    if cells.is_empty() {
        return Err(Error::Landscape("no cells".into()));
    }
    let counts: Vec<usize> = (0..num_dims)
        .map(|d| cells.keys().map(|k| k[d]).max().unwrap_or(0))
        .collect();
    let dims = header
        .iter()
        .take(num_dims)
        .zip(&counts)
        .map(|(name, &c)| ParameterDim::indexed(name, c))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| Error::Landscape(e.to_string()))?;
    let space = ParameterSpace::new(dims)?;
    let mut missing = Vec::new();
    let mut quality = Vec::with_capacity(space.cardinality());
    for c in space.iter() {
        match cells.get(c.indices()) {
            Some(&q) => quality.push(q),
            None => {
                missing.push(c.to_string());
                quality.push(0.0);
            }
        }
    }
    if !missing.is_empty() {
        return Err(Error::Landscape(format!(
            "missing cells: {}",
            missing.join(" ")
        )));
    }
    Landscape::cached(space, quality, top)
}
