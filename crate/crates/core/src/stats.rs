//! Two-sample comparisons: Mann-Whitney U and Cliff's delta.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Below this size of the smaller sample p-values come from the exact
/// null distribution.
pub const EXACT_BELOW: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MannWhitney {
    /// U of the first sample: pairs (x, y) with x > y, ties counting ½.
    pub u: f64,
    pub p_value: f64,
    pub exact: bool,
    /// Every observation was identical, so there is no evidence either way.
    pub degenerate: bool,
}

fn check_sample(name: &str, xs: &[f64]) -> Result<()> {
    if xs.is_empty() {
        return Err(Error::contract(format!("sample {name} is empty")));
    }
    if xs.iter().any(|x| x.is_nan()) {
        return Err(Error::contract(format!("sample {name} contains NaN")));
    }
    Ok(())
}

/// Midranks of `values` (1-based, ties share the mean of their ranks),
/// doubled so they stay integral.
fn doubled_midranks(values: &[f64]) -> (Vec<u64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0u64; values.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // Ranks i+1..=j+1 averaged, times two.
        let doubled = (i + 1 + j + 1) as u64;
        for &k in &order[i..=j] {
            ranks[k] = doubled;
        }
        if j > i {
            ties.push(j - i + 1);
        }
        i = j + 1;
    }
    (ranks, ties)
}

/// Two-tailed Mann-Whitney U test.
///
/// When the smaller sample has fewer than [`EXACT_BELOW`] values the
/// p-value is `P(|T − E T| ≥ |t − E T|)` under the exact permutation
/// distribution of the midrank sum `T`, which handles ties. Otherwise the
/// normal approximation with continuity and tie corrections is used.
pub fn mann_whitney_u(xs: &[f64], ys: &[f64]) -> Result<MannWhitney> {
    check_sample("xs", xs)?;
    check_sample("ys", ys)?;
    let (n1, n2) = (xs.len(), ys.len());
    let n = n1 + n2;
    let pooled: Vec<f64> = xs.iter().chain(ys).copied().collect();
    let (ranks, ties) = doubled_midranks(&pooled);
    let r1: u64 = ranks[..n1].iter().sum();
    let u = r1 as f64 / 2.0 - (n1 * (n1 + 1)) as f64 / 2.0;
    if pooled.iter().all(|&v| v == pooled[0]) {
        return Ok(MannWhitney {
            u,
            p_value: 1.0,
            exact: false,
            degenerate: true,
        });
    }
    if n1.min(n2) < EXACT_BELOW {
        let (small, observed) = if n1 <= n2 {
            (n1, r1)
        } else {
            (n2, ranks[n1..].iter().sum())
        };
        return Ok(MannWhitney {
            u,
            p_value: exact_p(&ranks, small, observed),
            exact: true,
            degenerate: false,
        });
    }
    let (n1f, n2f, nf) = (n1 as f64, n2 as f64, n as f64);
    let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum();
    let variance = n1f * n2f / 12.0 * ((nf + 1.0) - tie_term / (nf * (nf - 1.0)));
    let mu = n1f * n2f / 2.0;
    let z = ((u - mu).abs() - 0.5).max(0.0) / variance.sqrt();
    Ok(MannWhitney {
        u,
        p_value: erfc(z / std::f64::consts::SQRT_2).min(1.0),
        exact: false,
        degenerate: false,
    })
}

/// Exact two-tailed p of the doubled rank sum `observed` of a `k`-subset.
fn exact_p(ranks: &[u64], k: usize, observed: u64) -> f64 {
    let n = ranks.len();
    let max_sum: u64 = {
        let mut sorted = ranks.to_vec();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        sorted[..k].iter().sum()
    };
    let width = max_sum as usize + 1;
    // ways[j][s]: subsets of size j of the items seen so far with sum s.
    let mut ways = vec![vec![0f64; width]; k + 1];
    ways[0][0] = 1.0;
    for &r in ranks {
        let r = r as usize;
        for j in (1..=k).rev() {
            let (lower, upper) = ways.split_at_mut(j);
            let (prev, cur) = (&lower[j - 1], &mut upper[0]);
            for s in (r..width).rev() {
                cur[s] += prev[s - r];
            }
        }
    }
    let total: f64 = ways[k].iter().sum();
    // E T = k(n+1) in doubled units.
    let mean = (k * (n + 1)) as i64;
    let dev = (observed as i64 - mean).abs();
    let tail: f64 = ways[k]
        .iter()
        .enumerate()
        .filter(|&(s, _)| (s as i64 - mean).abs() >= dev)
        .map(|(_, w)| w)
        .sum();
    (tail / total).min(1.0)
}

/// `(#{x > y} − #{x < y}) / (n1·n2)` over all pairs.
pub fn cliffs_delta(xs: &[f64], ys: &[f64]) -> Result<f64> {
    check_sample("xs", xs)?;
    check_sample("ys", ys)?;
    let mut sorted = ys.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut dominance: i64 = 0;
    for &x in xs {
        let below = sorted.partition_point(|&y| y < x) as i64;
        let not_above = sorted.partition_point(|&y| y <= x) as i64;
        let above = sorted.len() as i64 - not_above;
        dominance += below - above;
    }
    Ok(dominance as f64 / (xs.len() * ys.len()) as f64)
}

/// Mann-Whitney and Cliff's delta of `xs` against `ys`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub u_statistic: f64,
    pub p_value: f64,
    pub cliffs_delta: f64,
    pub n1: usize,
    pub n2: usize,
    pub degenerate: bool,
}

pub fn compare(xs: &[f64], ys: &[f64]) -> Result<ComparisonReport> {
    let mw = mann_whitney_u(xs, ys)?;
    Ok(ComparisonReport {
        u_statistic: mw.u,
        p_value: mw.p_value,
        cliffs_delta: cliffs_delta(xs, ys)?,
        n1: xs.len(),
        n2: ys.len(),
        degenerate: mw.degenerate,
    })
}

/// Sample mean and standard error of the mean (0 for a single value).
pub fn mean_stderr(xs: &[f64]) -> Result<(f64, f64)> {
    check_sample("xs", xs)?;
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() == 1 {
        return Ok((mean, 0.0));
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok((mean, (var / n).sqrt()))
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 || points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return Err(Error::contract(
            "log-log fit needs at least two positive points",
        ));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::contract("log-log fit needs distinct x values"));
    }
    Ok(sxy / sxx)
}
