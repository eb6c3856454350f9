//! Independent brute-force reimplementations shared by the oracle tests and
//! the acceptance run.

#![allow(dead_code)]

use paramtune::operators::HarmonicDistribution;
use paramtune::rng::rng_from_seed;
use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Two-tailed permutation p-value of the midrank sum of `xs`, enumerating
/// every split of the pooled sample.
pub fn enumerated_p(xs: &[f64], ys: &[f64]) -> f64 {
    let pooled: Vec<f64> = xs.iter().chain(ys).copied().collect();
    let n = pooled.len();
    let rank = |v: f64| -> f64 {
        let below = pooled.iter().filter(|&&w| w < v).count() as f64;
        let equal = pooled.iter().filter(|&&w| w == v).count() as f64;
        below + (equal + 1.0) / 2.0
    };
    let ranks: Vec<f64> = pooled.iter().map(|&v| rank(v)).collect();
    let k = xs.len();
    let mean = k as f64 * (n as f64 + 1.0) / 2.0;
    let observed = (ranks[..k].iter().sum::<f64>() - mean).abs();
    let (mut hits, mut total) = (0u64, 0u64);
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let t: f64 = (0..n)
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| ranks[i])
            .sum();
        total += 1;
        if (t - mean).abs() >= observed - 1e-9 {
            hits += 1;
        }
    }
    hits as f64 / total as f64
}

/// Pearson statistic and 1% critical value of `draws` samples against
/// `P(d) = 1/(d·H_{φ−1})`, merging tail bins below an expected count of 5.
pub fn harmonic_chi_square(phi: usize, draws: u64, seed: u64) -> (f64, f64) {
    let mut rng = rng_from_seed(seed);
    let h: f64 = (1..phi).map(|k| 1.0 / k as f64).sum();
    let dist = HarmonicDistribution::new(phi).unwrap();
    let mut counts = vec![0u64; phi];
    for _ in 0..draws {
        counts[dist.sample(&mut rng)] += 1;
    }
    let (mut stat, mut bins) = (0.0, 0);
    let (mut obs, mut exp) = (0.0, 0.0);
    for (d, &count) in counts.iter().enumerate().skip(1) {
        obs += count as f64;
        exp += draws as f64 / (d as f64 * h);
        if exp >= 5.0 || d == phi - 1 {
            stat += (obs - exp).powi(2) / exp;
            bins += 1;
            obs = 0.0;
            exp = 0.0;
        }
    }
    (
        stat,
        ChiSquared::new((bins - 1) as f64)
            .unwrap()
            .inverse_cdf(0.99),
    )
}

/// Every pair checked directly; the first violation in (dist x, dist y, x, y)
/// order is returned.
pub fn brute_force_witness(
    values: &[f64],
    opt: usize,
    alpha: f64,
    beta: usize,
) -> Option<(usize, usize)> {
    let m = values.len();
    let mut found: Option<(usize, usize, usize, usize)> = None;
    for x in 1..=m {
        let i = x.abs_diff(opt);
        if i < beta {
            continue;
        }
        for y in 1..=m {
            let j = y.abs_diff(opt);
            if (j as f64) > alpha * i as f64 && values[x - 1] <= values[y - 1] {
                let key = (i, j, x, y);
                if found.is_none_or(|f| key < f) {
                    found = Some(key);
                }
            }
        }
    }
    found.map(|(_, _, x, y)| (x, y))
}

pub fn naive_onemax(bits: &[bool]) -> u64 {
    bits.iter().filter(|&&b| b).count() as u64
}

pub fn naive_leadingones(bits: &[bool]) -> u64 {
    let mut count = 0;
    for &b in bits {
        if !b {
            break;
        }
        count += 1;
    }
    count
}

pub fn naive_ridge(bits: &[bool]) -> u64 {
    let n = bits.len();
    let ones = naive_onemax(bits) as usize;
    let on_ridge = (0..n).all(|i| bits[i] == (i < ones));
    if on_ridge {
        (n + ones) as u64
    } else {
        (n - ones) as u64
    }
}

/// A noisy unimodal shape on up to 200 points with rounding ties, so that
/// both checker verdicts occur. Returns the values and the optimum.
pub fn random_landscape<R: Rng>(rng: &mut R) -> (Vec<f64>, usize) {
    let m = rng.gen_range(1..=200);
    let opt = rng.gen_range(1..=m);
    let rough = rng.gen_range(0.0..3.0);
    let values = (1..=m)
        .map(|p: usize| {
            let d = p.abs_diff(opt) as f64;
            if p == opt {
                1.0
            } else {
                (-d + rough * rng.gen_range(-1.0..1.0) * d.sqrt()).round()
            }
        })
        .collect();
    (values, opt)
}

/// Random bit strings of varied density, with ridge points and near misses
/// mixed in since uniform sampling almost never produces them.
pub fn random_bits<R: Rng>(rng: &mut R) -> Vec<bool> {
    let n = rng.gen_range(1..200);
    if rng.gen_bool(0.3) {
        let i = rng.gen_range(0..=n);
        let mut b: Vec<bool> = (0..n).map(|j| j < i).collect();
        if rng.gen_bool(0.5) {
            let k = rng.gen_range(0..n);
            b[k] = !b[k];
        }
        b
    } else {
        let p = rng.gen_range(0.0..1.0);
        (0..n).map(|_| rng.gen_bool(p)).collect()
    }
}
