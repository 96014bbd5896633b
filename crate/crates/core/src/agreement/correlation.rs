use std::collections::HashMap;

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Largest sample size for which the p-value is computed exactly over
/// every permutation.
pub const EXACT_MAX_N: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PValueMethod {
    ExactPermutation,
    TApproximation,
}

/// Ranks of one item under both scorings (1 = highest score, ties averaged).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RankRow {
    pub r_h: f64,
    pub r_b: f64,
    pub delta_r: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationResult {
    pub rho: f64,
    pub p_two_sided: f64,
    pub p_method: PValueMethod,
    /// One row per input item, in input order.
    pub rank_table: Vec<RankRow>,
}

/// Ascending 1-based ranks; tied values share the mean of their positions.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start+1 ..= end
        let rank = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

fn has_ties(ranks: &[f64]) -> bool {
    ranks.iter().any(|r| r.fract() != 0.0) || {
        let mut sorted = ranks.to_vec();
        sorted.sort_by(f64::total_cmp);
        sorted.windows(2).any(|w| w[0] == w[1])
    }
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0)
}

/// Centred ranks scaled by two, which makes every entry an integer even
/// when ties produce half ranks.
fn centred_doubled(ranks: &[f64]) -> Vec<i64> {
    let n = ranks.len() as i64;
    ranks
        .iter()
        .map(|r| (2.0 * r).round() as i64 - (n + 1))
        .collect()
}

/// Two-sided exact p-value: the share of all n! pairings of the rank vectors
/// whose rank covariance is at least as extreme as the observed one.
///
/// Pairings are counted by a dynamic program over the set of benchmark ranks
/// already assigned, keyed by the partial integer covariance.
fn exact_permutation_p(rank_h: &[f64], rank_b: &[f64]) -> f64 {
    let a = centred_doubled(rank_h);
    let b = centred_doubled(rank_b);
    let observed: i64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
    let threshold = observed.abs();
    let n = a.len();
    let full = (1usize << n) - 1;
    let mut states: Vec<HashMap<i64, u64>> = vec![HashMap::new(); full + 1];
    states[0].insert(0, 1);
    for mask in 0..full {
        let sums = std::mem::take(&mut states[mask]);
        let pos = mask.count_ones() as usize;
        for (j, bj) in b.iter().enumerate() {
            if mask & (1 << j) != 0 {
                continue;
            }
            let next = &mut states[mask | (1 << j)];
            for (sum, count) in &sums {
                *next.entry(sum + a[pos] * bj).or_default() += count;
            }
        }
    }
    let extreme: u64 = states[full]
        .iter()
        .filter(|(sum, _)| sum.abs() >= threshold)
        .map(|(_, count)| count)
        .sum();
    let total: u64 = (1..=n as u64).product();
    extreme as f64 / total as f64
}

fn t_approx_p(rho: f64, n: usize) -> f64 {
    if rho.abs() >= 1.0 {
        return 0.0;
    }
    let df = (n - 2) as f64;
    let t = rho * (df / (1.0 - rho * rho)).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).expect("df > 0");
    (2.0 * (1.0 - dist.cdf(t.abs()))).clamp(0.0, 1.0)
}

/// Spearman rank correlation between human scores `h` and benchmark scores `b`.
pub fn spearman(h: &[f64], b: &[f64]) -> Result<CorrelationResult> {
    if h.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: h.len(),
            right: b.len(),
        });
    }
    let n = h.len();
    if n < 3 {
        return Err(Error::InsufficientData { needed: 3, got: n });
    }
    if h.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::Domain("correlation inputs must be finite".into()));
    }
    let rh = average_ranks(h);
    let rb = average_ranks(b);
    if rh.iter().all(|r| *r == rh[0]) {
        return Err(Error::ConstantVector("human score vector"));
    }
    if rb.iter().all(|r| *r == rb[0]) {
        return Err(Error::ConstantVector("benchmark score vector"));
    }

    let rho = if has_ties(&rh) || has_ties(&rb) {
        pearson(&rh, &rb)
    } else {
        let d2: f64 = rh.iter().zip(&rb).map(|(x, y)| (x - y).powi(2)).sum();
        let nf = n as f64;
        1.0 - 6.0 * d2 / (nf * (nf * nf - 1.0))
    };

    let (p_two_sided, p_method) = if n <= EXACT_MAX_N {
        (exact_permutation_p(&rh, &rb), PValueMethod::ExactPermutation)
    } else {
        (t_approx_p(rho, n), PValueMethod::TApproximation)
    };

    let top = (n + 1) as f64;
    let rank_table = rh
        .iter()
        .zip(&rb)
        .map(|(x, y)| {
            let (r_h, r_b) = (top - x, top - y);
            RankRow {
                r_h,
                r_b,
                delta_r: r_b - r_h,
            }
        })
        .collect();

    Ok(CorrelationResult {
        rho,
        p_two_sided,
        p_method,
        rank_table,
    })
}
