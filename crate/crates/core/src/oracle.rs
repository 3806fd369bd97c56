//! Dense brute-force reference for [`crate::entropy::sampen_graph`].
//!
//! Shares nothing with the fast path beyond the public types: matrix powers
//! are formed explicitly, eligibility and means are read off them, the
//! standard deviation is a two-pass sum, and matches are counted with a
//! full double loop over ordered pairs.

use crate::entropy::{CorrelationSums, CountingMode, SampEnParams, SampEnResult, SdConvention};
use crate::error::{Error, Result};
use crate::graph::{Graph, GraphSignal};

pub const ORACLE_MAX_NODES: usize = 2000;

fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut c = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == 0.0 {
                continue;
            }
            for j in 0..n {
                c[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    c
}

fn two_pass_sd(x: &[f64], convention: SdConvention) -> f64 {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let ss: f64 = x.iter().map(|v| (v - mean) * (v - mean)).sum();
    let denom = match convention {
        SdConvention::Population => n,
        SdConvention::Sample => n - 1.0,
    };
    if denom <= 0.0 {
        0.0
    } else {
        (ss / denom).sqrt()
    }
}

/// Mean of per-template match fractions, literally as a double average.
#[allow(clippy::needless_range_loop)]
fn correlation_sum(patterns: &[Vec<f64>], eps: f64) -> f64 {
    let t = patterns.len();
    let mut total = 0.0;
    for i in 0..t {
        let mut count = 0usize;
        for j in 0..t {
            if i == j {
                continue;
            }
            let mut d: f64 = 0.0;
            for k in 0..patterns[i].len() {
                d = d.max((patterns[i][k] - patterns[j][k]).abs());
            }
            if d <= eps {
                count += 1;
            }
        }
        total += count as f64 / (t - 1) as f64;
    }
    total / t as f64
}

/// Reference implementation with the same contract as `sampen_graph`.
pub fn sampen_oracle(graph: &Graph, signal: &GraphSignal, params: &SampEnParams) -> Result<SampEnResult> {
    params.validate()?;
    let n = graph.n();
    if n > ORACLE_MAX_NODES {
        return Err(Error::OracleTooLarge { n, limit: ORACLE_MAX_NODES });
    }
    if signal.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: signal.len() });
    }
    let x = signal.values();
    let (m, lag) = (params.m, params.lag);
    let eps = params.r * two_pass_sd(x, params.sd);

    // powers[h] = A^h for h = 1..=m*lag
    let a = graph.to_dense();
    let mut powers = vec![Vec::new(), a.clone()];
    for h in 2..=m * lag {
        let next = matmul(&powers[h - 1], &a);
        powers.push(next);
    }
    let row_sum = |h: usize, i: usize| powers[h][i].iter().sum::<f64>();
    let eligible = |dim: usize| -> Vec<usize> {
        (0..n)
            .filter(|&i| (1..dim).all(|k| row_sum(k * lag, i) > 0.0))
            .collect()
    };
    let pattern = |i: usize, dim: usize| -> Vec<f64> {
        let mut p = vec![x[i]];
        for k in 1..dim {
            let h = k * lag;
            let weighted: f64 = (0..n).map(|j| powers[h][i][j] * x[j]).sum();
            p.push(weighted / row_sum(h, i));
        }
        p
    };

    let set_m1 = eligible(m + 1);
    if set_m1.len() < 2 {
        return Err(Error::InsufficientPatterns { found: set_m1.len() });
    }
    let set_m = match params.mode {
        CountingMode::Literal => eligible(m),
        CountingMode::StrictConditional => set_m1.clone(),
    };
    let pats_m: Vec<Vec<f64>> = set_m.iter().map(|&i| pattern(i, m)).collect();
    let pats_m1: Vec<Vec<f64>> = set_m1.iter().map(|&i| pattern(i, m + 1)).collect();

    let b = correlation_sum(&pats_m, eps);
    let a_sum = correlation_sum(&pats_m1, eps);
    let sums = CorrelationSums {
        a: a_sum,
        b,
        n_templates_m: pats_m.len(),
        n_templates_m1: pats_m1.len(),
        epsilon: eps,
    };
    if b == 0.0 {
        return Err(Error::NoMatches(sums));
    }
    if a_sum == 0.0 {
        return Err(Error::NoExtendedMatches(sums));
    }
    Ok(SampEnResult {
        value: -(a_sum / b).ln(),
        a: a_sum,
        b,
        n_templates_m: sums.n_templates_m,
        n_templates_m1: sums.n_templates_m1,
        epsilon: eps,
    })
}
