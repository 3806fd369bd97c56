//! Pairwise template matching under the Chebyshev distance.

use crate::exec::Execution;

/// Below this many templates the thread pool costs more than it saves.
const PARALLEL_MIN_TEMPLATES: usize = 256;

/// Match counts for one template set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct MatchCounts {
    /// Number of other templates within tolerance, per template.
    pub per_template: Vec<u64>,
    /// Sum of `per_template`; twice the number of matching pairs.
    pub total: u64,
}

impl MatchCounts {
    pub fn templates(&self) -> usize {
        self.per_template.len()
    }

    /// `(1/T) * sum_i count_i / (T - 1)`, evaluated as one exact-integer
    /// quotient so the result does not depend on summation order.
    pub fn mean(&self) -> f64 {
        let t = self.templates() as f64;
        self.total as f64 / (t * (t - 1.0))
    }
}

#[inline]
pub(crate) fn within(a: &[f64], b: &[f64], epsilon: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= epsilon)
}

/// Counts matches among `count` templates read from `data`: template `i`
/// is `data[i * stride .. i * stride + dim]`. Self-matches are excluded
/// and the comparison is inclusive.
pub(crate) fn count_matches(
    data: &[f64],
    stride: usize,
    dim: usize,
    count: usize,
    epsilon: f64,
    exec: Execution,
) -> MatchCounts {
    debug_assert!(count == 0 || (count - 1) * stride + dim <= data.len());
    let template = |i: usize| &data[i * stride..i * stride + dim];

    let scan_row = |acc: &mut [u64], i: usize| {
        let a = template(i);
        for j in i + 1..count {
            if within(a, template(j), epsilon) {
                acc[i] += 1;
                acc[j] += 1;
            }
        }
    };

    let per_template = if exec.is_parallel() && count >= PARALLEL_MIN_TEMPLATES {
        parallel_rows(count, scan_row)
    } else {
        let mut acc = vec![0u64; count];
        for i in 0..count {
            scan_row(&mut acc, i);
        }
        acc
    };
    let total = per_template.iter().sum();
    MatchCounts { per_template, total }
}

#[cfg(feature = "parallel")]
fn parallel_rows<F>(count: usize, scan_row: F) -> Vec<u64>
where
    F: Fn(&mut [u64], usize) + Sync + Send,
{
    use rayon::prelude::*;
    // integer accumulators, so the reduction order cannot change the result
    (0..count)
        .into_par_iter()
        .with_min_len(16)
        .fold(
            || vec![0u64; count],
            |mut acc, i| {
                scan_row(&mut acc, i);
                acc
            },
        )
        .reduce(
            || vec![0u64; count],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        )
}

#[cfg(not(feature = "parallel"))]
fn parallel_rows<F>(count: usize, scan_row: F) -> Vec<u64>
where
    F: Fn(&mut [u64], usize),
{
    let mut acc = vec![0u64; count];
    for i in 0..count {
        scan_row(&mut acc, i);
    }
    acc
}
