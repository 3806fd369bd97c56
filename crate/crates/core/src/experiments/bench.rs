use std::collections::BTreeMap;

use crate::entropy::SampEnParams;
use crate::error::Result;
use crate::exec::Execution;
use crate::generators::{er_graph, er_p_for_degree, uniform_signal, Seed};

use super::defaults::{ER_HI, ER_LO};
use super::{timed_entropy, Input};

/// Timing protocol on directed ER graphs with uniform node signals.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchSpec {
    pub ns: Vec<usize>,
    pub ks: Vec<f64>,
    pub ms: Vec<usize>,
    pub reps: usize,
    pub base_seed: Seed,
    pub r: f64,
    /// Strategy used inside each timed call.
    pub exec: Execution,
}

impl BenchSpec {
    pub fn new(ns: Vec<usize>, ks: Vec<f64>, ms: Vec<usize>, reps: usize, base_seed: Seed) -> Self {
        BenchSpec { ns, ks, ms, reps, base_seed, r: 0.2, exec: Execution::default() }
    }
}

/// Mean time of one entropy call at `(n, m)`, averaged over every K and
/// repetition.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub m: usize,
    pub mean_ms: f64,
    pub calls: usize,
    /// Calls whose entropy was undefined; they are still timed.
    pub undefined: usize,
}

/// Times `sampen_graph` alone (generation excluded), one call at a time.
pub fn run_benchmark(spec: &BenchSpec) -> Result<Vec<BenchRow>> {
    let mut acc: BTreeMap<(usize, usize), (f64, usize, usize)> = BTreeMap::new();
    let mut row_idx = 0u64;
    for &n in &spec.ns {
        for &k in &spec.ks {
            let p = er_p_for_degree(k, n)?;
            for rep in 0..spec.reps {
                let seed = spec.base_seed.for_rep(row_idx, rep as u64);
                let input = Input::Graph(
                    er_graph(n, p, true, seed.derive(0))?,
                    uniform_signal(n, ER_LO, ER_HI, seed.derive(1))?,
                );
                for &m in &spec.ms {
                    let params = SampEnParams::new(m, spec.r);
                    let (res, ms) = timed_entropy(&input, &params, spec.exec);
                    let slot = acc.entry((n, m)).or_insert((0.0, 0, 0));
                    slot.0 += ms;
                    slot.1 += 1;
                    match res {
                        Ok(_) => {}
                        Err(e) if e.is_undefined_entropy() => slot.2 += 1,
                        Err(e) => return Err(e),
                    }
                }
            }
            row_idx += 1;
        }
    }
    let order: Vec<(usize, usize)> = spec
        .ns
        .iter()
        .flat_map(|&n| spec.ms.iter().map(move |&m| (n, m)))
        .collect();
    Ok(order
        .into_iter()
        .filter_map(|key| {
            acc.get(&key).map(|&(total, calls, undefined)| BenchRow {
                n: key.0,
                m: key.1,
                mean_ms: total / calls as f64,
                calls,
                undefined,
            })
        })
        .collect())
}
