//! Seeded parameter sweeps, the timing harness, and result files.
//!
//! A sweep is the Cartesian product of named axes. Every grid row is run
//! `reps` times; repetition `k` of row `i` draws all of its randomness from
//! `base_seed.for_rep(i, k)`, so rows can be executed in any order or in
//! parallel and still reproduce bit-for-bit.

mod bench;
mod ensembles;
mod results;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::entropy::{sampen_classic_with, sampen_graph_with, SampEnParams, SampEnResult};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::generators::{
    er_graph, er_p_for_degree, logistic_map, mix2d, open_unit, piecewise_signal, smooth_wgn,
    uniform_signal, ws_graph, Seed,
};
use crate::graph::{build_grid8, build_path, Graph, GraphSignal, GridOrientation};

pub use bench::{run_benchmark, BenchRow, BenchSpec};
pub use ensembles::{ensemble_r_sweep, snapshot_profile};
pub use results::{parse_results_csv, render_results, write_results, OutputFormat, ResultsHeader};

/// How a logistic-map series is analysed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PathKind {
    #[default]
    Directed,
    Undirected,
    /// Sliding-window estimator on the raw series.
    Classic,
}

/// Node signal placed on Watts–Strogatz graphs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WsSignal {
    #[default]
    SmoothWgn,
    Piecewise,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Logistic { path: PathKind },
    Mix2d { orientation: GridOrientation },
    Er { directed: bool },
    Ws { signal: WsSignal },
    /// A fixed graph and signal; only estimator axes can vary.
    Custom { graph: Graph, signal: GraphSignal },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Logistic { .. } => "logistic",
            Family::Mix2d { .. } => "mix2d",
            Family::Er { .. } => "er",
            Family::Ws { .. } => "ws",
            Family::Custom { .. } => "custom",
        }
    }

    fn axis_names(&self) -> &'static [&'static str] {
        match self {
            Family::Logistic { .. } => &["rho", "N", "burn_in"],
            Family::Mix2d { .. } => &["p", "size", "rows", "cols"],
            Family::Er { .. } => &["N", "K", "p"],
            Family::Ws { .. } => &["N", "K", "beta", "sigma", "tau0", "iters"],
            Family::Custom { .. } => &[],
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Axes every family accepts.
const ESTIMATOR_AXES: [&str; 3] = ["m", "r", "lag"];

/// Axes holding integer quantities.
const INTEGER_AXES: [&str; 8] = ["m", "lag", "N", "burn_in", "size", "rows", "cols", "iters"];

/// A named list of values for one swept parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: String,
    pub values: Vec<f64>,
}

impl Axis {
    pub fn new(name: impl Into<String>, values: impl Into<Vec<f64>>) -> Self {
        Axis { name: name.into(), values: values.into() }
    }
}

/// Parses `"a,b,c"` into numbers.
pub fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|v| {
            f64::from_str(v.trim())
                .map_err(|_| Error::InvalidParameter(format!("bad number '{v}' in list '{text}'")))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub family: Family,
    pub axes: Vec<Axis>,
    pub reps: usize,
    pub base_seed: Seed,
    /// Estimator settings; `m`, `r` and `lag` are overridden by axes of
    /// the same name.
    pub params: SampEnParams,
    pub exec: Execution,
}

impl SweepSpec {
    pub fn new(family: Family, axes: Vec<Axis>, reps: usize, base_seed: Seed) -> Self {
        SweepSpec {
            family,
            axes,
            reps,
            base_seed,
            params: SampEnParams::default(),
            exec: Execution::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps < 1 {
            return Err(Error::InvalidParameter("reps must be at least 1".into()));
        }
        if self.axes.is_empty() {
            return Err(Error::InvalidParameter("sweep grid has no axes".into()));
        }
        let known = self.family.axis_names();
        for (k, axis) in self.axes.iter().enumerate() {
            if !known.contains(&axis.name.as_str()) && !ESTIMATOR_AXES.contains(&axis.name.as_str()) {
                return Err(Error::InvalidParameter(format!(
                    "axis '{}' is not recognised by family {}",
                    axis.name, self.family
                )));
            }
            if axis.values.is_empty() {
                return Err(Error::InvalidParameter(format!("axis '{}' has no values", axis.name)));
            }
            if self.axes[..k].iter().any(|a| a.name == axis.name) {
                return Err(Error::InvalidParameter(format!("axis '{}' given twice", axis.name)));
            }
            if INTEGER_AXES.contains(&axis.name.as_str())
                && axis.values.iter().any(|v| v.fract() != 0.0 || *v < 0.0)
            {
                return Err(Error::InvalidParameter(format!(
                    "axis '{}' takes non-negative integers",
                    axis.name
                )));
            }
        }
        if matches!(self.family, Family::Er { .. }) && self.has_axis("K") && self.has_axis("p") {
            return Err(Error::InvalidParameter("ER sweeps take K or p, not both".into()));
        }
        self.params.validate()
    }

    fn has_axis(&self, name: &str) -> bool {
        self.axes.iter().any(|a| a.name == name)
    }

    /// Grid rows, first axis varying slowest.
    pub fn grid(&self) -> Vec<Vec<(String, f64)>> {
        let mut rows: Vec<Vec<(String, f64)>> = vec![Vec::new()];
        for axis in &self.axes {
            rows = rows
                .into_iter()
                .flat_map(|row| {
                    axis.values.iter().map(move |&v| {
                        let mut r = row.clone();
                        r.push((axis.name.clone(), v));
                        r
                    })
                })
                .collect();
        }
        rows
    }
}

/// Statistics for one grid row over its repetitions.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    /// Resolved axis values, in axis order.
    pub params: Vec<(String, f64)>,
    /// Mean entropy over successful repetitions; `None` if all failed.
    pub mean: Option<f64>,
    /// Sample standard deviation over successful repetitions.
    pub std: Option<f64>,
    pub reps_ok: usize,
    pub reps_failed: usize,
    /// Mean wall-clock time of the entropy call, failed calls included.
    pub mean_runtime_ms: f64,
}

impl SweepRow {
    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|(n, _)| n == name).map(|&(_, v)| v)
    }

    /// Aggregates per-repetition outcomes. Values are sorted before summing
    /// so the result does not depend on the order repetitions finished in.
    pub fn from_outcomes(params: Vec<(String, f64)>, outcomes: &[(Option<f64>, f64)]) -> Self {
        let mut values: Vec<f64> = outcomes.iter().filter_map(|o| o.0).collect();
        values.sort_by(f64::total_cmp);
        let k = values.len();
        let (mean, std) = if k == 0 {
            (None, None)
        } else {
            let mean = values.iter().sum::<f64>() / k as f64;
            let std = if k == 1 {
                0.0
            } else {
                let mut dev: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
                dev.sort_by(f64::total_cmp);
                (dev.iter().sum::<f64>() / (k - 1) as f64).sqrt()
            };
            (Some(mean), Some(std))
        };
        let mut times: Vec<f64> = outcomes.iter().map(|o| o.1).collect();
        times.sort_by(f64::total_cmp);
        SweepRow {
            params,
            mean,
            std,
            reps_ok: k,
            reps_failed: outcomes.len() - k,
            mean_runtime_ms: times.iter().sum::<f64>() / outcomes.len().max(1) as f64,
        }
    }
}

/// Looks up a row value with a fallback.
struct Resolved<'a>(&'a [(String, f64)]);

impl Resolved<'_> {
    fn get(&self, name: &str, default: f64) -> f64 {
        self.0.iter().find(|(n, _)| n == name).map_or(default, |&(_, v)| v)
    }

    fn int(&self, name: &str, default: usize) -> usize {
        self.get(name, default as f64) as usize
    }
}

/// Default values used when a family's axis is not swept.
pub mod defaults {
    pub const LOGISTIC_RHO: f64 = 4.0;
    pub const LOGISTIC_N: usize = 1000;
    pub const MIX2D_P: f64 = 0.3;
    pub const MIX2D_SIZE: usize = 100;
    pub const ER_N: usize = 300;
    pub const ER_K: f64 = 3.0;
    pub const ER_LO: f64 = 0.01;
    pub const ER_HI: f64 = 0.10;
    pub const WS_N: usize = 500;
    pub const WS_K: usize = 1;
    pub const WS_SIGMA: f64 = 0.1;
    pub const WS_TAU0: f64 = 0.3;
    pub const WS_ITERS: usize = 30;
}

/// A graph signal ready for estimation, or a raw series.
enum Input {
    Graph(Graph, GraphSignal),
    Series(Vec<f64>),
}

fn build_input(family: &Family, row: &Resolved, seed: Seed) -> Result<Input> {
    use defaults::*;
    Ok(match family {
        Family::Logistic { path } => {
            let x0 = open_unit(seed.derive(0));
            let n = row.int("N", LOGISTIC_N);
            let series = logistic_map(row.get("rho", LOGISTIC_RHO), x0, n, row.int("burn_in", 0))?;
            match path {
                PathKind::Classic => Input::Series(series),
                PathKind::Directed | PathKind::Undirected => Input::Graph(
                    build_path(n, *path == PathKind::Directed)?,
                    GraphSignal::new(series)?,
                ),
            }
        }
        Family::Mix2d { orientation } => {
            let size = row.int("size", MIX2D_SIZE);
            let (rows, cols) = (row.int("rows", size), row.int("cols", size));
            let image = mix2d(rows, cols, row.get("p", MIX2D_P), seed)?;
            Input::Graph(build_grid8(rows, cols, *orientation)?, GraphSignal::new(image.pixels().to_vec())?)
        }
        Family::Er { directed } => {
            let n = row.int("N", ER_N);
            let p = match row.0.iter().find(|(name, _)| name == "p") {
                Some(&(_, p)) => p,
                None => er_p_for_degree(row.get("K", ER_K), n)?,
            };
            Input::Graph(
                er_graph(n, p, *directed, seed.derive(0))?,
                uniform_signal(n, ER_LO, ER_HI, seed.derive(1))?,
            )
        }
        Family::Ws { signal } => {
            let n = row.int("N", WS_N);
            let graph = ws_graph(n, row.int("K", WS_K), row.get("beta", 0.0), seed.derive(0))?;
            let x = match signal {
                WsSignal::SmoothWgn => {
                    smooth_wgn(&graph, row.get("tau0", WS_TAU0), row.int("iters", WS_ITERS), seed.derive(1))?
                }
                WsSignal::Piecewise => piecewise_signal(n, row.get("sigma", WS_SIGMA), seed.derive(1))?,
            };
            Input::Graph(graph, x)
        }
        Family::Custom { graph, signal } => Input::Graph(graph.clone(), signal.clone()),
    })
}

/// Runs the estimator on one input and times only the estimator.
fn timed_entropy(input: &Input, params: &SampEnParams, exec: Execution) -> (Result<SampEnResult>, f64) {
    let start = Instant::now();
    let res = match input {
        Input::Graph(g, x) => sampen_graph_with(g, x, params, exec),
        Input::Series(s) => sampen_classic_with(s, params.m, params.r, params.sd, exec),
    };
    (res, start.elapsed().as_secs_f64() * 1e3)
}

fn row_params(base: &SampEnParams, row: &Resolved) -> SampEnParams {
    SampEnParams {
        m: row.int("m", base.m),
        r: row.get("r", base.r),
        lag: row.int("lag", base.lag),
        ..*base
    }
}

/// Runs every repetition of every grid row.
///
/// Repetitions whose entropy is undefined are counted in `reps_failed`;
/// any other error aborts the sweep.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let grid = spec.grid();
    let reps = spec.reps;
    let outcomes = exec::map_indexed(spec.exec, grid.len() * reps, |job| {
        let (row_idx, rep) = (job / reps, job % reps);
        let row = Resolved(&grid[row_idx]);
        let params = row_params(&spec.params, &row);
        params.validate()?;
        let input = build_input(&spec.family, &row, spec.base_seed.for_rep(row_idx as u64, rep as u64))?;
        let (res, ms) = timed_entropy(&input, &params, spec.exec);
        match res {
            Ok(r) => Ok((Some(r.value), ms)),
            Err(e) if e.is_undefined_entropy() => Ok((None, ms)),
            Err(e) => Err(e),
        }
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    Ok(grid
        .into_iter()
        .zip(outcomes.chunks(reps))
        .map(|(params, chunk)| SweepRow::from_outcomes(params, chunk))
        .collect())
}
