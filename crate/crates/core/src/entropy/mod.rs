//! Sample entropy estimators.
//!
//! [`sampen_graph`] embeds every node of a graph signal as a vector of
//! walk-weighted neighbourhood means at hops `0, lag, 2*lag, ...`, then
//! applies the usual sample-entropy functional: the fraction of template
//! pairs within a Chebyshev tolerance at dimension `m` (`B`) and `m + 1`
//! (`A`), and `-ln(A / B)`. [`sampen_classic`] is the sliding-window
//! estimator for ordinary time series.

mod matching;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::graph::{eligible_nodes, walk_profiles_with, Graph, GraphSignal, WalkProfile};

use matching::{count_matches, MatchCounts};

/// Which template sets the two correlation sums are taken over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CountingMode {
    /// `B` over every node with a defined `m`-pattern, `A` over every node
    /// with a defined `(m+1)`-pattern. The two sets can differ, so `A > B`
    /// (a negative value) is possible.
    #[default]
    Literal,
    /// Both sums over the nodes with a defined `(m+1)`-pattern, so each
    /// counted `m`-match has an extension and `A <= B`.
    StrictConditional,
}

impl FromStr for CountingMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "literal" => Ok(CountingMode::Literal),
            "strict" | "strict_conditional" => Ok(CountingMode::StrictConditional),
            _ => Err(Error::InvalidParameter(format!("unknown counting mode '{s}'"))),
        }
    }
}

impl fmt::Display for CountingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CountingMode::Literal => "literal",
            CountingMode::StrictConditional => "strict",
        })
    }
}

/// Divisor used for the standard deviation behind the tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SdConvention {
    /// Divide by `N`.
    #[default]
    Population,
    /// Divide by `N - 1`.
    Sample,
}

impl FromStr for SdConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "population" => Ok(SdConvention::Population),
            "sample" => Ok(SdConvention::Sample),
            _ => Err(Error::InvalidParameter(format!("unknown SD convention '{s}'"))),
        }
    }
}

impl fmt::Display for SdConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SdConvention::Population => "population",
            SdConvention::Sample => "sample",
        })
    }
}

/// Estimator tunables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampEnParams {
    /// Embedding dimension.
    pub m: usize,
    /// Tolerance as a multiple of the signal's standard deviation.
    pub r: f64,
    /// Hop step between consecutive pattern components.
    pub lag: usize,
    pub mode: CountingMode,
    pub sd: SdConvention,
}

impl Default for SampEnParams {
    fn default() -> Self {
        SampEnParams {
            m: 2,
            r: 0.2,
            lag: 1,
            mode: CountingMode::Literal,
            sd: SdConvention::Population,
        }
    }
}

impl SampEnParams {
    pub fn new(m: usize, r: f64) -> Self {
        SampEnParams { m, r, ..Default::default() }
    }

    pub fn with_mode(self, mode: CountingMode) -> Self {
        SampEnParams { mode, ..self }
    }

    pub fn with_lag(self, lag: usize) -> Self {
        SampEnParams { lag, ..self }
    }

    pub fn with_sd(self, sd: SdConvention) -> Self {
        SampEnParams { sd, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 1 {
            return Err(Error::InvalidParameter("m must be at least 1".into()));
        }
        if !(self.r > 0.0 && self.r.is_finite()) {
            return Err(Error::InvalidParameter(format!("r must be positive, got {}", self.r)));
        }
        if self.lag < 1 {
            return Err(Error::InvalidParameter("lag must be at least 1".into()));
        }
        Ok(())
    }
}

/// Eligible nodes and their patterns, one row per node.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSet {
    node_ids: Vec<usize>,
    dim: usize,
    data: Vec<f64>,
}

impl EmbeddingSet {
    /// Builds a set from explicit rows; nodes are numbered by row.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: bad.len() });
        }
        Ok(EmbeddingSet {
            node_ids: (0..rows.len()).collect(),
            dim,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn node_ids(&self) -> &[usize] {
        &self.node_ids
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.node_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.node_ids.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim.max(1))
    }

    fn counts(&self, dim: usize, epsilon: f64, exec: Execution) -> MatchCounts {
        count_matches(&self.data, self.dim, dim, self.len(), epsilon, exec)
    }
}

/// Raw correlation sums behind an entropy value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationSums {
    /// Mean fraction of matching `(m+1)`-template pairs.
    pub a: f64,
    /// Mean fraction of matching `m`-template pairs.
    pub b: f64,
    pub n_templates_m: usize,
    pub n_templates_m1: usize,
    pub epsilon: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampEnResult {
    /// `-ln(A / B)`.
    pub value: f64,
    pub a: f64,
    pub b: f64,
    pub n_templates_m: usize,
    pub n_templates_m1: usize,
    pub epsilon: f64,
}

impl SampEnResult {
    pub fn sums(&self) -> CorrelationSums {
        CorrelationSums {
            a: self.a,
            b: self.b,
            n_templates_m: self.n_templates_m,
            n_templates_m1: self.n_templates_m1,
            epsilon: self.epsilon,
        }
    }

    /// Turns sums into a result, or the error naming why the ratio is undefined.
    pub fn from_sums(sums: CorrelationSums) -> Result<Self> {
        if sums.b == 0.0 {
            return Err(Error::NoMatches(sums));
        }
        if sums.a == 0.0 {
            return Err(Error::NoExtendedMatches(sums));
        }
        Ok(SampEnResult {
            value: 0.0 - (sums.a / sums.b).ln(),
            a: sums.a,
            b: sums.b,
            n_templates_m: sums.n_templates_m,
            n_templates_m1: sums.n_templates_m1,
            epsilon: sums.epsilon,
        })
    }
}

/// `r` times the standard deviation of `values`.
pub fn tolerance(values: &[f64], r: f64, sd: SdConvention) -> f64 {
    // Welford
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for (k, &x) in values.iter().enumerate() {
        let delta = x - mean;
        mean += delta / (k + 1) as f64;
        m2 += delta * (x - mean);
    }
    let n = values.len();
    let denom = match sd {
        SdConvention::Population => n,
        SdConvention::Sample => n.saturating_sub(1),
    };
    if denom == 0 {
        return 0.0;
    }
    r * (m2.max(0.0) / denom as f64).sqrt()
}

/// Largest absolute component difference.
pub fn chebyshev(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

/// Per-template match fractions and their mean.
pub fn correlation_mean(patterns: &EmbeddingSet, epsilon: f64) -> Result<(Vec<f64>, f64)> {
    if patterns.len() < 2 {
        return Err(Error::InsufficientPatterns { found: patterns.len() });
    }
    let counts = patterns.counts(patterns.dim(), epsilon, Execution::default());
    let denom = (counts.templates() - 1) as f64;
    let per_template = counts.per_template.iter().map(|&c| c as f64 / denom).collect();
    Ok((per_template, counts.mean()))
}

fn embed(signal: &GraphSignal, profiles: &[WalkProfile], nodes: Vec<usize>, dim: usize, lag: usize) -> EmbeddingSet {
    let x = signal.values();
    let mut data = Vec::with_capacity(nodes.len() * dim);
    for &i in &nodes {
        data.push(x[i]);
        for k in 1..dim {
            let p = &profiles[k * lag - 1];
            data.push(p.weighted_sums[i] / p.degrees[i]);
        }
    }
    EmbeddingSet { node_ids: nodes, dim, data }
}

/// Patterns of dimension `m` for every node where they are defined.
pub fn graph_embedding(graph: &Graph, signal: &GraphSignal, m: usize, lag: usize) -> Result<EmbeddingSet> {
    signal.check_len(graph)?;
    if m < 1 || lag < 1 {
        return Err(Error::InvalidParameter("m and lag must be at least 1".into()));
    }
    if m == 1 {
        return Ok(EmbeddingSet {
            node_ids: (0..graph.n()).collect(),
            dim: 1,
            data: signal.values().to_vec(),
        });
    }
    let profiles = walk_profiles_with(graph, signal, (m - 1) * lag, Execution::default())?;
    let nodes = eligible_nodes(&profiles, m, lag)?;
    if nodes.is_empty() {
        return Err(Error::InsufficientPatterns { found: 0 });
    }
    Ok(embed(signal, &profiles, nodes, m, lag))
}

/// Sample entropy of a graph signal.
pub fn sampen_graph(graph: &Graph, signal: &GraphSignal, params: &SampEnParams) -> Result<SampEnResult> {
    sampen_graph_with(graph, signal, params, Execution::default())
}

pub fn sampen_graph_with(
    graph: &Graph,
    signal: &GraphSignal,
    params: &SampEnParams,
    exec: Execution,
) -> Result<SampEnResult> {
    params.validate()?;
    signal.check_len(graph)?;
    let SampEnParams { m, r, lag, mode, sd } = *params;
    let epsilon = tolerance(signal.values(), r, sd);

    let profiles = walk_profiles_with(graph, signal, m * lag, exec)?;
    let nodes_m1 = eligible_nodes(&profiles, m + 1, lag)?;
    if nodes_m1.len() < 2 {
        return Err(Error::InsufficientPatterns { found: nodes_m1.len() });
    }
    let extended = embed(signal, &profiles, nodes_m1, m + 1, lag);

    let b_counts = match mode {
        CountingMode::Literal => {
            let nodes_m = eligible_nodes(&profiles, m, lag)?;
            embed(signal, &profiles, nodes_m, m, lag).counts(m, epsilon, exec)
        }
        CountingMode::StrictConditional => extended.counts(m, epsilon, exec),
    };
    let a_counts = extended.counts(m + 1, epsilon, exec);

    SampEnResult::from_sums(CorrelationSums {
        a: a_counts.mean(),
        b: b_counts.mean(),
        n_templates_m: b_counts.templates(),
        n_templates_m1: a_counts.templates(),
        epsilon,
    })
}

/// Classical sample entropy of a time series, with the `N - m` overlapping
/// templates shared by both dimensions.
pub fn sampen_classic(series: &[f64], m: usize, r: f64, sd: SdConvention) -> Result<SampEnResult> {
    sampen_classic_with(series, m, r, sd, Execution::default())
}

pub fn sampen_classic_with(
    series: &[f64],
    m: usize,
    r: f64,
    sd: SdConvention,
    exec: Execution,
) -> Result<SampEnResult> {
    SampEnParams { m, r, ..Default::default() }.validate()?;
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("series contains non-finite values".into()));
    }
    let templates = series.len().saturating_sub(m);
    if templates < 2 {
        return Err(Error::InsufficientPatterns { found: templates });
    }
    let epsilon = tolerance(series, r, sd);
    let b = count_matches(series, 1, m, templates, epsilon, exec);
    let a = count_matches(series, 1, m + 1, templates, epsilon, exec);
    SampEnResult::from_sums(CorrelationSums {
        a: a.mean(),
        b: b.mean(),
        n_templates_m: templates,
        n_templates_m1: templates,
        epsilon,
    })
}
