//! Aggregations over collections of signals on one fixed graph, as used for
//! sensor-network recordings: every snapshot is an independent repetition.

use crate::entropy::{sampen_graph_with, SampEnParams};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::graph::{Graph, GraphSignal};

use super::SweepRow;

fn outcome(graph: &Graph, signal: &GraphSignal, params: &SampEnParams, exec: Execution) -> Result<(Option<f64>, f64)> {
    let start = std::time::Instant::now();
    let res = sampen_graph_with(graph, signal, params, exec);
    let ms = start.elapsed().as_secs_f64() * 1e3;
    match res {
        Ok(r) => Ok((Some(r.value), ms)),
        Err(e) if e.is_undefined_entropy() => Ok((None, ms)),
        Err(e) => Err(e),
    }
}

/// Entropy statistics across `snapshots` for each tolerance in `r_values`.
pub fn ensemble_r_sweep(
    graph: &Graph,
    snapshots: &[GraphSignal],
    r_values: &[f64],
    params: &SampEnParams,
    exec: Execution,
) -> Result<Vec<SweepRow>> {
    if snapshots.is_empty() || r_values.is_empty() {
        return Err(Error::InvalidParameter("need at least one snapshot and one r".into()));
    }
    r_values
        .iter()
        .map(|&r| {
            let p = SampEnParams { r, ..*params };
            let outcomes = exec::map_indexed(exec, snapshots.len(), |k| outcome(graph, &snapshots[k], &p, exec))
                .into_iter()
                .collect::<Result<Vec<_>>>()?;
            Ok(SweepRow::from_outcomes(vec![("r".to_string(), r)], &outcomes))
        })
        .collect()
}

/// Entropy statistics at each time index across several recordings (for
/// example one per day). `recordings[d][t]` is the signal of recording `d`
/// at time index `t`; all recordings must have the same length.
pub fn snapshot_profile(
    graph: &Graph,
    recordings: &[Vec<GraphSignal>],
    params: &SampEnParams,
    exec: Execution,
) -> Result<Vec<SweepRow>> {
    let len = recordings
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::InvalidParameter("no recordings".into()))?;
    if let Some(bad) = recordings.iter().find(|r| r.len() != len) {
        return Err(Error::DimensionMismatch { expected: len, got: bad.len() });
    }
    (0..len)
        .map(|t| {
            let outcomes = exec::map_indexed(exec, recordings.len(), |d| outcome(graph, &recordings[d][t], params, exec))
                .into_iter()
                .collect::<Result<Vec<_>>>()?;
            Ok(SweepRow::from_outcomes(vec![("t".to_string(), t as f64)], &outcomes))
        })
        .collect()
}
