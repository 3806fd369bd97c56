//! Graph representation, the regular topologies used throughout the crate,
//! and the walk-propagation kernels that every entropy computation rests on.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exec::{self, Execution};

/// A sparse graph with positive edge weights, stored as compressed rows.
///
/// Undirected graphs store both arcs of every edge with identical weight, so
/// row `i` always lists the out-neighbours of `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    directed: bool,
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<f64>,
}

impl Graph {
    /// Builds a graph from `(src, dst, weight)` triples.
    ///
    /// For undirected graphs each pair may be given once in either
    /// orientation, or in both orientations with the same weight. Repeating a
    /// directed arc, or giving an undirected pair two different weights, is
    /// an error.
    pub fn from_edges<I>(n: usize, directed: bool, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        if n == 0 {
            return Err(Error::InvalidSize("graph needs at least one node".into()));
        }
        let mut rows: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
        for (src, dst, w) in edges {
            if src >= n || dst >= n {
                return Err(Error::InvalidEdge(format!(
                    "({src}, {dst}) out of range for {n} nodes"
                )));
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidEdge(format!(
                    "({src}, {dst}) has non-positive or non-finite weight {w}"
                )));
            }
            if directed {
                if rows[src].insert(dst, w).is_some() {
                    return Err(Error::InvalidEdge(format!("duplicate arc ({src}, {dst})")));
                }
                continue;
            }
            match rows[src].get(&dst) {
                Some(&prev) if prev == w => {}
                Some(&prev) => {
                    return Err(Error::InvalidEdge(format!(
                        "undirected edge ({src}, {dst}) given weights {prev} and {w}"
                    )))
                }
                None => {
                    rows[src].insert(dst, w);
                    rows[dst].insert(src, w);
                }
            }
        }
        Ok(Self::from_rows(n, directed, rows))
    }

    fn from_rows(n: usize, directed: bool, rows: Vec<BTreeMap<usize, f64>>) -> Self {
        let nnz = rows.iter().map(BTreeMap::len).sum();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::with_capacity(nnz);
        let mut weights = Vec::with_capacity(nnz);
        offsets.push(0);
        for row in rows {
            for (j, w) in row {
                targets.push(j);
                weights.push(w);
            }
            offsets.push(targets.len());
        }
        Graph { n, directed, offsets, targets, weights }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// Number of stored arcs (both orientations counted for undirected graphs).
    pub fn arc_count(&self) -> usize {
        self.targets.len()
    }

    /// Number of edges: arcs for directed graphs, unordered pairs otherwise.
    pub fn edge_count(&self) -> usize {
        if self.directed {
            self.arc_count()
        } else {
            let loops = (0..self.n).filter(|&i| self.has_edge(i, i)).count();
            (self.arc_count() - loops) / 2 + loops
        }
    }

    pub fn is_weighted(&self) -> bool {
        self.weights.iter().any(|&w| w != 1.0)
    }

    /// Out-neighbours of `i` with their weights, in increasing node order.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.offsets[i]..self.offsets[i + 1];
        self.targets[span.clone()]
            .iter()
            .copied()
            .zip(self.weights[span].iter().copied())
    }

    pub fn out_degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    /// Sum of outgoing weights of `i`.
    pub fn weighted_degree(&self, i: usize) -> f64 {
        self.weights[self.offsets[i]..self.offsets[i + 1]].iter().sum()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.targets[self.offsets[i]..self.offsets[i + 1]]
            .binary_search(&j)
            .is_ok()
    }

    pub fn weight(&self, i: usize, j: usize) -> Option<f64> {
        let span = self.offsets[i]..self.offsets[i + 1];
        self.targets[span.clone()]
            .binary_search(&j)
            .ok()
            .map(|k| self.weights[span.start + k])
    }

    /// Edge list; undirected graphs report each pair once with `src <= dst`.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        (0..self.n)
            .flat_map(|i| self.neighbors(i).map(move |(j, w)| (i, j, w)))
            .filter(|&(i, j, _)| self.directed || i <= j)
            .collect()
    }

    /// `out = A · x`, row by row.
    pub fn mul_vec(&self, x: &[f64], out: &mut [f64], exec: Execution) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(out.len(), self.n);
        exec::fill_indexed(exec, out, |i| {
            let span = self.offsets[i]..self.offsets[i + 1];
            self.targets[span.clone()]
                .iter()
                .zip(&self.weights[span])
                .map(|(&j, &w)| w * x[j])
                .sum()
        });
    }

    /// Dense adjacency matrix, row-major. Intended for small graphs.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut a = vec![vec![0.0; self.n]; self.n];
        for (i, row) in a.iter_mut().enumerate() {
            for (j, w) in self.neighbors(i) {
                row[j] = w;
            }
        }
        a
    }
}

/// One real value per node.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSignal(Vec<f64>);

impl GraphSignal {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "signal value at node {i} is not finite"
            )));
        }
        Ok(GraphSignal(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Applies `a * x + b` to every value.
    pub fn affine(&self, a: f64, b: f64) -> Result<Self> {
        GraphSignal::new(self.0.iter().map(|&x| a * x + b).collect())
    }

    pub(crate) fn check_len(&self, graph: &Graph) -> Result<()> {
        if self.len() != graph.n() {
            return Err(Error::DimensionMismatch { expected: graph.n(), got: self.len() });
        }
        Ok(())
    }
}

/// Walk-weighted sums and walk counts at one hop distance.
///
/// `weighted_sums[i]` is `(A^L x)_i` and `degrees[i]` is `(A^L 1)_i`, both
/// multiplied by `2^-log2_scale`. The scale is shared, so the walk-weighted
/// mean `weighted_sums[i] / degrees[i]` is exact.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkProfile {
    pub hop: usize,
    pub weighted_sums: Vec<f64>,
    pub degrees: Vec<f64>,
    pub log2_scale: i32,
}

impl WalkProfile {
    /// Walk-weighted mean at node `i`, or `None` when no walk of this length
    /// leaves `i`.
    pub fn mean(&self, i: usize) -> Option<f64> {
        let d = self.degrees[i];
        (d > 0.0).then(|| self.weighted_sums[i] / d)
    }
}

const RESCALE_HIGH: f64 = 1e150;
const RESCALE_LOW: f64 = 1e-150;

/// Power-of-two exponent that brings `max` back near 1, if it drifted out of
/// `[RESCALE_LOW, RESCALE_HIGH]`.
fn rescale_exponent(max: f64) -> i32 {
    if max > RESCALE_HIGH || (max > 0.0 && max < RESCALE_LOW) {
        max.log2().floor() as i32
    } else {
        0
    }
}

/// Propagates the signal and the all-ones vector along walks of length
/// `1..=max_hop` by repeated sparse mat-vec.
pub fn walk_profiles(graph: &Graph, signal: &GraphSignal, max_hop: usize) -> Result<Vec<WalkProfile>> {
    walk_profiles_with(graph, signal, max_hop, Execution::default())
}

pub fn walk_profiles_with(
    graph: &Graph,
    signal: &GraphSignal,
    max_hop: usize,
    exec: Execution,
) -> Result<Vec<WalkProfile>> {
    signal.check_len(graph)?;
    if max_hop == 0 {
        return Err(Error::InvalidParameter("max_hop must be at least 1".into()));
    }
    let n = graph.n();
    let mut u = signal.values().to_vec();
    let mut d = vec![1.0; n];
    let mut log2_scale = 0i32;
    let mut profiles = Vec::with_capacity(max_hop);
    for hop in 1..=max_hop {
        let mut u_next = vec![0.0; n];
        let mut d_next = vec![0.0; n];
        graph.mul_vec(&u, &mut u_next, exec);
        graph.mul_vec(&d, &mut d_next, exec);
        let shift = rescale_exponent(d_next.iter().copied().fold(0.0, f64::max));
        if shift != 0 {
            let factor = 2f64.powi(-shift);
            u_next.iter_mut().for_each(|v| *v *= factor);
            d_next.iter_mut().for_each(|v| *v *= factor);
            log2_scale += shift;
        }
        profiles.push(WalkProfile {
            hop,
            weighted_sums: u_next.clone(),
            degrees: d_next.clone(),
            log2_scale,
        });
        u = u_next;
        d = d_next;
    }
    Ok(profiles)
}

/// Nodes whose walk count is positive at every hop `k * lag`, `k = 1..m-1`,
/// i.e. the nodes for which an `m`-component pattern is defined.
///
/// `profiles[h - 1]` must hold hop `h`.
pub fn eligible_nodes(profiles: &[WalkProfile], m: usize, lag: usize) -> Result<Vec<usize>> {
    let first = profiles
        .first()
        .ok_or(Error::DimensionMismatch { expected: 1, got: 0 })?;
    let n = first.degrees.len();
    if m == 0 || lag == 0 {
        return Err(Error::InvalidParameter("m and lag must be at least 1".into()));
    }
    let needed = (m - 1) * lag;
    if profiles.len() < needed {
        return Err(Error::DimensionMismatch { expected: needed, got: profiles.len() });
    }
    let hops: Vec<&WalkProfile> = (1..m).map(|k| &profiles[k * lag - 1]).collect();
    Ok((0..n)
        .filter(|&i| hops.iter().all(|p| p.degrees[i] > 0.0))
        .collect())
}

/// Relabels node `i` as `perm[i]` in both the graph and the signal.
pub fn permute(graph: &Graph, signal: &GraphSignal, perm: &[usize]) -> Result<(Graph, GraphSignal)> {
    signal.check_len(graph)?;
    let n = graph.n();
    if perm.len() != n {
        return Err(Error::InvalidPermutation(format!(
            "length {} for {n} nodes",
            perm.len()
        )));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidPermutation(format!("{p} is out of range or repeated")));
        }
    }
    let mut rows: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
    for i in 0..n {
        for (j, w) in graph.neighbors(i) {
            rows[perm[i]].insert(perm[j], w);
        }
    }
    let mut values = vec![0.0; n];
    for (i, &v) in signal.values().iter().enumerate() {
        values[perm[i]] = v;
    }
    Ok((Graph::from_rows(n, graph.is_directed(), rows), GraphSignal(values)))
}

/// Path on `n` nodes: `i -> i+1`, or `i -- i+1` when undirected.
pub fn build_path(n: usize, directed: bool) -> Result<Graph> {
    if n < 2 {
        return Err(Error::InvalidSize(format!("path needs at least 2 nodes, got {n}")));
    }
    Graph::from_edges(n, directed, (0..n - 1).map(|i| (i, i + 1, 1.0)))
}

/// Edge orientation of the 8-neighbour pixel grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GridOrientation {
    /// Each pixel points to the Moore neighbours that follow it in row-major order.
    #[default]
    Forward,
    /// Every Moore neighbour pair is linked both ways.
    Symmetric,
}

/// 8-neighbour grid over `rows x cols` pixels, nodes in row-major order.
pub fn build_grid8(rows: usize, cols: usize, orientation: GridOrientation) -> Result<Graph> {
    if rows < 2 || cols < 2 {
        return Err(Error::InvalidSize(format!(
            "grid needs at least 2x2 pixels, got {rows}x{cols}"
        )));
    }
    let mut edges = Vec::with_capacity(rows * cols * 8);
    for r in 0..rows {
        for c in 0..cols {
            for dr in -1i64..=1 {
                for dc in -1i64..=1 {
                    if dr == 0 && dc == 0 {
                        continue;
                    }
                    let (r2, c2) = (r as i64 + dr, c as i64 + dc);
                    if r2 < 0 || c2 < 0 || r2 >= rows as i64 || c2 >= cols as i64 {
                        continue;
                    }
                    let forward = (r2, c2) > (r as i64, c as i64);
                    if orientation == GridOrientation::Forward && !forward {
                        continue;
                    }
                    edges.push((r * cols + c, r2 as usize * cols + c2 as usize, 1.0));
                }
            }
        }
    }
    Graph::from_edges(rows * cols, true, edges).map(|g| match orientation {
        GridOrientation::Symmetric => Graph { directed: false, ..g },
        GridOrientation::Forward => g,
    })
}

/// Multi-lane sensor topology: node `lane * markers + k` is the sensor at
/// marker `k` of `lane`.
///
/// Adjacent markers in a lane are linked both ways in either mode. Every
/// sensor of lane `l` links to every sensor of lane `l + 1`, one-way when
/// `directed`, both ways otherwise.
pub fn build_lane_topology(lanes: usize, markers: usize, directed: bool) -> Result<Graph> {
    if lanes < 1 || markers < 2 {
        return Err(Error::InvalidSize(format!(
            "lane topology needs >= 1 lane and >= 2 markers, got {lanes} x {markers}"
        )));
    }
    let id = |lane: usize, k: usize| lane * markers + k;
    let mut edges = Vec::new();
    for lane in 0..lanes {
        for k in 0..markers - 1 {
            edges.push((id(lane, k), id(lane, k + 1), 1.0));
            edges.push((id(lane, k + 1), id(lane, k), 1.0));
        }
    }
    for lane in 0..lanes.saturating_sub(1) {
        for a in 0..markers {
            for b in 0..markers {
                edges.push((id(lane, a), id(lane + 1, b), 1.0));
                if !directed {
                    edges.push((id(lane + 1, b), id(lane, a), 1.0));
                }
            }
        }
    }
    Graph::from_edges(lanes * markers, true, edges).map(|g| Graph { directed, ..g })
}
