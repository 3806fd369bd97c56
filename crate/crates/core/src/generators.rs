//! Seeded generators for the synthetic signals and random graph families.
//!
//! All randomness comes from [`Seed`], which hands out ChaCha8 streams. A
//! generator is a pure function of its parameters and seed.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphSignal};

/// Root of a reproducible random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Seed(pub u64);

/// SplitMix64 finaliser.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl Seed {
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// Child seed for a labelled sub-stream.
    pub fn derive(self, label: u64) -> Seed {
        Seed(mix64(self.0 ^ mix64(label)))
    }

    /// Seed of repetition `rep` in row `row` of a sweep.
    pub fn for_rep(self, row: u64, rep: u64) -> Seed {
        self.derive(row).derive(rep)
    }
}

/// A row-major grey-level image.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    rows: usize,
    cols: usize,
    pixels: Vec<f64>,
}

impl Image {
    pub fn new(rows: usize, cols: usize, pixels: Vec<f64>) -> Result<Self> {
        if rows * cols != pixels.len() {
            return Err(Error::DimensionMismatch { expected: rows * cols, got: pixels.len() });
        }
        if pixels.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidParameter("image has non-finite pixels".into()));
        }
        Ok(Image { rows, cols, pixels })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.pixels[r * self.cols + c]
    }
}

/// Iterates `x <- rho x (1 - x)` from `x0`, drops `burn_in` values and
/// returns the next `n` (the first returned value is `x0` when `burn_in = 0`).
pub fn logistic_map(rho: f64, x0: f64, n: usize, burn_in: usize) -> Result<Vec<f64>> {
    if !(rho > 0.0 && rho <= 4.0) {
        return Err(Error::InvalidParameter(format!("rho must lie in (0, 4], got {rho}")));
    }
    if !(x0 > 0.0 && x0 < 1.0) {
        return Err(Error::InvalidParameter(format!("x0 must lie in (0, 1), got {x0}")));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let mut x = x0;
    let mut out = Vec::with_capacity(n);
    for t in 0..burn_in + n {
        if t >= burn_in {
            out.push(x);
        }
        x = rho * x * (1.0 - x);
    }
    Ok(out)
}

/// Uniform draw from the open interval (0, 1), for logistic initial conditions.
pub fn open_unit(seed: Seed) -> f64 {
    let mut rng = seed.rng();
    loop {
        let v: f64 = rng.random();
        if v > 0.0 {
            return v;
        }
    }
}

pub const MIX2D_PERIOD: f64 = 12.0;

/// Doubly periodic sine field whose pixels are independently replaced by
/// Uniform(-sqrt 3, sqrt 3) noise with probability `p`.
pub fn mix2d(rows: usize, cols: usize, p: f64, seed: Seed) -> Result<Image> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("p must lie in [0, 1], got {p}")));
    }
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidSize("image must be non-empty".into()));
    }
    let mut rng = seed.rng();
    let half_width = 3f64.sqrt();
    let noise = Uniform::new(-half_width, half_width).expect("non-empty range");
    let mut pixels = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            let replace = rng.random_bool(p);
            let y = noise.sample(&mut rng);
            pixels.push(if replace {
                y
            } else {
                (2.0 * PI * i as f64 / MIX2D_PERIOD).sin() + (2.0 * PI * j as f64 / MIX2D_PERIOD).sin()
            });
        }
    }
    Image::new(rows, cols, pixels)
}

/// Edge probability giving mean out-degree `k` on `n` nodes.
pub fn er_p_for_degree(k: f64, n: usize) -> Result<f64> {
    if n < 2 || k.is_nan() || k < 0.0 || k >= n as f64 {
        return Err(Error::InvalidParameter(format!(
            "target degree {k} must lie in [0, {n})"
        )));
    }
    Ok(k / (n - 1) as f64)
}

/// Erdős–Rényi graph: every ordered pair (directed) or unordered pair
/// (undirected) gets an edge independently with probability `p`.
pub fn er_graph(n: usize, p: f64, directed: bool, seed: Seed) -> Result<Graph> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("ER graph needs n >= 2, got {n}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("p must lie in [0, 1], got {p}")));
    }
    let mut rng = seed.rng();
    let mut edges = Vec::new();
    for i in 0..n {
        let js = if directed { 0..n } else { i + 1..n };
        for j in js {
            if i != j && rng.random_bool(p) {
                edges.push((i, j, 1.0));
            }
        }
    }
    Graph::from_edges(n, directed, edges)
}

/// Watts–Strogatz small world: a ring where every node links to `k`
/// neighbours on each side, then each lattice edge `(i, i+j)` has its far
/// end moved, with probability `beta`, to a uniformly drawn node that is
/// neither `i` nor already adjacent to `i`.
pub fn ws_graph(n: usize, k: usize, beta: f64, seed: Seed) -> Result<Graph> {
    if k < 1 || n <= 2 * k {
        return Err(Error::InvalidParameter(format!(
            "WS graph needs n > 2k >= 2, got n = {n}, k = {k}"
        )));
    }
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::InvalidParameter(format!("beta must lie in [0, 1], got {beta}")));
    }
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for i in 0..n {
        for j in 1..=k {
            let t = (i + j) % n;
            adj[i].insert(t);
            adj[t].insert(i);
        }
    }
    let mut rng = seed.rng();
    for j in 1..=k {
        for i in 0..n {
            let t = (i + j) % n;
            if !rng.random_bool(beta) || !adj[i].contains(&t) {
                continue;
            }
            if adj[i].len() >= n - 1 {
                continue;
            }
            let new_t = loop {
                let c = rng.random_range(0..n);
                if c != i && !adj[i].contains(&c) {
                    break c;
                }
            };
            adj[i].remove(&t);
            adj[t].remove(&i);
            adj[i].insert(new_t);
            adj[new_t].insert(i);
        }
    }
    let edges = adj
        .iter()
        .enumerate()
        .flat_map(|(i, s)| s.iter().filter(move |&&t| i < t).map(move |&t| (i, t, 1.0)));
    Graph::from_edges(n, false, edges)
}

/// Heat-kernel smoothed white Gaussian noise: a standard normal draw per
/// node, then `iters` explicit steps of `x <- x - (tau0/iters) L_norm x`
/// with `L_norm = I - D^-1/2 A D^-1/2`.
pub fn smooth_wgn(graph: &Graph, tau0: f64, iters: usize, seed: Seed) -> Result<GraphSignal> {
    if graph.is_directed() {
        return Err(Error::InvalidParameter("smoothing needs an undirected graph".into()));
    }
    if iters == 0 {
        return Err(Error::InvalidParameter("iters must be at least 1".into()));
    }
    let mut rng = seed.rng();
    let x0: Vec<f64> = (0..graph.n()).map(|_| rng.sample(StandardNormal)).collect();
    heat_smooth(graph, x0, tau0, iters)
}

/// The diffusion part of [`smooth_wgn`], applied to a given vector.
pub fn heat_smooth(graph: &Graph, mut x: Vec<f64>, tau0: f64, iters: usize) -> Result<GraphSignal> {
    let n = graph.n();
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x.len() });
    }
    let inv_sqrt_deg = (0..n)
        .map(|i| {
            let d = graph.weighted_degree(i);
            if d > 0.0 {
                Ok(1.0 / d.sqrt())
            } else {
                Err(Error::DegenerateDegree { node: i })
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    let alpha = tau0 / iters as f64;
    for _ in 0..iters {
        let next: Vec<f64> = (0..n)
            .map(|i| {
                let smoothed: f64 = graph
                    .neighbors(i)
                    .map(|(j, w)| inv_sqrt_deg[i] * w * inv_sqrt_deg[j] * x[j])
                    .sum();
                x[i] - alpha * (x[i] - smoothed)
            })
            .collect();
        x = next;
    }
    GraphSignal::new(x)
}

/// Four contiguous blocks (three of length `n / 4`, the last taking the
/// remainder) valued +1, -1, +1, -1, plus N(0, sigma^2) noise.
pub fn piecewise_signal(n: usize, sigma: f64, seed: Seed) -> Result<GraphSignal> {
    if n < 8 {
        return Err(Error::InvalidParameter(format!("piecewise signal needs n >= 8, got {n}")));
    }
    if sigma.is_nan() || sigma < 0.0 {
        return Err(Error::InvalidParameter(format!("sigma must be non-negative, got {sigma}")));
    }
    let block = n / 4;
    let mut rng = seed.rng();
    let values = (0..n)
        .map(|i| {
            let segment = (i / block).min(3);
            let level = if segment.is_multiple_of(2) { 1.0 } else { -1.0 };
            let z: f64 = rng.sample(StandardNormal);
            level + sigma * z
        })
        .collect();
    GraphSignal::new(values)
}

/// I.i.d. Uniform(lo, hi) node values.
pub fn uniform_signal(n: usize, lo: f64, hi: f64, seed: Seed) -> Result<GraphSignal> {
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(Error::InvalidParameter(format!("need lo < hi, got [{lo}, {hi}]")));
    }
    let dist = Uniform::new_inclusive(lo, hi)
        .map_err(|e| Error::InvalidParameter(format!("uniform range: {e}")))?;
    let mut rng = seed.rng();
    GraphSignal::new((0..n).map(|_| dist.sample(&mut rng)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::{sampen_classic, SdConvention};

    #[test]
    fn logistic_closed_form() {
        let s = logistic_map(4.0, 0.5, 4, 0).unwrap();
        assert_eq!(s, vec![0.5, 1.0, 0.0, 0.0]);
        let s = logistic_map(2.0, 0.3, 1, 200).unwrap();
        assert!((s[0] - 0.5).abs() < 1e-12);
        assert!(logistic_map(4.0, 1.0, 3, 0).is_err());
        assert!(logistic_map(4.5, 0.5, 3, 0).is_err());
    }

    #[test]
    fn logistic_period_two_has_near_zero_entropy() {
        let s = logistic_map(3.2, 0.3, 500, 500).unwrap();
        assert!((s[0] - s[2]).abs() < 1e-9);
        let v = sampen_classic(&s, 2, 0.2, SdConvention::Population).unwrap();
        assert!(v.value.abs() < 1e-12);
    }

    #[test]
    fn mix2d_extremes() {
        let img = mix2d(24, 36, 0.0, Seed(1)).unwrap();
        for i in 0..12 {
            for j in 0..24 {
                assert!((img.get(i, j) - img.get(i + 12, j)).abs() < 1e-12);
                assert!((img.get(i, j) - img.get(i, j + 12)).abs() < 1e-12);
            }
        }
        let img = mix2d(200, 200, 1.0, Seed(2)).unwrap();
        let n = img.pixels().len() as f64;
        let mean = img.pixels().iter().sum::<f64>() / n;
        let var = img.pixels().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        assert!(mean.abs() < 0.03, "mean {mean}");
        assert!((var - 1.0).abs() < 0.03, "var {var}");
        assert!(img.pixels().iter().all(|v| v.abs() <= 3f64.sqrt()));
        assert!(mix2d(4, 4, 1.5, Seed(0)).is_err());
    }

    #[test]
    fn er_basics() {
        assert!((er_p_for_degree(3.0, 31).unwrap() - 0.1).abs() < 1e-15);
        assert!(er_p_for_degree(31.0, 31).is_err());
        let g = er_graph(4, 1.0, true, Seed(0)).unwrap();
        assert_eq!(g.edge_count(), 12);
        let g = er_graph(4, 1.0, false, Seed(0)).unwrap();
        assert_eq!(g.edge_count(), 6);
        assert_eq!(er_graph(50, 0.1, true, Seed(9)).unwrap(), er_graph(50, 0.1, true, Seed(9)).unwrap());
    }

    #[test]
    fn ws_basics() {
        let g = ws_graph(20, 2, 0.0, Seed(3)).unwrap();
        assert!((0..20).all(|i| g.out_degree(i) == 4));
        let g = ws_graph(100, 2, 1.0, Seed(3)).unwrap();
        assert_eq!(g.edge_count(), 200);
        assert!((0..100).any(|i| g.out_degree(i) != 4));
        assert!((0..100).all(|i| !g.has_edge(i, i)));
        assert!(ws_graph(4, 2, 0.5, Seed(0)).is_err());
    }

    #[test]
    fn smoothing_two_node_step() {
        let g = Graph::from_edges(2, false, [(0, 1, 1.0)]).unwrap();
        let y = heat_smooth(&g, vec![1.0, -1.0], 0.01, 1).unwrap();
        assert!((y.values()[0] - 0.98).abs() < 1e-15);
        assert!((y.values()[1] + 0.98).abs() < 1e-15);
    }

    #[test]
    fn smoothing_keeps_constants_on_regular_graphs() {
        let g = ws_graph(30, 2, 0.0, Seed(0)).unwrap();
        let y = heat_smooth(&g, vec![2.0; 30], 0.3, 30).unwrap();
        assert!(y.values().iter().all(|v| (v - 2.0).abs() < 1e-12));
        let iso = Graph::from_edges(3, false, [(0, 1, 1.0)]).unwrap();
        assert!(matches!(
            smooth_wgn(&iso, 0.3, 30, Seed(0)),
            Err(Error::DegenerateDegree { node: 2 })
        ));
    }

    #[test]
    fn piecewise_exact() {
        let s = piecewise_signal(8, 0.0, Seed(0)).unwrap();
        assert_eq!(s.values(), &[1.0, 1.0, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0]);
        let s = piecewise_signal(10, 0.0, Seed(0)).unwrap();
        assert_eq!(s.values(), &[1.0, 1.0, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0]);
    }

    #[test]
    fn uniform_support() {
        let s = uniform_signal(1000, 0.01, 0.10, Seed(5)).unwrap();
        assert!(s.values().iter().all(|v| (0.01..=0.10).contains(v)));
        assert!(uniform_signal(3, 1.0, 1.0, Seed(0)).is_err());
    }

    #[test]
    fn seeds_split() {
        let s = Seed(42);
        assert_ne!(s.for_rep(0, 1), s.for_rep(1, 0));
        assert_eq!(s.for_rep(3, 4), s.for_rep(3, 4));
    }
}
