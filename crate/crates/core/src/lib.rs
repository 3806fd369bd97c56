//! Sample entropy for signals on graphs.
//!
//! Each node of a graph signal is embedded as the vector of its own value
//! and the walk-weighted means of the signal at increasing hop distances.
//! Sample entropy is then the negative log of the conditional probability
//! that two embeddings matching at dimension `m` still match at `m + 1`.
//! On a directed path this reduces to classical sample entropy of a time
//! series; on pixel grids it plays the role of two-dimensional sample
//! entropy for images.
//!
//! ```
//! use graph_sampen::{build_path, sampen_graph, GraphSignal, SampEnParams};
//!
//! let series: Vec<f64> = (0..200).map(|i| ((i * 7919) % 101) as f64).collect();
//! let graph = build_path(series.len(), true).unwrap();
//! let signal = GraphSignal::new(series).unwrap();
//! let res = sampen_graph(&graph, &signal, &SampEnParams::new(2, 0.2)).unwrap();
//! assert!(res.value.is_finite());
//! ```

pub mod entropy;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod generators;
pub mod graph;
pub mod ingestion;
pub mod oracle;

pub use entropy::{
    chebyshev, correlation_mean, graph_embedding, sampen_classic, sampen_classic_with, sampen_graph,
    sampen_graph_with, tolerance, CorrelationSums, CountingMode, EmbeddingSet, SampEnParams, SampEnResult,
    SdConvention,
};
pub use error::{Error, Result};
pub use exec::Execution;
pub use generators::{Image, Seed};
pub use graph::{
    build_grid8, build_lane_topology, build_path, eligible_nodes, permute, walk_profiles, walk_profiles_with,
    Graph, GraphSignal, GridOrientation, WalkProfile,
};
pub use oracle::sampen_oracle;
