//! Density-based clustering on box graphs.
//!
//! * [`dbscan`]: exact DBSCAN and DBSCAN* through a decomposition of the
//!   input into boxes of diameter at most ε, with the instrumented textbook
//!   algorithm and a quadratic reference next to it.
//! * [`hdbscan`]: the exact planar HDBSCAN hierarchy from a minimum spanning
//!   tree over higher-order Delaunay edges.
//! * [`approx`]: δ-approximate DBSCAN* in any dimension and a δ-approximate
//!   planar hierarchy from a cone-based candidate graph.
//! * [`bench`]: synthetic data and the measurement sweeps.
//!
//! Everything is generic over the coordinate type ([`Scalar`], `f32` or
//! `f64`); the aliases at the crate root fix it to one of them.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod approx;
pub mod bench;
pub mod boxgraph;
pub mod dbscan;
mod error;
pub mod geometry;
pub mod hdbscan;
mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use approx::{approx_dbscan_star, approx_dbscan_star_with, approx_hdbscan, theta_edge_set, ApproxParams};
pub use boxgraph::{build_grid, build_strips, BoxGraph, BoxMode, PointBox};
pub use dbscan::{
    dbscan, dbscan_oracle, is_refinement, original_dbscan, Label, Labeling, Meter, PairCheck, Params, Variant,
};
pub use geometry::{Edge, PointSet, WeightedEdgeList};
pub use hdbscan::{core_distances, extract_at, hdbscan, hdbscan_oracle, kod_edges, mst, CoreDistances, Dendrogram};

pub type PointSet64 = PointSet<f64>;
pub type PointSet32 = PointSet<f32>;
pub type Params64 = Params<f64>;
pub type Params32 = Params<f32>;
pub type Dendrogram64 = Dendrogram<f64>;
pub type Dendrogram32 = Dendrogram<f32>;
pub type BoxGraph64 = BoxGraph<f64>;
pub type BoxGraph32 = BoxGraph<f32>;
