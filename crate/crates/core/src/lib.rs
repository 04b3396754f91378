// Copyright 2026 The Shy Coupling Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

//! Brownian motions on metric graphs and in planar domains, explicit Markov
//! couplings between pairs of them, and the Monte Carlo diagnostics used to
//! decide whether a coupling keeps its particles apart ("shy") or not.
//!
//! The crate is `no_std` and only needs `alloc`. Every stepping routine is a
//! pure function of explicit state plus a caller-supplied RNG, so ensembles can
//! be fanned out over any work pool without perturbing results; see [`rng`]
//! for the stream-splitting rule.
//!
//! Layout:
//!
//! - [`metric_graph`]: graphs with edge lengths, geodesic distance, isometries
//!   and the named fixtures.
//! - [`graph_diffusion`]: Walsh Brownian motion on a graph, lattice skew
//!   Brownian motion, first-passage Monte Carlo.
//! - [`graph_couplings`]: coupled pairs on graphs (hybrid corridor coupling,
//!   isometry coupling, the seven-edge hand-built machine).
//! - [`convex_geometry`]: disc / ellipse / annulus descriptors with projection
//!   and inward normals.
//! - [`reflected_coupling`]: projected-Euler Skorokhod pairs and their drivers.
//! - [`analysis`]: analytic exit bounds, shyness statistics, quadratic
//!   variation diagnostics and backbone projections.

#![no_std]

extern crate alloc;

pub mod analysis;
pub mod convex_geometry;
pub mod graph_couplings;
pub mod graph_diffusion;
pub mod metric_graph;
pub mod reflected_coupling;
pub mod rng;

pub use convex_geometry::{BoundaryContact, ConvexDomain, GeometryError, Point2};
pub use metric_graph::{
    EdgeId, Fixture, FixtureName, GraphError, GraphIsometry, GraphPosition, GraphSpec, MetricGraph,
    VertexId,
};
pub use rng::{path_stream, PathRng};
