// Copyright 2026 The Shy Coupling Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

//! Finite metric graphs: vertices joined by line segments of positive length,
//! with the shortest-path metric along the edges.
//!
//! A point of the graph is either a vertex or an interior point of an edge,
//! given by its offset measured from the edge's `u` endpoint. Offsets of `0`
//! or `length` are canonicalized to the corresponding vertex.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use thiserror::Error;

/// Index of a vertex in a [`MetricGraph`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub usize);

/// Index of an edge in a [`MetricGraph`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub usize);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("graph has no vertices")]
    Empty,
    #[error("duplicate vertex id {0:?}")]
    DuplicateVertex(String),
    #[error("duplicate edge id {0:?}")]
    DuplicateEdge(String),
    #[error("edge {edge:?} references unknown vertex {vertex:?}")]
    UnknownVertex { edge: String, vertex: String },
    #[error("edge {0:?} has a non-positive or non-finite length")]
    NonPositiveLength(String),
    #[error("vertex {0:?} has degree 2")]
    DegreeTwo(String),
    #[error("vertex {0:?} has no incident edge")]
    IsolatedVertex(String),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("invalid position: {0}")]
    InvalidPosition(String),
    #[error("isometry does not match the graph: {0}")]
    IsometryMismatch(String),
    #[error("unknown fixture {0:?}")]
    UnknownFixture(String),
}

/// Edge of a [`GraphSpec`], referring to vertices by their ids.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeSpec {
    pub id: String,
    pub u: String,
    pub v: String,
    pub length: f64,
}

/// Unvalidated vertex/edge list, the input to [`MetricGraph::build`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GraphSpec {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeSpec>,
    /// Admit degree-2 vertices. Only used by fixtures that need a marked
    /// point in the middle of a loop.
    pub allow_degree_two: bool,
}

impl GraphSpec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex(mut self, id: &str) -> Self {
        self.vertices.push(id.to_string());
        self
    }

    pub fn edge(mut self, id: &str, u: &str, v: &str, length: f64) -> Self {
        self.edges.push(EdgeSpec { id: id.to_string(), u: u.to_string(), v: v.to_string(), length });
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub label: String,
    pub u: VertexId,
    pub v: VertexId,
    pub length: f64,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }
}

/// One end of an edge seen from the vertex it is attached to. A self-loop
/// contributes two stubs to its vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Stub {
    pub edge: EdgeId,
    /// `true` when the stub leaves from the edge's `u` end.
    pub from_u: bool,
}

/// A point of the graph.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GraphPosition {
    Vertex(VertexId),
    /// Interior point, `offset` measured from the edge's `u` endpoint and
    /// strictly inside `(0, length)`.
    Interior { edge: EdgeId, offset: f64 },
}

impl GraphPosition {
    pub fn is_vertex(&self) -> bool {
        matches!(self, GraphPosition::Vertex(_))
    }

    pub fn vertex(&self) -> Option<VertexId> {
        match *self {
            GraphPosition::Vertex(v) => Some(v),
            GraphPosition::Interior { .. } => None,
        }
    }
}

/// Validated, immutable metric graph.
#[derive(Clone, Debug)]
pub struct MetricGraph {
    labels: Vec<String>,
    edges: Vec<Edge>,
    stubs: Vec<Vec<Stub>>,
    /// Row-major all-pairs vertex distance table.
    dist: Vec<f64>,
    r0: f64,
    m0: usize,
}

impl MetricGraph {
    /// Validates `spec` and precomputes the vertex distance table.
    pub fn build(spec: &GraphSpec) -> Result<Self, GraphError> {
        if spec.vertices.is_empty() {
            return Err(GraphError::Empty);
        }
        let mut labels: Vec<String> = Vec::with_capacity(spec.vertices.len());
        for id in &spec.vertices {
            if labels.iter().any(|l| l == id) {
                return Err(GraphError::DuplicateVertex(id.clone()));
            }
            labels.push(id.clone());
        }
        let lookup = |edge: &str, id: &str| {
            labels
                .iter()
                .position(|l| l == id)
                .map(VertexId)
                .ok_or_else(|| GraphError::UnknownVertex { edge: edge.to_string(), vertex: id.to_string() })
        };

        let mut edges: Vec<Edge> = Vec::with_capacity(spec.edges.len());
        for e in &spec.edges {
            if edges.iter().any(|x| x.label == e.id) {
                return Err(GraphError::DuplicateEdge(e.id.clone()));
            }
            if !(e.length.is_finite() && e.length > 0.0) {
                return Err(GraphError::NonPositiveLength(e.id.clone()));
            }
            let u = lookup(&e.id, &e.u)?;
            let v = lookup(&e.id, &e.v)?;
            edges.push(Edge { label: e.id.clone(), u, v, length: e.length });
        }

        let n = labels.len();
        let mut stubs: Vec<Vec<Stub>> = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            stubs[e.u.0].push(Stub { edge: EdgeId(i), from_u: true });
            stubs[e.v.0].push(Stub { edge: EdgeId(i), from_u: false });
        }
        for (v, s) in stubs.iter().enumerate() {
            match s.len() {
                0 => return Err(GraphError::IsolatedVertex(labels[v].clone())),
                2 if !spec.allow_degree_two => return Err(GraphError::DegreeTwo(labels[v].clone())),
                _ => {}
            }
        }

        let dist = all_pairs(n, &edges, &stubs);
        if dist.iter().any(|d| d.is_infinite()) {
            return Err(GraphError::Disconnected);
        }
        let r0 = edges.iter().map(|e| e.length).fold(f64::INFINITY, f64::min);
        let m0 = stubs.iter().map(Vec::len).max().unwrap_or(0);
        Ok(Self { labels, edges, stubs, dist, r0, m0 })
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Minimum edge length.
    pub fn r0(&self) -> f64 {
        self.r0
    }

    /// Maximum vertex degree.
    pub fn m0(&self) -> usize {
        self.m0
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e.0]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_label(&self, v: VertexId) -> &str {
        &self.labels[v.0]
    }

    pub fn vertex_by_label(&self, label: &str) -> Option<VertexId> {
        self.labels.iter().position(|l| l == label).map(VertexId)
    }

    pub fn edge_by_label(&self, label: &str) -> Option<EdgeId> {
        self.edges.iter().position(|e| e.label == label).map(EdgeId)
    }

    /// Degree of `v`; self-loops count twice.
    pub fn degree(&self, v: VertexId) -> usize {
        self.stubs[v.0].len()
    }

    pub fn stubs(&self, v: VertexId) -> &[Stub] {
        &self.stubs[v.0]
    }

    pub fn vertex_distance(&self, a: VertexId, b: VertexId) -> f64 {
        self.dist[a.0 * self.labels.len() + b.0]
    }

    /// Vertex the stub is attached to.
    pub fn stub_vertex(&self, s: Stub) -> VertexId {
        let e = &self.edges[s.edge.0];
        if s.from_u {
            e.u
        } else {
            e.v
        }
    }

    /// Vertex at the other end of the stub's edge.
    pub fn stub_far_vertex(&self, s: Stub) -> VertexId {
        let e = &self.edges[s.edge.0];
        if s.from_u {
            e.v
        } else {
            e.u
        }
    }

    /// Canonical interior/vertex form of the point at `offset` on `edge`.
    /// Offsets outside `[0, length]` are rejected.
    pub fn position(&self, edge: EdgeId, offset: f64) -> Result<GraphPosition, GraphError> {
        let e = self
            .edges
            .get(edge.0)
            .ok_or_else(|| GraphError::InvalidPosition(format!("no edge {}", edge.0)))?;
        if !offset.is_finite() || offset < 0.0 || offset > e.length {
            return Err(GraphError::InvalidPosition(format!(
                "offset {offset} outside [0, {}] on edge {:?}",
                e.length, e.label
            )));
        }
        Ok(self.canonical(edge, offset))
    }

    pub(crate) fn canonical(&self, edge: EdgeId, offset: f64) -> GraphPosition {
        let e = &self.edges[edge.0];
        if offset <= 0.0 {
            GraphPosition::Vertex(e.u)
        } else if offset >= e.length {
            GraphPosition::Vertex(e.v)
        } else {
            GraphPosition::Interior { edge, offset }
        }
    }

    /// Point at distance `dist` from the stub's vertex, along the stub's edge.
    pub fn along_stub(&self, s: Stub, dist: f64) -> GraphPosition {
        let len = self.edges[s.edge.0].length;
        let offset = if s.from_u { dist } else { len - dist };
        self.canonical(s.edge, offset.clamp(0.0, len))
    }

    pub fn validate(&self, p: GraphPosition) -> Result<(), GraphError> {
        match p {
            GraphPosition::Vertex(v) if v.0 < self.labels.len() => Ok(()),
            GraphPosition::Vertex(v) => Err(GraphError::InvalidPosition(format!("no vertex {}", v.0))),
            GraphPosition::Interior { edge, offset } => match self.edges.get(edge.0) {
                Some(e) if offset > 0.0 && offset < e.length => Ok(()),
                Some(e) => Err(GraphError::InvalidPosition(format!(
                    "offset {offset} not inside (0, {}) on edge {:?}",
                    e.length, e.label
                ))),
                None => Err(GraphError::InvalidPosition(format!("no edge {}", edge.0))),
            },
        }
    }

    /// Vertices bounding the point, with the distance to each along its edge.
    fn anchors(&self, p: GraphPosition) -> ([(VertexId, f64); 2], usize) {
        match p {
            GraphPosition::Vertex(v) => ([(v, 0.0), (v, 0.0)], 1),
            GraphPosition::Interior { edge, offset } => {
                let e = &self.edges[edge.0];
                ([(e.u, offset), (e.v, e.length - offset)], 2)
            }
        }
    }

    /// Shortest-path distance between two points.
    pub fn geodesic_distance(&self, p: GraphPosition, q: GraphPosition) -> f64 {
        let mut best = f64::INFINITY;
        if let (
            GraphPosition::Interior { edge: ep, offset: sp },
            GraphPosition::Interior { edge: eq, offset: sq },
        ) = (p, q)
        {
            if ep == eq {
                best = (sp - sq).abs();
            }
        }
        let (ap, np) = self.anchors(p);
        let (aq, nq) = self.anchors(q);
        for &(a, da) in &ap[..np] {
            for &(b, db) in &aq[..nq] {
                let d = da + self.vertex_distance(a, b) + db;
                if d < best {
                    best = d;
                }
            }
        }
        best
    }

    /// Distance from `p` to the nearest vertex.
    pub fn distance_to_vertex_set(&self, p: GraphPosition) -> f64 {
        match p {
            GraphPosition::Vertex(_) => 0.0,
            GraphPosition::Interior { edge, offset } => offset.min(self.edges[edge.0].length - offset),
        }
    }

    /// For an interior point, the direction along its edge (`+1.0` towards
    /// `v`, `-1.0` towards `u`) in which a geodesic to `q` starts. Ties go to
    /// the direct same-edge path first, then to the `u` side.
    pub fn direction_towards(&self, p: GraphPosition, q: GraphPosition) -> f64 {
        let GraphPosition::Interior { edge, offset } = p else {
            return 1.0;
        };
        let e = &self.edges[edge.0];
        if let GraphPosition::Interior { edge: eq, offset: sq } = q {
            if eq == edge {
                let direct = (sq - offset).abs();
                let around_u = offset + self.vertex_distance(e.u, e.v) + (e.length - sq);
                let around_v = (e.length - offset) + self.vertex_distance(e.v, e.u) + sq;
                if direct <= around_u && direct <= around_v {
                    return if sq >= offset { 1.0 } else { -1.0 };
                }
            }
        }
        let via_u = offset + self.geodesic_distance(GraphPosition::Vertex(e.u), q);
        let via_v = (e.length - offset) + self.geodesic_distance(GraphPosition::Vertex(e.v), q);
        if via_u <= via_v {
            -1.0
        } else {
            1.0
        }
    }

    /// Largest distance from `p` to any point of the graph.
    pub fn eccentricity(&self, p: GraphPosition) -> f64 {
        // The farthest point lies at a vertex or where the two routes through
        // an edge's endpoints balance.
        let mut far: f64 = 0.0;
        for (i, e) in self.edges.iter().enumerate() {
            let du = self.geodesic_distance(p, GraphPosition::Vertex(e.u));
            let dv = self.geodesic_distance(p, GraphPosition::Vertex(e.v));
            far = far.max(du).max(dv);
            // Balance point along the edge, unless p is on this very edge.
            let s = (dv - du + e.length) / 2.0;
            if s > 0.0 && s < e.length {
                let q = GraphPosition::Interior { edge: EdgeId(i), offset: s };
                far = far.max(self.geodesic_distance(p, q));
            }
        }
        far
    }
}

fn all_pairs(n: usize, edges: &[Edge], stubs: &[Vec<Stub>]) -> Vec<f64> {
    let mut table = vec![f64::INFINITY; n * n];
    let mut done = vec![false; n];
    for src in 0..n {
        let row = &mut table[src * n..(src + 1) * n];
        done.iter_mut().for_each(|d| *d = false);
        row[src] = 0.0;
        for _ in 0..n {
            // Array Dijkstra; ties broken by lowest vertex index.
            let mut best = None;
            for v in 0..n {
                if !done[v] && row[v].is_finite() && best.map_or(true, |b: usize| row[v] < row[b]) {
                    best = Some(v);
                }
            }
            let Some(a) = best else { break };
            done[a] = true;
            for s in &stubs[a] {
                let e = &edges[s.edge.0];
                let b = if s.from_u { e.v.0 } else { e.u.0 };
                let cand = row[a] + e.length;
                if cand < row[b] {
                    row[b] = cand;
                }
            }
        }
    }
    table
}

/// Distance-preserving bijection of a graph onto itself, given on vertices
/// and on edges (with a flag for edges mapped end-to-end reversed).
#[derive(Clone, Debug, PartialEq)]
pub struct GraphIsometry {
    vertex_map: Vec<VertexId>,
    edge_map: Vec<(EdgeId, bool)>,
}

impl GraphIsometry {
    pub fn identity(g: &MetricGraph) -> Self {
        Self {
            vertex_map: (0..g.vertex_count()).map(VertexId).collect(),
            edge_map: (0..g.edge_count()).map(|e| (EdgeId(e), false)).collect(),
        }
    }

    /// Checks lengths, incidence and bijectivity against `g`.
    pub fn new(
        g: &MetricGraph,
        vertex_map: Vec<VertexId>,
        edge_map: Vec<(EdgeId, bool)>,
    ) -> Result<Self, GraphError> {
        let bad = |m: String| Err(GraphError::IsometryMismatch(m));
        if vertex_map.len() != g.vertex_count() || edge_map.len() != g.edge_count() {
            return bad("map sizes differ from the graph".to_string());
        }
        let mut seen_v = vec![false; g.vertex_count()];
        for &v in &vertex_map {
            if v.0 >= seen_v.len() || seen_v[v.0] {
                return bad(format!("vertex map is not a bijection at {}", v.0));
            }
            seen_v[v.0] = true;
        }
        let mut seen_e = vec![false; g.edge_count()];
        for (i, &(img, flipped)) in edge_map.iter().enumerate() {
            if img.0 >= seen_e.len() || seen_e[img.0] {
                return bad(format!("edge map is not a bijection at {}", img.0));
            }
            seen_e[img.0] = true;
            let src = g.edge(EdgeId(i));
            let dst = g.edge(img);
            if (src.length - dst.length).abs() > 1e-12 {
                return bad(format!("edge {:?} and its image {:?} differ in length", src.label, dst.label));
            }
            let (iu, iv) = (vertex_map[src.u.0], vertex_map[src.v.0]);
            let ok = if flipped { iu == dst.v && iv == dst.u } else { iu == dst.u && iv == dst.v };
            if !ok {
                return bad(format!("edge {:?} incidence not preserved", src.label));
            }
        }
        Ok(Self { vertex_map, edge_map })
    }

    pub fn apply(&self, g: &MetricGraph, p: GraphPosition) -> Result<GraphPosition, GraphError> {
        g.validate(p)?;
        if self.vertex_map.len() != g.vertex_count() {
            return Err(GraphError::IsometryMismatch("isometry built for another graph".to_string()));
        }
        Ok(self.apply_unchecked(g, p))
    }

    #[inline]
    pub(crate) fn apply_unchecked(&self, g: &MetricGraph, p: GraphPosition) -> GraphPosition {
        match p {
            GraphPosition::Vertex(v) => GraphPosition::Vertex(self.vertex_map[v.0]),
            GraphPosition::Interior { edge, offset } => {
                let (img, flipped) = self.edge_map[edge.0];
                let offset = if flipped { g.edge(img).length - offset } else { offset };
                GraphPosition::Interior { edge: img, offset }
            }
        }
    }

    pub fn map_vertex(&self, v: VertexId) -> VertexId {
        self.vertex_map[v.0]
    }

    pub fn map_edge(&self, e: EdgeId) -> (EdgeId, bool) {
        self.edge_map[e.0]
    }

    /// Smallest `d(x, I(x))` over the vertices and `per_edge` evenly spaced
    /// interior points of every edge.
    pub fn min_displacement(&self, g: &MetricGraph, per_edge: usize) -> f64 {
        let mut best = f64::INFINITY;
        for v in 0..g.vertex_count() {
            let p = GraphPosition::Vertex(VertexId(v));
            best = best.min(g.geodesic_distance(p, self.apply_unchecked(g, p)));
        }
        for (i, e) in g.edges().iter().enumerate() {
            for k in 1..=per_edge {
                let s = e.length * k as f64 / (per_edge + 1) as f64;
                let p = GraphPosition::Interior { edge: EdgeId(i), offset: s };
                best = best.min(g.geodesic_distance(p, self.apply_unchecked(g, p)));
            }
        }
        best
    }
}

/// Named graph fixtures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FixtureName {
    /// Vertex pair joined by six geodesics (five through a hub, one direct).
    Fig31,
    /// Two-vertex ring with two pendant edges; half-turn isometry.
    Fig32,
    /// Cut vertex with two long pendant trees and a short looped piece.
    Fig33,
    /// Finite window of a backbone line with side trees.
    Fig34Window,
    /// Loop with pendant trees at non-rotation-invariant positions.
    Fig35,
    /// Seven unit edges `A1..A7`, vertices `x1..x6`, mirror symmetric.
    Fig36,
    /// Complete graph on four vertices, unit edges.
    K4,
    /// Star with `k` unit arms.
    Star(usize),
}

impl fmt::Display for FixtureName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FixtureName::Fig31 => f.write_str("fig31"),
            FixtureName::Fig32 => f.write_str("fig32"),
            FixtureName::Fig33 => f.write_str("fig33"),
            FixtureName::Fig34Window => f.write_str("fig34_window"),
            FixtureName::Fig35 => f.write_str("fig35"),
            FixtureName::Fig36 => f.write_str("fig36"),
            FixtureName::K4 => f.write_str("k4"),
            FixtureName::Star(k) => write!(f, "star({k})"),
        }
    }
}

impl FromStr for FixtureName {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let name = s.trim().to_ascii_lowercase();
        let fixed = match name.as_str() {
            "fig31" => Some(FixtureName::Fig31),
            "fig32" => Some(FixtureName::Fig32),
            "fig33" => Some(FixtureName::Fig33),
            "fig34" | "fig34_window" => Some(FixtureName::Fig34Window),
            "fig35" => Some(FixtureName::Fig35),
            "fig36" => Some(FixtureName::Fig36),
            "k4" => Some(FixtureName::K4),
            _ => None,
        };
        if let Some(f) = fixed {
            return Ok(f);
        }
        let k = name
            .strip_prefix("star(")
            .and_then(|r| r.strip_suffix(')'))
            .or_else(|| name.strip_prefix("star"))
            .and_then(|k| k.parse::<usize>().ok());
        match k {
            Some(k) if k >= 1 && k != 2 => Ok(FixtureName::Star(k)),
            _ => Err(GraphError::UnknownFixture(s.to_string())),
        }
    }
}

/// How an edge projects onto the backbone (line or loop) of a
/// backbone-with-side-trees fixture.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EdgeRole {
    /// Backbone edge; coordinates of its `u` and `v` ends.
    Backbone { at_u: f64, at_v: f64 },
    /// Side-tree edge; coordinate of the tree's attachment point.
    Side { attach: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BackboneShape {
    Line,
    Loop { circumference: f64 },
}

/// Backbone marking of a fixture, one role per edge.
#[derive(Clone, Debug, PartialEq)]
pub struct Backbone {
    pub shape: BackboneShape,
    pub roles: Vec<EdgeRole>,
}

/// A fixture graph with its optional isometry, named points and backbone.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: FixtureName,
    pub graph: MetricGraph,
    pub isometry: Option<GraphIsometry>,
    pub markers: Vec<(String, GraphPosition)>,
    pub backbone: Option<Backbone>,
}

impl Fixture {
    pub fn marker(&self, name: &str) -> Option<GraphPosition> {
        self.markers.iter().find(|(n, _)| n == name).map(|&(_, p)| p)
    }
}

/// Edge lengths of the six-geodesic fixture.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Fig31Lengths {
    /// Each of the five parallel `x`–`z` edges.
    pub x_to_z: f64,
    pub z_to_y: f64,
    /// The direct `x`–`y` edge.
    pub x_to_y: f64,
    pub pendant: f64,
}

impl Default for Fig31Lengths {
    fn default() -> Self {
        Self { x_to_z: 1.0, z_to_y: 1.0, x_to_y: 2.0, pendant: 1.0 }
    }
}

/// Builds the named fixture.
pub fn fixture(name: FixtureName) -> Result<Fixture, GraphError> {
    match name {
        FixtureName::Fig31 => fig31(Fig31Lengths::default()),
        FixtureName::Fig32 => fig32(),
        FixtureName::Fig33 => fig33(),
        FixtureName::Fig34Window => fig34_window(),
        FixtureName::Fig35 => fig35(),
        FixtureName::Fig36 => fig36(),
        FixtureName::K4 => k4(),
        FixtureName::Star(k) => star(k),
    }
}

fn vertex_markers(g: &MetricGraph) -> Vec<(String, GraphPosition)> {
    (0..g.vertex_count())
        .map(|v| (g.vertex_label(VertexId(v)).to_string(), GraphPosition::Vertex(VertexId(v))))
        .collect()
}

fn plain(name: FixtureName, spec: GraphSpec) -> Result<Fixture, GraphError> {
    let graph = MetricGraph::build(&spec)?;
    let markers = vertex_markers(&graph);
    Ok(Fixture { name, graph, isometry: None, markers, backbone: None })
}

/// `x` (degree 7) and `y` (degree 3) joined through the hub `z` by five
/// parallel edges and directly by one more edge.
pub fn fig31(len: Fig31Lengths) -> Result<Fixture, GraphError> {
    let mut spec = GraphSpec::new().vertex("x").vertex("y").vertex("z").vertex("px").vertex("py");
    for i in 1..=5 {
        spec = spec.edge(&format!("xz{i}"), "x", "z", len.x_to_z);
    }
    spec = spec
        .edge("zy", "z", "y", len.z_to_y)
        .edge("xy", "x", "y", len.x_to_y)
        .edge("xpx", "x", "px", len.pendant)
        .edge("ypy", "y", "py", len.pendant);
    plain(FixtureName::Fig31, spec)
}

fn fig32() -> Result<Fixture, GraphError> {
    let spec = GraphSpec::new()
        .vertex("a")
        .vertex("b")
        .vertex("la")
        .vertex("lb")
        .edge("ring_ab", "a", "b", 1.0)
        .edge("ring_ba", "b", "a", 1.0)
        .edge("pa", "a", "la", 1.0)
        .edge("pb", "b", "lb", 1.0);
    let graph = MetricGraph::build(&spec)?;
    let v = |l: &str| graph.vertex_by_label(l).expect("fixture vertex");
    let e = |l: &str| graph.edge_by_label(l).expect("fixture edge");
    let mut vmap = vec![VertexId(0); graph.vertex_count()];
    vmap[v("a").0] = v("b");
    vmap[v("b").0] = v("a");
    vmap[v("la").0] = v("lb");
    vmap[v("lb").0] = v("la");
    let mut emap = vec![(EdgeId(0), false); graph.edge_count()];
    emap[e("ring_ab").0] = (e("ring_ba"), false);
    emap[e("ring_ba").0] = (e("ring_ab"), false);
    emap[e("pa").0] = (e("pb"), false);
    emap[e("pb").0] = (e("pa"), false);
    let iso = GraphIsometry::new(&graph, vmap, emap)?;
    let markers = vertex_markers(&graph);
    Ok(Fixture { name: FixtureName::Fig32, graph, isometry: Some(iso), markers, backbone: None })
}

fn fig33() -> Result<Fixture, GraphError> {
    let spec = GraphSpec::new()
        .vertex("x")
        .vertex("u")
        .vertex("l1")
        .vertex("l2")
        .edge("t1", "x", "l1", 2.0)
        .edge("t2", "x", "l2", 2.0)
        .edge("xu", "x", "u", 1.0)
        .edge("loop", "u", "u", 1.0);
    plain(FixtureName::Fig33, spec)
}

fn fig34_window() -> Result<Fixture, GraphError> {
    let mut spec = GraphSpec::new();
    for i in 0..=5 {
        spec = spec.vertex(&format!("b{i}"));
    }
    spec = spec.vertex("s1").vertex("t").vertex("t1").vertex("t2").vertex("s3").vertex("s4");
    let mut roles = Vec::new();
    for i in 0..5 {
        spec = spec.edge(&format!("bb{i}"), &format!("b{i}"), &format!("b{}", i + 1), 1.0);
        roles.push(EdgeRole::Backbone { at_u: i as f64, at_v: (i + 1) as f64 });
    }
    // Side-tree lengths alternate between 1 and 1.5 so no shift maps the
    // attachment pattern onto itself.
    spec = spec
        .edge("side1", "b1", "s1", 1.0)
        .edge("side2", "b2", "t", 1.5)
        .edge("side2a", "t", "t1", 1.0)
        .edge("side2b", "t", "t2", 1.0)
        .edge("side3", "b3", "s3", 1.0)
        .edge("side4", "b4", "s4", 1.5);
    roles.extend([
        EdgeRole::Side { attach: 1.0 },
        EdgeRole::Side { attach: 2.0 },
        EdgeRole::Side { attach: 2.0 },
        EdgeRole::Side { attach: 2.0 },
        EdgeRole::Side { attach: 3.0 },
        EdgeRole::Side { attach: 4.0 },
    ]);
    let graph = MetricGraph::build(&spec)?;
    let markers = vertex_markers(&graph);
    Ok(Fixture {
        name: FixtureName::Fig34Window,
        graph,
        isometry: None,
        markers,
        backbone: Some(Backbone { shape: BackboneShape::Line, roles }),
    })
}

fn fig35() -> Result<Fixture, GraphError> {
    let spec = GraphSpec::new()
        .vertex("p0")
        .vertex("p1")
        .vertex("p2")
        .vertex("l0")
        .vertex("l1")
        .vertex("l2")
        .edge("arc01", "p0", "p1", 1.0)
        .edge("arc12", "p1", "p2", 1.5)
        .edge("arc20", "p2", "p0", 2.0)
        .edge("tree0", "p0", "l0", 1.0)
        .edge("tree1", "p1", "l1", 1.0)
        .edge("tree2", "p2", "l2", 1.0);
    let roles = vec![
        EdgeRole::Backbone { at_u: 0.0, at_v: 1.0 },
        EdgeRole::Backbone { at_u: 1.0, at_v: 2.5 },
        EdgeRole::Backbone { at_u: 2.5, at_v: 4.5 },
        EdgeRole::Side { attach: 0.0 },
        EdgeRole::Side { attach: 1.0 },
        EdgeRole::Side { attach: 2.5 },
    ];
    let graph = MetricGraph::build(&spec)?;
    let markers = vertex_markers(&graph);
    Ok(Fixture {
        name: FixtureName::Fig35,
        graph,
        isometry: None,
        markers,
        backbone: Some(Backbone { shape: BackboneShape::Loop { circumference: 4.5 }, roles }),
    })
}

/// `A1`, `A2` join `x2` to `x1` (a loop through `x2` with `x1` marked at
/// its far point), `A3` joins `x2`–`x3`, `A4` is the pendant `x3`–`x4`,
/// `A5` joins `x3`–`x5`, and `A6`, `A7` mirror `A1`, `A2` at `x5`–`x6`.
/// The returned isometry is the mirror about the axis through `A4`; every
/// isometry of this graph fixes `x3`.
fn fig36() -> Result<Fixture, GraphError> {
    let mut spec = GraphSpec::new();
    for i in 1..=6 {
        spec = spec.vertex(&format!("x{i}"));
    }
    spec = spec
        .edge("A1", "x2", "x1", 1.0)
        .edge("A2", "x2", "x1", 1.0)
        .edge("A3", "x2", "x3", 1.0)
        .edge("A4", "x3", "x4", 1.0)
        .edge("A5", "x3", "x5", 1.0)
        .edge("A6", "x5", "x6", 1.0)
        .edge("A7", "x5", "x6", 1.0);
    spec.allow_degree_two = true;
    let graph = MetricGraph::build(&spec)?;
    // Vertex i holds label x{i+1}; edge i holds label A{i+1}.
    let vmap = [5, 4, 2, 3, 1, 0].into_iter().map(VertexId).collect();
    let emap = [(5, false), (6, false), (4, true), (3, false), (2, true), (0, false), (1, false)]
        .into_iter()
        .map(|(e, f)| (EdgeId(e), f))
        .collect();
    let iso = GraphIsometry::new(&graph, vmap, emap)?;
    let markers = vertex_markers(&graph);
    Ok(Fixture { name: FixtureName::Fig36, graph, isometry: Some(iso), markers, backbone: None })
}

fn k4() -> Result<Fixture, GraphError> {
    let mut spec = GraphSpec::new();
    for i in 0..4 {
        spec = spec.vertex(&format!("v{i}"));
    }
    for i in 0..4 {
        for j in (i + 1)..4 {
            spec = spec.edge(&format!("e{i}{j}"), &format!("v{i}"), &format!("v{j}"), 1.0);
        }
    }
    plain(FixtureName::K4, spec)
}

fn star(k: usize) -> Result<Fixture, GraphError> {
    let mut spec = GraphSpec::new().vertex("c");
    for i in 1..=k {
        spec = spec.vertex(&format!("l{i}")).edge(&format!("e{i}"), "c", &format!("l{i}"), 1.0);
    }
    plain(FixtureName::Star(k), spec)
}
