// Copyright 2026 The Shy Coupling Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

//! Coupled pairs of Walsh Brownian motions on a metric graph.
//!
//! Couplings:
//!
//! - `independent`: two independent motions.
//! - `synchronous_like`: one shared Gaussian increment, applied to each
//!   particle along its current geodesic direction; branch choices at
//!   vertices are independent.
//! - `hybrid_thm31`: the corridor coupling. Far apart, the particles move
//!   independently. Close together, they follow an interpolated Gaussian
//!   scheme, or a skew walk when one of them sits at a vertex. In the close
//!   phases the distance never falls to `r0/4`.
//! - `isometry`: `Y = I(X)` for a graph isometry `I`.
//! - `fig36`: the hand-built case machine on the seven-edge fixture.

use alloc::format;
use alloc::string::{String, ToString};
use core::fmt;
use core::str::FromStr;

use rand::Rng;
use thiserror::Error;

use crate::graph_diffusion::{beta_for_degree, step_walsh_bm, walsh_move, SkewParams, SkewWalk};
use crate::metric_graph::{EdgeId, GraphIsometry, GraphPosition, MetricGraph, Stub, VertexId};
use crate::rng::gaussian;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CouplingError {
    #[error("vertex {vertex:?} has degree {degree}; the hybrid coupling needs degree at least 3")]
    LowDegree { vertex: String, degree: usize },
    #[error("initial distance {distance} is not above r0/4 = {limit}")]
    TooClose { distance: f64, limit: f64 },
    #[error("coupling {0} needs an isometry")]
    MissingIsometry(GraphCouplingKind),
    #[error("graph is not the seven-edge fixture: missing {0}")]
    NotFig36(String),
    #[error("pair ({x}, {y}) is not a configuration of the seven-edge machine")]
    Unreachable { x: String, y: String },
    #[error("invalid position: {0}")]
    InvalidPosition(String),
    #[error("unknown coupling {0:?}")]
    UnknownKind(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GraphCouplingKind {
    Independent,
    SynchronousLike,
    HybridThm31,
    Isometry,
    Fig36,
}

impl fmt::Display for GraphCouplingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GraphCouplingKind::Independent => "independent",
            GraphCouplingKind::SynchronousLike => "synchronous_like",
            GraphCouplingKind::HybridThm31 => "hybrid_thm31",
            GraphCouplingKind::Isometry => "isometry",
            GraphCouplingKind::Fig36 => "fig36",
        })
    }
}

impl FromStr for GraphCouplingKind {
    type Err = CouplingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "independent" => Ok(GraphCouplingKind::Independent),
            "synchronous_like" => Ok(GraphCouplingKind::SynchronousLike),
            "hybrid_thm31" => Ok(GraphCouplingKind::HybridThm31),
            "isometry" => Ok(GraphCouplingKind::Isometry),
            "fig36" => Ok(GraphCouplingKind::Fig36),
            _ => Err(CouplingError::UnknownKind(s.to_string())),
        }
    }
}

/// Interpolation profile `σ(r) = ((4|r| - r0)⁺ / r0) ∧ 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SigmaProfile {
    pub r0: f64,
}

impl SigmaProfile {
    pub fn new(r0: f64) -> Self {
        Self { r0 }
    }

    pub fn sigma(&self, r: f64) -> f64 {
        ((4.0 * r.abs() - self.r0).max(0.0) / self.r0).min(1.0)
    }

    /// Diffusion coefficient of `Z - r0/4` in the interpolated phase.
    pub fn gamma(&self, r: f64) -> f64 {
        let s = self.sigma(r + self.r0 / 4.0);
        ((1.0 - s * s).sqrt() - 1.0).powi(2) + s * s
    }
}

/// Interpolated phase: `U` drives the particle `X` along its edge towards
/// `Y`, `V` drives `Y` away from `X`, and `Z = V - U` is the distance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterpState {
    /// Edge-orientation sign of "towards Y" for X.
    pub dir_x: f64,
    /// Edge-orientation sign of "away from X" for Y.
    pub dir_y: f64,
    pub u: f64,
    pub v: f64,
    pub v0: f64,
}

/// Skew phase: one particle sits at (or wanders around) `vertex` driven by a
/// skew walk, the other follows the interpolated `V` dynamics on its edge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SkewState {
    pub vertex: VertexId,
    /// `true` when X is the particle at the vertex.
    pub x_at_vertex: bool,
    /// Stub at `vertex` leading to the other particle.
    pub toward: Stub,
    /// Stub carrying the current negative excursion.
    pub label: Option<Stub>,
    pub walk: SkewWalk,
    /// Edge-orientation sign of "away from the vertex" for the other particle.
    pub dir_far: f64,
    pub v: f64,
    pub v0: f64,
}

/// Case of the seven-edge machine in its canonical frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Fig36Case {
    /// From `(x2, x3)`: X leads in the star at `x2`, `Y` is its image.
    Mirror,
    /// From `(x1, x4)`: X leads until `x2`, Y slides along `A4`.
    Pendant,
    /// From `(x1, x2)`: Y leads in the star at `x2`, X copies it onto the
    /// `A1`/`A2` loop with per-excursion labels.
    Labelled,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Fig36State {
    pub case: Fig36Case,
    /// Canonical frame is reflected about the `A4` axis.
    pub mirror: bool,
    /// Canonical frame has X and Y exchanged.
    pub swap: bool,
    /// Leader position in the canonical frame.
    pub leader: GraphPosition,
    /// Loop edge (`A1` or `A2`) of the current excursion into `A3`.
    pub label: EdgeId,
}

impl Fig36State {
    /// Compact id of the case and frame, `0..12`.
    pub fn machine_id(&self) -> u8 {
        let case = match self.case {
            Fig36Case::Mirror => 0,
            Fig36Case::Pendant => 1,
            Fig36Case::Labelled => 2,
        };
        case * 4 + (self.mirror as u8) * 2 + self.swap as u8
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Phase {
    Independent,
    SynchronousLike,
    Interpolated(InterpState),
    SkewAtVertex(SkewState),
    Isometry,
    Fig36(Fig36State),
}

/// Event counters kept alongside the pair.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CouplingEvents {
    /// Both particles reached vertices in the same step.
    pub simultaneous_vertex: u64,
    pub entered_independent: u64,
    pub entered_interpolated: u64,
    pub entered_skew: u64,
    pub fig36_transitions: u64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GraphCouplingState {
    pub x: GraphPosition,
    pub y: GraphPosition,
    pub phase: Phase,
    pub events: CouplingEvents,
}

/// Moves an interior point by `xi` along its edge. Stops at the endpoint if
/// the move reaches it; the flag reports that.
fn move_clamped(g: &MetricGraph, p: GraphPosition, xi: f64) -> (GraphPosition, bool) {
    match p {
        GraphPosition::Vertex(_) => (p, true),
        GraphPosition::Interior { edge, offset } => {
            let e = g.edge(edge);
            let t = offset + xi;
            if t <= 0.0 {
                (GraphPosition::Vertex(e.u), true)
            } else if t >= e.length {
                (GraphPosition::Vertex(e.v), true)
            } else {
                (GraphPosition::Interior { edge, offset: t }, false)
            }
        }
    }
}

/// Validates the graph for the corridor coupling.
pub fn check_hybrid_graph(g: &MetricGraph) -> Result<(), CouplingError> {
    for v in 0..g.vertex_count() {
        let d = g.degree(VertexId(v));
        if d < 3 {
            return Err(CouplingError::LowDegree { vertex: g.vertex_label(VertexId(v)).to_string(), degree: d });
        }
    }
    Ok(())
}

/// Initial state of the corridor coupling from `(x, y)`.
pub fn hybrid_init(
    g: &MetricGraph,
    x: GraphPosition,
    y: GraphPosition,
    dt: f64,
) -> Result<GraphCouplingState, CouplingError> {
    check_hybrid_graph(g)?;
    for p in [x, y] {
        g.validate(p).map_err(|e| CouplingError::InvalidPosition(format!("{e}")))?;
    }
    let d = g.geodesic_distance(x, y);
    let limit = g.r0() / 4.0;
    if d <= limit {
        return Err(CouplingError::TooClose { distance: d, limit });
    }
    let mut state = GraphCouplingState { x, y, phase: Phase::Independent, events: CouplingEvents::default() };
    reselect(g, &mut state, dt);
    Ok(state)
}

/// Stub at `w` whose edge carries the interior point `p` nearest to `w`.
fn stub_towards(g: &MetricGraph, w: VertexId, p: GraphPosition) -> Option<(Stub, f64)> {
    let GraphPosition::Interior { edge, offset } = p else {
        return None;
    };
    let e = g.edge(edge);
    let via_u = e.u == w;
    let via_v = e.v == w;
    let from_u = match (via_u, via_v) {
        (true, true) => offset <= e.length - offset,
        (true, false) => true,
        (false, true) => false,
        (false, false) => return None,
    };
    let dir_far = if from_u { 1.0 } else { -1.0 };
    Some((Stub { edge, from_u }, dir_far))
}

/// Chooses the phase for the current positions.
fn reselect(g: &MetricGraph, s: &mut GraphCouplingState, dt: f64) {
    let r0 = g.r0();
    let d = g.geodesic_distance(s.x, s.y);
    if d >= 0.75 * r0 {
        s.phase = Phase::Independent;
        s.events.entered_independent += 1;
        return;
    }
    if s.x.is_vertex() && s.y.is_vertex() {
        s.events.simultaneous_vertex += 1;
    }
    let vertex_side = match (s.x, s.y) {
        (GraphPosition::Vertex(w), other) => Some((w, other, true)),
        (other, GraphPosition::Vertex(w)) => Some((w, other, false)),
        _ => None,
    };
    if let Some((w, other, x_at_vertex)) = vertex_side {
        let k = g.degree(w);
        match (stub_towards(g, w, other), beta_for_degree(k)) {
            (Some((toward, dir_far)), Ok(beta)) => {
                s.phase = Phase::SkewAtVertex(SkewState {
                    vertex: w,
                    x_at_vertex,
                    toward,
                    label: None,
                    walk: SkewWalk::new(SkewParams::new(beta).expect("degree skewness lies in [-1, 1]"), dt),
                    dir_far,
                    v: d,
                    v0: d,
                });
                s.events.entered_skew += 1;
            }
            // Both at vertices, or a low-degree vertex: nothing local applies.
            _ => {
                s.phase = Phase::Independent;
                s.events.entered_independent += 1;
            }
        }
        return;
    }
    s.phase = Phase::Interpolated(InterpState {
        dir_x: g.direction_towards(s.x, s.y),
        dir_y: -g.direction_towards(s.y, s.x),
        u: 0.0,
        v: d,
        v0: d,
    });
    s.events.entered_interpolated += 1;
}

/// One step of the corridor coupling.
pub fn step_hybrid<R: Rng + ?Sized>(g: &MetricGraph, state: &mut GraphCouplingState, dt: f64, rng: &mut R) {
    let r0 = g.r0();
    let profile = SigmaProfile::new(r0);
    let sd = dt.sqrt();
    match state.phase {
        Phase::Independent => {
            state.x = step_walsh_bm(g, state.x, dt, rng);
            state.y = step_walsh_bm(g, state.y, dt, rng);
            if g.geodesic_distance(state.x, state.y) <= 0.5 * r0 {
                reselect(g, state, dt);
            }
        }
        Phase::Interpolated(mut p) => {
            let db = gaussian(rng, sd);
            let db2 = gaussian(rng, sd);
            let sg = profile.sigma(p.v - p.u);
            let dv = (1.0 - sg * sg).sqrt() * db + sg * db2;
            p.u += db;
            p.v += dv;
            let (x, hit_x) = move_clamped(g, state.x, db * p.dir_x);
            let (y, hit_y) = move_clamped(g, state.y, dv * p.dir_y);
            state.x = x;
            state.y = y;
            state.phase = Phase::Interpolated(p);
            if hit_x || hit_y || p.v - p.u >= 0.75 * r0 {
                reselect(g, state, dt);
            }
        }
        Phase::SkewAtVertex(mut s) => {
            let h = s.walk.h;
            let n0 = s.walk.n;
            let u0 = n0 as f64 * h;
            let sign = s.walk.step(rng);
            let db = sign as f64 * h - if n0 == 0 { s.walk.beta * h } else { 0.0 };
            let db2 = gaussian(rng, sd);
            let sg = profile.sigma(s.v - u0);
            let dv = (1.0 - sg * sg).sqrt() * db + sg * db2;
            s.v += dv;
            if n0 == 0 && sign < 0 {
                let others = g.stubs(s.vertex).iter().filter(|&&st| st != s.toward).count();
                let pick = rng.random_range(0..others);
                s.label = g.stubs(s.vertex).iter().copied().filter(|&st| st != s.toward).nth(pick);
            }
            let n = s.walk.n;
            let at_vertex = if n > 0 {
                g.along_stub(s.toward, n as f64 * h)
            } else if n < 0 {
                g.along_stub(s.label.unwrap_or(s.toward), (-n) as f64 * h)
            } else {
                GraphPosition::Vertex(s.vertex)
            };
            let other = if s.x_at_vertex { state.y } else { state.x };
            let (other, hit) = move_clamped(g, other, dv * s.dir_far);
            if s.x_at_vertex {
                state.x = at_vertex;
                state.y = other;
            } else {
                state.x = other;
                state.y = at_vertex;
            }
            state.phase = Phase::SkewAtVertex(s);
            if hit || s.v - s.walk.value() >= 0.75 * r0 {
                reselect(g, state, dt);
            }
        }
        _ => {}
    }
}

/// One step of the shared-increment coupling.
pub fn step_synchronous_like<R: Rng + ?Sized>(g: &MetricGraph, state: &mut GraphCouplingState, dt: f64, rng: &mut R) {
    let xi = gaussian(rng, dt.sqrt());
    let dir_x = g.direction_towards(state.x, state.y);
    let dir_y = -g.direction_towards(state.y, state.x);
    let x = walsh_move(g, state.x, xi * dir_x, rng, &mut |_, _| {});
    let y = walsh_move(g, state.y, xi * dir_y, rng, &mut |_, _| {});
    state.x = x;
    state.y = y;
}

/// One step of two independent motions.
pub fn step_independent<R: Rng + ?Sized>(g: &MetricGraph, state: &mut GraphCouplingState, dt: f64, rng: &mut R) {
    state.x = step_walsh_bm(g, state.x, dt, rng);
    state.y = step_walsh_bm(g, state.y, dt, rng);
}

/// One step of the isometry coupling: X moves, Y is its image.
pub fn step_isometry<R: Rng + ?Sized>(
    g: &MetricGraph,
    iso: &GraphIsometry,
    state: &mut GraphCouplingState,
    dt: f64,
    rng: &mut R,
) {
    state.x = step_walsh_bm(g, state.x, dt, rng);
    state.y = iso.apply_unchecked(g, state.x);
}

/// Vertex and edge ids of the seven-edge fixture.
#[derive(Clone, Debug)]
pub struct Fig36Frame {
    /// `x[i]` is the vertex labelled `x{i+1}`.
    pub x: [VertexId; 6],
    /// `a[i]` is the edge labelled `A{i+1}`.
    pub a: [EdgeId; 7],
    mirror: GraphIsometry,
}

impl Fig36Frame {
    /// Looks up labels `x1..x6` and `A1..A7`; expects `A1`, `A2`, `A3` to
    /// start at `x2` and `A4`, `A5` to start at `x3`.
    pub fn new(g: &MetricGraph) -> Result<Self, CouplingError> {
        let mut x = [VertexId(0); 6];
        for (i, slot) in x.iter_mut().enumerate() {
            let label = format!("x{}", i + 1);
            *slot = g.vertex_by_label(&label).ok_or(CouplingError::NotFig36(label))?;
        }
        let mut a = [EdgeId(0); 7];
        for (i, slot) in a.iter_mut().enumerate() {
            let label = format!("A{}", i + 1);
            *slot = g.edge_by_label(&label).ok_or(CouplingError::NotFig36(label))?;
        }
        let ends = |e: EdgeId| (g.edge(e).u, g.edge(e).v);
        let expect = [
            (a[0], x[1], x[0]),
            (a[1], x[1], x[0]),
            (a[2], x[1], x[2]),
            (a[3], x[2], x[3]),
            (a[4], x[2], x[4]),
            (a[5], x[4], x[5]),
            (a[6], x[4], x[5]),
        ];
        for (e, u, v) in expect {
            if ends(e) != (u, v) || (g.edge(e).length - 1.0).abs() > 1e-12 {
                return Err(CouplingError::NotFig36(format!("edge {}", g.edge(e).label)));
            }
        }
        let mut vmap = [VertexId(0); 6];
        for (i, j) in [(0, 5), (1, 4), (2, 2), (3, 3), (4, 1), (5, 0)] {
            vmap[x[i].0] = x[j];
        }
        let mut emap = [(EdgeId(0), false); 7];
        for (i, j, flip) in [(0, 5, false), (1, 6, false), (2, 4, true), (3, 3, false), (4, 2, true), (5, 0, false), (6, 1, false)] {
            emap[a[i].0] = (a[j], flip);
        }
        let mirror = GraphIsometry::new(g, vmap.to_vec(), emap.to_vec())
            .map_err(|e| CouplingError::NotFig36(format!("{e}")))?;
        Ok(Self { x, a, mirror })
    }

    fn canonical_pair(&self, case: Fig36Case) -> (GraphPosition, GraphPosition) {
        let v = |i: usize| GraphPosition::Vertex(self.x[i]);
        match case {
            Fig36Case::Mirror => (v(1), v(2)),
            Fig36Case::Pendant => (v(0), v(3)),
            Fig36Case::Labelled => (v(0), v(1)),
        }
    }

    fn leader_start(&self, case: Fig36Case) -> GraphPosition {
        match case {
            Fig36Case::Mirror | Fig36Case::Labelled => GraphPosition::Vertex(self.x[1]),
            Fig36Case::Pendant => GraphPosition::Vertex(self.x[0]),
        }
    }

    fn to_actual(
        &self,
        g: &MetricGraph,
        mirror: bool,
        swap: bool,
        pair: (GraphPosition, GraphPosition),
    ) -> (GraphPosition, GraphPosition) {
        let (mut a, mut b) = if swap { (pair.1, pair.0) } else { pair };
        if mirror {
            a = self.mirror.apply_unchecked(g, a);
            b = self.mirror.apply_unchecked(g, b);
        }
        (a, b)
    }

    /// Machine state whose canonical start pair maps onto `(x, y)`.
    pub fn init(&self, g: &MetricGraph, x: GraphPosition, y: GraphPosition) -> Result<GraphCouplingState, CouplingError> {
        for case in [Fig36Case::Mirror, Fig36Case::Pendant, Fig36Case::Labelled] {
            for (mirror, swap) in [(false, false), (true, false), (false, true), (true, true)] {
                if self.to_actual(g, mirror, swap, self.canonical_pair(case)) == (x, y) {
                    let st = Fig36State { case, mirror, swap, leader: self.leader_start(case), label: self.a[0] };
                    return Ok(GraphCouplingState {
                        x,
                        y,
                        phase: Phase::Fig36(st),
                        events: CouplingEvents::default(),
                    });
                }
            }
        }
        let name = |p: GraphPosition| match p {
            GraphPosition::Vertex(v) => g.vertex_label(v).to_string(),
            GraphPosition::Interior { edge, offset } => format!("{}@{offset}", g.edge(edge).label),
        };
        Err(CouplingError::Unreachable { x: name(x), y: name(y) })
    }

    /// Follower position in the canonical frame.
    fn follower(&self, st: &Fig36State) -> GraphPosition {
        let [_, _, x3, x4, _, _] = self.x;
        let [a1, a2, a3, a4, a5, _, _] = self.a;
        let at = |edge: EdgeId, offset: f64| GraphPosition::Interior { edge, offset };
        match (st.case, st.leader) {
            (Fig36Case::Mirror, GraphPosition::Vertex(_)) => GraphPosition::Vertex(x3),
            (Fig36Case::Mirror, GraphPosition::Interior { edge, offset }) => {
                if edge == a1 {
                    at(a3, 1.0 - offset)
                } else if edge == a2 {
                    at(a4, offset)
                } else {
                    at(a5, offset)
                }
            }
            (Fig36Case::Pendant, GraphPosition::Vertex(_)) => GraphPosition::Vertex(x4),
            // Leader on A1/A2 at offset s from x2 is 1 - s from x1; the
            // follower sits at that distance from x4 on A4.
            (Fig36Case::Pendant, GraphPosition::Interior { offset, .. }) => at(a4, offset),
            (Fig36Case::Labelled, GraphPosition::Vertex(_)) => GraphPosition::Vertex(self.x[0]),
            (Fig36Case::Labelled, GraphPosition::Interior { edge, offset }) => {
                let target = if edge == a1 {
                    a2
                } else if edge == a2 {
                    a1
                } else {
                    st.label
                };
                at(target, 1.0 - offset)
            }
        }
    }

    fn exits(&self, case: Fig36Case) -> [VertexId; 2] {
        match case {
            Fig36Case::Mirror | Fig36Case::Labelled => [self.x[0], self.x[2]],
            Fig36Case::Pendant => [self.x[1], self.x[1]],
        }
    }
}

/// One step of the seven-edge case machine.
pub fn step_fig36<R: Rng + ?Sized>(
    g: &MetricGraph,
    frame: &Fig36Frame,
    state: &mut GraphCouplingState,
    dt: f64,
    rng: &mut R,
) {
    let Phase::Fig36(mut st) = state.phase else {
        return;
    };
    let exits = frame.exits(st.case);
    let x2 = frame.x[1];
    let xi = gaussian(rng, dt.sqrt());

    let mut edge_now = match st.leader {
        GraphPosition::Interior { edge, .. } => Some(edge),
        GraphPosition::Vertex(_) => None,
    };
    let mut exit: Option<(VertexId, Option<EdgeId>)> = None;
    let mut crossed_x2 = false;
    let moved = walsh_move(g, st.leader, xi, rng, &mut |v, stub| {
        if exit.is_none() {
            if exits.contains(&v) {
                exit = Some((v, edge_now));
            }
            crossed_x2 |= v == x2;
        }
        edge_now = Some(stub.edge);
    });
    if exit.is_none() {
        if let GraphPosition::Vertex(v) = moved {
            if exits.contains(&v) {
                exit = Some((v, edge_now));
            }
        }
    }

    match exit {
        None => {
            st.leader = moved;
            if st.case == Fig36Case::Labelled && crossed_x2 {
                if let GraphPosition::Interior { edge, .. } = moved {
                    if edge == frame.a[2] {
                        st.label = if rng.random::<bool>() { frame.a[0] } else { frame.a[1] };
                    }
                }
            }
        }
        Some((v, via)) => {
            // Relative frame change and next case, from the canonical exit.
            let (case, mirror, swap) = match st.case {
                Fig36Case::Mirror if v == frame.x[0] && via == Some(frame.a[0]) => (Fig36Case::Labelled, false, false),
                Fig36Case::Mirror if v == frame.x[0] => (Fig36Case::Pendant, false, false),
                Fig36Case::Mirror => (Fig36Case::Mirror, true, true),
                Fig36Case::Pendant => (Fig36Case::Mirror, false, false),
                Fig36Case::Labelled if v == frame.x[0] => (Fig36Case::Labelled, false, true),
                Fig36Case::Labelled => (Fig36Case::Mirror, false, false),
            };
            st = Fig36State {
                case,
                mirror: st.mirror ^ mirror,
                swap: st.swap ^ swap,
                leader: frame.leader_start(case),
                label: frame.a[0],
            };
            state.events.fig36_transitions += 1;
        }
    }

    let pair = match st.case {
        Fig36Case::Mirror | Fig36Case::Pendant => (st.leader, frame.follower(&st)),
        Fig36Case::Labelled => (frame.follower(&st), st.leader),
    };
    let (x, y) = frame.to_actual(g, st.mirror, st.swap, pair);
    state.x = x;
    state.y = y;
    state.phase = Phase::Fig36(st);
}

/// A configured graph coupling, ready to step states.
#[derive(Clone, Debug)]
pub struct GraphCoupler<'g> {
    pub graph: &'g MetricGraph,
    pub kind: GraphCouplingKind,
    pub dt: f64,
    isometry: Option<GraphIsometry>,
    fig36: Option<Fig36Frame>,
}

impl<'g> GraphCoupler<'g> {
    pub fn new(
        graph: &'g MetricGraph,
        kind: GraphCouplingKind,
        dt: f64,
        isometry: Option<GraphIsometry>,
    ) -> Result<Self, CouplingError> {
        let mut fig36 = None;
        match kind {
            GraphCouplingKind::HybridThm31 => check_hybrid_graph(graph)?,
            GraphCouplingKind::Isometry if isometry.is_none() => return Err(CouplingError::MissingIsometry(kind)),
            GraphCouplingKind::Fig36 => fig36 = Some(Fig36Frame::new(graph)?),
            _ => {}
        }
        Ok(Self { graph, kind, dt, isometry, fig36 })
    }

    pub fn init(&self, x: GraphPosition, y: GraphPosition) -> Result<GraphCouplingState, CouplingError> {
        let g = self.graph;
        for p in [x, y] {
            g.validate(p).map_err(|e| CouplingError::InvalidPosition(format!("{e}")))?;
        }
        let plain = |phase| Ok(GraphCouplingState { x, y, phase, events: CouplingEvents::default() });
        match self.kind {
            GraphCouplingKind::Independent => plain(Phase::Independent),
            GraphCouplingKind::SynchronousLike => plain(Phase::SynchronousLike),
            GraphCouplingKind::HybridThm31 => hybrid_init(g, x, y, self.dt),
            GraphCouplingKind::Isometry => {
                let iso = self.isometry.as_ref().expect("checked in new");
                let y = iso.apply_unchecked(g, x);
                Ok(GraphCouplingState { x, y, phase: Phase::Isometry, events: CouplingEvents::default() })
            }
            GraphCouplingKind::Fig36 => self.fig36.as_ref().expect("checked in new").init(g, x, y),
        }
    }

    pub fn step<R: Rng + ?Sized>(&self, state: &mut GraphCouplingState, rng: &mut R) {
        let g = self.graph;
        match self.kind {
            GraphCouplingKind::Independent => step_independent(g, state, self.dt, rng),
            GraphCouplingKind::SynchronousLike => step_synchronous_like(g, state, self.dt, rng),
            GraphCouplingKind::HybridThm31 => step_hybrid(g, state, self.dt, rng),
            GraphCouplingKind::Isometry => {
                step_isometry(g, self.isometry.as_ref().expect("checked in new"), state, self.dt, rng)
            }
            GraphCouplingKind::Fig36 => step_fig36(g, self.fig36.as_ref().expect("checked in new"), state, self.dt, rng),
        }
    }
}
