// Copyright 2026 The Shy Coupling Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

//! Single-particle motion: Walsh Brownian motion on a metric graph, the
//! lattice skew random walk, and first-passage Monte Carlo.
//!
//! Vertex crossings use overshoot branching: when an Euler step runs past a
//! vertex, the remaining distance continues into a stub chosen uniformly
//! among all stubs at that vertex (including the one it arrived on), and the
//! rule repeats at every further vertex. A degree-1 vertex therefore folds the
//! overshoot back, which is reflection.

use alloc::format;
use alloc::string::String;

use rand::Rng;
use thiserror::Error;

use crate::metric_graph::{GraphPosition, MetricGraph, Stub, VertexId};
use crate::rng::{gaussian, path_stream};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiffusionError {
    #[error("invalid time step: {0}")]
    InvalidStep(String),
    #[error("degree {0} is below 3")]
    DegreeTooSmall(usize),
    #[error("skewness {0} outside [-1, 1]")]
    InvalidSkew(f64),
    #[error("the ball of radius {radius} around the start covers the graph")]
    EmptyComplement { radius: f64 },
    #[error("at least one path is required")]
    NoPaths,
    #[error("invalid start: {0}")]
    InvalidStart(String),
}

/// Euler scheme parameters. `dt ≤ (r0/10)²` keeps a typical spatial step well
/// below the shortest edge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiffusionParams {
    pub dt: f64,
    pub t_max: f64,
}

impl DiffusionParams {
    pub fn new(dt: f64, t_max: f64) -> Self {
        Self { dt, t_max }
    }

    pub fn validate(&self, g: &MetricGraph) -> Result<(), DiffusionError> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(DiffusionError::InvalidStep(format!("dt = {}", self.dt)));
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(DiffusionError::InvalidStep(format!("horizon = {}", self.t_max)));
        }
        let cap = (g.r0() / 10.0).powi(2);
        if self.dt > cap {
            return Err(DiffusionError::InvalidStep(format!("dt = {} exceeds (r0/10)^2 = {cap}", self.dt)));
        }
        Ok(())
    }

    /// Number of Euler steps needed to reach `t_max`.
    pub fn steps(&self) -> usize {
        steps_for(self.t_max, self.dt)
    }
}

pub fn steps_for(t: f64, dt: f64) -> usize {
    // Guard against 1.0 / 1e-4 rounding to 9999.999...
    (t / dt - 1e-9).ceil().max(0.0) as usize
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SkewParams {
    pub beta: f64,
}

impl SkewParams {
    pub fn new(beta: f64) -> Result<Self, DiffusionError> {
        if !(-1.0..=1.0).contains(&beta) {
            return Err(DiffusionError::InvalidSkew(beta));
        }
        Ok(Self { beta })
    }
}

/// Skewness making a skew walk at a degree-`k` vertex send one excursion in
/// `k` to the positive side: `(1 - β) / (1 + β) = k - 1`.
pub fn beta_for_degree(k: usize) -> Result<f64, DiffusionError> {
    if k < 3 {
        return Err(DiffusionError::DegreeTooSmall(k));
    }
    Ok(-((k - 2) as f64) / k as f64)
}

/// Uniform stub at `v`.
pub fn pick_stub<R: Rng + ?Sized>(g: &MetricGraph, v: VertexId, rng: &mut R) -> Stub {
    let stubs = g.stubs(v);
    stubs[rng.random_range(0..stubs.len())]
}

/// Travels `dist ≥ 0` from the stub's vertex along the stub, branching
/// uniformly at every vertex reached with distance left over.
pub fn travel<R: Rng + ?Sized>(
    g: &MetricGraph,
    mut stub: Stub,
    mut dist: f64,
    rng: &mut R,
    on_branch: &mut dyn FnMut(VertexId, Stub),
) -> GraphPosition {
    loop {
        let len = g.edge(stub.edge).length;
        if dist < len {
            return g.along_stub(stub, dist);
        }
        dist -= len;
        let v = g.stub_far_vertex(stub);
        if dist <= 0.0 {
            return GraphPosition::Vertex(v);
        }
        stub = pick_stub(g, v, rng);
        on_branch(v, stub);
    }
}

/// Moves `p` by the signed displacement `xi` (along the edge orientation for
/// interior points; only `|xi|` matters at a vertex).
pub fn walsh_move<R: Rng + ?Sized>(
    g: &MetricGraph,
    p: GraphPosition,
    xi: f64,
    rng: &mut R,
    on_branch: &mut dyn FnMut(VertexId, Stub),
) -> GraphPosition {
    match p {
        GraphPosition::Vertex(v) => {
            if xi == 0.0 {
                return p;
            }
            let s = pick_stub(g, v, rng);
            on_branch(v, s);
            travel(g, s, xi.abs(), rng, on_branch)
        }
        GraphPosition::Interior { edge, offset } => {
            let e = g.edge(edge);
            let target = offset + xi;
            if target > 0.0 && target < e.length {
                return GraphPosition::Interior { edge, offset: target };
            }
            let (v, over) = if target <= 0.0 { (e.u, -target) } else { (e.v, target - e.length) };
            if over == 0.0 {
                return GraphPosition::Vertex(v);
            }
            let s = pick_stub(g, v, rng);
            on_branch(v, s);
            travel(g, s, over, rng, on_branch)
        }
    }
}

/// One Euler step of Walsh Brownian motion.
pub fn step_walsh_bm<R: Rng + ?Sized>(g: &MetricGraph, p: GraphPosition, dt: f64, rng: &mut R) -> GraphPosition {
    let xi = gaussian(rng, dt.sqrt());
    walsh_move(g, p, xi, rng, &mut |_, _| {})
}

/// [`step_walsh_bm`] reporting every branch choice as `(vertex, stub)`.
pub fn step_walsh_bm_observed<R: Rng + ?Sized>(
    g: &MetricGraph,
    p: GraphPosition,
    dt: f64,
    rng: &mut R,
    on_branch: &mut dyn FnMut(VertexId, Stub),
) -> GraphPosition {
    let xi = gaussian(rng, dt.sqrt());
    walsh_move(g, p, xi, rng, on_branch)
}

/// Harrison–Shepp skew walk on the lattice `h·ℤ`, tracked as an integer index
/// so that visits to 0 are exact.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SkewWalk {
    pub beta: f64,
    pub h: f64,
    pub n: i64,
    /// Symmetric local time at 0; grows by `h` per step taken from 0.
    pub local_time: f64,
}

impl SkewWalk {
    pub fn new(params: SkewParams, dt: f64) -> Self {
        Self { beta: params.beta, h: dt.sqrt(), n: 0, local_time: 0.0 }
    }

    pub fn value(&self) -> f64 {
        self.n as f64 * self.h
    }

    /// One lattice step; returns the sign of the move.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> i64 {
        let up_prob = if self.n == 0 {
            self.local_time += self.h;
            0.5 * (1.0 + self.beta)
        } else {
            0.5
        };
        let s = if rng.random::<f64>() < up_prob { 1 } else { -1 };
        self.n += s;
        s
    }
}

/// One skew-walk step from `u`, rounded to the lattice `√dt·ℤ`.
pub fn step_skew<R: Rng + ?Sized>(u: f64, beta: f64, dt: f64, rng: &mut R) -> f64 {
    let h = dt.sqrt();
    let mut w = SkewWalk { beta, h, n: (u / h).round() as i64, local_time: 0.0 };
    w.step(rng);
    w.value()
}

/// Monte Carlo estimate of `P(T < t)` for the exit time `T` of a ball.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HitEstimate {
    pub p: f64,
    /// 95% normal-approximation half-width.
    pub half_width: f64,
    pub hits: u64,
    pub n_paths: u64,
    /// `r² > t` does not hold.
    pub out_of_regime: bool,
}

impl HitEstimate {
    pub fn from_counts(hits: u64, n_paths: u64, out_of_regime: bool) -> Self {
        let p = hits as f64 / n_paths as f64;
        let half_width = 1.96 * (p * (1.0 - p) / n_paths as f64).sqrt();
        Self { p, half_width, hits, n_paths, out_of_regime }
    }
}

/// Checks the preconditions of [`first_hit_mc`].
pub fn first_hit_check(g: &MetricGraph, start: GraphPosition, r: f64, dt: f64) -> Result<(), DiffusionError> {
    g.validate(start).map_err(|e| DiffusionError::InvalidStart(format!("{e}")))?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(DiffusionError::InvalidStep(format!("dt = {dt}")));
    }
    if g.eccentricity(start) < r {
        return Err(DiffusionError::EmptyComplement { radius: r });
    }
    Ok(())
}

/// Whether one path leaves `B(start, r)` before time `t`, observed at step
/// resolution.
pub fn first_hit_path<R: Rng + ?Sized>(
    g: &MetricGraph,
    start: GraphPosition,
    r: f64,
    t: f64,
    dt: f64,
    rng: &mut R,
) -> bool {
    let mut p = start;
    let mut far = false;
    for _ in 0..steps_for(t, dt) {
        // Vertices crossed within the step count too: a leaf at distance r
        // is reached and reflected from in a single step.
        p = step_walsh_bm_observed(g, p, dt, rng, &mut |v, _| {
            far |= g.geodesic_distance(start, GraphPosition::Vertex(v)) >= r;
        });
        if far || g.geodesic_distance(start, p) >= r {
            return true;
        }
    }
    false
}

/// Sequential ensemble estimate of `P(T_{B(start, r)^c} < t)`; path `i` uses
/// stream `i` of `seed`.
pub fn first_hit_mc(
    g: &MetricGraph,
    start: GraphPosition,
    r: f64,
    t: f64,
    dt: f64,
    seed: u64,
    n_paths: u64,
) -> Result<HitEstimate, DiffusionError> {
    if n_paths == 0 {
        return Err(DiffusionError::NoPaths);
    }
    first_hit_check(g, start, r, dt)?;
    let hits = (0..n_paths)
        .filter(|&i| first_hit_path(g, start, r, t, dt, &mut path_stream(seed, i)))
        .count() as u64;
    Ok(HitEstimate::from_counts(hits, n_paths, r * r <= t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric_graph::{fixture, EdgeId, FixtureName, GraphSpec};

    extern crate std;
    use std::vec;
    use std::vec::Vec;

    #[test]
    fn beta_values() {
        assert!((beta_for_degree(3).unwrap() + 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(beta_for_degree(4).unwrap(), -0.5);
        assert!(beta_for_degree(2).is_err());
        let mut prev = 0.0;
        for k in 3..200 {
            let b = beta_for_degree(k).unwrap();
            assert!(b < prev && b > -1.0);
            // (1 - β) / (1 + β) = k - 1
            assert!(((1.0 - b) / (1.0 + b) - (k - 1) as f64).abs() < 1e-9);
            prev = b;
        }
    }

    #[test]
    fn interior_step_is_shift() {
        let f = fixture(FixtureName::Star(3)).unwrap();
        let g = &f.graph;
        let p = GraphPosition::Interior { edge: EdgeId(0), offset: 0.5 };
        let mut rng = path_stream(1, 0);
        let q = walsh_move(g, p, 0.01, &mut rng, &mut |_, _| {});
        assert_eq!(q, GraphPosition::Interior { edge: EdgeId(0), offset: 0.51 });
    }

    #[test]
    fn leaf_reflects() {
        let f = fixture(FixtureName::Star(3)).unwrap();
        let g = &f.graph;
        let e = g.edge_by_label("e1").unwrap();
        let p = GraphPosition::Interior { edge: e, offset: 0.95 };
        let mut rng = path_stream(2, 0);
        let q = walsh_move(g, p, 0.1, &mut rng, &mut |_, _| {});
        match q {
            GraphPosition::Interior { edge, offset } => {
                assert_eq!(edge, e);
                assert!((offset - 0.95).abs() < 1e-12);
            }
            _ => panic!("{q:?}"),
        }
    }

    #[test]
    fn center_branching_is_uniform() {
        let f = fixture(FixtureName::Star(3)).unwrap();
        let g = &f.graph;
        let c = g.vertex_by_label("c").unwrap();
        let mut rng = path_stream(3, 0);
        let mut counts = [0u64; 3];
        let total = 100_000;
        for _ in 0..total {
            let s = pick_stub(g, c, &mut rng);
            counts[s.edge.0] += 1;
        }
        for c in counts {
            assert!((c as f64 / total as f64 - 1.0 / 3.0).abs() < 0.01);
        }
    }

    #[test]
    fn crossings_branch_uniformly() {
        let f = fixture(FixtureName::Star(3)).unwrap();
        let g = &f.graph;
        let c = g.vertex_by_label("c").unwrap();
        let mut rng = path_stream(4, 0);
        let mut counts = [0u64; 3];
        let mut p = GraphPosition::Vertex(c);
        let mut crossings = 0u64;
        while crossings < 100_000 {
            p = step_walsh_bm_observed(g, p, 1e-2, &mut rng, &mut |v, s| {
                if v == c {
                    counts[s.edge.0] += 1;
                    crossings += 1;
                }
            });
        }
        for k in counts {
            assert!((k as f64 / crossings as f64 - 1.0 / 3.0).abs() < 0.01, "{counts:?}");
        }
    }

    /// Kolmogorov–Smirnov distance between edge increments and `N(0, dt)`.
    #[test]
    fn long_edge_increments_are_gaussian() {
        let spec = GraphSpec::new()
            .vertex("a")
            .vertex("b")
            .edge("long", "a", "b", 1000.0);
        let g = MetricGraph::build(&spec).unwrap();
        let dt = 1e-2;
        let mut rng = path_stream(5, 0);
        let mut inc: Vec<f64> = Vec::new();
        let mut p = GraphPosition::Interior { edge: EdgeId(0), offset: 500.0 };
        for _ in 0..10_000 {
            let q = step_walsh_bm(&g, p, dt, &mut rng);
            let (GraphPosition::Interior { offset: a, .. }, GraphPosition::Interior { offset: b, .. }) = (p, q) else {
                panic!("left the edge");
            };
            inc.push((b - a) / dt.sqrt());
            p = q;
        }
        inc.sort_by(f64::total_cmp);
        let n = inc.len() as f64;
        let ks = inc
            .iter()
            .enumerate()
            .map(|(i, &z)| {
                let cdf = 0.5 * libm::erfc(-z / core::f64::consts::SQRT_2);
                (cdf - i as f64 / n).abs().max((cdf - (i + 1) as f64 / n).abs())
            })
            .fold(0.0, f64::max);
        assert!(ks < 0.02, "ks = {ks}");
    }

    #[test]
    fn vertex_occupation_negligible() {
        let f = fixture(FixtureName::K4).unwrap();
        let g = &f.graph;
        let dt = 1e-4;
        let mut rng = path_stream(6, 0);
        let mut p = GraphPosition::Interior { edge: EdgeId(0), offset: 0.5 };
        let mut at_vertex = 0;
        let n = 100_000;
        for _ in 0..n {
            p = step_walsh_bm(g, p, dt, &mut rng);
            at_vertex += p.is_vertex() as usize;
        }
        assert!((at_vertex as f64 / n as f64) < 10.0 * dt.sqrt() / g.r0());
    }

    #[test]
    fn skew_walk_limits() {
        let mut rng = path_stream(7, 0);
        let mut w = SkewWalk::new(SkewParams::new(1.0).unwrap(), 1e-4);
        for _ in 0..10_000 {
            w.step(&mut rng);
            assert!(w.n >= 0);
        }
        assert!(w.local_time > 0.0);
        assert!(SkewParams::new(1.5).is_err());
        let u = step_skew(0.0, 1.0, 1e-4, &mut rng);
        assert!((u - 0.01).abs() < 1e-15);
    }

    #[test]
    fn skew_walk_positive_fraction() {
        let beta = beta_for_degree(3).unwrap();
        let dt = 1e-3;
        let n_paths = 10_000;
        let mut positive = 0;
        for i in 0..n_paths {
            let mut rng = path_stream(8, i);
            let mut w = SkewWalk::new(SkewParams::new(beta).unwrap(), dt);
            for _ in 0..steps_for(1.0, dt) {
                w.step(&mut rng);
            }
            positive += (w.n > 0) as u32;
        }
        let p = positive as f64 / n_paths as f64;
        assert!((p - 1.0 / 3.0).abs() < 0.02, "{p}");
    }

    #[test]
    fn skew_branch_directions_equiprobable() {
        // One positive label plus k - 1 negative labels chosen per excursion.
        let k = 4;
        let beta = beta_for_degree(k).unwrap();
        let mut rng = path_stream(9, 0);
        let mut w = SkewWalk::new(SkewParams::new(beta).unwrap(), 1e-4);
        let mut counts = vec![0u64; k];
        let mut excursions = 0u64;
        // Excursion starts only; the walk is restarted at 0 each time.
        while excursions < 100_000 {
            w.n = 0;
            let s = w.step(&mut rng);
            let label = if s > 0 { 0 } else { 1 + rng.random_range(0..k - 1) };
            counts[label] += 1;
            excursions += 1;
        }
        for c in counts {
            assert!((c as f64 / excursions as f64 - 1.0 / k as f64).abs() < 0.01);
        }
    }

    #[test]
    fn first_hit_errors_and_limits() {
        let f = fixture(FixtureName::Star(3)).unwrap();
        let g = &f.graph;
        let c = f.marker("c").unwrap();
        assert_eq!(
            first_hit_mc(g, c, 2.0, 0.5, 1e-4, 1, 10).unwrap_err(),
            DiffusionError::EmptyComplement { radius: 2.0 }
        );
        assert_eq!(first_hit_mc(g, c, 0.5, 0.5, 1e-4, 1, 0).unwrap_err(), DiffusionError::NoPaths);
        let est = first_hit_mc(g, c, 1.0, 1e-6, 1e-6, 1, 200).unwrap();
        assert_eq!(est.p, 0.0);
        assert!(!est.out_of_regime);
        let flagged = first_hit_mc(g, c, 0.1, 0.5, 1e-4, 1, 2).unwrap();
        assert!(flagged.out_of_regime);
    }

    #[test]
    fn first_hit_monotone() {
        let f = fixture(FixtureName::Star(3)).unwrap();
        let g = &f.graph;
        let start = f.marker("l1").unwrap();
        let dt = 1e-3;
        let grid_t = [0.1, 0.2, 0.4];
        let grid_r = [0.5, 1.0, 1.5];
        for &r in &grid_r {
            let mut prev: Option<HitEstimate> = None;
            for &t in &grid_t {
                let e = first_hit_mc(g, start, r, t, dt, 11, 2000).unwrap();
                if let Some(p) = prev {
                    assert!(e.p + 2.0 * (e.half_width + p.half_width) >= p.p);
                }
                prev = Some(e);
            }
        }
        for &t in &grid_t {
            let mut prev: Option<HitEstimate> = None;
            for &r in &grid_r {
                let e = first_hit_mc(g, start, r, t, dt, 12, 2000).unwrap();
                if let Some(p) = prev {
                    assert!(e.p <= p.p + 2.0 * (e.half_width + p.half_width));
                }
                prev = Some(e);
            }
        }
    }

    #[test]
    fn params_validation() {
        let f = fixture(FixtureName::K4).unwrap();
        assert!(DiffusionParams::new(1e-4, 1.0).validate(&f.graph).is_ok());
        assert!(DiffusionParams::new(0.1, 1.0).validate(&f.graph).is_err());
        assert!(DiffusionParams::new(-1.0, 1.0).validate(&f.graph).is_err());
        assert_eq!(DiffusionParams::new(1e-4, 1.0).steps(), 10_000);
    }
}
