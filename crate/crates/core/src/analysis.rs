// Copyright 2026 The Shy Coupling Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

//! Analytic exit-probability bounds, shyness statistics over ensembles,
//! realized quadratic-variation diagnostics, and backbone projections.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{LN_2, PI};

use thiserror::Error;

use crate::metric_graph::{BackboneShape, EdgeRole, Fixture, GraphPosition};
use crate::reflected_coupling::PairPath;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("ensemble is empty")]
    EmptyEnsemble,
    #[error("path {path} has {got} checkpoints, expected {expected}")]
    MismatchedHorizons { path: usize, got: usize, expected: usize },
    #[error("fixture {0} has no backbone marking")]
    Unmarked(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// `∫₁^∞ exp(-u²/2) du` by composite Simpson quadrature on `[1, 13]`; the
/// neglected tail is below `1e-37`.
pub fn c0() -> f64 {
    simpson(|u| (-0.5 * u * u).exp(), 1.0, 13.0, 24_000)
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// Largest horizon with `1 - 2 exp(-r0² / (2 t0)) ≥ 1/2`.
pub fn t0(r0: f64) -> f64 {
    r0 * r0 / (2.0 * 2.0 * LN_2)
}

/// Lower and upper bounds on an exit probability.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundPair {
    pub lower: f64,
    /// Upper bound clipped to 1.
    pub upper: f64,
    /// Natural log of the unclipped upper bound.
    pub log_upper: f64,
    /// `r² > t`.
    pub r2_gt_t: bool,
    /// `t < t0(r0)`; always `true` for the Gaussian sandwich.
    pub t_lt_t0: bool,
}

impl BoundPair {
    pub fn in_regime(&self) -> bool {
        self.r2_gt_t && self.t_lt_t0
    }

    pub fn contains(&self, p: f64) -> bool {
        self.lower <= p && p <= self.upper
    }
}

/// Exit-probability bounds for graph Brownian motion leaving `B(x, r)`
/// before `t`, with `n = ⌊r/r0⌋`:
/// lower `(c0/m0 · √(t/2π) / (2r))ⁿ · exp(-r²/2t)`,
/// upper `(m0ⁿ)! · √(2t/π) / r · exp(-r²/2t)`.
pub fn lemma34_bounds(t: f64, r: f64, r0: f64, m0: usize) -> Result<BoundPair, AnalysisError> {
    if !(t > 0.0 && r > 0.0 && r0 > 0.0 && m0 >= 1) {
        return Err(AnalysisError::InvalidArgument(format!("t={t}, r={r}, r0={r0}, m0={m0}")));
    }
    let n = (r / r0).floor();
    let gauss = -r * r / (2.0 * t);
    let base = c0() / m0 as f64 * (t / (2.0 * PI)).sqrt() / (2.0 * r);
    let lower = (n * base.ln() + gauss).exp().min(1.0);
    let count = (m0 as f64).powf(n);
    let log_upper = libm::lgamma(count + 1.0) + ((2.0 * t / PI).sqrt() / r).ln() + gauss;
    Ok(BoundPair {
        lower,
        upper: log_upper.exp().min(1.0),
        log_upper,
        r2_gt_t: r * r > t,
        t_lt_t0: t < t0(r0),
    })
}

/// Sandwich `√(t/2π)/r · e^{-r²/2t} ≤ P(T_r < t) ≤ √(2t/π)/r · e^{-r²/2t}`
/// for one-dimensional Brownian motion hitting level `r`.
pub fn gaussian_exit_bounds(t: f64, r: f64) -> Result<BoundPair, AnalysisError> {
    if !(t > 0.0 && r > 0.0) {
        return Err(AnalysisError::InvalidArgument(format!("t={t}, r={r}")));
    }
    let g = (-r * r / (2.0 * t)).exp() / r;
    let upper = (2.0 * t / PI).sqrt() * g;
    Ok(BoundPair {
        lower: (t / (2.0 * PI)).sqrt() * g,
        upper: upper.min(1.0),
        log_upper: upper.ln(),
        r2_gt_t: r * r >= t,
        t_lt_t0: true,
    })
}

/// Exact hitting probability `2(1 - Φ(r/√t)) = erfc(r / √(2t))`.
pub fn gaussian_exit_exact(t: f64, r: f64) -> f64 {
    libm::erfc(r / (2.0 * t).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    ShyConsistent,
    NonShyConsistent,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::ShyConsistent => "shy-consistent",
            Verdict::NonShyConsistent => "non-shy-consistent",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// Empirical survival of the running minimum distance.
#[derive(Clone, Debug, PartialEq)]
pub struct ShynessReport {
    pub checkpoints: Vec<f64>,
    pub eps: Vec<f64>,
    /// `survival[c][e]` estimates `P(min over [0, checkpoints[c]] > eps[e])`.
    pub survival: Vec<Vec<f64>>,
    /// 95% half-widths matching `survival`.
    pub half_width: Vec<Vec<f64>>,
    /// 10%, 50% and 90% quantiles of the running minimum per checkpoint.
    pub min_quantiles: Vec<[f64; 3]>,
    /// Running minimum of each path at the final checkpoint.
    pub final_min: Vec<f64>,
    pub overall_min: f64,
    pub verdict: Verdict,
}

impl ShynessReport {
    pub fn median_at(&self, c: usize) -> f64 {
        self.min_quantiles[c][1]
    }

    /// Fraction of paths whose final running minimum lies below `level`.
    pub fn fraction_below(&self, level: f64) -> f64 {
        self.final_min.iter().filter(|&&m| m < level).count() as f64 / self.final_min.len() as f64
    }
}

/// Linear-interpolated quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Survival curves and verdict from per-path running minima sampled at
/// common checkpoints (`minima[path][checkpoint]`).
pub fn shyness_statistics(
    checkpoints: &[f64],
    minima: &[Vec<f64>],
    eps: &[f64],
) -> Result<ShynessReport, AnalysisError> {
    if minima.is_empty() || checkpoints.is_empty() {
        return Err(AnalysisError::EmptyEnsemble);
    }
    for (i, m) in minima.iter().enumerate() {
        if m.len() != checkpoints.len() {
            return Err(AnalysisError::MismatchedHorizons { path: i, got: m.len(), expected: checkpoints.len() });
        }
    }
    let n = minima.len() as f64;
    let mut survival = Vec::with_capacity(checkpoints.len());
    let mut half_width: Vec<Vec<f64>> = Vec::with_capacity(checkpoints.len());
    let mut min_quantiles = Vec::with_capacity(checkpoints.len());
    for c in 0..checkpoints.len() {
        let mut col: Vec<f64> = minima.iter().map(|m| m[c]).collect();
        col.sort_by(f64::total_cmp);
        min_quantiles.push([quantile(&col, 0.1), quantile(&col, 0.5), quantile(&col, 0.9)]);
        let row: Vec<f64> = eps.iter().map(|&e| minima.iter().filter(|m| m[c] > e).count() as f64 / n).collect();
        half_width.push(row.iter().map(|&p| 1.96 * (p * (1.0 - p) / n).sqrt()).collect());
        survival.push(row);
    }
    let last = checkpoints.len() - 1;
    let final_min: Vec<f64> = minima.iter().map(|m| m[last]).collect();
    let overall_min = final_min.iter().copied().fold(f64::INFINITY, f64::min);

    let verdict = if min_quantiles[last][1] < 0.5 * min_quantiles[0][1] {
        Verdict::NonShyConsistent
    } else {
        let mid = last / 2;
        let plateau = (0..eps.len()).any(|e| {
            let s_end = survival[last][e];
            let bounded = s_end - half_width[last][e] > 0.0;
            let flat = survival[mid][e] - s_end <= 2.0 * (half_width[mid][e] + half_width[last][e]) + 1e-12;
            bounded && flat
        });
        if plateau {
            Verdict::ShyConsistent
        } else {
            Verdict::Inconclusive
        }
    };
    Ok(ShynessReport { checkpoints: checkpoints.to_vec(), eps: eps.to_vec(), survival, half_width, min_quantiles, final_min, overall_min, verdict })
}

/// Running realized quadratic variations of `X - Y` and of `|X - Y|²`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct VariationAccumulator {
    /// `Σ |dB_x - dB_y|²`.
    pub qv_diff: f64,
    /// `Σ (Δ|X - Y|²)²`.
    pub qv_sq: f64,
    pub steps: u64,
    pub phi_violations: u64,
}

impl VariationAccumulator {
    /// Adds one step with driver increments `d = dB_x - dB_y`, squared
    /// distances before and after, and the optional threshold `phi(dist)·dt`.
    pub fn push(&mut self, d_norm2: f64, r_before: f64, r_after: f64, phi_dt: Option<f64>) {
        self.qv_diff += d_norm2;
        let dr = r_after - r_before;
        self.qv_sq += dr * dr;
        self.steps += 1;
        if let Some(th) = phi_dt {
            if dr * dr < th {
                self.phi_violations += 1;
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VariationDiagnostics {
    pub t: Vec<f64>,
    /// Realized `⟨X - Y, X - Y⟩_t` from driver increments.
    pub qv_diff: Vec<f64>,
    /// Realized `⟨|X - Y|²⟩_t`.
    pub qv_sq: Vec<f64>,
    /// Log-log least-squares growth exponents, when enough positive points.
    pub exponent_diff: Option<f64>,
    pub exponent_sq: Option<f64>,
    /// Final values divided by the horizon.
    pub rate_diff: f64,
    pub rate_sq: f64,
    pub phi_violation_fraction: Option<f64>,
}

/// Least-squares slope of `ln y` against `ln x` over positive pairs.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        x.iter().zip(y).filter(|(a, b)| **a > 0.0 && **b > 0.0).map(|(a, b)| (a.ln(), b.ln())).collect();
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Realized variations of a stored path, sampled at `n_points` evenly
/// spaced steps; `phi` turns on the violation count.
pub fn variation_diagnostics(
    path: &PairPath,
    phi: Option<&dyn Fn(f64) -> f64>,
    n_points: usize,
) -> Result<VariationDiagnostics, AnalysisError> {
    let steps = path.dbx.len();
    if steps == 0 || path.len() != steps + 1 {
        return Err(AnalysisError::InvalidArgument(String::from("path has no retained increments")));
    }
    let stride = (steps / n_points.max(1)).max(1);
    let mut acc = VariationAccumulator::default();
    let (mut t, mut qd, mut qs) = (Vec::new(), Vec::new(), Vec::new());
    for i in 0..steps {
        let dt = path.t[i + 1] - path.t[i];
        let d = path.dbx[i] - path.dby[i];
        let r0 = path.dist[i] * path.dist[i];
        let r1 = path.dist[i + 1] * path.dist[i + 1];
        acc.push(d.norm2(), r0, r1, phi.map(|f| f(path.dist[i]) * dt));
        if (i + 1) % stride == 0 || i + 1 == steps {
            t.push(path.t[i + 1]);
            qd.push(acc.qv_diff);
            qs.push(acc.qv_sq);
        }
    }
    let horizon = path.t[steps] - path.t[0];
    Ok(VariationDiagnostics {
        exponent_diff: loglog_slope(&t, &qd),
        exponent_sq: loglog_slope(&t, &qs),
        rate_diff: acc.qv_diff / horizon,
        rate_sq: acc.qv_sq / horizon,
        phi_violation_fraction: phi.map(|_| acc.phi_violations as f64 / acc.steps as f64),
        t,
        qv_diff: qd,
        qv_sq: qs,
    })
}

/// Backbone coordinate map of a marked fixture.
#[derive(Clone, Debug)]
pub struct BackboneProjector<'f> {
    fixture: &'f Fixture,
    vertex_coord: Vec<f64>,
    circumference: Option<f64>,
}

impl<'f> BackboneProjector<'f> {
    pub fn new(fixture: &'f Fixture) -> Result<Self, AnalysisError> {
        let bb = fixture
            .backbone
            .as_ref()
            .ok_or_else(|| AnalysisError::Unmarked(format!("{}", fixture.name)))?;
        let g = &fixture.graph;
        let mut coord = vec![f64::NAN; g.vertex_count()];
        for (e, role) in g.edges().iter().zip(&bb.roles) {
            if let EdgeRole::Backbone { at_u, at_v } = *role {
                coord[e.u.0] = at_u;
                coord[e.v.0] = at_v;
            }
        }
        for (e, role) in g.edges().iter().zip(&bb.roles) {
            if let EdgeRole::Side { attach } = *role {
                for v in [e.u.0, e.v.0] {
                    if coord[v].is_nan() {
                        coord[v] = attach;
                    }
                }
            }
        }
        let circumference = match bb.shape {
            BackboneShape::Line => None,
            BackboneShape::Loop { circumference } => Some(circumference),
        };
        if let Some(c) = circumference {
            // The loop closes: the vertex at coordinate C is the one at 0.
            for x in coord.iter_mut() {
                *x = x.rem_euclid(c);
            }
        }
        Ok(Self { fixture, vertex_coord: coord, circumference })
    }

    /// Loop length, `None` for a line backbone.
    pub fn circumference(&self) -> Option<f64> {
        self.circumference
    }

    /// Backbone coordinate of one point (in `[0, C)` on a loop).
    pub fn coordinate(&self, p: GraphPosition) -> f64 {
        let g = &self.fixture.graph;
        let roles = &self.fixture.backbone.as_ref().expect("checked in new").roles;
        let q = match p {
            GraphPosition::Vertex(v) => self.vertex_coord[v.0],
            GraphPosition::Interior { edge, offset } => match roles[edge.0] {
                EdgeRole::Backbone { at_u, at_v } => at_u + (at_v - at_u) * offset / g.edge(edge).length,
                EdgeRole::Side { attach } => attach,
            },
        };
        match self.circumference {
            Some(c) => q.rem_euclid(c),
            None => q,
        }
    }

    /// Projected series: the coordinate on a line backbone, the unwound angle
    /// `2π·(lifted arclength)/C` on a loop.
    pub fn project(&self, path: &[GraphPosition]) -> Vec<f64> {
        match self.circumference {
            None => path.iter().map(|&p| self.coordinate(p)).collect(),
            Some(c) => {
                let mut out = Vec::with_capacity(path.len());
                let mut lifted = 0.0;
                let mut prev: Option<f64> = None;
                for &p in path {
                    let q = self.coordinate(p);
                    lifted = match prev {
                        None => q,
                        Some(pq) => {
                            let mut d = q - pq;
                            if d > c / 2.0 {
                                d -= c;
                            } else if d <= -c / 2.0 {
                                d += c;
                            }
                            lifted + d
                        }
                    };
                    prev = Some(q);
                    out.push(2.0 * PI * lifted / c);
                }
                out
            }
        }
    }
}

/// [`BackboneProjector::project`] for a one-off path.
pub fn backbone_projection(fixture: &Fixture, path: &[GraphPosition]) -> Result<Vec<f64>, AnalysisError> {
    Ok(BackboneProjector::new(fixture)?.project(path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex_geometry::{ConvexDomain, Point2};
    use crate::graph_diffusion::step_walsh_bm;
    use crate::metric_graph::{fixture, EdgeId, FixtureName};
    use crate::reflected_coupling::{simulate_pair, DriverKind};
    use crate::rng::path_stream;

    extern crate std;

    #[test]
    fn c0_matches_erfc() {
        let oracle = (PI / 2.0).sqrt() * libm::erfc(1.0 / core::f64::consts::SQRT_2);
        assert!((c0() - oracle).abs() < 1e-12);
        assert!((c0() - 0.39769).abs() < 1e-5);
    }

    #[test]
    fn t0_value() {
        assert!((t0(1.0) - 1.0 / (2.0 * 4f64.ln())).abs() < 1e-15);
        assert!((t0(1.0) - 0.3607).abs() < 1e-4);
        assert!((1.0 - 2.0 * (-1.0 / (2.0 * t0(1.0))).exp() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn lemma34_star_values() {
        let b = lemma34_bounds(0.3, 2.0, 1.0, 3).unwrap();
        // Closed-form evaluation with n = 2.
        let c0_oracle = (PI / 2.0).sqrt() * libm::erfc(1.0 / core::f64::consts::SQRT_2);
        let base = c0_oracle / 3.0 * (0.3 / (2.0 * PI)).sqrt() / 4.0;
        let expect = base * base * (-4.0f64 / 0.6).exp();
        assert!((b.lower - expect).abs() / expect < 1e-5, "{} {}", b.lower, expect);
        assert_eq!(b.upper, 1.0);
        assert!(b.log_upper > 0.0);
        assert!(b.in_regime());
    }

    #[test]
    fn lemma34_grid_is_ordered() {
        for &r0 in &[0.5, 1.0] {
            for m0 in 1..6 {
                for i in 1..20 {
                    let t = t0(r0) * i as f64 / 20.0;
                    for j in 1..20 {
                        let r = r0 * j as f64 * 0.3;
                        if r * r <= t || r < r0 {
                            continue;
                        }
                        let b = lemma34_bounds(t, r, r0, m0).unwrap();
                        assert!(b.lower <= b.upper, "t={t} r={r} m0={m0}");
                    }
                }
            }
        }
    }

    #[test]
    fn gaussian_sandwich() {
        let b = gaussian_exit_bounds(1.0, 2.0).unwrap();
        assert!(b.contains(gaussian_exit_exact(1.0, 2.0)));
        let b = gaussian_exit_bounds(1.0, 1.0).unwrap();
        assert!((gaussian_exit_exact(1.0, 1.0) - 0.3173).abs() < 1e-4);
        assert!(b.contains(gaussian_exit_exact(1.0, 1.0)));
        let far = gaussian_exit_bounds(1e-3, 5.0).unwrap();
        assert!(far.upper < 1e-300 && gaussian_exit_exact(1e-3, 5.0) < 1e-300);
        assert!(!gaussian_exit_bounds(4.0, 1.0).unwrap().r2_gt_t);
    }

    #[test]
    fn shyness_verdicts() {
        let cps = [1.0, 2.0, 3.0, 4.0];
        let shy: Vec<Vec<f64>> = (0..100).map(|i| vec![0.5, 0.4, 0.4, 0.4 - i as f64 * 1e-4]).collect();
        let r = shyness_statistics(&cps, &shy, &[0.1, 0.3]).unwrap();
        assert_eq!(r.verdict, Verdict::ShyConsistent);
        assert_eq!(r.survival[3][0], 1.0);
        let decaying: Vec<Vec<f64>> = (0..100).map(|_| vec![0.5, 0.3, 0.1, 0.01]).collect();
        let r = shyness_statistics(&cps, &decaying, &[0.1, 0.3]).unwrap();
        assert_eq!(r.verdict, Verdict::NonShyConsistent);
        assert_eq!(r.fraction_below(0.1), 1.0);
        assert!(matches!(
            shyness_statistics(&cps, &[vec![1.0; 3]], &[0.1]),
            Err(AnalysisError::MismatchedHorizons { .. })
        ));
        assert_eq!(shyness_statistics(&cps, &[], &[0.1]), Err(AnalysisError::EmptyEnsemble));
    }

    #[test]
    fn survival_monotone() {
        let mut rng = path_stream(41, 0);
        use rand::Rng;
        let cps = [1.0, 2.0, 3.0];
        let minima: Vec<Vec<f64>> = (0..300)
            .map(|_| {
                let a: f64 = rng.random();
                let b = a * rng.random::<f64>();
                let c = b * rng.random::<f64>();
                vec![a, b, c]
            })
            .collect();
        let eps = [0.0, 0.1, 0.2, 0.5, 0.9];
        let r = shyness_statistics(&cps, &minima, &eps).unwrap();
        for c in 0..3 {
            for e in 1..eps.len() {
                assert!(r.survival[c][e] <= r.survival[c][e - 1]);
            }
            if c > 0 {
                for e in 0..eps.len() {
                    assert!(r.survival[c][e] <= r.survival[c - 1][e]);
                }
                assert!(r.min_quantiles[c][1] <= r.min_quantiles[c - 1][1]);
            }
        }
    }

    #[test]
    fn variation_synchronous_and_independent() {
        let d = ConvexDomain::disc(Point2::ZERO, 1e6).unwrap();
        let mut rng = path_stream(42, 0);
        let p = simulate_pair(&d, DriverKind::Synchronous, Point2::ZERO, Point2::new(1.0, 0.0), 1e-3, 5.0, &mut rng).unwrap();
        let v = variation_diagnostics(&p, None, 50).unwrap();
        assert_eq!(*v.qv_diff.last().unwrap(), 0.0);
        let p = simulate_pair(&d, DriverKind::Independent, Point2::ZERO, Point2::new(1.0, 0.0), 1e-3, 50.0, &mut rng).unwrap();
        let v = variation_diagnostics(&p, Some(&|_| 0.0), 50).unwrap();
        assert!((v.rate_diff / 4.0 - 1.0).abs() < 0.05, "{}", v.rate_diff);
        assert!(v.qv_diff.windows(2).all(|w| w[1] >= w[0]));
        assert!(v.qv_sq.windows(2).all(|w| w[1] >= w[0]));
        assert!((v.exponent_diff.unwrap() - 1.0).abs() < 0.05);
        assert_eq!(v.phi_violation_fraction, Some(0.0));
    }

    #[test]
    fn mirror_rate_is_four_while_interior() {
        let d = ConvexDomain::disc(Point2::ZERO, 1e6).unwrap();
        let mut rng = path_stream(43, 0);
        let p = simulate_pair(&d, DriverKind::Mirror, Point2::new(-500.0, 0.0), Point2::new(500.0, 0.0), 1e-3, 50.0, &mut rng)
            .unwrap();
        let v = variation_diagnostics(&p, None, 50).unwrap();
        assert!((v.rate_diff / 4.0 - 1.0).abs() < 0.05, "{}", v.rate_diff);
    }

    #[test]
    fn backbone_line_projection() {
        let f = fixture(FixtureName::Fig34Window).unwrap();
        let g = &f.graph;
        let bb2 = g.edge_by_label("bb2").unwrap();
        let path = [
            GraphPosition::Interior { edge: bb2, offset: 0.25 },
            GraphPosition::Interior { edge: bb2, offset: 0.75 },
        ];
        let q = backbone_projection(&f, &path).unwrap();
        assert_eq!(q, vec![2.25, 2.75]);
        let side = g.edge_by_label("side2a").unwrap();
        let t = f.marker("t").unwrap();
        let excursion =
            [f.marker("b2").unwrap(), GraphPosition::Interior { edge: side, offset: 0.3 }, t, f.marker("t1").unwrap()];
        let q = backbone_projection(&f, &excursion).unwrap();
        assert!(q.iter().all(|&v| v == 2.0));
        assert!(backbone_projection(&fixture(FixtureName::K4).unwrap(), &path).is_err());
    }

    #[test]
    fn loop_projection_unwinds() {
        let f = fixture(FixtureName::Fig35).unwrap();
        let g = &f.graph;
        let arcs = ["arc01", "arc12", "arc20"].map(|l| g.edge_by_label(l).unwrap());
        let mut path = Vec::new();
        for _ in 0..2 {
            for &e in &arcs {
                let len = g.edge(e).length;
                for k in 0..10 {
                    path.push(GraphPosition::Interior { edge: e, offset: len * (k as f64 + 0.5) / 10.0 });
                }
            }
        }
        let theta = backbone_projection(&f, &path).unwrap();
        assert!(theta.windows(2).all(|w| w[1] > w[0]));
        let total = theta.last().unwrap() - theta[0];
        assert!((total - 4.0 * PI + 2.0 * PI * 0.15 / 4.5).abs() < 1e-9, "{total}");
    }

    #[test]
    fn backbone_difference_is_martingale() {
        let f = fixture(FixtureName::Fig34Window).unwrap();
        let g = &f.graph;
        let proj = BackboneProjector::new(&f).unwrap();
        let dt = 1e-5;
        let mut rng = path_stream(44, 0);
        let mut x = GraphPosition::Interior { edge: g.edge_by_label("bb2").unwrap(), offset: 0.5 };
        let mut y = GraphPosition::Interior { edge: g.edge_by_label("bb2").unwrap(), offset: 0.4 };
        let mut incs = Vec::with_capacity(100_000);
        let mut z = proj.coordinate(x) - proj.coordinate(y);
        for _ in 0..100_000 {
            x = step_walsh_bm(g, x, dt, &mut rng);
            y = step_walsh_bm(g, y, dt, &mut rng);
            let z1 = proj.coordinate(x) - proj.coordinate(y);
            incs.push(z1 - z);
            z = z1;
        }
        let n = incs.len() as f64;
        let mean = incs.iter().sum::<f64>() / n;
        let var = incs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!(mean.abs() < 3.0 * (var / n).sqrt());
        let _ = EdgeId(0);
    }
}
