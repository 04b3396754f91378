// Copyright 2026 The Shy Coupling Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

//! Seeded ensemble execution. Path `i` always draws from stream `i` of the
//! seed, paths run on a work pool, and results are folded in path order, so
//! the worker count never changes the report.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use shy_core::analysis::{
    lemma34_bounds, loglog_slope, shyness_statistics, BackboneProjector, VariationAccumulator,
};
use shy_core::graph_couplings::{CouplingEvents, GraphCoupler, GraphCouplingKind};
use shy_core::graph_diffusion::{first_hit_path, steps_for, HitEstimate};
use shy_core::metric_graph::Fixture;
use shy_core::reflected_coupling::{initial_state, simulate_pair_observed, DriverKind, PairStep, CSV_HEADER};
use shy_core::{path_stream, ConvexDomain, GraphIsometry, GraphPosition, MetricGraph, Point2};

use crate::config::{DomainSpec, ExperimentConfig, Prepared};
use crate::error::HarnessError;
use crate::report::{write_outputs, BoundsJson, Check, RunReport, Series, ShynessJson, Timing, VariationJson, SCHEMA};

/// Number of checkpoints at which running minima are recorded.
pub const CHECKPOINTS: usize = 10;
/// Upper bound on rows per CSV series.
const CSV_ROWS: usize = 10_000;

pub struct RunOutput {
    pub report: RunReport,
    pub timing: Timing,
    pub series: Vec<Series>,
}

/// Step indices `⌈n·k/10⌉`, `k = 1..=10`.
fn checkpoint_steps(n: usize) -> Vec<usize> {
    (1..=CHECKPOINTS).map(|k| (n * k).div_ceil(CHECKPOINTS)).collect()
}

fn check(name: &str, value: f64, threshold: f64, pass: bool) -> Check {
    Check { name: name.to_string(), value, threshold, pass }
}

/// Runs a config end to end and writes outputs when `cfg.out` is set.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput, HarnessError> {
    let prepared = cfg.prepare()?;
    let workers = cfg.workers.unwrap_or_else(rayon::current_num_threads);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build().map_err(HarnessError::runtime)?;
    let started = Instant::now();
    let n = steps_for(cfg.t, cfg.dt);
    let info = cfg.info()?;
    let mut report = RunReport {
        schema: SCHEMA,
        scenario: cfg.scenario.clone(),
        anchor: info.anchor.to_string(),
        config: cfg.clone(),
        steps_per_path: n as u64,
        shyness: None,
        bounds: None,
        variation: None,
        metrics: BTreeMap::new(),
        checks: Vec::new(),
    };
    let series = pool.install(|| match &prepared {
        Prepared::GraphPair { graph, fixture, kind, isometry, x, y } => {
            run_graph_pair(cfg, graph, fixture.as_ref(), *kind, isometry.clone(), *x, *y, n, &mut report)
        }
        Prepared::PlanarPair { domain, kind, x0, y0 } => run_planar_pair(cfg, domain, *kind, *x0, *y0, n, &mut report),
        Prepared::FirstHit { graph, start, r } => run_first_hit(cfg, graph, *start, *r, &mut report).map(|_| Vec::new()),
    })?;
    let wall = started.elapsed().as_secs_f64();
    let total_steps = n as u64 * cfg.paths;
    let timing = Timing {
        wall_seconds: wall,
        total_steps,
        steps_per_second: if wall > 0.0 { total_steps as f64 / wall } else { 0.0 },
        workers,
    };
    if let Some(dir) = &cfg.out {
        write_outputs(dir, &report, &timing, &series)?;
    }
    Ok(RunOutput { report, timing, series })
}

fn default_eps(cfg: &ExperimentConfig, r0: Option<f64>) -> Vec<f64> {
    if !cfg.eps.is_empty() {
        return cfg.eps.clone();
    }
    match (cfg.scenario.as_str(), r0) {
        ("thm31_k4", Some(r0)) => vec![r0 / 4.0 - 5.0 * cfg.dt.sqrt(), 0.1, 0.2],
        _ => vec![0.01, 0.05, 0.1, 0.2],
    }
}

fn shyness(
    cfg: &ExperimentConfig,
    n: usize,
    minima: &[Vec<f64>],
    eps: &[f64],
    report: &mut RunReport,
) -> Result<shy_core::analysis::ShynessReport, HarnessError> {
    let times: Vec<f64> = checkpoint_steps(n).iter().map(|&k| k as f64 * cfg.dt).collect();
    let s = shyness_statistics(&times, minima, eps).map_err(HarnessError::runtime)?;
    report.shyness = Some(ShynessJson::from(&s));
    Ok(s)
}

fn position_label(g: &MetricGraph, p: GraphPosition) -> String {
    match p {
        GraphPosition::Vertex(v) => g.vertex_label(v).to_string(),
        GraphPosition::Interior { edge, offset } => format!("{}@{offset}", g.edge(edge).label),
    }
}

/// Streaming backbone coordinate, unwound on loops.
struct Lift {
    prev: f64,
    lifted: f64,
}

impl Lift {
    fn new(q: f64) -> Self {
        Self { prev: q, lifted: q }
    }

    fn push(&mut self, q: f64, circumference: Option<f64>) -> f64 {
        let mut d = q - self.prev;
        if let Some(c) = circumference {
            if d > c / 2.0 {
                d -= c;
            } else if d <= -c / 2.0 {
                d += c;
            }
        }
        self.prev = q;
        self.lifted += d;
        match circumference {
            Some(c) => 2.0 * std::f64::consts::PI * self.lifted / c,
            None => self.lifted,
        }
    }
}

struct GraphPathOut {
    minima: Vec<f64>,
    sup_dev: f64,
    branch: Vec<u64>,
    events: CouplingEvents,
    /// `(Σ dZ, Σ dZ², count, final Z)` of the projected difference.
    proj: Option<(f64, f64, u64, f64)>,
    series: Option<Series>,
}

#[allow(clippy::too_many_arguments)]
fn graph_path(
    cfg: &ExperimentConfig,
    coupler: &GraphCoupler<'_>,
    projector: Option<&BackboneProjector<'_>>,
    track_branches: bool,
    x: GraphPosition,
    y: GraphPosition,
    n: usize,
    i: u64,
) -> Result<GraphPathOut, HarnessError> {
    let g = coupler.graph;
    let mut rng = path_stream(cfg.seed, i);
    let mut st = coupler.init(x, y).map_err(HarnessError::runtime)?;
    let d0 = g.geodesic_distance(st.x, st.y);
    let cps = checkpoint_steps(n);
    let mut minima = Vec::with_capacity(cps.len());
    let mut running = d0;
    let mut sup_dev = 0.0f64;
    let mut next = 0;
    let mut branch = if track_branches { vec![0u64; g.vertex_count() * g.edge_count()] } else { Vec::new() };
    let mut last_edge = match st.x {
        GraphPosition::Interior { edge, .. } => Some(edge),
        GraphPosition::Vertex(_) => None,
    };
    let circ = projector.and_then(|p| p.circumference());
    let mut lifts = projector.map(|p| (Lift::new(p.coordinate(st.x)), Lift::new(p.coordinate(st.y))));
    let mut z_prev = lifts.as_ref().map(|(a, b)| {
        let scale = circ.map_or(1.0, |c| 2.0 * std::f64::consts::PI / c);
        (a.lifted - b.lifted) * scale
    });
    let mut proj = (0.0, 0.0, 0u64);
    let mut series = (i < cfg.csv_paths).then(|| Series::new("t,x,y,dist"));
    let every = (n / CSV_ROWS).max(1);
    if let Some(s) = series.as_mut() {
        s.rows.push(format!("0,{},{},{d0}", position_label(g, st.x), position_label(g, st.y)));
    }
    while cps.get(next) == Some(&0) {
        minima.push(running);
        next += 1;
    }
    for step in 1..=n {
        coupler.step(&mut st, &mut rng);
        let d = g.geodesic_distance(st.x, st.y);
        running = running.min(d);
        sup_dev = sup_dev.max((d - d0).abs());
        if track_branches {
            if let GraphPosition::Interior { edge, .. } = st.x {
                if let Some(prev) = last_edge.filter(|&e| e != edge) {
                    let (a, b) = (g.edge(prev), g.edge(edge));
                    if let Some(v) = [b.u, b.v].into_iter().find(|&v| v == a.u || v == a.v) {
                        branch[v.0 * g.edge_count() + edge.0] += 1;
                    }
                }
                last_edge = Some(edge);
            }
        }
        if let (Some(p), Some((lx, ly)), Some(zp)) = (projector, lifts.as_mut(), z_prev.as_mut()) {
            let z = lx.push(p.coordinate(st.x), circ) - ly.push(p.coordinate(st.y), circ);
            let dz = z - *zp;
            proj.0 += dz;
            proj.1 += dz * dz;
            proj.2 += 1;
            *zp = z;
        }
        if let Some(s) = series.as_mut() {
            if step % every == 0 || step == n {
                s.rows.push(format!(
                    "{},{},{},{d}",
                    step as f64 * cfg.dt,
                    position_label(g, st.x),
                    position_label(g, st.y)
                ));
            }
        }
        while cps.get(next) == Some(&step) {
            minima.push(running);
            next += 1;
        }
    }
    Ok(GraphPathOut {
        minima,
        sup_dev,
        branch,
        events: st.events,
        proj: z_prev.map(|z| (proj.0, proj.1, proj.2, z)),
        series,
    })
}

#[allow(clippy::too_many_arguments)]
fn run_graph_pair(
    cfg: &ExperimentConfig,
    g: &MetricGraph,
    fixture: Option<&Fixture>,
    kind: GraphCouplingKind,
    isometry: Option<GraphIsometry>,
    x: GraphPosition,
    y: GraphPosition,
    n: usize,
    report: &mut RunReport,
) -> Result<Vec<Series>, HarnessError> {
    let coupler = GraphCoupler::new(g, kind, cfg.dt, isometry.clone()).map_err(HarnessError::config)?;
    let projector = match fixture {
        Some(f) if f.backbone.is_some() => Some(BackboneProjector::new(f).map_err(HarnessError::runtime)?),
        _ => None,
    };
    let track_branches = cfg.scenario == "thm31_k4";
    let outs: Vec<GraphPathOut> = (0..cfg.paths)
        .into_par_iter()
        .map(|i| graph_path(cfg, &coupler, projector.as_ref(), track_branches, x, y, n, i))
        .collect::<Result<_, _>>()?;

    let minima: Vec<Vec<f64>> = outs.iter().map(|o| o.minima.clone()).collect();
    let eps = default_eps(cfg, Some(g.r0()));
    let s = shyness(cfg, n, &minima, &eps, report)?;
    let m = &mut report.metrics;
    m.insert("min_distance".into(), s.overall_min);
    let sup_dev = outs.iter().map(|o| o.sup_dev).fold(0.0, f64::max);
    m.insert("sup_abs_distance_change".into(), sup_dev);
    let mut ev = CouplingEvents::default();
    for o in &outs {
        ev.simultaneous_vertex += o.events.simultaneous_vertex;
        ev.entered_independent += o.events.entered_independent;
        ev.entered_interpolated += o.events.entered_interpolated;
        ev.entered_skew += o.events.entered_skew;
        ev.fig36_transitions += o.events.fig36_transitions;
    }
    m.insert("events_simultaneous_vertex".into(), ev.simultaneous_vertex as f64);
    m.insert("events_independent".into(), ev.entered_independent as f64);
    m.insert("events_interpolated".into(), ev.entered_interpolated as f64);
    m.insert("events_skew".into(), ev.entered_skew as f64);
    m.insert("events_fig36_transitions".into(), ev.fig36_transitions as f64);

    let sqrt_dt = cfg.dt.sqrt();
    match cfg.scenario.as_str() {
        "thm31_k4" => {
            let level = g.r0() / 4.0 - 5.0 * sqrt_dt;
            report.checks.push(check("corridor", s.overall_min, level, s.overall_min > level));
            let dev = branch_deviation(g, &outs);
            report.metrics.insert("branch_max_deviation".into(), dev);
            report.checks.push(check("branch_uniformity", dev, 0.02, dev <= 0.02));
        }
        "ex33_fig32" => {
            let bound = isometry.as_ref().map_or(0.0, |iso| iso.min_displacement(g, 1000));
            report.metrics.insert("isometry_displacement".into(), bound);
            let ok = s.overall_min >= bound - 1e-9;
            report.checks.push(check("isometry_displacement", s.overall_min, bound, ok));
        }
        "ex38_fig36" => {
            let tol = 5.0 * sqrt_dt + 0.02;
            report.checks.push(check("constant_distance", sup_dev, tol, sup_dev < tol));
        }
        _ => {}
    }
    if projector.is_some() {
        let (mut sum, mut sq, mut cnt) = (0.0, 0.0, 0u64);
        let mut finals = Vec::with_capacity(outs.len());
        for (a, b, c, z) in outs.iter().filter_map(|o| o.proj) {
            sum += a;
            sq += b;
            cnt += c;
            finals.push(z);
        }
        let mean = sum / cnt as f64;
        let var = (sq / cnt as f64 - mean * mean).max(0.0);
        let se = (var / cnt as f64).sqrt();
        let zscore = if se > 0.0 { mean / se } else { 0.0 };
        let m = &mut report.metrics;
        m.insert("projection_mean_increment".into(), mean);
        m.insert("projection_standard_error".into(), se);
        m.insert("projection_final_mean".into(), finals.iter().sum::<f64>() / finals.len() as f64);
        report.checks.push(check("projection_martingale", zscore.abs(), 3.0, zscore.abs() < 3.0));
    }
    Ok(outs.into_iter().filter_map(|o| o.series).collect())
}

/// Largest `|fraction - 1/deg|` over vertices of the edges entered there.
fn branch_deviation(g: &MetricGraph, outs: &[GraphPathOut]) -> f64 {
    let ne = g.edge_count();
    let mut worst = 0.0f64;
    for v in 0..g.vertex_count() {
        let mut counts = vec![0u64; ne];
        for o in outs {
            for (e, c) in counts.iter_mut().enumerate() {
                *c += o.branch[v * ne + e];
            }
        }
        let total: u64 = counts.iter().sum();
        if total == 0 {
            continue;
        }
        let stubs = g.stubs(shy_core::VertexId(v));
        let p = 1.0 / stubs.len() as f64;
        for s in stubs {
            worst = worst.max((counts[s.edge.0] as f64 / total as f64 - p).abs());
        }
    }
    worst
}

struct PlanarPathOut {
    minima: Vec<f64>,
    /// `(qv_diff, qv_sq)` at each checkpoint.
    qv: Vec<(f64, f64)>,
    final_driver_sep: f64,
    local_time: f64,
    series: Option<Series>,
}

#[allow(clippy::too_many_arguments)]
fn planar_path(
    cfg: &ExperimentConfig,
    d: &ConvexDomain,
    kind: DriverKind,
    x0: Point2,
    y0: Point2,
    n: usize,
    i: u64,
) -> Result<PlanarPathOut, HarnessError> {
    let mut rng = path_stream(cfg.seed, i);
    let init = initial_state(d, kind, x0, y0).map_err(HarnessError::runtime)?;
    let cps = checkpoint_steps(n);
    let mut minima = Vec::with_capacity(cps.len());
    let mut qv = Vec::with_capacity(cps.len());
    let mut acc = VariationAccumulator::default();
    let mut running = init.distance();
    let mut prev_r = running * running;
    let mut step = 0usize;
    let mut next = 0;
    let mut series = (i < cfg.csv_paths).then(|| Series::new(CSV_HEADER));
    let every = (n / CSV_ROWS).max(1);
    if let Some(s) = series.as_mut() {
        s.push_numbers(&[0.0, init.x.x, init.x.y, init.y.x, init.y.y, init.distance(), 0.0, 0.0]);
    }
    while cps.get(next) == Some(&0) {
        minima.push(running);
        qv.push((0.0, 0.0));
        next += 1;
    }
    let mut last_sep = init.w.distance(init.b);
    let mut observer = |p: &PairStep| {
        step += 1;
        running = running.min(p.dist);
        let r = p.dist * p.dist;
        acc.push((p.dbx - p.dby).norm2(), prev_r, r, None);
        prev_r = r;
        last_sep = p.driver_sep;
        if let Some(s) = series.as_mut() {
            if step % every == 0 || step == n {
                s.push_numbers(&[p.t, p.x.x, p.x.y, p.y.x, p.y.y, p.dist, p.lx, p.ly]);
            }
        }
        while cps.get(next) == Some(&step) {
            minima.push(running);
            qv.push((acc.qv_diff, acc.qv_sq));
            next += 1;
        }
    };
    let end = simulate_pair_observed(d, kind, x0, y0, cfg.dt, cfg.t, &mut rng, &mut observer)
        .map_err(HarnessError::runtime)?;
    Ok(PlanarPathOut { minima, qv, final_driver_sep: last_sep, local_time: end.lx, series })
}

fn run_planar_pair(
    cfg: &ExperimentConfig,
    d: &ConvexDomain,
    kind: DriverKind,
    x0: Point2,
    y0: Point2,
    n: usize,
    report: &mut RunReport,
) -> Result<Vec<Series>, HarnessError> {
    let outs: Vec<PlanarPathOut> = (0..cfg.paths)
        .into_par_iter()
        .map(|i| planar_path(cfg, d, kind, x0, y0, n, i))
        .collect::<Result<_, _>>()?;
    let minima: Vec<Vec<f64>> = outs.iter().map(|o| o.minima.clone()).collect();
    let eps = default_eps(cfg, None);
    let s = shyness(cfg, n, &minima, &eps, report)?;
    let paths = outs.len() as f64;
    let times: Vec<f64> = checkpoint_steps(n).iter().map(|&k| k as f64 * cfg.dt).collect();
    let qd: Vec<f64> = (0..times.len()).map(|c| outs.iter().map(|o| o.qv[c].0).sum::<f64>() / paths).collect();
    let qs: Vec<f64> = (0..times.len()).map(|c| outs.iter().map(|o| o.qv[c].1).sum::<f64>() / paths).collect();
    let horizon = *times.last().expect("ten checkpoints");
    report.variation = Some(VariationJson {
        exponent_diff: loglog_slope(&times, &qd),
        exponent_sq: loglog_slope(&times, &qs),
        rate_diff: qd.last().copied().unwrap_or(0.0) / horizon,
        rate_sq: qs.last().copied().unwrap_or(0.0) / horizon,
        t: times,
        qv_diff: qd,
        qv_sq: qs,
    });
    let m = &mut report.metrics;
    m.insert("min_distance".into(), s.overall_min);
    m.insert("mean_local_time_rate_x".into(), outs.iter().map(|o| o.local_time).sum::<f64>() / paths / horizon);

    match cfg.scenario.as_str() {
        "thm41_sync_disc" | "thm41_mirror_disc" => {
            let first = s.median_at(0);
            let last = s.median_at(s.checkpoints.len() - 1);
            let ratio = last / first;
            report.metrics.insert("median_min_first_checkpoint".into(), first);
            report.metrics.insert("median_min_final".into(), last);
            report.checks.push(check("median_min_decay", ratio, 0.5, ratio < 0.5));
            let below = s.fraction_below(0.1);
            report.checks.push(check("fraction_min_below_0.1", below, 0.9, below >= 0.9));
        }
        "ex42_free" | "ex42_disc" => {
            let d0 = x0.distance(y0);
            let t = horizon;
            let sq: Vec<f64> = outs.iter().map(|o| o.final_driver_sep * o.final_driver_sep).collect();
            let mean = sq.iter().sum::<f64>() / paths;
            let err2 = sq.iter().map(|v| (v - (d0 * d0 + 2.0 * t)).abs()).fold(0.0, f64::max);
            let err4 = sq.iter().map(|v| (v - (d0 * d0 + 4.0 * t)).abs()).fold(0.0, f64::max);
            let m = &mut report.metrics;
            m.insert("driver_sep_sq_mean".into(), mean);
            m.insert("driver_sep_sq_max_err_rate2".into(), err2);
            m.insert("driver_sep_sq_max_err_rate4".into(), err4);
            if cfg.scenario == "ex42_free" {
                report.checks.push(check("distance_law", err2, 0.05, err2 <= 0.05));
                let v = report.variation.as_ref().expect("set above");
                let lim = 0.01 * v.rate_diff;
                report.checks.push(check("squared_distance_variation", v.rate_sq, lim, v.rate_sq <= lim));
            }
        }
        "ex44_annulus" => {
            if let (Some(DomainSpec::Annulus { r_in, .. }), DriverKind::Rotation(theta)) = (&cfg.domain, kind) {
                let bound = 2.0 * r_in * (theta.abs() / 2.0).sin() - 1e-9;
                report.checks.push(check("rotation_distance", s.overall_min, bound, s.overall_min >= bound));
            }
        }
        _ => {}
    }
    Ok(outs.into_iter().filter_map(|o| o.series).collect())
}

fn run_first_hit(
    cfg: &ExperimentConfig,
    g: &MetricGraph,
    start: GraphPosition,
    r: f64,
    report: &mut RunReport,
) -> Result<(), HarnessError> {
    let hits = (0..cfg.paths)
        .into_par_iter()
        .filter(|&i| first_hit_path(g, start, r, cfg.t, cfg.dt, &mut path_stream(cfg.seed, i)))
        .count() as u64;
    let est = HitEstimate::from_counts(hits, cfg.paths, r * r <= cfg.t);
    let b = lemma34_bounds(cfg.t, r, g.r0(), g.m0()).map_err(HarnessError::config)?;
    report.bounds = Some(BoundsJson::from(&b));
    let m = &mut report.metrics;
    m.insert("exit_probability".into(), est.p);
    m.insert("exit_half_width".into(), est.half_width);
    m.insert("exit_hits".into(), est.hits as f64);
    let inside = b.lower <= est.p - est.half_width && est.p + est.half_width <= b.upper;
    report.checks.push(check("sandwich_lower", est.p - est.half_width, b.lower, inside));
    report.checks.push(check("sandwich_upper", est.p + est.half_width, b.upper, inside));
    Ok(())
}
