// Copyright 2026 The Shy Coupling Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

use shy_core::analysis::{gaussian_exit_bounds, gaussian_exit_exact, lemma34_bounds, shyness_statistics, Verdict};
use shy_core::graph_couplings::{GraphCoupler, GraphCouplingKind};
use shy_core::graph_diffusion::{first_hit_mc, DiffusionError};
use shy_core::metric_graph::{fixture, FixtureName};
use shy_core::reflected_coupling::{simulate_pair, simulate_pair_observed, DriverKind, PairStep};
use shy_core::{path_stream, ConvexDomain, GraphPosition, Point2};

#[test]
fn star_exit_from_leaf_lies_in_sandwich() {
    let f = fixture(FixtureName::Star(3)).unwrap();
    let g = &f.graph;
    let (r, t) = (2.0, 0.5);
    // From the center every point is within distance 1, so the ball of
    // radius 2 has an empty complement.
    assert_eq!(
        first_hit_mc(g, f.marker("c").unwrap(), r, t, 1e-4, 5, 10).unwrap_err(),
        DiffusionError::EmptyComplement { radius: r }
    );
    let est = first_hit_mc(g, f.marker("l1").unwrap(), r, t, 1e-4, 5, 20_000).unwrap();
    let b = lemma34_bounds(t, r, g.r0(), g.m0()).unwrap();
    assert!(b.lower <= est.p - est.half_width, "{est:?} {b:?}");
    assert!(est.p + est.half_width <= b.upper);
    assert!(est.hits > 0);
}

#[test]
fn first_hit_is_reproducible() {
    let f = fixture(FixtureName::K4).unwrap();
    let start = f.marker("v0").unwrap();
    let a = first_hit_mc(&f.graph, start, 1.2, 0.4, 1e-3, 9, 500).unwrap();
    let b = first_hit_mc(&f.graph, start, 1.2, 0.4, 1e-3, 9, 500).unwrap();
    assert_eq!(a, b);
}

#[test]
fn gaussian_grid_brackets_exact_value() {
    for i in 0..20 {
        let t = 0.05 + 0.1 * i as f64;
        let r = t.sqrt() * (1.0 + 0.25 * i as f64);
        let b = gaussian_exit_bounds(t, r).unwrap();
        assert!(b.contains(gaussian_exit_exact(t, r)), "t={t} r={r}");
    }
}

#[test]
fn isometry_pair_is_never_closer_than_displacement() {
    let f = fixture(FixtureName::Fig32).unwrap();
    let g = &f.graph;
    let iso = f.isometry.clone().unwrap();
    let bound = iso.min_displacement(g, 200);
    let c = GraphCoupler::new(g, GraphCouplingKind::Isometry, 1e-4, Some(iso)).unwrap();
    let x = GraphPosition::Interior { edge: g.edge_by_label("pa").unwrap(), offset: 0.7 };
    let mut st = c.init(x, x).unwrap();
    let mut rng = path_stream(3, 0);
    for _ in 0..20_000 {
        c.step(&mut st, &mut rng);
        assert!(g.geodesic_distance(st.x, st.y) >= bound - 1e-12);
    }
}

#[test]
fn hybrid_runs_are_shy_consistent() {
    let f = fixture(FixtureName::K4).unwrap();
    let g = &f.graph;
    let dt = 1e-4;
    let c = GraphCoupler::new(g, GraphCouplingKind::HybridThm31, dt, None).unwrap();
    let x = GraphPosition::Interior { edge: g.edge_by_label("e01").unwrap(), offset: 0.5 };
    let y = GraphPosition::Interior { edge: g.edge_by_label("e23").unwrap(), offset: 0.5 };
    let checkpoints = [1.0, 2.0, 3.0, 4.0];
    let mut minima = Vec::new();
    for i in 0..20 {
        let mut rng = path_stream(17, i);
        let mut st = c.init(x, y).unwrap();
        let mut m = g.geodesic_distance(x, y);
        let mut row = Vec::new();
        for k in 1..=40_000 {
            c.step(&mut st, &mut rng);
            m = m.min(g.geodesic_distance(st.x, st.y));
            if k % 10_000 == 0 {
                row.push(m);
            }
        }
        minima.push(row);
    }
    let level = 0.25 - 5.0 * dt.sqrt();
    let rep = shyness_statistics(&checkpoints, &minima, &[level]).unwrap();
    assert_eq!(rep.survival[3][0], 1.0);
    assert_eq!(rep.verdict, Verdict::ShyConsistent);
}

#[test]
fn local_time_rate_matches_boundary_ratio_in_ellipse() {
    // Rate perimeter / (2 area) for a reflected Brownian motion.
    let d = ConvexDomain::ellipse(Point2::ZERO, 1.5, 1.0).unwrap();
    let expected = d.perimeter() / (2.0 * d.area());
    let (dt, t) = (1e-4, 50.0);
    let mut total = 0.0;
    for i in 0..8 {
        let mut rng = path_stream(21, i);
        let end = simulate_pair_observed(
            &d,
            DriverKind::Synchronous,
            Point2::ZERO,
            Point2::new(0.1, 0.0),
            dt,
            t,
            &mut rng,
            &mut |_: &PairStep| {},
        )
        .unwrap();
        total += end.lx;
    }
    let rate = total / (8.0 * t);
    assert!((rate / expected - 1.0).abs() < 0.08, "rate {rate} expected {expected}");
}

#[test]
fn rotation_pair_distance_is_constant() {
    let d = ConvexDomain::annulus(Point2::ZERO, 1.0, 2.0).unwrap();
    let theta = std::f64::consts::FRAC_PI_3;
    let mut rng = path_stream(8, 0);
    let p = simulate_pair(&d, DriverKind::Rotation(theta), Point2::new(1.2, 0.3), Point2::ZERO, 1e-3, 20.0, &mut rng)
        .unwrap();
    for (x, dist) in p.x.iter().zip(&p.dist) {
        let expect = 2.0 * x.norm() * (theta / 2.0).sin();
        assert!((dist - expect).abs() < 1e-9);
        assert!(*dist >= 2.0 * (theta / 2.0).sin() - 1e-9);
    }
}
