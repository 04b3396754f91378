// Copyright 2026 The Shy Coupling Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.


//! Acceptance criteria for the workspace, each a function returning a
//! pass flag and a one-line summary of what was measured.

use std::f64::consts::FRAC_PI_2;
use std::fs;
use std::time::Instant;

use shy::config::{ExperimentConfig, Overrides};
use shy::{run_experiment, RunOutput};
use shy_core::analysis::{gaussian_exit_bounds, gaussian_exit_exact, variation_diagnostics};
use shy_core::graph_diffusion::{beta_for_degree, SkewParams, SkewWalk};
use shy_core::reflected_coupling::{simulate_pair, simulate_pair_observed, DriverKind, PairStep};
use shy_core::{path_stream, ConvexDomain, Point2};

pub struct Outcome {
    pub pass: bool,
    pub detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn scenario(name: &str, f: impl FnOnce(&mut ExperimentConfig)) -> ExperimentConfig {
    let flags = Overrides { scenario: Some(name.into()), ..Default::default() };
    let mut cfg = ExperimentConfig::resolve(None, &flags).expect("built-in scenario");
    cfg.csv_paths = 0;
    f(&mut cfg);
    cfg
}

fn run(cfg: &ExperimentConfig) -> (RunOutput, f64) {
    let t = Instant::now();
    let out = run_experiment(cfg).expect("scenario runs");
    (out, t.elapsed().as_secs_f64())
}

fn c1_distance_law() -> Outcome {
    let cfg = scenario("ex42_free", |c| {
        c.dt = 1e-4;
        c.t = 1.0;
        c.paths = 100;
    });
    let (out, secs) = run(&cfg);
    let chk = out.report.check("distance_law").expect("check present");
    let mean = out.report.metrics["driver_sep_sq_mean"];
    outcome(
        chk.pass && secs < 30.0,
        format!(
            "max | |W-B|^2 - (1+2t) | = {:.4} (limit 0.05), ensemble mean |W-B|^2 = {mean:.4}, {secs:.1}s",
            chk.value
        ),
    )
}

fn c2_corridor() -> Outcome {
    let cfg = scenario("thm31_k4", |c| {
        c.dt = 1e-4;
        c.t = 50.0;
        c.paths = 200;
    });
    let (out, secs) = run(&cfg);
    let corridor = out.report.check("corridor").unwrap();
    let branch = out.report.check("branch_uniformity").unwrap();
    outcome(
        corridor.pass && branch.pass && secs < 300.0,
        format!(
            "min d = {:.4} (> {:.4}), branch deviation {:.4} (<= 0.02), {secs:.1}s",
            corridor.value, corridor.threshold, branch.value
        ),
    )
}

fn c3_constant_distance() -> Outcome {
    let cfg = scenario("ex38_fig36", |c| {
        c.dt = 1e-4;
        c.t = 20.0;
        c.paths = 100;
    });
    let (out, _) = run(&cfg);
    let chk = out.report.check("constant_distance").unwrap();
    outcome(chk.pass, format!("sup |d - 1| = {:.4} (limit {:.4})", chk.value, chk.threshold))
}

fn c4_lemma_sandwich() -> Outcome {
    let cfg = scenario("lemma34_star", |c| {
        c.t = 0.3;
        c.radius = Some(2.0);
        c.paths = 100_000;
    });
    let (out, _) = run(&cfg);
    let b = out.report.bounds.as_ref().unwrap();
    let p = out.report.metrics["exit_probability"];
    let hw = out.report.metrics["exit_half_width"];
    let pass = out.report.all_pass();
    outcome(pass, format!("lower {:.3e} <= [{:.3e}, {:.3e}] <= min(1, upper) = {:.3e}", b.lower, p - hw, p + hw, b.upper))
}

fn c5_gaussian_sandwich() -> Outcome {
    let mut worst = f64::INFINITY;
    let mut pass = true;
    for i in 0..20 {
        let t = 0.1 + 0.2 * i as f64;
        let r = t.sqrt() * (1.0 + 0.3 * i as f64);
        let b = gaussian_exit_bounds(t, r).unwrap();
        let exact = gaussian_exit_exact(t, r);
        pass &= b.lower <= exact && exact <= b.upper;
        worst = worst.min((exact - b.lower).min(b.upper - exact));
    }
    outcome(pass, format!("20 grid points, smallest margin {worst:.3e}"))
}

fn c6_skew_occupation() -> Outcome {
    let beta = beta_for_degree(3).unwrap();
    let params = SkewParams::new(beta).unwrap();
    let (dt, n_paths) = (1e-4, 10_000u64);
    let mut positive = 0u64;
    for i in 0..n_paths {
        let mut rng = path_stream(606, i);
        let mut w = SkewWalk::new(params, dt);
        for _ in 0..10_000 {
            w.step(&mut rng);
        }
        positive += (w.value() > 0.0) as u64;
    }
    let p = positive as f64 / n_paths as f64;
    outcome((p - 1.0 / 3.0).abs() <= 0.02, format!("beta = {beta:.4}, P(U_1 > 0) = {p:.4} (target 1/3 +- 0.02)"))
}

fn c7_non_shy_disc() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for name in ["thm41_sync_disc", "thm41_mirror_disc"] {
        let cfg = scenario(name, |c| {
            c.t = 100.0;
            c.paths = 200;
        });
        let (out, _) = run(&cfg);
        let decay = out.report.check("median_min_decay").unwrap();
        let below = out.report.check("fraction_min_below_0.1").unwrap();
        pass &= decay.pass && below.pass;
        parts.push(format!("{name}: median ratio {:.3}, P(min<0.1) {:.3}", decay.value, below.value));
    }
    outcome(pass, parts.join("; "))
}

fn c8_annulus() -> Outcome {
    let cfg = scenario("ex44_annulus", |c| c.theta = Some(FRAC_PI_2));
    let (out, _) = run(&cfg);
    let chk = out.report.check("rotation_distance").unwrap();
    outcome(chk.pass, format!("min distance {:.12} (>= {:.12})", chk.value, chk.threshold))
}

fn c9_local_time_rate() -> Outcome {
    let d = ConvexDomain::unit_disc();
    let expected = d.perimeter() / (2.0 * d.area());
    let (dt, t, paths) = (1e-4, 200.0, 16u64);
    let mut total = 0.0;
    for i in 0..paths {
        let mut rng = path_stream(909, i);
        let end = simulate_pair_observed(
            &d,
            DriverKind::Synchronous,
            Point2::ZERO,
            Point2::new(0.5, 0.0),
            dt,
            t,
            &mut rng,
            &mut |_: &PairStep| {},
        )
        .unwrap();
        total += end.lx;
    }
    let rate = total / (paths as f64 * t);
    outcome((rate / expected - 1.0).abs() <= 0.05, format!("L_T/T = {rate:.4} (target {expected:.4} +- 5%, {paths} paths pooled)"))
}

fn c10_variation() -> Outcome {
    let disc = ConvexDomain::unit_disc();
    let mut rng = path_stream(1010, 0);
    let sync = simulate_pair(&disc, DriverKind::Synchronous, Point2::new(-0.3, 0.0), Point2::new(0.3, 0.0), 1e-3, 10.0, &mut rng)
        .unwrap();
    let v_sync = variation_diagnostics(&sync, None, 20).unwrap();
    let sync_zero = *v_sync.qv_diff.last().unwrap() == 0.0;

    let free = ConvexDomain::disc(Point2::ZERO, 1e6).unwrap();
    let mut rng = path_stream(1010, 1);
    let ind = simulate_pair(&free, DriverKind::Independent, Point2::ZERO, Point2::new(1.0, 0.0), 1e-3, 50.0, &mut rng)
        .unwrap();
    let v_ind = variation_diagnostics(&ind, None, 20).unwrap();
    let ind_ok = (v_ind.rate_diff / 4.0 - 1.0).abs() <= 0.05;

    let cfg = scenario("ex42_free", |_| {});
    let (out, _) = run(&cfg);
    let growth = out.report.check("squared_distance_variation").unwrap();
    outcome(
        sync_zero && ind_ok && growth.pass,
        format!(
            "sync <X-Y>_T = {}, independent rate {:.4}, growth_ex42 rate {:.5} vs limit {:.5}",
            v_sync.qv_diff.last().unwrap(),
            v_ind.rate_diff,
            growth.value,
            growth.threshold
        ),
    )
}

fn c11_determinism() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let mut pass = true;
    let mut names = Vec::new();
    for name in ["ex37_loop", "ex42_disc", "thm31_k4"] {
        let mut bytes = Vec::new();
        for workers in [1usize, 4] {
            let dir = tmp.path().join(format!("{name}_{workers}"));
            let cfg = scenario(name, |c| {
                c.workers = Some(workers);
                c.out = Some(dir.clone());
                c.t = c.t.min(5.0);
                c.paths = 8;
                c.csv_paths = 1;
            });
            run(&cfg);
            bytes.push((fs::read(dir.join("report.json")).unwrap(), fs::read(dir.join("path_0.csv")).unwrap()));
        }
        pass &= bytes[0] == bytes[1];
        names.push(name);
    }
    outcome(pass, format!("report.json and path_0.csv identical for 1 and 4 workers: {}", names.join(", ")))
}

/// Criteria in order; criterion `i + 1` is entry `i`.
pub const CRITERIA: [(&str, fn() -> Outcome); 11] = [
    ("growth driver distance law", c1_distance_law),
    ("corridor coupling on K4", c2_corridor),
    ("seven-edge machine constant distance", c3_constant_distance),
    ("graph exit sandwich", c4_lemma_sandwich),
    ("Gaussian hitting sandwich", c5_gaussian_sandwich),
    ("skew walk occupation", c6_skew_occupation),
    ("non-shyness in the unit disc", c7_non_shy_disc),
    ("rotation coupling in the annulus", c8_annulus),
    ("ergodic local-time rate", c9_local_time_rate),
    ("variation diagnostics", c10_variation),
    ("determinism across worker counts", c11_determinism),
];
