// Copyright 2026 The Shy Coupling Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

//! Built-in scenario catalogue and per-scenario defaults.

use std::f64::consts::FRAC_PI_2;

use crate::config::{DomainSpec, ExperimentConfig, PointSpec};

/// What a scenario simulates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScenarioKind {
    /// A coupled pair on a metric graph.
    GraphPair,
    /// A coupled pair of reflected Brownian motions in a planar domain.
    PlanarPair,
    /// Exit-time Monte Carlo for a single graph Brownian motion.
    FirstHit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScenarioInfo {
    pub name: &'static str,
    /// Result the scenario reproduces.
    pub anchor: &'static str,
    pub summary: &'static str,
    pub kind: ScenarioKind,
}

pub const SCENARIOS: &[ScenarioInfo] = &[
    ScenarioInfo {
        name: "thm31_k4",
        anchor: "Theorem 3.1",
        summary: "corridor coupling on K4 keeps the pair at least r0/4 apart",
        kind: ScenarioKind::GraphPair,
    },
    ScenarioInfo {
        name: "ex33_fig32",
        anchor: "Example 3.3",
        summary: "isometry coupling on a ring with two pendants",
        kind: ScenarioKind::GraphPair,
    },
    ScenarioInfo {
        name: "ex38_fig36",
        anchor: "Example 3.8",
        summary: "seven-edge case machine holding the distance at 1",
        kind: ScenarioKind::GraphPair,
    },
    ScenarioInfo {
        name: "lemma34_star",
        anchor: "Lemma 3.4",
        summary: "exit probability of a ball on star(3) against the analytic sandwich",
        kind: ScenarioKind::FirstHit,
    },
    ScenarioInfo {
        name: "ex36_backbone",
        anchor: "Example 3.6",
        summary: "independent pair on a backbone with side trees; projected difference is a martingale",
        kind: ScenarioKind::GraphPair,
    },
    ScenarioInfo {
        name: "ex37_loop",
        anchor: "Example 3.7",
        summary: "independent pair on a loop with pendant trees; unwound angle difference",
        kind: ScenarioKind::GraphPair,
    },
    ScenarioInfo {
        name: "thm41_sync_disc",
        anchor: "Theorem 4.1",
        summary: "synchronous reflected pair in the unit disc drifts together",
        kind: ScenarioKind::PlanarPair,
    },
    ScenarioInfo {
        name: "thm41_mirror_disc",
        anchor: "Theorem 4.1",
        summary: "mirror reflected pair in the unit disc drifts together",
        kind: ScenarioKind::PlanarPair,
    },
    ScenarioInfo {
        name: "ex42_free",
        anchor: "Example 4.2",
        summary: "growth driver without boundary contact; squared distance law",
        kind: ScenarioKind::PlanarPair,
    },
    ScenarioInfo {
        name: "ex42_disc",
        anchor: "Example 4.2",
        summary: "growth driver feeding a reflected pair in the unit disc",
        kind: ScenarioKind::PlanarPair,
    },
    ScenarioInfo {
        name: "ex44_annulus",
        anchor: "Example 4.4",
        summary: "rotation coupling in an annulus keeps a fixed positive distance",
        kind: ScenarioKind::PlanarPair,
    },
];

pub fn list_scenarios() -> &'static [ScenarioInfo] {
    SCENARIOS
}

pub fn scenario_info(name: &str) -> Option<&'static ScenarioInfo> {
    SCENARIOS.iter().find(|s| s.name == name)
}

fn edge(edge: &str, offset: f64) -> PointSpec {
    PointSpec::Edge { edge: edge.to_string(), offset }
}

fn vertex(v: &str) -> PointSpec {
    PointSpec::Vertex { vertex: v.to_string() }
}

fn unit_disc() -> DomainSpec {
    DomainSpec::Disc { center: [0.0, 0.0], radius: 1.0 }
}

/// Default configuration of a built-in scenario.
pub fn defaults(name: &str) -> Option<ExperimentConfig> {
    let info = scenario_info(name)?;
    let mut c = ExperimentConfig {
        scenario: info.name.to_string(),
        graph: None,
        graph_file: None,
        domain: None,
        coupling: String::new(),
        theta: None,
        x0: PointSpec::Planar([0.0, 0.0]),
        y0: None,
        radius: None,
        dt: 1e-4,
        t: 10.0,
        paths: 100,
        seed: 1,
        eps: Vec::new(),
        csv_paths: 1,
        out: None,
        workers: None,
    };
    match name {
        "thm31_k4" => {
            c.graph = Some("k4".into());
            c.coupling = "hybrid_thm31".into();
            c.x0 = edge("e01", 0.5);
            c.y0 = Some(edge("e23", 0.5));
            c.t = 50.0;
            c.paths = 200;
        }
        "ex33_fig32" => {
            c.graph = Some("fig32".into());
            c.coupling = "isometry".into();
            c.x0 = edge("ring_ab", 0.3);
        }
        "ex38_fig36" => {
            c.graph = Some("fig36".into());
            c.coupling = "fig36".into();
            c.x0 = vertex("x2");
            c.y0 = Some(vertex("x3"));
            c.t = 20.0;
        }
        "lemma34_star" => {
            c.graph = Some("star(3)".into());
            c.coupling = "walsh".into();
            c.x0 = vertex("l1");
            c.radius = Some(2.0);
            c.t = 0.3;
            c.paths = 100_000;
        }
        "ex36_backbone" => {
            c.graph = Some("fig34_window".into());
            c.coupling = "independent".into();
            c.x0 = edge("bb2", 0.5);
            c.y0 = Some(edge("bb2", 0.25));
            c.t = 1.0;
            c.dt = 1e-5;
            c.paths = 50;
        }
        "ex37_loop" => {
            c.graph = Some("fig35".into());
            c.coupling = "independent".into();
            c.x0 = edge("arc01", 0.5);
            c.y0 = Some(edge("arc20", 1.0));
            c.paths = 50;
        }
        "thm41_sync_disc" | "thm41_mirror_disc" => {
            c.domain = Some(unit_disc());
            c.coupling = if name == "thm41_sync_disc" { "synchronous" } else { "mirror" }.into();
            c.x0 = PointSpec::Planar([-0.5, 0.0]);
            c.y0 = Some(PointSpec::Planar([0.5, 0.0]));
            c.dt = 1e-3;
            c.t = 100.0;
            c.paths = 200;
        }
        "ex42_free" => {
            // Far enough from the boundary that no path reaches it.
            c.domain = Some(DomainSpec::Disc { center: [0.0, 0.0], radius: 1e6 });
            c.coupling = "growth_ex42".into();
            c.x0 = PointSpec::Planar([0.0, 0.0]);
            c.y0 = Some(PointSpec::Planar([1.0, 0.0]));
            c.t = 1.0;
        }
        "ex42_disc" => {
            c.domain = Some(unit_disc());
            c.coupling = "growth_ex42".into();
            c.x0 = PointSpec::Planar([-0.25, 0.0]);
            c.y0 = Some(PointSpec::Planar([0.25, 0.0]));
            c.dt = 1e-3;
        }
        "ex44_annulus" => {
            c.domain = Some(DomainSpec::Annulus { center: [0.0, 0.0], r_in: 1.0, r_out: 2.0 });
            c.coupling = "rotation".into();
            c.theta = Some(FRAC_PI_2);
            c.x0 = PointSpec::Planar([1.5, 0.0]);
            c.paths = 50;
        }
        _ => unreachable!("catalogue and defaults disagree on {name}"),
    }
    Some(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalogue_complete() {
        let names: Vec<_> = list_scenarios().iter().map(|s| s.name).collect();
        for n in [
            "thm31_k4",
            "ex33_fig32",
            "ex38_fig36",
            "lemma34_star",
            "ex36_backbone",
            "ex37_loop",
            "thm41_sync_disc",
            "thm41_mirror_disc",
            "ex42_free",
            "ex42_disc",
            "ex44_annulus",
        ] {
            assert!(names.contains(&n), "{n}");
            let d = defaults(n).unwrap();
            d.validate_basic().unwrap();
        }
        assert_eq!(scenario_info("ex44_annulus").unwrap().anchor, "Example 4.4");
        assert_eq!(scenario_info("lemma34_star").unwrap().anchor, "Lemma 3.4");
        assert!(list_scenarios().iter().all(|s| !s.anchor.is_empty()));
        assert!(defaults("nope").is_none());
    }
}
