// Copyright 2026 The Shy Coupling Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

//! Experiment configuration: scenario defaults, then a TOML file, then
//! command-line flags, each layer overriding the previous one.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use shy_core::graph_couplings::GraphCouplingKind;
use shy_core::metric_graph::{fixture, Fixture};
use shy_core::reflected_coupling::{check_pair, DriverKind};
use shy_core::{ConvexDomain, FixtureName, GraphPosition, MetricGraph, Point2};

use crate::error::HarnessError;
use crate::graph_io::load_graph;
use crate::scenario::{defaults, scenario_info, ScenarioInfo, ScenarioKind};

/// Planar domain descriptor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainSpec {
    Disc { center: [f64; 2], radius: f64 },
    Ellipse { center: [f64; 2], a: f64, b: f64 },
    Annulus { center: [f64; 2], r_in: f64, r_out: f64 },
}

impl DomainSpec {
    pub fn build(&self) -> Result<ConvexDomain, HarnessError> {
        let p = |c: [f64; 2]| Point2::new(c[0], c[1]);
        match *self {
            DomainSpec::Disc { center, radius } => ConvexDomain::disc(p(center), radius),
            DomainSpec::Ellipse { center, a, b } => ConvexDomain::ellipse(p(center), a, b),
            DomainSpec::Annulus { center, r_in, r_out } => ConvexDomain::annulus(p(center), r_in, r_out),
        }
        .map_err(HarnessError::config)
    }
}

/// A starting point: planar coordinates, a named vertex, or an edge offset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointSpec {
    Planar([f64; 2]),
    Vertex { vertex: String },
    Edge { edge: String, offset: f64 },
}

impl PointSpec {
    fn planar(&self) -> Result<Point2, HarnessError> {
        match self {
            PointSpec::Planar([x, y]) => Ok(Point2::new(*x, *y)),
            other => Err(HarnessError::Config(format!("expected planar coordinates, got {other:?}"))),
        }
    }

    fn on_graph(&self, g: &MetricGraph) -> Result<GraphPosition, HarnessError> {
        match self {
            PointSpec::Vertex { vertex } => g
                .vertex_by_label(vertex)
                .map(GraphPosition::Vertex)
                .ok_or_else(|| HarnessError::Config(format!("unknown vertex {vertex:?}"))),
            PointSpec::Edge { edge, offset } => {
                let e = g.edge_by_label(edge).ok_or_else(|| HarnessError::Config(format!("unknown edge {edge:?}")))?;
                g.position(e, *offset).map_err(HarnessError::config)
            }
            PointSpec::Planar(_) => Err(HarnessError::Config("planar coordinates given for a graph scenario".into())),
        }
    }
}

/// Fully resolved experiment parameters. Everything except the output
/// directory and worker count is echoed into the report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub scenario: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph_file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainSpec>,
    pub coupling: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    pub x0: PointSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y0: Option<PointSpec>,
    /// Ball radius of exit-time scenarios.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    pub dt: f64,
    pub t: f64,
    pub paths: u64,
    pub seed: u64,
    /// Survival thresholds; empty selects the scenario default.
    pub eps: Vec<f64>,
    /// Number of leading paths written as CSV series.
    pub csv_paths: u64,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub workers: Option<usize>,
}

/// TOML config file; every key is optional.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub scenario: Option<String>,
    pub graph: Option<String>,
    pub graph_file: Option<PathBuf>,
    pub domain: Option<DomainSpec>,
    pub coupling: Option<String>,
    pub theta: Option<f64>,
    pub x0: Option<PointSpec>,
    pub y0: Option<PointSpec>,
    pub radius: Option<f64>,
    pub dt: Option<f64>,
    pub t: Option<f64>,
    pub paths: Option<u64>,
    pub seed: Option<u64>,
    pub eps: Option<Vec<f64>>,
    pub csv_paths: Option<u64>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        toml::from_str(text).map_err(HarnessError::config)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = fs::read_to_string(path).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

/// Command-line overrides.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub scenario: Option<String>,
    pub dt: Option<f64>,
    pub t: Option<f64>,
    pub paths: Option<u64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub csv_paths: Option<u64>,
}

macro_rules! layer {
    ($dst:expr, $src:expr, [$($f:ident),*], [$($o:ident),*]) => {
        $( if let Some(v) = $src.$f.clone() { $dst.$f = v; } )*
        $( if let Some(v) = $src.$o.clone() { $dst.$o = Some(v); } )*
    };
}

impl ExperimentConfig {
    /// Scenario defaults, then `file`, then `flags`.
    pub fn resolve(file: Option<&FileConfig>, flags: &Overrides) -> Result<Self, HarnessError> {
        let name = flags
            .scenario
            .clone()
            .or_else(|| file.and_then(|f| f.scenario.clone()))
            .ok_or_else(|| HarnessError::Config("no scenario given".into()))?;
        let mut c = defaults(&name).ok_or_else(|| HarnessError::Config(format!("unknown scenario {name:?}")))?;
        if let Some(f) = file {
            if f.graph.is_some() || f.graph_file.is_some() {
                c.graph = None;
                c.graph_file = None;
            }
            layer!(c, f, [coupling, x0, dt, t, paths, seed, eps, csv_paths], [graph, graph_file, domain, theta, y0, radius, out, workers]);
        }
        layer!(c, flags, [dt, t, paths, seed, csv_paths], [out, workers]);
        c.validate_basic()?;
        Ok(c)
    }

    pub fn info(&self) -> Result<&'static ScenarioInfo, HarnessError> {
        scenario_info(&self.scenario).ok_or_else(|| HarnessError::Config(format!("unknown scenario {:?}", self.scenario)))
    }

    /// Numeric sanity checks that need no graph or domain.
    pub fn validate_basic(&self) -> Result<(), HarnessError> {
        self.info()?;
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(HarnessError::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t > 0.0 && self.t.is_finite()) {
            return Err(HarnessError::Config(format!("t must be positive, got {}", self.t)));
        }
        if self.paths == 0 {
            return Err(HarnessError::Config("paths must be at least 1".into()));
        }
        if self.workers == Some(0) {
            return Err(HarnessError::Config("workers must be at least 1".into()));
        }
        if self.eps.iter().any(|e| !e.is_finite()) {
            return Err(HarnessError::Config("eps grid must be finite".into()));
        }
        Ok(())
    }

    fn load_graph(&self) -> Result<(MetricGraph, Option<Fixture>), HarnessError> {
        match (&self.graph, &self.graph_file) {
            (Some(_), Some(_)) => Err(HarnessError::Config("give either graph or graph_file, not both".into())),
            (Some(name), None) => {
                let f = fixture(FixtureName::from_str(name).map_err(HarnessError::config)?).map_err(HarnessError::config)?;
                Ok((f.graph.clone(), Some(f)))
            }
            (None, Some(path)) => Ok((load_graph(path)?, None)),
            (None, None) => Err(HarnessError::Config(format!("scenario {} needs a graph", self.scenario))),
        }
    }

    /// Builds the simulation objects and checks that the coupling fits the
    /// space.
    pub fn prepare(&self) -> Result<Prepared, HarnessError> {
        self.validate_basic()?;
        let info = self.info()?;
        match info.kind {
            ScenarioKind::GraphPair => {
                if self.domain.is_some() {
                    return Err(HarnessError::Config(format!("scenario {} runs on a graph, not a domain", self.scenario)));
                }
                let (graph, fixture) = self.load_graph()?;
                let kind = GraphCouplingKind::from_str(&self.coupling)
                    .map_err(|_| HarnessError::Config(format!("coupling {:?} is not a graph coupling", self.coupling)))?;
                let x = self.x0.on_graph(&graph)?;
                let y = match &self.y0 {
                    Some(p) => p.on_graph(&graph)?,
                    None if kind == GraphCouplingKind::Isometry => x,
                    None => return Err(HarnessError::Config("y0 is required".into())),
                };
                let isometry = match kind {
                    GraphCouplingKind::Isometry => Some(
                        fixture
                            .as_ref()
                            .and_then(|f| f.isometry.clone())
                            .ok_or_else(|| HarnessError::Config("isometry coupling needs a fixture with an isometry".into()))?,
                    ),
                    _ => None,
                };
                // Fails early on graphs or pairs the coupling cannot handle.
                let coupler = shy_core::graph_couplings::GraphCoupler::new(&graph, kind, self.dt, isometry.clone())
                    .map_err(HarnessError::config)?;
                coupler.init(x, y).map_err(HarnessError::config)?;
                Ok(Prepared::GraphPair { graph, fixture, kind, isometry, x, y })
            }
            ScenarioKind::FirstHit => {
                let (graph, _) = self.load_graph()?;
                if self.coupling != "walsh" {
                    return Err(HarnessError::Config(format!("exit-time scenario needs coupling \"walsh\", got {:?}", self.coupling)));
                }
                let start = self.x0.on_graph(&graph)?;
                let r = self.radius.ok_or_else(|| HarnessError::Config("radius is required".into()))?;
                shy_core::graph_diffusion::first_hit_check(&graph, start, r, self.dt).map_err(HarnessError::config)?;
                Ok(Prepared::FirstHit { graph, start, r })
            }
            ScenarioKind::PlanarPair => {
                if self.graph.is_some() || self.graph_file.is_some() {
                    return Err(HarnessError::Config(format!("scenario {} runs in a planar domain, not a graph", self.scenario)));
                }
                let spec = self.domain.as_ref().ok_or_else(|| HarnessError::Config("domain is required".into()))?;
                let domain = spec.build()?;
                let kind = match self.coupling.as_str() {
                    "synchronous" => DriverKind::Synchronous,
                    "mirror" => DriverKind::Mirror,
                    "independent" => DriverKind::Independent,
                    "growth_ex42" => DriverKind::GrowthEx42,
                    "rotation" => DriverKind::Rotation(
                        self.theta.ok_or_else(|| HarnessError::Config("rotation needs theta".into()))?,
                    ),
                    other => return Err(HarnessError::Config(format!("coupling {other:?} is not a planar coupling"))),
                };
                let x0 = self.x0.planar()?;
                let y0 = match (&self.y0, kind) {
                    (Some(p), _) => p.planar()?,
                    (None, DriverKind::Rotation(theta)) => x0.rotate_about(domain.center(), theta),
                    (None, _) => return Err(HarnessError::Config("y0 is required".into())),
                };
                let y_check = match kind {
                    DriverKind::Rotation(theta) => x0.rotate_about(domain.center(), theta),
                    _ => y0,
                };
                check_pair(&domain, kind, x0, y_check).map_err(HarnessError::config)?;
                Ok(Prepared::PlanarPair { domain, kind, x0, y0 })
            }
        }
    }
}

/// Simulation objects built from a config.
#[derive(Clone, Debug)]
pub enum Prepared {
    GraphPair {
        graph: MetricGraph,
        fixture: Option<Fixture>,
        kind: GraphCouplingKind,
        isometry: Option<shy_core::GraphIsometry>,
        x: GraphPosition,
        y: GraphPosition,
    },
    PlanarPair {
        domain: ConvexDomain,
        kind: DriverKind,
        x0: Point2,
        y0: Point2,
    },
    FirstHit {
        graph: MetricGraph,
        start: GraphPosition,
        r: f64,
    },
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flags(name: &str) -> Overrides {
        Overrides { scenario: Some(name.into()), ..Default::default() }
    }

    #[test]
    fn layering_order() {
        let file = FileConfig::parse("scenario = \"thm31_k4\"\ndt = 0.001\npaths = 7\nseed = 3\n").unwrap();
        let f = Overrides { paths: Some(9), ..Default::default() };
        let c = ExperimentConfig::resolve(Some(&file), &f).unwrap();
        assert_eq!((c.dt, c.paths, c.seed, c.t), (0.001, 9, 3, 50.0));
    }

    #[test]
    fn every_default_prepares() {
        for s in crate::scenario::list_scenarios() {
            let c = ExperimentConfig::resolve(None, &flags(s.name)).unwrap();
            c.prepare().unwrap_or_else(|e| panic!("{}: {e}", s.name));
        }
    }

    #[test]
    fn config_errors() {
        let bad = |text: &str| {
            let file = FileConfig::parse(text)?;
            ExperimentConfig::resolve(Some(&file), &Overrides::default())?.prepare().map(|_| ())
        };
        for text in [
            "",
            "scenario = \"nope\"",
            "scenario = \"thm31_k4\"\ndt = -1.0",
            "scenario = \"thm31_k4\"\nunknown_key = 1",
            "scenario = \"thm31_k4\"\ncoupling = \"mirror\"",
            "scenario = \"thm41_sync_disc\"\ncoupling = \"hybrid_thm31\"",
            "scenario = \"thm41_sync_disc\"\ncoupling = \"rotation\"\ntheta = 1.0",
            "scenario = \"thm41_sync_disc\"\nx0 = [3.0, 0.0]",
            "scenario = \"thm31_k4\"\ngraph = \"star(3)\"",
            "scenario = \"lemma34_star\"\nradius = 5.0",
            "scenario = \"ex33_fig32\"\ngraph = \"k4\"",
            "scenario = \"ex38_fig36\"\ny0 = { vertex = \"x5\" }",
            "scenario = \"ex42_free\"\npaths = 0",
        ] {
            let e = bad(text).unwrap_err();
            assert_eq!(e.exit_code(), 2, "{text}: {e}");
        }
    }

    #[test]
    fn point_specs_parse() {
        let file = FileConfig::parse(
            "scenario = \"thm31_k4\"\nx0 = { edge = \"e02\", offset = 0.25 }\ny0 = { vertex = \"v1\" }\n",
        )
        .unwrap();
        assert_eq!(file.x0, Some(PointSpec::Edge { edge: "e02".into(), offset: 0.25 }));
        let c = ExperimentConfig::resolve(Some(&file), &Overrides::default()).unwrap();
        assert!(matches!(c.prepare().unwrap(), Prepared::GraphPair { .. }));
        let file = FileConfig::parse("scenario = \"ex42_disc\"\ndomain = { shape = \"ellipse\", center = [0, 0], a = 2, b = 1 }\n");
        let c = ExperimentConfig::resolve(Some(&file.unwrap()), &Overrides::default()).unwrap();
        assert!(matches!(c.prepare().unwrap(), Prepared::PlanarPair { .. }));
    }
}
