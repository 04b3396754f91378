// Copyright 2026 The Shy Coupling Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

//! Graph spec files: `{"vertices": [id], "edges": [{id, u, v, length}]}`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use shy_core::metric_graph::EdgeSpec;
use shy_core::{GraphSpec, MetricGraph};

use crate::error::HarnessError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeFile>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeFile {
    pub id: String,
    pub u: String,
    pub v: String,
    pub length: f64,
}

impl From<&GraphFile> for GraphSpec {
    fn from(f: &GraphFile) -> Self {
        GraphSpec {
            vertices: f.vertices.clone(),
            edges: f
                .edges
                .iter()
                .map(|e| EdgeSpec { id: e.id.clone(), u: e.u.clone(), v: e.v.clone(), length: e.length })
                .collect(),
            allow_degree_two: false,
        }
    }
}

impl From<&MetricGraph> for GraphFile {
    fn from(g: &MetricGraph) -> Self {
        let vertices = (0..g.vertex_count()).map(|v| g.vertex_label(shy_core::VertexId(v)).to_string()).collect();
        let edges = g
            .edges()
            .iter()
            .map(|e| EdgeFile {
                id: e.label.clone(),
                u: g.vertex_label(e.u).to_string(),
                v: g.vertex_label(e.v).to_string(),
                length: e.length,
            })
            .collect();
        GraphFile { vertices, edges }
    }
}

pub fn parse_graph(json: &str) -> Result<MetricGraph, HarnessError> {
    let file: GraphFile = serde_json::from_str(json).map_err(HarnessError::config)?;
    MetricGraph::build(&GraphSpec::from(&file)).map_err(HarnessError::config)
}

pub fn load_graph(path: &Path) -> Result<MetricGraph, HarnessError> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
    parse_graph(&text)
}

pub fn graph_to_json(g: &MetricGraph) -> String {
    serde_json::to_string_pretty(&GraphFile::from(g)).expect("graph file serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use shy_core::metric_graph::{fixture, FixtureName};

    #[test]
    fn round_trip() {
        let g = fixture(FixtureName::K4).unwrap().graph;
        let back = parse_graph(&graph_to_json(&g)).unwrap();
        assert_eq!(back.edge_count(), 6);
        assert_eq!(back.vertex_count(), 4);
        assert_eq!(GraphFile::from(&back), GraphFile::from(&g));
    }

    #[test]
    fn rejects_invalid() {
        let bad_length = r#"{"vertices":["a","b"],"edges":[{"id":"e","u":"a","v":"b","length":-1}]}"#;
        assert!(matches!(parse_graph(bad_length), Err(HarnessError::Config(_))));
        let degree_two = r#"{"vertices":["a","b","c"],"edges":[
            {"id":"e1","u":"a","v":"b","length":1},{"id":"e2","u":"b","v":"c","length":1}]}"#;
        assert!(parse_graph(degree_two).is_err());
        assert!(parse_graph("{").is_err());
        let star = r#"{"vertices":["c","a","b","d"],"edges":[
            {"id":"e1","u":"c","v":"a","length":1},{"id":"e2","u":"c","v":"b","length":2},
            {"id":"e3","u":"c","v":"d","length":1.5}]}"#;
        let g = parse_graph(star).unwrap();
        assert_eq!(g.r0(), 1.0);
        assert_eq!(g.m0(), 3);
    }
}
