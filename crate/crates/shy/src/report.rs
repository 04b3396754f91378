// Copyright 2026 The Shy Coupling Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

//! JSON report, timing sidecar and CSV series.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use shy_core::analysis::{BoundPair, ShynessReport};

use crate::config::ExperimentConfig;
use crate::error::HarnessError;

pub const SCHEMA: u32 = 1;
pub const REPORT_FILE: &str = "report.json";
pub const TIMING_FILE: &str = "timing.json";

/// One pass/fail check with the measured value and its threshold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShynessJson {
    pub checkpoints: Vec<f64>,
    pub eps: Vec<f64>,
    pub survival: Vec<Vec<f64>>,
    pub half_width: Vec<Vec<f64>>,
    /// 10%, 50%, 90% quantiles of the running minimum distance.
    pub min_quantiles: Vec<[f64; 3]>,
    pub overall_min: f64,
    pub verdict: String,
}

impl From<&ShynessReport> for ShynessJson {
    fn from(r: &ShynessReport) -> Self {
        Self {
            checkpoints: r.checkpoints.clone(),
            eps: r.eps.clone(),
            survival: r.survival.clone(),
            half_width: r.half_width.clone(),
            min_quantiles: r.min_quantiles.clone(),
            overall_min: r.overall_min,
            verdict: r.verdict.as_str().to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsJson {
    pub lower: f64,
    pub upper: f64,
    pub log_upper: f64,
    pub r2_gt_t: bool,
    pub t_lt_t0: bool,
}

impl From<&BoundPair> for BoundsJson {
    fn from(b: &BoundPair) -> Self {
        Self { lower: b.lower, upper: b.upper, log_upper: b.log_upper, r2_gt_t: b.r2_gt_t, t_lt_t0: b.t_lt_t0 }
    }
}

/// Ensemble-mean realized quadratic variations at the checkpoints.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariationJson {
    pub t: Vec<f64>,
    pub qv_diff: Vec<f64>,
    pub qv_sq: Vec<f64>,
    pub exponent_diff: Option<f64>,
    pub exponent_sq: Option<f64>,
    pub rate_diff: f64,
    pub rate_sq: f64,
}

/// Everything a run produces that depends only on config and seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: u32,
    pub scenario: String,
    pub anchor: String,
    pub config: ExperimentConfig,
    pub steps_per_path: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shyness: Option<ShynessJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variation: Option<VariationJson>,
    pub metrics: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Wall-clock figures, kept apart from the report so the report stays
/// reproducible byte for byte.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub wall_seconds: f64,
    pub total_steps: u64,
    pub steps_per_second: f64,
    pub workers: usize,
}

/// A CSV series: header plus rows of preformatted cells.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Series {
    pub header: String,
    pub rows: Vec<String>,
}

impl Series {
    pub fn new(header: &str) -> Self {
        Self { header: header.to_string(), rows: Vec::new() }
    }

    pub fn push_numbers(&mut self, cells: &[f64]) {
        let row: Vec<String> = cells.iter().map(|c| c.to_string()).collect();
        self.rows.push(row.join(","));
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(self.header.len() + 1 + self.rows.len() * 64);
        s.push_str(&self.header);
        s.push('\n');
        for r in &self.rows {
            s.push_str(r);
            s.push('\n');
        }
        s
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), HarnessError> {
    let wrap = |source| HarnessError::Output { path: path.to_path_buf(), source };
    let mut f = fs::File::create(path).map_err(wrap)?;
    f.write_all(bytes).map_err(wrap)
}

/// Writes `report.json`, `timing.json` and `path_{i}.csv` into `dir`.
pub fn write_outputs(dir: &Path, report: &RunReport, timing: &Timing, series: &[Series]) -> Result<(), HarnessError> {
    fs::create_dir_all(dir).map_err(|source| HarnessError::Output { path: dir.to_path_buf(), source })?;
    write_file(&dir.join(REPORT_FILE), report.to_json().as_bytes())?;
    let timing = serde_json::to_string_pretty(timing).expect("timing serializes") + "\n";
    write_file(&dir.join(TIMING_FILE), timing.as_bytes())?;
    for (i, s) in series.iter().enumerate() {
        write_file(&dir.join(format!("path_{i}.csv")), s.to_csv().as_bytes())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_format() {
        let mut s = Series::new("t,x");
        s.push_numbers(&[0.0, 1.5]);
        s.push_numbers(&[0.1, -2e-9]);
        assert_eq!(s.to_csv(), "t,x\n0,1.5\n0.1,-0.000000002\n");
    }

    #[test]
    fn unwritable_dir_is_runtime_error() {
        let tmp = tempfile::tempdir().unwrap();
        let blocker = tmp.path().join("file");
        fs::write(&blocker, b"x").unwrap();
        let cfg = crate::scenario::defaults("ex44_annulus").unwrap();
        let report = RunReport {
            schema: SCHEMA,
            scenario: cfg.scenario.clone(),
            anchor: String::new(),
            config: cfg,
            steps_per_path: 0,
            shyness: None,
            bounds: None,
            variation: None,
            metrics: BTreeMap::new(),
            checks: Vec::new(),
        };
        let timing = Timing { wall_seconds: 0.0, total_steps: 0, steps_per_second: 0.0, workers: 1 };
        let e = write_outputs(&blocker.join("sub"), &report, &timing, &[]).unwrap_err();
        assert_eq!(e.exit_code(), 3);
        assert!(report.to_json().contains("\"schema\": 1"));
    }
}
