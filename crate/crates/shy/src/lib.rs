// Copyright 2026 The Shy Coupling Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

//! Experiment harness around `shy_core`: configuration layering, the
//! built-in scenario catalogue, a deterministic parallel runner, JSON/CSV
//! outputs and graph spec files.

pub mod config;
pub mod error;
pub mod graph_io;
pub mod report;
pub mod runner;
pub mod scenario;

pub use config::{DomainSpec, ExperimentConfig, FileConfig, Overrides, PointSpec, Prepared};
pub use error::HarnessError;
pub use report::{Check, RunReport, Timing};
pub use runner::{run_experiment, RunOutput};
pub use scenario::{list_scenarios, scenario_info, ScenarioInfo, ScenarioKind};
