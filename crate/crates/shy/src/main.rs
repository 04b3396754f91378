// Copyright 2026 The Shy Coupling Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use shy::config::{ExperimentConfig, FileConfig, Overrides};
use shy::{list_scenarios, run_experiment, HarnessError};
use shy_core::analysis::{gaussian_exit_bounds, lemma34_bounds, BoundPair};

#[derive(Parser)]
#[command(name = "shy", version, about = "Simulate coupled Brownian motions and test them for shyness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a built-in scenario.
    Simulate(SimulateArgs),
    /// Evaluate analytic exit-probability bounds.
    Bounds(BoundsArgs),
    /// List the built-in scenarios.
    List,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    scenario: Option<String>,
    /// TOML config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    dt: Option<f64>,
    /// Horizon.
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    paths: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for report.json, timing.json and CSV series.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    /// Number of leading paths written as CSV.
    #[arg(long)]
    csv_paths: Option<u64>,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct BoundsArgs {
    /// Graph ball exit bounds for `t r r0 m0`.
    #[arg(long, num_args = 4, value_names = ["T", "R", "R0", "M0"])]
    lemma34: Option<Vec<f64>>,
    /// One-dimensional hitting bounds for `t r`.
    #[arg(long, num_args = 2, value_names = ["T", "R"])]
    gaussian: Option<Vec<f64>>,
}

fn simulate(args: SimulateArgs) -> Result<(), HarnessError> {
    let file = args.config.as_deref().map(FileConfig::load).transpose()?;
    let flags = Overrides {
        scenario: args.scenario,
        dt: args.dt,
        t: args.t,
        paths: args.paths,
        seed: args.seed,
        out: args.out,
        workers: args.workers,
        csv_paths: args.csv_paths,
    };
    let cfg = ExperimentConfig::resolve(file.as_ref(), &flags)?;
    let out = run_experiment(&cfg)?;
    match &cfg.out {
        Some(dir) => println!("wrote {}", dir.join(shy::report::REPORT_FILE).display()),
        None => print!("{}", out.report.to_json()),
    }
    for c in &out.report.checks {
        eprintln!("{} {}: {} (threshold {})", if c.pass { "PASS" } else { "FAIL" }, c.name, c.value, c.threshold);
    }
    eprintln!(
        "{} steps in {:.2}s ({:.3e} steps/s, {} workers)",
        out.timing.total_steps, out.timing.wall_seconds, out.timing.steps_per_second, out.timing.workers
    );
    Ok(())
}

fn print_bounds(b: &BoundPair) {
    println!("lower     {:e}", b.lower);
    println!("upper     {:e}", b.upper);
    println!("log_upper {}", b.log_upper);
    println!("r2_gt_t   {}", b.r2_gt_t);
    println!("t_lt_t0   {}", b.t_lt_t0);
    if !b.in_regime() {
        println!("warning: outside the validity regime");
    }
}

fn bounds(args: BoundsArgs) -> Result<(), HarnessError> {
    let b = if let Some(v) = args.lemma34 {
        let m0 = v[3];
        if m0 < 1.0 || m0.fract() != 0.0 {
            return Err(HarnessError::Config(format!("m0 must be a positive integer, got {m0}")));
        }
        lemma34_bounds(v[0], v[1], v[2], m0 as usize)
    } else {
        let v = args.gaussian.expect("clap group requires one mode");
        gaussian_exit_bounds(v[0], v[1])
    }
    .map_err(|e| HarnessError::Config(e.to_string()))?;
    print_bounds(&b);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Bounds(a) => bounds(a),
        Command::List => {
            for s in list_scenarios() {
                println!("{:<18} {:<12} {}", s.name, s.anchor, s.summary);
            }
            Ok(())
        }
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
