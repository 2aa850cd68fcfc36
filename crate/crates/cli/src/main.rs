// Copyright 2026 The annealnet Authors
// SPDX-License-Identifier: Apache-2.0

//! `annealnet` command line: train, evaluate, baselines and benchmarks.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use annealnet::evolution::EvolutionMethod;
use annealnet::harness::{self, ExperimentConfig};
use annealnet::learning::{parse_spec_line, Network, CHECKPOINT_MAGIC};

#[derive(Parser)]
#[command(name = "annealnet", version, about = "Neural networks that program a simulated quantum annealer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment file (flat TOML).
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Serial sample loops.
    #[arg(long)]
    deterministic: bool,
    /// Output directory for reports and the checkpoint.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn load(&self) -> anyhow::Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::from_file(&self.config)?;
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if self.deterministic {
            cfg.deterministic = true;
        }
        if let Some(o) = &self.out {
            cfg.out_dir = Some(o.clone());
        }
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Train a model and write report.csv, report.meta, confusion.csv and model.ckpt.
    Train(RunArgs),
    /// Evaluate a saved checkpoint.
    Eval {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        checkpoint: PathBuf,
    },
    /// Nearest-class-mean accuracy of the raw features.
    Baseline(RunArgs),
    /// Overlap error of Trotter evolution against the exact integrator.
    BenchTrotter {
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6")]
        qubits: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "5,10,20,40,80")]
        tn: Vec<usize>,
        #[arg(long, default_value_t = 2)]
        order: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Median wall-clock time of one slice update.
    BenchTiming {
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6,7,8")]
        qubits: Vec<usize>,
        /// `exact` or `trotter<order>-tn<number>`.
        #[arg(long, value_delimiter = ',', default_value = "exact,trotter2-tn50")]
        methods: Vec<String>,
        #[arg(long, default_value_t = 5)]
        reps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the layer list and parameter count of a checkpoint.
    InspectCheckpoint { path: PathBuf },
}

fn parse_method(s: &str) -> anyhow::Result<EvolutionMethod> {
    if s == "exact" {
        return Ok(EvolutionMethod::Exact);
    }
    let rest = s
        .strip_prefix("trotter")
        .with_context(|| format!("unknown method `{s}`"))?;
    let (order, tn) = rest
        .split_once("-tn")
        .with_context(|| format!("method `{s}` should look like trotter2-tn50"))?;
    Ok(EvolutionMethod::trotter(order.parse()?, tn.parse()?)?)
}

fn emit(out: Option<&Path>, name: &str, body: &str) -> anyhow::Result<()> {
    print!("{body}");
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        fs::write(dir.join(name), body)?;
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Train(args) => {
            let cfg = args.load()?;
            let report = harness::run_experiment(&cfg)?;
            print!("{}", report.metrics_csv());
        }
        Command::Eval { run, checkpoint } => {
            let cfg = run.load()?;
            let report = harness::run_eval(&cfg, &checkpoint)?;
            print!("{}", report.metrics_csv());
        }
        Command::Baseline(args) => {
            let cfg = args.load()?;
            print!("{}", harness::run_baseline(&cfg)?.csv());
        }
        Command::BenchTrotter {
            qubits,
            tn,
            order,
            seed,
            out,
        } => {
            let rows = harness::run_trotter_error_bench(&qubits, &tn, order, seed)?;
            emit(out.as_deref(), "trotter_error.csv", &harness::trotter_error_csv(&rows))?;
        }
        Command::BenchTiming {
            qubits,
            methods,
            reps,
            out,
        } => {
            let methods = methods.iter().map(|m| parse_method(m)).collect::<anyhow::Result<Vec<_>>>()?;
            let rows = harness::run_timing_bench(&qubits, &methods, reps)?;
            emit(out.as_deref(), "timing.csv", &harness::timing_csv(&rows))?;
        }
        Command::InspectCheckpoint { path } => {
            let net = Network::<f64>::load(&path)?;
            let spec = net.spec_line();
            let (input, layers) = parse_spec_line(&spec)?;
            if layers.is_empty() {
                bail!("{} has no layers", path.display());
            }
            println!("format: {CHECKPOINT_MAGIC}");
            println!("input: {input:?}");
            for l in &layers {
                println!("layer: {l} params={}", l.parameter_count());
            }
            println!("parameters: {}", net.parameter_count());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let kind = e
                .downcast_ref::<annealnet::Error>()
                .map(annealnet::Error::kind)
                .unwrap_or("error");
            let line = serde_json::json!({ "error": kind, "message": format!("{e:#}") });
            eprintln!("{line}");
            ExitCode::FAILURE
        }
    }
}
