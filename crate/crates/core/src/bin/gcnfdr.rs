// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gcnfdr::pipeline::{Pipeline, PipelineConfig, Stage};
use gcnfdr::Result;

/// Netlist to FDR prediction pipeline.
///
/// Configuration is a JSON document; every key is optional. Defaults:
/// walk {walks_per_node 10, walk_length 40, p 1, q 1, seed 1};
/// embedding {dimension 16, window 5, negatives 5, epochs 5,
/// learning_rate 0.025, min_learning_rate 0.0001, seed 2};
/// gcn {layer_dims [16,4,2,1], learning_rate 0.01, adam_beta1 0.9,
/// adam_beta2 0.999, adam_epsilon 1e-8, epochs 2000, weight_init_seed 3};
/// campaign {n_cycles 1024, injections_per_ff 256, workload_seed 4, seed 5,
/// exhaustive false, workload_file null};
/// training {flipflops null, count min(5, #flip-flops), seed 6};
/// report {bins 20, filter_outliers false}; workdir "gcnfdr-out".
///
/// Exit codes: 0 success, 1 usage or configuration, 2 input data,
/// 3 internal guard.
#[derive(Parser)]
#[command(name = "gcnfdr", version, verbatim_doc_comment)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// JSON configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Root seed; replaces every seed in the configuration
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long, global = true)]
    workdir: Option<PathBuf>,
    /// Netlist file (`.v` or `.json`)
    #[arg(long, global = true)]
    netlist: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Netlist to GML graph
    Graph {
        #[command(flatten)]
        common: Common,
        /// Netlist file; same as --netlist
        input: Option<PathBuf>,
    },
    /// node2vec features from the GML graph
    Embed(Common),
    /// Fault-injection FDR labels
    Labels(Common),
    /// Train the GCN on the selected labeled flip-flops
    Train(Common),
    /// Predict FDR for every flip-flop
    Predict(Common),
    /// Compare predictions against labels
    Report(Common),
    /// Run every stage in order
    Pipeline(Common),
}

fn pipeline(common: &Common, input: Option<PathBuf>) -> Result<Pipeline> {
    let mut cfg = match &common.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(n) = input.or_else(|| common.netlist.clone()) {
        cfg.netlist = Some(n);
    }
    if let Some(w) = &common.workdir {
        cfg.workdir = w.clone();
    }
    if let Some(s) = common.seed {
        cfg.override_seeds(s);
    }
    Pipeline::new(cfg)
}

fn run(cli: Cli) -> Result<Vec<PathBuf>> {
    let (common, input, stage) = match cli.command {
        Command::Graph { common, input } => (common, input, Some(Stage::Graph)),
        Command::Embed(c) => (c, None, Some(Stage::Embed)),
        Command::Labels(c) => (c, None, Some(Stage::Labels)),
        Command::Train(c) => (c, None, Some(Stage::Train)),
        Command::Predict(c) => (c, None, Some(Stage::Predict)),
        Command::Report(c) => (c, None, Some(Stage::Report)),
        Command::Pipeline(c) => (c, None, None),
    };
    let p = pipeline(&common, input)?;
    match stage {
        Some(s) => p.run(s),
        None => p.run_all(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
