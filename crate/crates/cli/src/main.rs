// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use l2switch_core::trace::records_to_jsonl;
use l2switch_core::{generate, run, RunError, Scenario, SwitchConfig, Trace};

#[derive(Parser)]
#[command(
    name = "l2switch",
    version,
    about = "Cycle-level store-and-forward Ethernet switch simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a trace and write the egress events.
    Run(RunArgs),
    /// Emit a named scenario trace.
    Gen(GenArgs),
    /// Check a trace without running it.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Trace file, or `-` for standard input.
    #[arg(long)]
    trace: String,
    /// Egress events (JSONL). Standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Final statistics (JSON).
    #[arg(long)]
    stats: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    ports: usize,
    #[arg(long, default_value_t = 64)]
    blocks: usize,
    #[arg(long, default_value_t = 16)]
    voq_depth: usize,
    #[arg(long)]
    fix_flood_leak: bool,
    /// Switch cycles before the run is cut off.
    #[arg(long, default_value_t = l2switch_core::switch::DEFAULT_MAX_CYCLES)]
    max_cycles: u64,
}

#[derive(Args)]
struct GenArgs {
    /// flood-then-learn, crc-drop, voq-flood-leak or line-rate-4port.
    #[arg(long)]
    scenario: Scenario,
    #[arg(long)]
    frames: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Trace output. Standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write a JSON description of the generated trace here.
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    trace: String,
    #[arg(long, default_value_t = 4)]
    ports: usize,
}

enum Failure {
    Input(anyhow::Error),
    Audit(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        if e.is_input() {
            Failure::Input(e.into())
        } else {
            Failure::Audit(e.into())
        }
    }
}

fn read_trace(path: &str) -> Result<Trace, Failure> {
    let text = if path == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .context("reading trace from stdin")?;
        s
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {path}"))?
    };
    Trace::parse(&text).map_err(|e| Failure::Input(anyhow::anyhow!("{path}: {e}")))
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => io::stdout()
            .write_all(text.as_bytes())
            .context("writing to stdout"),
    }
}

fn cmd_run(args: RunArgs) -> Result<(), Failure> {
    let trace = read_trace(&args.trace)?;
    let config = SwitchConfig {
        ports: args.ports,
        blocks: args.blocks,
        voq_depth: args.voq_depth,
        fix_flood_leak: args.fix_flood_leak,
        max_cycles: args.max_cycles,
        ..SwitchConfig::default()
    };
    let warnings = trace.validate(config.ports).map_err(RunError::from)?;
    for w in warnings {
        eprintln!("warning: {w}");
    }
    let (events, stats) = run(&config, &trace)?;
    write_output(args.out.as_deref(), &records_to_jsonl(&events))?;
    let stats_json = serde_json::to_string_pretty(&stats).context("encoding stats")? + "\n";
    if let Some(p) = &args.stats {
        fs::write(p, stats_json).with_context(|| format!("writing {}", p.display()))?;
    }
    if stats.truncated {
        eprintln!("warning: run stopped at max_cycles before the switch went quiet");
    }
    Ok(())
}

fn cmd_gen(args: GenArgs) -> Result<(), Failure> {
    let g = generate(args.scenario, args.frames, args.seed);
    write_output(args.out.as_deref(), &g.trace.to_jsonl())?;
    if let Some(p) = &args.manifest {
        let json = serde_json::to_string_pretty(&g.manifest).context("encoding manifest")? + "\n";
        fs::write(p, json).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn cmd_validate(args: ValidateArgs) -> Result<(), Failure> {
    let trace = read_trace(&args.trace)?;
    let warnings = trace
        .validate(args.ports)
        .map_err(|e| Failure::Input(anyhow::anyhow!("{}: {e}", args.trace)))?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    println!("{}: {} records ok", args.trace, trace.records.len());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Gen(a) => cmd_gen(a),
        Command::Validate(a) => cmd_validate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Audit(e)) => {
            eprintln!("audit failure: {e:#}");
            ExitCode::from(3)
        }
    }
}
