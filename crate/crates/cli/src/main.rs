use std::process::ExitCode;

use anyhow::{Context, Result};
use bsv::presets;
use bsv::run::{run, Command, Options};
use bsv_core::engine::Caps;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bsv", version, about = "Exact b-function workbench for weighted homogeneous hypersurfaces")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Print the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[arg(long, global = true, value_name = "N")]
    pole_cap: Option<u32>,
    #[arg(long, global = true, value_name = "N")]
    dop_cap: Option<u32>,
    #[arg(long, global = true, value_name = "N")]
    coeff_deg_cap: Option<u64>,
    /// Leave timing and timestamp out of the report.
    #[arg(long, global = true)]
    no_timestamp: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the [[identities]] of a scenario.
    Verify { file: String },
    /// Certify b(theta) from [certify] (or the expected b).
    Certify { file: String },
    /// Search the root lattice for the first certified b(theta).
    Search { file: String },
    /// Weights, Euler eigenvalues and weight bases.
    Grade { file: String },
    /// lcm or product of b-functions, with root validation.
    Combine { file: String },
    /// V-filtration of a delta module.
    Kashiwara { file: String },
    /// lct, candidate jumping numbers and shift checks of a ledger.
    Jump { file: String },
    /// Run every section of a built-in scenario, or print it.
    Preset {
        /// Preset name, e.g. cusp-fx or quadric-general:4.
        name: Option<String>,
        /// Print the scenario as TOML instead of running it.
        #[arg(long)]
        print: bool,
        /// List the available presets.
        #[arg(long)]
        list: bool,
    },
}

/// Reads a scenario from a path, or from `preset:<name>`.
fn read_source(arg: &str) -> Result<String> {
    match arg.strip_prefix("preset:") {
        Some(name) => presets::preset(name),
        None => std::fs::read_to_string(arg).with_context(|| format!("cannot read {arg}")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match real_main(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn real_main(cli: &Cli) -> Result<u8> {
    let opts = Options {
        caps: Caps { pole: cli.pole_cap, dop: cli.dop_cap, coeff_deg: cli.coeff_deg_cap },
        timestamp: !cli.no_timestamp,
    };
    let (cmd, text) = match &cli.command {
        Cmd::Verify { file } => (Command::Verify, read_source(file)?),
        Cmd::Certify { file } => (Command::Certify, read_source(file)?),
        Cmd::Search { file } => (Command::Search, read_source(file)?),
        Cmd::Grade { file } => (Command::Grade, read_source(file)?),
        Cmd::Combine { file } => (Command::Combine, read_source(file)?),
        Cmd::Kashiwara { file } => (Command::Kashiwara, read_source(file)?),
        Cmd::Jump { file } => (Command::Jump, read_source(file)?),
        Cmd::Preset { name, print, list } => {
            if *list || name.is_none() {
                for n in presets::NAMES {
                    println!("{n}");
                }
                return Ok(0);
            }
            let text = presets::preset(name.as_deref().expect("checked"))?;
            if *print {
                print!("{text}");
                return Ok(0);
            }
            (Command::All, text)
        }
    };
    let report = run(cmd, &text, &opts)?;
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&report.to_json())?);
    } else {
        print!("{report}");
    }
    Ok(report.exit_code() as u8)
}
