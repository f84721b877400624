use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tunnel_orders_cli::{run, Command, RunOptions};

/// Large-order behavior of semiclassical tunneling expansions.
#[derive(Parser)]
#[command(name = "tunnel-orders", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute E^(k) and the coefficient rows; writes expansion.json and phi_coeffs.csv.
    Expand(Args),
    /// Closed-form large-order predictions; writes prediction.json.
    Predict(Args),
    /// Extract growth constants from computed sequences; writes fit_table.csv and report.json.
    Fit(Args),
    /// Full chain with pass/fail verdicts; writes report.json and fit_table.csv.
    Verify(Args),
    /// Independent cross-checks; writes report.json.
    Oracle(Args),
}

#[derive(clap::Args)]
struct Args {
    /// Scenario config (TOML).
    config: PathBuf,
    /// Output directory.
    #[arg(long, env = "TUNNEL_ORDERS_OUT", default_value = "tunnel-orders-out")]
    out: PathBuf,
    /// Float precision in bits for float-mode stages.
    #[arg(long)]
    precision: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Cmd::Expand(a) => (Command::Expand, a),
        Cmd::Predict(a) => (Command::Predict, a),
        Cmd::Fit(a) => (Command::Fit, a),
        Cmd::Verify(a) => (Command::Verify, a),
        Cmd::Oracle(a) => (Command::Oracle, a),
    };
    let opts = RunOptions {
        out: args.out,
        precision: args.precision,
    };
    match run(command, &args.config, &opts) {
        Ok(outcome) => {
            for line in &outcome.summary {
                println!("{line}");
            }
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            if !outcome.pass {
                eprintln!("{}: verification failed", command.name());
            }
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
