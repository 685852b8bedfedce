//! `curvlab`: run identity checks over catalog spaces and write reports.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 on usage
//! or validation errors.

mod commands;
mod options;
mod report;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use options::Options;

#[derive(Debug, Parser)]
#[command(name = "curvlab", version, about = "Numerical curvature identities on example spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Catalog spaces, parameter ranges, checks and integrands
    List {
        #[arg(long)]
        json: bool,
    },
    /// Run checks over a sample grid and write a report
    Verify(Options),
    /// Run one check across a parameter range `a:b:steps`
    Sweep(Options),
    /// Integrate a radial quantity over a warped-product space
    Integrate(Options),
}

fn run(command: Command) -> options::CliResult<bool> {
    match command {
        Command::List { json } => commands::list(json).map(|_| true),
        Command::Verify(o) => {
            let o = o.resolve()?;
            o.init_threads()?;
            commands::verify(&o)
        }
        Command::Sweep(o) => {
            let o = o.resolve()?;
            o.init_threads()?;
            commands::sweep(&o)
        }
        Command::Integrate(o) => {
            let o = o.resolve()?;
            o.init_threads()?;
            commands::integrate(&o)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
