use std::io::Write;
use std::process::ExitCode;

use cartan_skel::tasks::Options;
use cartan_skel::{render_json, render_text, run};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "cartan-skel", version, about = "Skeletons, extensions and automorphisms of Cartan geometries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the tasks of a problem file, or `example-so3` for the built-in worked example.
    Run {
        file: String,
        /// Emit the reports as JSON.
        #[arg(long)]
        json: bool,
        /// Only run tasks with this name (or kind).
        #[arg(long)]
        task: Option<String>,
        /// Add finite-difference step, rank tolerance and singular values to classification reports.
        #[arg(long)]
        tolerance_report: bool,
    },
}

fn main() -> anyhow::Result<ExitCode> {
    let cli = Cli::parse();
    let Command::Run {
        file,
        json,
        task,
        tolerance_report,
    } = cli.command;
    let (reports, status) = run(&file, task.as_deref(), Options { tolerance_report });
    let body = if json { render_json(&reports) } else { render_text(&reports) };
    std::io::stdout().write_all(body.as_bytes())?;
    match status {
        Ok(()) => Ok(ExitCode::SUCCESS),
        Err(e) => {
            eprintln!("error: {e}");
            Ok(ExitCode::from(e.exit_code() as u8))
        }
    }
}
