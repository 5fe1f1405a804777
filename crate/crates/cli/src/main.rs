mod job;
mod output;
mod run;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use job::{read_job, Command, Format};

/// Bounds and probes for the bifurcation set of a polynomial map.
///
/// Set ATYPICAL_THREADS to cap the number of worker threads.
#[derive(Debug, Parser)]
#[command(name = "atypical", version, args_conflicts_with_subcommands = true)]
struct Cli {
    /// run a JSON job file instead of a subcommand
    #[arg(long)]
    job: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

fn init_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("ATYPICAL_THREADS") else { return Ok(()) };
    let n: usize = raw.trim().parse().map_err(|_| format!("ATYPICAL_THREADS must be a positive integer, got `{raw}`"))?;
    if n == 0 {
        return Err("ATYPICAL_THREADS must be positive".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let job = match (cli.job, cli.command) {
        (Some(path), None) => read_job(&path),
        (None, Some(cmd)) => Ok(cmd.into_job()),
        _ => Err("give either a subcommand or --job".to_string()),
    };
    let result = init_threads().and(job).and_then(|job| run::run(&job).map(|o| (job.format, o)));
    match result {
        Ok((format, outcome)) => {
            let text = match format {
                Format::Json => output::to_json(outcome.report),
                Format::Text => output::to_text(outcome.report),
            };
            // a closed pipe downstream is not an error
            let _ = writeln!(std::io::stdout().lock(), "{}", text.trim_end());
            ExitCode::from(outcome.code as u8)
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(run::EXIT_INPUT as u8)
        }
    }
}
