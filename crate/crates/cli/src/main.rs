use std::fs;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use surfsc_cli::commands::{self, Cli, SUBCOMMANDS};
use surfsc_cli::config;

fn threads_from_env() -> Result<(), String> {
    let Ok(v) = std::env::var("SURFSC_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| format!("SURFSC_THREADS must be a positive integer, got '{v}'"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let args = match config::splice(std::env::args().collect(), SUBCOMMANDS) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = Cli::try_parse_from(args).unwrap_or_else(|e| e.exit());
    if let Err(e) = threads_from_env() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }

    let start = Instant::now();
    let table = match commands::run(&cli.command) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let text = table.render(cli.format);
    match &cli.output {
        Some(path) => {
            if let Err(e) = fs::write(path, text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{text}"),
    }
    if cli.meta {
        eprintln!(
            "{}",
            serde_json::json!({
                "tool": "surfsc",
                "version": env!("CARGO_PKG_VERSION"),
                "command": cli.command.name(),
                "threads": rayon::current_num_threads(),
                "elapsed_s": start.elapsed().as_secs_f64(),
            })
        );
    }
    ExitCode::SUCCESS
}
