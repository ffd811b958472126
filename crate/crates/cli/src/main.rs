mod args;
mod commands;
mod report;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use args::{resolve_seed, Cli, SEED_ENV};
use commands::{execute, Output};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn main() -> ExitCode {
    // clap exits with 2 on usage errors and 0 for --help/--version
    let cli = Cli::parse();
    let env = std::env::var(SEED_ENV).ok();
    let seed = match resolve_seed(cli.seed, env.as_deref()) {
        Ok(s) => s,
        Err(e) => return error_exit(&e),
    };
    let start = Instant::now();
    let (text, code) = match execute(&cli.command, cli.format, seed) {
        Ok(Output::Csv(s)) => (s, ExitCode::SUCCESS),
        Ok(Output::Report(mut rep)) => {
            rep.wall_time_ms = start.elapsed().as_millis() as u64;
            let code = if rep.all_pass() { ExitCode::SUCCESS } else { ExitCode::from(EXIT_FAIL) };
            (serde_json::to_string_pretty(&rep).expect("report serializes") + "\n", code)
        }
        Err(e) => return error_exit(&e.to_string()),
    };
    let written = match &cli.output {
        Some(path) => std::fs::write(path, &text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        return error_exit(&format!("cannot write output: {e}"));
    }
    code
}

fn error_exit(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_USAGE)
}
