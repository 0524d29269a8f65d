use std::process::ExitCode;

use clap::Parser;
use relugeo_cli::{main_with, Cli};

fn main() -> ExitCode {
    if let Some(n) = std::env::var("RELUGEO_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        // Fails only if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match main_with(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("relugeo: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
