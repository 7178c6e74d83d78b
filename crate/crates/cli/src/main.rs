//! `hopss` command-line tool.
//!
//! Exit codes: 0 success, 1 usage, configuration or I/O error, 2 numerical
//! failure (solver blow-up), 3 verification failure.

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::{Failure, Globals};

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(Failure::Usage("--threads must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Failure::Usage(format!("cannot start {threads} worker threads: {e}")))?;
    }
    let globals = Globals {
        seed: cli.seed,
        config: cli.config,
        out: cli.out,
    };
    match &cli.command {
        Command::GenBase(a) => commands::gen_base(&globals, a),
        Command::Hopss(a) => commands::hopss(&globals, a),
        Command::Mixup(a) => commands::mixup(&globals, a),
        Command::Verify(a) => commands::verify(&globals, a),
        Command::Bench(a) => commands::bench(&globals, a),
        Command::Export(a) => commands::export(&globals, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.exit_code() as u8)
        }
    }
}
