mod args;
mod run;
mod svg;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Sample(a) => run::sample(a),
        Command::AcceptanceSweep(a) => run::acceptance_sweep(a),
        Command::Tables(a) => run::tables(a),
        Command::Validate(a) => run::validate(a),
        Command::Theory(a) => run::theory(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
