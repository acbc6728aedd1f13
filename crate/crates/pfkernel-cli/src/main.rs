mod cli;
mod commands;
mod config;
mod failure;
mod output;

use std::process::ExitCode;

use clap::{CommandFactory, Parser};

use cli::{Cli, Command};

fn main() -> ExitCode {
    let args = match config::expand_config(std::env::args_os().collect(), &Cli::command()) {
        Ok(a) => a,
        Err(m) => {
            eprintln!("pfkernel: usage error: {m}");
            return ExitCode::from(2);
        }
    };
    let cli = Cli::try_parse_from(args).unwrap_or_else(|e| e.exit());
    let result = match &cli.command {
        Command::Density(a) => commands::density(a),
        Command::Eval(a) => commands::eval(a),
        Command::Converge(a) => commands::converge(a),
        Command::Check(a) => commands::check(a),
        Command::Sample(a) => commands::sample(a),
        Command::Special(a) => commands::special(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("pfkernel: {f}");
            ExitCode::from(f.code())
        }
    }
}
