use std::process::ExitCode;

use clap::Parser;

mod args;
mod commands;
mod error;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).parse_default_env().init();

    let outcome = match &cli.command {
        Command::DesignTest(a) => commands::design_test(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Tomography(a) => commands::tomography(a),
        Command::Identity(a) => commands::identity(a),
        Command::Mitigate(a) => commands::mitigate(a),
        Command::Frequencies(a) => commands::frequencies(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
