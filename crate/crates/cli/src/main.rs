mod args;
mod commands;
mod error;
mod outdir;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use commands::Context;
use error::CliError;
use outdir::OutDir;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).init();

    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code() as u8)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    let ctx = Context {
        out: OutDir::create(&cli.out_dir)?,
        global_seed: cli.global_seed,
    };
    match &cli.command {
        Command::GenMap(a) => commands::gen_map(&ctx, a),
        Command::GenDist(a) => commands::gen_dist(&ctx, a),
        Command::Assign(a) => commands::assign(&ctx, a),
        Command::Simulate(a) => commands::simulate(&ctx, a),
        Command::Benchmark(a) => commands::benchmark(&ctx, a),
    }
}
