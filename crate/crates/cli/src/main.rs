mod args;
mod commands;
mod config;
mod manifest;

use std::ffi::OsString;
use std::process::ExitCode;

use clap::Parser;
use morphalign::Error;

use crate::args::Cli;

const EXIT_USAGE: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_CONFIG: u8 = 4;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Input(_) | Error::Format { .. } | Error::Io { .. } | Error::DatasetTooSmall(_) => EXIT_INPUT,
        Error::Config(_) | Error::Stat(_) => EXIT_CONFIG,
    }
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("morphalign: error: {e}");
    ExitCode::from(exit_code(e))
}

fn init_threads() -> Result<(), Error> {
    let Ok(raw) = std::env::var("MORPHALIGN_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Config(format!("MORPHALIGN_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Config(e.to_string()))
}

fn main() -> ExitCode {
    let mut argv: Vec<OsString> = std::env::args_os().collect();
    if let Some(path) = config::take_config_path(&mut argv) {
        if let Err(e) = config::apply(&mut argv, &path) {
            return fail(&e);
        }
    }
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Err(e) = init_threads() {
        return fail(&e);
    }
    match commands::run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}
