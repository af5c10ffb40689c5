//! `shlr`: command-line front end for the SHLR reconstructions.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Arg, ArgAction, Command};

use commands::SUBCOMMANDS;
use config::{describe, parse_flags, RunConfig};
use error::CliError;

fn cli() -> Command {
    let mut cmd = Command::new("shlr")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Separable Hankel low-rank reconstruction for parallel and parameter imaging")
        .subcommand_required(true)
        .arg_required_else_help(true);
    for sub in SUBCOMMANDS {
        cmd = cmd.subcommand(
            Command::new(sub.name)
                .about(sub.about)
                .after_help(describe(sub.schema))
                .arg(
                    Arg::new("config")
                        .long("config")
                        .short('c')
                        .value_name("FILE")
                        .value_parser(clap::value_parser!(PathBuf))
                        .help("key=value config file, e.g. a manifest.txt from an earlier run"),
                )
                .arg(
                    Arg::new("settings")
                        .value_name("--KEY VALUE")
                        .num_args(0..)
                        .trailing_var_arg(true)
                        .allow_hyphen_values(true)
                        .action(ArgAction::Append)
                        .help("settings overriding the config file (see keys below)"),
                ),
        );
    }
    cmd
}

fn run() -> Result<(), CliError> {
    let matches = match cli().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            // --help and --version exit cleanly; every other parse error is a usage error.
            std::process::exit(if e.exit_code() == 0 { 0 } else { 1 });
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand required");
    let spec = SUBCOMMANDS
        .iter()
        .find(|s| s.name == name)
        .expect("registered subcommand");
    let settings: Vec<String> = sub
        .get_many::<String>("settings")
        .into_iter()
        .flatten()
        .cloned()
        .collect();
    let cwd = std::env::current_dir()
        .map_err(|e| CliError::Usage(format!("no working directory: {e}")))?;
    let cfg = RunConfig::resolve(
        spec.name,
        spec.schema,
        sub.get_one::<PathBuf>("config").map(PathBuf::as_path),
        parse_flags(&settings)?,
        &cwd,
    )?;
    (spec.run)(&cfg)
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("shlr: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
