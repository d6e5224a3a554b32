//! `xychain` command-line front end.

mod commands;
mod config;
mod output;
mod range;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Arg, ArgMatches, Command};

use commands::{key_help, CmdError, COMMANDS};
use config::{RunConfig, COMMON_KEYS};

const EXIT_CONFIG: u8 = 2;
const EXIT_NOT_CONVERGED: u8 = 3;

fn cli() -> Command {
    let mut app = Command::new("xychain")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Correlators, partition functions and entanglement of the quantum XY chain")
        .subcommand_required(true)
        .arg_required_else_help(true);
    for spec in COMMANDS {
        let mut sub = Command::new(spec.name).about(spec.about).arg(
            Arg::new("config")
                .long("config")
                .value_name("FILE")
                .value_parser(clap::value_parser!(PathBuf))
                .help("Config file (key = value lines or a JSON object); flags override it"),
        );
        for key in spec.keys.iter().chain(COMMON_KEYS) {
            sub = sub.arg(Arg::new(*key).long(*key).value_name("VALUE").allow_hyphen_values(true).help(key_help(key)));
        }
        app = app.subcommand(sub);
    }
    app
}

fn flag_values(m: &ArgMatches, keys: &[&'static str]) -> Vec<(String, String)> {
    keys.iter()
        .chain(COMMON_KEYS)
        .filter_map(|k| m.get_one::<String>(k).map(|v| (k.to_string(), v.clone())))
        .collect()
}

fn configure_threads(flag: Option<usize>) -> Result<(), String> {
    let env = match std::env::var("XY_THREADS") {
        Ok(v) => Some(v.trim().parse::<usize>().ok().filter(|n| *n > 0).ok_or_else(|| format!("XY_THREADS: expected a positive integer, got `{v}`"))?),
        Err(_) => None,
    };
    if let Some(n) = env.or(flag) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| format!("threads: {e}"))?;
    }
    Ok(())
}

fn run() -> Result<u8, (u8, String)> {
    let matches = cli().get_matches();
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    let spec = COMMANDS.iter().find(|c| c.name == name).expect("registered subcommand");
    let config_error = |e: config::ConfigError| (EXIT_CONFIG, e.to_string());

    let file = match sub.get_one::<PathBuf>("config") {
        Some(p) => RunConfig::read_file(p).map_err(config_error)?,
        None => Vec::new(),
    };
    let mut cfg = RunConfig::build(name, spec.keys, file, flag_values(sub, spec.keys)).map_err(config_error)?;
    let format = cfg.format().map_err(config_error)?;
    let threads = cfg.threads().map_err(config_error)?;
    configure_threads(threads).map_err(|e| (EXIT_CONFIG, e))?;

    let outcome = match (spec.run)(&mut cfg) {
        Ok(o) => o,
        Err(CmdError::Config(e)) => return Err(config_error(e)),
        Err(CmdError::Numeric(e)) => {
            let code = match e {
                xychain::Error::NotConverged { .. } => EXIT_NOT_CONVERGED,
                xychain::Error::InvalidParameter { .. }
                | xychain::Error::SectorMismatch(_)
                | xychain::Error::FieldOutOfRange(_)
                | xychain::Error::TooManySites(_)
                | xychain::Error::IndexOutOfRange { .. }
                | xychain::Error::GridTooCoarse(_) => EXIT_CONFIG,
                _ => 1,
            };
            return Err((code, format!("{name}: {e}")));
        }
    };
    let written = output::emit(&cfg, format, &outcome).map_err(|e| (1, format!("writing output: {e}")))?;

    let mut line = format!("xychain {name}: {}", outcome.summary);
    if let Some(err) = outcome.error_estimate {
        line.push_str(&format!("; error estimate {err:.2e}"));
    }
    if !outcome.converged {
        line.push_str("; NOT CONVERGED");
    }
    if !written.is_empty() {
        let names: Vec<String> = written.iter().map(|p| p.display().to_string()).collect();
        line.push_str(&format!("; wrote {}", names.join(", ")));
    }
    eprintln!("{line}");
    Ok(if outcome.converged { 0 } else { EXIT_NOT_CONVERGED })
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
