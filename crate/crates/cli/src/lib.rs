//! Command-line front end: argument parsing, resolved run configurations,
//! and deterministic JSON/CSV reports.

pub mod args;
pub mod config;
pub mod error;
pub mod run;

use std::fs;

pub use error::CliError;

use args::Cli;
use config::{RunConfig, SchemeConfig};

/// JSON schema of [`RunConfig`], as published in `schema/run_config.schema.json`.
pub fn run_config_schema() -> String {
    serde_json::to_string_pretty(&schemars::schema_for!(RunConfig)).expect("schema serializes") + "\n"
}

fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    match (&cli.config, &cli.command) {
        (Some(_), Some(_)) => Err(CliError::Usage("--config cannot be combined with a subcommand".into())),
        (Some(path), None) => args::load_config(path),
        (None, Some(cmd)) => {
            let scheme = match &cli.scheme {
                Some(text) => SchemeConfig::parse(text).map_err(CliError::Usage)?,
                None => SchemeConfig::Preset("aliferis2006".into()),
            };
            scheme.resolve()?;
            cmd.to_config(scheme)
        }
        (None, None) => Err(CliError::Usage("expected a subcommand or --config FILE".into())),
    }
}

/// Runs a parsed command line; returns the process exit code.
pub fn run(cli: &Cli) -> Result<u8, CliError> {
    if cli.print_schema {
        print!("{}", run_config_schema());
        return Ok(0);
    }
    let config = resolve(cli)?;
    let rendered = run::execute(&config, cli.format.into())?;
    match &cli.out {
        Some(path) => fs::write(path, &rendered.text)?,
        None => print!("{}", rendered.text),
    }
    if rendered.infeasible {
        eprintln!("error: target unreachable within the search range");
        return Ok(1);
    }
    Ok(0)
}

