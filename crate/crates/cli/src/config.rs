use std::ffi::OsString;
use std::fs;

use clap::parser::ValueSource;
use clap::{ArgAction, CommandFactory, FromArgMatches};

use crate::args::Cli;
use crate::Failure;

/// Parses the command line, filling flags that were not given from the
/// `--config` file.
pub fn parse(raw: Vec<OsString>) -> Result<Cli, Failure> {
    // first pass: locate --config without insisting on required flags
    let mut relaxed = Cli::command();
    for sub in relaxed.get_subcommands_mut() {
        *sub = sub.clone().mut_args(|a| a.required(false));
    }
    let matches = relaxed.try_get_matches_from(raw.clone()).map_err(Failure::Clap)?;
    let Some(path) = matches.get_one::<std::path::PathBuf>("config").cloned() else {
        return strict(raw);
    };
    let text =
        fs::read_to_string(&path).map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let table: toml::Table = text
        .parse()
        .map_err(|e| Failure::Usage(format!("cannot parse config {}: {e}", path.display())))?;

    let (name, sub_matches) = matches.subcommand().expect("subcommand is required");
    let mut cmd = Cli::command();
    cmd.build();
    let sub = cmd.find_subcommand(name).expect("matched subcommand exists");
    let mut extra = Vec::new();
    for (key, value) in &table {
        let long = key.replace('_', "-");
        let arg = sub
            .get_arguments()
            .find(|a| a.get_long() == Some(long.as_str()))
            .filter(|a| a.get_id() != "config")
            .ok_or_else(|| Failure::Usage(format!("unknown config key `{key}` for `{name}`")))?;
        let given = sub_matches.value_source(arg.get_id().as_str()) == Some(ValueSource::CommandLine)
            || (arg.is_global_set() && matches.value_source(arg.get_id().as_str()) == Some(ValueSource::CommandLine));
        if given {
            continue;
        }
        if matches!(arg.get_action(), ArgAction::SetTrue) {
            match value {
                toml::Value::Boolean(true) => extra.push(OsString::from(format!("--{long}"))),
                toml::Value::Boolean(false) => {}
                _ => return Err(Failure::Usage(format!("config key `{key}` must be a boolean"))),
            }
            continue;
        }
        extra.push(OsString::from(format!("--{long}={}", scalar(key, value)?)));
    }
    let mut merged = raw;
    merged.extend(extra);
    strict(merged)
}

fn scalar(key: &str, value: &toml::Value) -> Result<String, Failure> {
    match value {
        toml::Value::String(s) => Ok(s.clone()),
        toml::Value::Integer(i) => Ok(i.to_string()),
        toml::Value::Float(x) => Ok(x.to_string()),
        toml::Value::Boolean(b) => Ok(b.to_string()),
        toml::Value::Array(items) => {
            let parts: Result<Vec<String>, Failure> = items.iter().map(|v| scalar(key, v)).collect();
            Ok(parts?.join(","))
        }
        _ => Err(Failure::Usage(format!("config key `{key}` has an unsupported value"))),
    }
}

fn strict(raw: Vec<OsString>) -> Result<Cli, Failure> {
    let matches = Cli::command().try_get_matches_from(raw).map_err(Failure::Clap)?;
    Cli::from_arg_matches(&matches).map_err(Failure::Clap)
}
