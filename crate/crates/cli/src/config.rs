//! `key = value` config files, spliced into argv right after the
//! subcommand name so that flags given on the command line win.

use std::path::Path;

use clap::{ArgAction, Command};

use crate::UsageError;

/// Parsed lines of a config file, in file order.
pub fn parse(text: &str) -> Result<Vec<(String, String)>, UsageError> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| UsageError(format!("config line {}: expected key = value", n + 1)))?;
        let v = v.trim();
        let v = v
            .strip_prefix('"')
            .and_then(|v| v.strip_suffix('"'))
            .unwrap_or(v);
        out.push((k.trim().replace('_', "-"), v.to_owned()));
    }
    Ok(out)
}

/// Pulls `--config PATH` / `--config=PATH` out of `argv`.
fn take_config_path(argv: &mut Vec<String>) -> Result<Option<String>, UsageError> {
    let mut found = None;
    let mut i = 0;
    while i < argv.len() {
        if argv[i] == "--" {
            break;
        }
        if argv[i] == "--config" {
            if i + 1 >= argv.len() {
                return Err(UsageError("--config needs a path".into()));
            }
            found = Some(argv.remove(i + 1));
            argv.remove(i);
        } else if let Some(p) = argv[i].strip_prefix("--config=") {
            found = Some(p.to_owned());
            argv.remove(i);
        } else {
            i += 1;
        }
    }
    Ok(found)
}

/// Returns argv with the config file's settings inserted after the
/// subcommand. Without `--config`, argv is returned as given.
pub fn expand(cmd: &Command, mut argv: Vec<String>) -> Result<Vec<String>, UsageError> {
    let Some(path) = take_config_path(&mut argv)? else {
        return Ok(argv);
    };
    let Some(pos) = argv
        .iter()
        .position(|a| cmd.get_subcommands().any(|s| s.get_name() == a))
    else {
        // let clap report the missing subcommand
        return Ok(argv);
    };
    let sub = cmd.find_subcommand(&argv[pos]).expect("subcommand exists");
    let text = std::fs::read_to_string(Path::new(&path))
        .map_err(|e| UsageError(format!("cannot read config {path}: {e}")))?;
    let mut injected = Vec::new();
    for (key, value) in parse(&text)? {
        let arg = sub
            .get_arguments()
            .find(|a| a.get_long() == Some(key.as_str()))
            .ok_or_else(|| UsageError(format!("config key {key:?} is not a flag of `{}`", sub.get_name())))?;
        match arg.get_action() {
            ArgAction::SetTrue => match value.as_str() {
                "true" => injected.push(format!("--{key}")),
                "false" => {}
                other => return Err(UsageError(format!("config key {key}: expected true or false, got {other:?}"))),
            },
            ArgAction::Append => {
                for v in value.split(',') {
                    injected.push(format!("--{key}={}", v.trim()));
                }
            }
            _ => injected.push(format!("--{key}={value}")),
        }
    }
    argv.splice(pos + 1..pos + 1, injected);
    Ok(argv)
}
