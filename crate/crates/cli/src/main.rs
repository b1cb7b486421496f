//! Command-line front end for the uscore toolkit.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on data errors.

mod args;
mod commands;
mod config;

use std::fmt;
use std::process::ExitCode;

use clap::{CommandFactory, FromArgMatches};

use args::{Cli, Command};

/// A problem with the invocation rather than with the data.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 1;
    }
    match err.downcast_ref::<uscore::error::Error>() {
        Some(e) if !e.is_data_error() => 1,
        _ => 2,
    }
}

/// The command line as recorded in manifests: `--workers` only affects
/// speed, so it is left out.
fn recorded_argv(argv: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut skip = false;
    for a in argv.iter().skip(1) {
        if skip {
            skip = false;
        } else if a == "--workers" {
            skip = true;
        } else if !a.starts_with("--workers=") {
            out.push(a.clone());
        }
    }
    out
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let argv: Vec<String> = std::env::args().collect();
    let cmd = Cli::command();
    let expanded = match config::expand(&cmd, argv.clone()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let cli = match cmd
        .try_get_matches_from(&expanded)
        .and_then(|m| Cli::from_arg_matches(&m))
    {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let workers = cli.command.common().workers;
    if let Some(n) = workers {
        if n == 0 {
            eprintln!("error: --workers must be at least 1");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(2);
        }
    }
    let config_path = config_file_arg(&argv);
    let ctx = commands::Context {
        argv: recorded_argv(&argv),
        config_file: config_path,
    };
    let result = match &cli.command {
        Command::Score(a) => commands::score(a, &ctx),
        Command::Mine(a) => commands::mine(a, &ctx),
        Command::Filter(a) => commands::filter(a, &ctx),
        Command::Remap(a) => commands::remap(a, &ctx),
        Command::TrainSent(a) => commands::train_sent(a, &ctx),
        Command::TrainLm(a) => commands::train_lm(a, &ctx),
        Command::Selflearn(a) => commands::selflearn(a, &ctx),
        Command::Eval(a) => commands::eval(a, &ctx),
        Command::Compare(a) => commands::compare(a, &ctx),
        Command::Synth(a) => commands::synth(a, &ctx),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", describe(&e));
            ExitCode::from(exit_code(&e))
        }
    }
}

/// The error chain, skipping causes already quoted by their parent.
fn describe(err: &anyhow::Error) -> String {
    let mut out = String::new();
    for cause in err.chain() {
        let text = cause.to_string();
        if !out.contains(&text) {
            if !out.is_empty() {
                out.push_str(": ");
            }
            out.push_str(&text);
        }
    }
    out
}

fn config_file_arg(argv: &[String]) -> Option<String> {
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_owned());
        }
    }
    None
}
