mod args;
mod commands;
mod config;
mod output;
mod prepare;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use serde_json::{json, Map, Value};
use srgn_core::Error;

use crate::args::{Cli, Command};

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Prepare { .. } => "prepare",
        Command::Synth { .. } => "synth",
        Command::Train { .. } => "train",
        Command::Eval { .. } => "eval",
        Command::Infer { .. } => "infer",
        Command::Gradcheck { .. } => "gradcheck",
        Command::Ablate { .. } => "ablate",
    }
}

/// Machine-readable rendering for stderr.
fn error_json(err: &Error, command: &str) -> Value {
    let mut context = Map::new();
    context.insert("command".into(), json!(command));
    match err {
        Error::Parse { line, .. } => {
            context.insert("line".into(), json!(line));
        }
        Error::MissingFeature { keys } => {
            context.insert("keys".into(), json!(keys));
        }
        Error::Validation { image_id, violations } => {
            context.insert("image_id".into(), json!(image_id));
            context.insert("violations".into(), json!(violations));
        }
        Error::Dimension { op, lhs, rhs } => {
            context.insert("op".into(), json!(op));
            context.insert("lhs".into(), json!(lhs));
            context.insert("rhs".into(), json!(rhs));
        }
        _ => {}
    }
    json!({ "code": err.code(), "message": err.to_string(), "context": context })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SRGN_LOG", "warn")).init();
    let cli = Cli::parse();
    let name = command_name(&cli.command);
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let result = commands::run(&cli.global, cli.command, &mut out).and_then(|()| Ok(out.flush()?));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", error_json(&err, name));
            ExitCode::from(if err.is_input_error() { 2 } else { 1 })
        }
    }
}
