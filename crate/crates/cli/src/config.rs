//! `--config FILE.toml`: keys become `--key value` flags appended after the
//! command line, so with self-overriding arguments the file wins.
//!
//! Top-level scalar keys apply to every command. A table named after the
//! subcommand (`[count-orbit]`, or `[tt.split]` for nested ones) applies to
//! that subcommand only.

use std::ffi::OsString;

use anyhow::{bail, Context, Result};
use clap::CommandFactory;
use toml::{Table, Value};

use crate::Cli;

/// Path given to `--config`, if any.
fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(p.into());
        }
    }
    None
}

/// Names of the subcommand path present in `args`, outermost first.
fn subcommand_path(args: &[OsString]) -> Vec<String> {
    let mut cmd = Cli::command();
    let mut path = Vec::new();
    for a in args.iter().skip(1) {
        let s = a.to_string_lossy();
        let Some(sub) = cmd.find_subcommand(s.as_ref()).cloned() else {
            continue;
        };
        path.push(sub.get_name().to_string());
        cmd = sub;
        if !cmd.has_subcommands() {
            break;
        }
    }
    path
}

fn render(v: &Value) -> Result<Option<String>> {
    Ok(match v {
        Value::String(s) => Some(s.clone()),
        Value::Integer(i) => Some(i.to_string()),
        Value::Float(f) => Some(f.to_string()),
        Value::Boolean(_) => None,
        Value::Array(items) => {
            let parts = items
                .iter()
                .map(|x| render(x)?.context("arrays may only hold numbers or strings"))
                .collect::<Result<Vec<_>>>()?;
            Some(parts.join(","))
        }
        Value::Table(_) | Value::Datetime(_) => bail!("unsupported config value {v}"),
    })
}

fn push_flags(out: &mut Vec<OsString>, table: &Table) -> Result<()> {
    for (key, value) in table {
        if value.is_table() || key == "config" {
            continue;
        }
        let flag = format!("--{}", key.replace('_', "-"));
        match (value, render(value)?) {
            (Value::Boolean(true), _) => out.push(flag.into()),
            (Value::Boolean(false), _) => {}
            (_, Some(text)) => {
                out.push(flag.into());
                out.push(text.into());
            }
            (_, None) => {}
        }
    }
    Ok(())
}

/// The process arguments with config-file flags appended.
pub fn merged_args(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading config {}", path.to_string_lossy()))?;
    let doc: Table = text.parse().with_context(|| format!("parsing config {}", path.to_string_lossy()))?;
    let mut out = args.clone();
    push_flags(&mut out, &doc)?;
    let mut scope = &doc;
    for name in subcommand_path(&args) {
        match scope.get(&name) {
            Some(Value::Table(t)) => {
                push_flags(&mut out, t)?;
                scope = t;
            }
            Some(_) => bail!("config key `{name}` must be a table"),
            None => break,
        }
    }
    Ok(out)
}
