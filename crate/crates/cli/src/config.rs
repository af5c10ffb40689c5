//! Flat `key=value` run configuration.
//!
//! Values come from built-in defaults, then an optional config file, then
//! `--key value` flags. Unknown keys are rejected. Path values are made
//! absolute before anything runs: file values relative to the file's
//! directory, flag values relative to the working directory.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Value,
    /// Input file; empty means "not given".
    Input,
    /// Output directory.
    Output,
}

#[derive(Clone, Copy, Debug)]
pub struct Key {
    pub name: &'static str,
    pub default: &'static str,
    pub kind: Kind,
    pub help: &'static str,
}

pub const fn value(name: &'static str, default: &'static str, help: &'static str) -> Key {
    Key {
        name,
        default,
        kind: Kind::Value,
        help,
    }
}

pub const fn input(name: &'static str, help: &'static str) -> Key {
    Key {
        name,
        default: "",
        kind: Kind::Input,
        help,
    }
}

pub const fn output(help: &'static str) -> Key {
    Key {
        name: "out",
        default: "out",
        kind: Kind::Output,
        help,
    }
}

/// A fully resolved configuration for one subcommand.
#[derive(Clone, Debug)]
pub struct RunConfig {
    command: &'static str,
    values: BTreeMap<&'static str, String>,
}

fn parse_lines(text: &str, origin: &Path) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!(
                "{}:{}: expected key=value, got {line:?}",
                origin.display(),
                i + 1
            ))
        })?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Splits `--key value` / `--key=value` pairs.
pub fn parse_flags(args: &[String]) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let key = a
            .strip_prefix("--")
            .ok_or_else(|| CliError::Usage(format!("expected --key, got {a:?}")))?;
        match key.split_once('=') {
            Some((k, v)) => out.push((k.to_string(), v.to_string())),
            None => {
                let v = it
                    .next()
                    .ok_or_else(|| CliError::Usage(format!("--{key} needs a value")))?;
                out.push((key.to_string(), v.clone()));
            }
        }
    }
    Ok(out)
}

impl RunConfig {
    pub fn resolve(
        command: &'static str,
        schema: &[Key],
        config_file: Option<&Path>,
        flags: Vec<(String, String)>,
        cwd: &Path,
    ) -> Result<Self, CliError> {
        let mut values: BTreeMap<&'static str, String> = schema
            .iter()
            .map(|k| (k.name, k.default.to_string()))
            .collect();
        let mut layers = Vec::new();
        if let Some(path) = config_file {
            let path = absolute(cwd, path);
            let text = std::fs::read_to_string(&path)
                .map_err(|e| CliError::MissingFile(format!("{}: {e}", path.display())))?;
            let base = path
                .parent()
                .map(Path::to_path_buf)
                .unwrap_or_else(|| cwd.to_path_buf());
            layers.push((parse_lines(&text, &path)?, base));
        }
        layers.push((flags, cwd.to_path_buf()));
        for (pairs, base) in layers {
            for (k, v) in pairs {
                if k == "command" {
                    if v != command {
                        return Err(CliError::Usage(format!(
                            "config is for `{v}`, not `{command}`"
                        )));
                    }
                    continue;
                }
                let key = schema
                    .iter()
                    .find(|s| s.name == k)
                    .ok_or_else(|| CliError::Usage(format!("unknown key `{k}` for `{command}`")))?;
                let v = match key.kind {
                    Kind::Value => v,
                    _ if v.is_empty() => v,
                    _ => absolute(&base, Path::new(&v)).display().to_string(),
                };
                values.insert(key.name, v);
            }
        }
        for key in schema.iter().filter(|k| k.kind == Kind::Output) {
            let v = values.get_mut(key.name).expect("schema key");
            *v = absolute(cwd, Path::new(v.as_str())).display().to_string();
        }
        Ok(Self { command, values })
    }

    pub fn str(&self, key: &str) -> &str {
        self.values
            .get(key)
            .map(String::as_str)
            .unwrap_or_else(|| panic!("key `{key}` not in schema"))
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<T, CliError>
    where
        T::Err: std::fmt::Display,
    {
        let raw = self.str(key);
        raw.parse()
            .map_err(|e| CliError::Usage(format!("bad value for `{key}` ({raw:?}): {e}")))
    }

    /// A comma-separated list.
    pub fn list<T: FromStr>(&self, key: &str) -> Result<Vec<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        self.str(key)
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse()
                    .map_err(|e| CliError::Usage(format!("bad entry {s:?} in `{key}`: {e}")))
            })
            .collect()
    }

    pub fn path(&self, key: &str) -> Option<PathBuf> {
        let v = self.str(key);
        (!v.is_empty()).then(|| PathBuf::from(v))
    }

    pub fn required(&self, key: &str) -> Result<PathBuf, CliError> {
        self.path(key)
            .ok_or_else(|| CliError::Usage(format!("`{key}` is required")))
    }

    /// The resolved configuration in the same format it is read from.
    pub fn manifest(&self) -> String {
        let mut s = format!(
            "# shlr {} run\ncommand={}\n",
            env!("CARGO_PKG_VERSION"),
            self.command
        );
        for (k, v) in &self.values {
            let _ = writeln!(s, "{k}={v}");
        }
        s
    }
}

fn absolute(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

/// Help text listing every key of a schema.
pub fn describe(schema: &[Key]) -> String {
    let width = schema.iter().map(|k| k.name.len()).max().unwrap_or(0);
    let mut s = String::from("Keys (config file `key=value`, or `--key value`):\n");
    for k in schema {
        let default = if k.default.is_empty() {
            String::new()
        } else {
            format!(" [default: {}]", k.default)
        };
        let _ = writeln!(s, "  {:width$}  {}{default}", k.name, k.help);
    }
    s
}
