//! `--config` files: `key = value` lines turned into flags placed ahead of
//! the command-line flags, so the command line wins.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use morphalign::Error;

/// Removes `--config FILE` / `--config=FILE` from `argv`.
pub fn take_config_path(argv: &mut Vec<OsString>) -> Option<PathBuf> {
    let mut found = None;
    let mut i = 1;
    while i < argv.len() {
        let arg = argv[i].to_string_lossy().into_owned();
        if arg == "--" {
            break;
        }
        if arg == "--config" && i + 1 < argv.len() {
            found = Some(PathBuf::from(argv.remove(i + 1)));
            argv.remove(i);
        } else if let Some(p) = arg.strip_prefix("--config=") {
            found = Some(PathBuf::from(p));
            argv.remove(i);
        } else {
            i += 1;
        }
    }
    found
}

/// Parses config text into flag tokens. Values are read as TOML values
/// where possible (`alpha = 2.5`, `corpus = ["a.txt", "b.txt"]`,
/// `shuffle = true`) and as bare strings otherwise (`pivot = eng_latn`).
pub fn config_flags(text: &str) -> Result<Vec<String>, Error> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('[') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("config line {}: expected key = value", i + 1)))?;
        let flag = format!("--{}", key.trim().replace('_', "-"));
        let value = value.trim();
        let parsed = toml::from_str::<toml::Table>(&format!("v = {value}"))
            .ok()
            .and_then(|mut t| t.remove("v"));
        match parsed {
            Some(toml::Value::Boolean(true)) => out.push(flag),
            Some(toml::Value::Boolean(false)) => {}
            Some(toml::Value::Array(items)) => {
                out.push(flag);
                for item in items {
                    out.push(scalar(&item, i)?);
                }
            }
            Some(v) => {
                out.push(flag);
                out.push(scalar(&v, i)?);
            }
            None => {
                out.push(flag);
                out.push(value.to_owned());
            }
        }
    }
    Ok(out)
}

fn scalar(v: &toml::Value, line: usize) -> Result<String, Error> {
    match v {
        toml::Value::String(s) => Ok(s.clone()),
        toml::Value::Integer(n) => Ok(n.to_string()),
        toml::Value::Float(f) => Ok(f.to_string()),
        toml::Value::Boolean(b) => Ok(b.to_string()),
        _ => Err(Error::Config(format!("config line {}: unsupported value", line + 1))),
    }
}

/// Inserts the config flags right after the subcommand name.
pub fn apply(argv: &mut Vec<OsString>, path: &Path) -> Result<(), Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let flags = config_flags(&text)?;
    let sub = argv
        .iter()
        .skip(1)
        .position(|a| !a.to_string_lossy().starts_with('-'))
        .map(|p| p + 2)
        .unwrap_or(argv.len());
    argv.splice(sub..sub, flags.into_iter().map(OsString::from));
    Ok(())
}
