//! Loading the scenario file and applying command-line overrides.

use std::path::Path;

use ris_mimo::harness::ScenarioConfig;
use toml::Value;

use crate::CliError;

/// Parses `key=value`, where `key` is a dotted path and `value` a TOML
/// literal. Values that do not parse as TOML are taken as bare strings.
pub fn parse_override(s: &str) -> Result<(Vec<String>, Value), CliError> {
    let (key, raw) = s
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override {s:?} is not key=value")))?;
    let path: Vec<String> = key.trim().split('.').map(str::to_owned).collect();
    if path.iter().any(String::is_empty) {
        return Err(CliError::Config(format!("override key {key:?} has an empty segment")));
    }
    let raw = raw.trim();
    let value = match toml::from_str::<toml::Table>(&format!("v = {raw}")) {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => Value::String(raw.to_owned()),
    };
    Ok((path, value))
}

pub fn apply_override(doc: &mut Value, path: &[String], value: Value) -> Result<(), CliError> {
    let (last, parents) = path.split_last().expect("non-empty path");
    let mut node = doc;
    for seg in parents {
        let table = node
            .as_table_mut()
            .ok_or_else(|| CliError::Config(format!("override path {} crosses a non-table", path.join("."))))?;
        node = table
            .entry(seg.clone())
            .or_insert_with(|| Value::Table(Default::default()));
    }
    node.as_table_mut()
        .ok_or_else(|| CliError::Config(format!("override path {} crosses a non-table", path.join("."))))?
        .insert(last.clone(), value);
    Ok(())
}

/// Deserialises with the failing field's path in the message.
pub fn from_value(doc: Value) -> Result<ScenarioConfig, CliError> {
    let cfg: ScenarioConfig = serde_path_to_error::deserialize(doc).map_err(|e| {
        let path = e.path().to_string();
        // the TOML deserializer appends its own location on later lines
        let msg = e.into_inner().to_string();
        let msg = msg.lines().next().unwrap_or_default().to_owned();
        if path == "." {
            CliError::Config(msg)
        } else {
            CliError::Config(format!("{path}: {msg}"))
        }
    })?;
    cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(cfg)
}

pub fn load(path: &Path, overrides: &[String]) -> Result<ScenarioConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut doc: Value = toml::from_str::<toml::Table>(&text)
        .map(Value::Table)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    for o in overrides {
        let (p, v) = parse_override(o)?;
        apply_override(&mut doc, &p, v)?;
    }
    from_value(doc)
}
