//! Reading scenario files and applying `--set` / `--seed` overrides.

use std::fs;
use std::path::Path;

use adaptive_deploy::sim::{scenario_from_value, Scenario};

use crate::Failure;

/// Scenario text parsed into a TOML table, before schema checks.
pub fn read_table(path: &Path) -> Result<toml::Table, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Runtime(format!("cannot read {}: {e}", path.display())))?;
    text.parse::<toml::Table>()
        .map_err(|e| Failure::Invalid(format!("{}: {}", path.display(), e.message())))
}

/// Parse `value` as a TOML value, falling back to a bare string.
pub fn parse_value(value: &str) -> toml::Value {
    format!("v = {value}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(value.to_string()))
}

/// Set a dotted key, creating intermediate tables as needed.
pub fn set_dotted(table: &mut toml::Table, key: &str, value: toml::Value) -> Result<(), Failure> {
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Failure::Invalid(format!("malformed override key `{key}`")));
    }
    let (last, path) = parts.split_last().expect("split yields at least one part");
    let mut cur = table;
    for (depth, part) in path.iter().enumerate() {
        let entry = cur
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry.as_table_mut().ok_or_else(|| {
            Failure::Invalid(format!("`{}` is not a section", parts[..=depth].join(".")))
        })?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

pub fn parse_assignment(text: &str) -> Result<(&str, &str), Failure> {
    text.split_once('=')
        .map(|(k, v)| (k.trim(), v.trim()))
        .filter(|(k, _)| !k.is_empty())
        .ok_or_else(|| Failure::Invalid(format!("expected key=value, got `{text}`")))
}

/// Apply overrides in order and validate the result.
pub fn resolve(mut table: toml::Table, sets: &[String], seed: Option<u64>) -> Result<Scenario, Failure> {
    for s in sets {
        let (k, v) = parse_assignment(s)?;
        set_dotted(&mut table, k, parse_value(v))?;
    }
    if let Some(seed) = seed {
        let seed = i64::try_from(seed).map_err(|_| Failure::Invalid("seed must fit in 63 bits".into()))?;
        table.insert("seed".into(), toml::Value::Integer(seed));
    }
    scenario_from_value(toml::Value::Table(table)).map_err(|e| Failure::Invalid(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_parse_as_toml_first() {
        assert_eq!(parse_value("3"), toml::Value::Integer(3));
        assert_eq!(parse_value("0.5"), toml::Value::Float(0.5));
        assert_eq!(parse_value("[1, 2]").as_array().map(Vec::len), Some(2));
        assert_eq!(parse_value("dtrp-light"), toml::Value::String("dtrp-light".into()));
    }

    #[test]
    fn dotted_keys_create_sections() {
        let mut t = toml::Table::new();
        set_dotted(&mut t, "output.window", toml::Value::Integer(5)).unwrap();
        assert_eq!(t["output"]["window"].as_integer(), Some(5));
        t.insert("seed".into(), toml::Value::Integer(1));
        assert!(set_dotted(&mut t, "seed.x", toml::Value::Integer(1)).is_err());
        assert!(set_dotted(&mut t, "a..b", toml::Value::Integer(1)).is_err());
    }
}
