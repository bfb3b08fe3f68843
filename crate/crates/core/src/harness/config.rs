use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Flat `key = value` settings; later insertions override earlier ones.
pub type ConfigMap = BTreeMap<String, String>;

/// Parses `key=value` lines. Blank lines and `#` comments are skipped;
/// keys are trimmed and underscores normalized to dashes so both
/// `best_iterate` and `best-iterate` match the flag name.
pub fn parse_key_values(text: &str) -> Result<ConfigMap> {
    let mut map = ConfigMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!(
                "line {}: expected key=value, got {raw:?}",
                lineno + 1
            ))
        })?;
        let key = key.trim().replace('_', "-");
        if key.is_empty() {
            return Err(Error::Config(format!("line {}: empty key", lineno + 1)));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}
