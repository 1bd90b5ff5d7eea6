//! Plain `key=value` configuration files.
//!
//! Blank lines and lines starting with `#` are ignored; keys and values are
//! trimmed. Later assignments override earlier ones.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

pub type Config = BTreeMap<String, String>;

pub fn parse_config(text: &str) -> Result<Config> {
    let mut out = Config::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::InvalidParameter(format!(
                "config line {}: expected key=value, got `{line}`",
                n + 1
            )));
        };
        let key = key.trim();
        if key.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "config line {}: empty key",
                n + 1
            )));
        }
        out.insert(key.to_string(), value.trim().to_string());
    }
    Ok(out)
}
