//! Flat `key = value` configuration with `[section]` headers and `#`
//! comments. Every key can be overridden by a command-line flag; flags win
//! over the file, the file wins over built-in defaults.

use anyhow::{anyhow, Result};
use std::collections::HashMap;
use std::fmt::Display;
use std::path::Path;

#[derive(Debug, Default, Clone)]
pub struct Settings {
    map: HashMap<(String, String), String>,
}

impl Settings {
    pub fn from_file(path: &Path) -> Result<Settings> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow!("config {}: {e}", path.display()))?;
        Settings::parse(&text).map_err(|e| anyhow!("config {}: {e}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Settings> {
        let mut map = HashMap::new();
        let mut section = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| anyhow!("line {}: unterminated section header", lineno + 1))?;
                section = name.trim().to_string();
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected `key = value`, got {raw:?}", lineno + 1))?;
            map.insert(
                (section.clone(), key.trim().to_string()),
                value.trim().to_string(),
            );
        }
        Ok(Settings { map })
    }

    /// Flag overrides land here after the file is loaded.
    pub fn set(&mut self, section: &str, key: &str, value: impl Display) {
        self.map
            .insert((section.into(), key.into()), value.to_string());
    }

    pub fn set_opt(&mut self, section: &str, key: &str, value: Option<impl Display>) {
        if let Some(v) = value {
            self.set(section, key, v);
        }
    }

    pub fn raw(&self, section: &str, key: &str) -> Option<&str> {
        self.map
            .get(&(section.to_string(), key.to_string()))
            .map(String::as_str)
    }

    pub fn get_str(&self, section: &str, key: &str, default: &str) -> String {
        self.raw(section, key).unwrap_or(default).to_string()
    }

    fn parse_key<T: std::str::FromStr>(&self, section: &str, key: &str, default: T) -> Result<T>
    where
        T::Err: Display,
    {
        match self.raw(section, key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|e| anyhow!("[{section}] {key}: invalid value {v:?}: {e}")),
        }
    }

    pub fn get_usize(&self, section: &str, key: &str, default: usize) -> Result<usize> {
        self.parse_key(section, key, default)
    }

    pub fn get_u32(&self, section: &str, key: &str, default: u32) -> Result<u32> {
        self.parse_key(section, key, default)
    }

    pub fn get_u64(&self, section: &str, key: &str, default: u64) -> Result<u64> {
        self.parse_key(section, key, default)
    }

    pub fn get_f64(&self, section: &str, key: &str, default: f64) -> Result<f64> {
        self.parse_key(section, key, default)
    }

    pub fn get_bool(&self, section: &str, key: &str, default: bool) -> Result<bool> {
        match self.raw(section, key) {
            None => Ok(default),
            Some("true") | Some("1") | Some("yes") | Some("on") => Ok(true),
            Some("false") | Some("0") | Some("no") | Some("off") => Ok(false),
            Some(v) => Err(anyhow!("[{section}] {key}: invalid boolean {v:?}")),
        }
    }

    /// Comma-separated list of usize, e.g. `n_list = 8,16,32`.
    pub fn get_usize_list(&self, section: &str, key: &str, default: &[usize]) -> Result<Vec<usize>> {
        match self.raw(section, key) {
            None => Ok(default.to_vec()),
            Some(v) => v
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse()
                        .map_err(|e| anyhow!("[{section}] {key}: invalid entry {s:?}: {e}"))
                })
                .collect(),
        }
    }

    pub fn get_str_list(&self, section: &str, key: &str, default: &[&str]) -> Vec<String> {
        match self.raw(section, key) {
            None => default.iter().map(|s| s.to_string()).collect(),
            Some(v) => v.split(',').map(|s| s.trim().to_string()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_keys_comments() {
        let s = Settings::parse(
            "# top\n[run]\nkernel = wave # trailing\nn = 16\n\n[wave]\ncfl = 0.25\n",
        )
        .unwrap();
        assert_eq!(s.get_str("run", "kernel", "x"), "wave");
        assert_eq!(s.get_usize("run", "n", 0).unwrap(), 16);
        assert_eq!(s.get_f64("wave", "cfl", 0.3).unwrap(), 0.25);
        assert_eq!(s.get_f64("wave", "missing", 0.3).unwrap(), 0.3);
    }

    #[test]
    fn overrides_win() {
        let mut s = Settings::parse("[run]\nn = 16\n").unwrap();
        s.set("run", "n", 32usize);
        assert_eq!(s.get_usize("run", "n", 0).unwrap(), 32);
    }

    #[test]
    fn bad_values_name_section_and_key() {
        let s = Settings::parse("[run]\nn = pony\n").unwrap();
        let err = s.get_usize("run", "n", 0).unwrap_err().to_string();
        assert!(err.contains("[run] n"), "{err}");
    }

    #[test]
    fn lists_parse() {
        let s = Settings::parse("[bench]\nn_list = 8, 16,32\n").unwrap();
        assert_eq!(
            s.get_usize_list("bench", "n_list", &[]).unwrap(),
            vec![8, 16, 32]
        );
    }
}
