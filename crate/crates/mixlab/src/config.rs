//! Flat key=value experiment configuration: one key per line, `#` comments,
//! and an FNV-1a digest so every report carries its provenance.

use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Default)]
pub struct Config {
    map: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut map = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError(format!(
                    "line {}: expected key=value, got {raw:?}",
                    lineno + 1
                )));
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if map.insert(key.clone(), value).is_some() {
                return Err(ConfigError(format!("line {}: duplicate key {key}", lineno + 1)));
            }
        }
        Ok(Config { map })
    }

    pub fn from_pairs(pairs: &[(&str, &str)]) -> Self {
        Config {
            map: pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(|s| s.as_str())
    }

    pub fn get_f64(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        match self.map.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse::<f64>()
                .map_err(|_| ConfigError(format!("key {key}: expected a real, got {v:?}"))),
        }
    }

    pub fn get_usize(&self, key: &str, default: usize) -> Result<usize, ConfigError> {
        match self.map.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse::<usize>()
                .map_err(|_| ConfigError(format!("key {key}: expected an integer, got {v:?}"))),
        }
    }

    pub fn get_u64(&self, key: &str, default: u64) -> Result<u64, ConfigError> {
        match self.map.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse::<u64>()
                .map_err(|_| ConfigError(format!("key {key}: expected an integer, got {v:?}"))),
        }
    }

    pub fn get_str<'a>(&'a self, key: &str, default: &'a str) -> &'a str {
        self.map.get(key).map(|s| s.as_str()).unwrap_or(default)
    }

    /// Rejects unknown keys so typos surface as configuration errors.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<(), ConfigError> {
        for key in self.map.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(ConfigError(format!(
                    "unknown key {key}; allowed: {}",
                    allowed.join(", ")
                )));
            }
        }
        Ok(())
    }

    /// Canonical text: sorted key=value lines.
    pub fn canonical(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.map {
            out.push_str(k);
            out.push('=');
            out.push_str(v);
            out.push('\n');
        }
        out
    }

    /// FNV-1a 64 digest of the canonical text and the seed.
    pub fn digest(&self, seed: u64) -> String {
        let mut h: u64 = 0xcbf29ce484222325;
        for b in self.canonical().bytes().chain(seed.to_le_bytes()) {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        format!("{h:016x}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_values() {
        let cfg = Config::parse("# header\n grid_n = 128 # inline\n\namp=2.5\n").unwrap();
        assert_eq!(cfg.get_usize("grid_n", 0).unwrap(), 128);
        assert_eq!(cfg.get_f64("amp", 0.0).unwrap(), 2.5);
        assert_eq!(cfg.get_f64("missing", 7.0).unwrap(), 7.0);
    }

    #[test]
    fn rejects_junk() {
        assert!(Config::parse("nonsense line").is_err());
        assert!(Config::parse("a=1\na=2").is_err());
        let cfg = Config::parse("a=x").unwrap();
        assert!(cfg.get_f64("a", 0.0).is_err());
        assert!(cfg.check_keys(&["b"]).is_err());
    }

    #[test]
    fn digest_is_stable_and_seed_sensitive() {
        let a = Config::parse("x=1\ny=2").unwrap();
        let b = Config::parse("y=2\nx=1").unwrap();
        assert_eq!(a.digest(5), b.digest(5));
        assert_ne!(a.digest(5), a.digest(6));
    }
}
