//! Artifact directory with a checksum manifest.

use pucci_core::{Error, Result};
use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub struct OutDir {
    root: PathBuf,
    /// `(file name, sha256 hex, byte count)` in write order.
    artifacts: Vec<(String, String, usize)>,
}

/// `{:.16e}`: 17 significant digits, enough to round-trip an `f64`.
pub fn float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Serializes through `Value`, whose maps are ordered by key.
pub fn json_string<T: Serialize>(v: &T) -> Result<String> {
    let value = serde_json::to_value(v)?;
    let mut s = serde_json::to_string_pretty(&value)?;
    s.push('\n');
    Ok(s)
}

pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Self { text }
    }

    pub fn row(&mut self, cells: &[String]) {
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn float_row(&mut self, lead: &[String], values: &[f64]) {
        let mut cells = lead.to_vec();
        cells.extend(values.iter().map(|v| float(*v)));
        self.row(&cells);
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.text.into_bytes()
    }
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self> {
        std::fs::create_dir_all(root).map_err(|e| Error::Io(format!("{}: {e}", root.display())))?;
        Ok(Self {
            root: root.to_path_buf(),
            artifacts: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.root.join(name);
        std::fs::write(&path, bytes).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let digest = Sha256::digest(bytes);
        let mut hex = String::with_capacity(64);
        for b in digest.iter() {
            let _ = write!(hex, "{b:02x}");
        }
        self.artifacts.push((name.to_string(), hex, bytes.len()));
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, v: &T) -> Result<()> {
        self.write(name, json_string(v)?.as_bytes())
    }

    /// Writes `manifest.json` with the resolved config and artifact checksums.
    pub fn finish(self, command: &str, config: &Value) -> Result<PathBuf> {
        let mut artifacts = Map::new();
        for (name, sha, bytes) in &self.artifacts {
            artifacts.insert(name.clone(), json!({"sha256": sha, "bytes": bytes}));
        }
        let manifest = json!({
            "command": command,
            "version": env!("CARGO_PKG_VERSION"),
            "config": config,
            "artifacts": Value::Object(artifacts),
        });
        let path = self.root.join("manifest.json");
        std::fs::write(&path, json_string(&manifest)?).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Ok(self.root)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23] {
            assert_eq!(float(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(float(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn keys_are_sorted() {
        let s = json_string(&json!({"b": 1, "a": {"d": 2, "c": 3}})).unwrap();
        assert!(s.find("\"a\"").unwrap() < s.find("\"b\"").unwrap());
        assert!(s.find("\"c\"").unwrap() < s.find("\"d\"").unwrap());
    }
}
