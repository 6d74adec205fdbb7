//! JSON run configs with dotted-path overrides.

use pucci_core::asym::{FdSettings, QMeanSettings, Source};
use pucci_core::fd::{EllipticOptions, GridConfig, ParabolicOptions, ProblemKind};
use pucci_core::geometry::DomainSpec;
use pucci_core::radial::RadialKind;
use pucci_core::special::ProfileKind;
use pucci_core::{Error, PucciParams, Result, Sign};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{Map, Value};
use std::path::{Path, PathBuf};

/// A loaded config: the raw document and the directory relative paths resolve against.
pub struct RawConfig {
    pub value: Value,
    pub base_dir: PathBuf,
}

pub fn load(path: Option<&Path>) -> Result<RawConfig> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Input(format!("{}: {e}", p.display())))?;
            let value: Value =
                serde_json::from_str(&text).map_err(|e| Error::Input(format!("{}: {e}", p.display())))?;
            if !value.is_object() {
                return Err(Error::Input(format!("{}: config must be a JSON object", p.display())));
            }
            let base_dir = p.parent().map(Path::to_path_buf).unwrap_or_default();
            Ok(RawConfig { value, base_dir })
        }
        None => Ok(RawConfig {
            value: Value::Object(Map::new()),
            base_dir: PathBuf::new(),
        }),
    }
}

/// Sets `a.b.c` to `raw`, read as JSON when it parses and as a string otherwise.
pub fn apply_override(root: &mut Value, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Input(format!("override '{assignment}' is not KEY=VALUE")))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    set_path(root, key, value)
}

pub fn set_path(root: &mut Value, key: &str, value: Value) -> Result<()> {
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::Input(format!("bad override path '{key}'")));
    }
    let mut cur = root;
    for (i, part) in parts.iter().enumerate() {
        let last = i + 1 == parts.len();
        cur = match cur {
            Value::Object(map) => {
                if last {
                    map.insert(part.to_string(), value);
                    return Ok(());
                }
                map.entry(part.to_string()).or_insert_with(|| Value::Object(Map::new()))
            }
            Value::Array(items) => {
                let idx: usize = part
                    .parse()
                    .map_err(|_| Error::Input(format!("'{part}' in '{key}' is not an array index")))?;
                let len = items.len();
                let slot = items
                    .get_mut(idx)
                    .ok_or_else(|| Error::Input(format!("index {idx} in '{key}' is out of range (len {len})")))?;
                if last {
                    *slot = value;
                    return Ok(());
                }
                slot
            }
            _ => return Err(Error::Input(format!("'{key}' descends into a non-container value"))),
        };
    }
    unreachable!("loop returns on the last segment")
}

/// Deserializes with the offending field path in the error message.
pub fn typed<T: DeserializeOwned>(value: &Value) -> Result<T> {
    serde_path_to_error::deserialize(value.clone()).map_err(|e| {
        let path = e.path().to_string();
        Error::Input(format!("config field '{path}': {}", e.into_inner()))
    })
}

/// `q` as a number or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponent(pub f64);

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Exponent(v)),
            Raw::Text(t) => match t.trim().to_ascii_lowercase().as_str() {
                "inf" | "infinity" => Ok(Exponent(f64::INFINITY)),
                other => other
                    .parse()
                    .map(Exponent)
                    .map_err(|_| serde::de::Error::custom(format!("expected a number or \"inf\", got '{t}'"))),
            },
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{name} must be positive and finite, got {v}")))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecialConfig {
    pub kind: ProfileKind,
    pub a: f64,
    pub b: f64,
    pub sigma: Vec<f64>,
}

impl SpecialConfig {
    pub fn validate(&self) -> Result<()> {
        pucci_core::special::ProfileParams::new(self.a, self.b)?;
        if self.sigma.is_empty() {
            return Err(Error::Input("sigma list is empty".into()));
        }
        self.sigma.iter().try_for_each(|&s| positive("sigma", s))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadialConfig {
    pub kind: RadialKind,
    pub sign: Sign,
    pub params: PucciParams,
    pub radius: f64,
    pub epsilon: f64,
    /// Distances `|x|` from the centre.
    pub points: Vec<f64>,
}

impl RadialConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        positive("radius", self.radius)?;
        positive("epsilon", self.epsilon)?;
        if self.points.is_empty() {
            return Err(Error::Input("points list is empty".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EllipticConfig {
    pub domain: DomainSpec,
    pub sign: Sign,
    pub params: PucciParams,
    pub epsilon: f64,
    pub grid: GridConfig,
    #[serde(default)]
    pub options: EllipticOptions,
}

impl EllipticConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        positive("epsilon", self.epsilon)?;
        positive("grid.h", self.grid.h)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParabolicConfig {
    pub domain: DomainSpec,
    pub sign: Sign,
    pub params: PucciParams,
    pub t_final: f64,
    pub grid: GridConfig,
    #[serde(default)]
    pub options: ParabolicOptions,
}

impl ParabolicConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        positive("t_final", self.t_final)?;
        positive("grid.h", self.grid.h)?;
        for &t in &self.options.times {
            if !(t > 0.0 && t <= self.t_final) {
                return Err(Error::Parameter(format!("snapshot time {t} is outside (0, t_final]")));
            }
        }
        Ok(())
    }
}

fn default_source() -> Source {
    Source::Radial
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VaradhanConfig {
    pub kind: ProblemKind,
    pub domain: DomainSpec,
    pub sign: Sign,
    pub params: PucciParams,
    pub probes: Vec<Vec<f64>>,
    /// `eps_k` or `t_k`, strictly decreasing.
    pub parameters: Vec<f64>,
    #[serde(default = "default_source")]
    pub source: Source,
}

impl VaradhanConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        pucci_core::asym::check_sequence(&self.parameters, 4)?;
        if let Source::Fd(FdSettings { resolution, .. }) = &self.source {
            positive("source.resolution", *resolution)?;
        }
        if self.probes.is_empty() {
            return Err(Error::Input("probes list is empty".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QMeanConfig {
    pub kind: ProblemKind,
    pub domain: DomainSpec,
    pub sign: Sign,
    pub params: PucciParams,
    /// Centre of the touching ball; its radius is the distance to the boundary.
    pub x: Vec<f64>,
    pub q: Exponent,
    pub parameters: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub settings: Option<QMeanSettings>,
}

impl QMeanConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if !(self.q.0 > 1.0) {
            return Err(Error::Parameter(format!("unsupported exponent q = {}; need q > 1", self.q.0)));
        }
        pucci_core::asym::check_sequence(&self.parameters, 2)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsConfig {
    #[serde(rename = "N")]
    pub n: usize,
    pub q: Exponent,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelftestConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_seed() -> u64 {
    1
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn dotted_overrides() {
        let mut v = json!({"params": {"lambda": 1.0}, "probes": [[0.0, 0.5]]});
        apply_override(&mut v, "params.Lambda=2").unwrap();
        apply_override(&mut v, "probes.0.1=0.25").unwrap();
        apply_override(&mut v, "sign=minus").unwrap();
        assert_eq!(v, json!({"params": {"lambda": 1.0, "Lambda": 2}, "probes": [[0.0, 0.25]], "sign": "minus"}));
        assert!(apply_override(&mut v, "probes.3.0=1").is_err());
        assert!(apply_override(&mut v, "sign.x=1").is_err());
        assert!(apply_override(&mut v, "novalue").is_err());
    }

    #[test]
    fn field_path_in_errors() {
        let v = json!({"N": 2, "q": "two"});
        let e = typed::<ConstantsConfig>(&v).unwrap_err().to_string();
        assert!(e.contains("'q'"), "{e}");
        let v = json!({"N": 2, "q": 2, "extra": 1});
        assert!(typed::<ConstantsConfig>(&v).is_err());
        let v = json!({"N": 2, "q": "inf"});
        assert!(typed::<ConstantsConfig>(&v).unwrap().q.0.is_infinite());
    }
}
