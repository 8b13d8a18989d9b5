//! Parameter resolution: defaults, then the config file, then flags, then the
//! sweep axis.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::CliError;

pub type Params = Map<String, Value>;

fn object(value: Value, what: &str) -> Result<Params, CliError> {
    match value {
        Value::Object(map) => Ok(map),
        _ => Err(CliError::Config(format!("{what} must be a JSON object"))),
    }
}

/// Default parameters of a subcommand as a flat JSON object.
pub fn defaults<P: Serialize + Default>() -> Params {
    object(serde_json::to_value(P::default()).expect("plain data"), "defaults")
        .expect("parameter structs serialize to objects")
}

pub fn read_config(path: &Path) -> Result<Params, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))?;
    object(value, "config file")
}

/// Makes relative file paths in a config file relative to the file itself.
/// The values `builtin` and the empty string are left alone.
pub fn anchor_paths(config: &mut Params, keys: &[&str], config_path: &Path) {
    let Some(dir) = config_path.parent() else {
        return;
    };
    for key in keys {
        if let Some(Value::String(s)) = config.get_mut(*key) {
            if !s.is_empty() && s != "builtin" && Path::new(s.as_str()).is_relative() {
                *s = dir.join(s.as_str()).to_string_lossy().into_owned();
            }
        }
    }
}

/// Overlays `layer` onto `base`; every key must already be known.
pub fn overlay(base: &mut Params, layer: Params) -> Result<(), CliError> {
    for (key, value) in layer {
        if !base.contains_key(&key) {
            return Err(CliError::Config(format!("unknown parameter `{key}`")));
        }
        if value.is_null() {
            return Err(CliError::Config(format!("invalid value for `{key}`: must be a finite number")));
        }
        base.insert(key, value);
    }
    Ok(())
}

pub fn resolve<P: DeserializeOwned>(params: &Params) -> Result<P, CliError> {
    serde_path_to_error::deserialize(Value::Object(params.clone())).map_err(|e| {
        let key = e.path().to_string();
        CliError::Config(format!("invalid value for `{key}`: {}", e.inner()))
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub key: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub log: bool,
}

impl Sweep {
    /// `name=start:stop:count[:log]`.
    pub fn parse(spec: &str) -> Result<Self, CliError> {
        let bad = |why: &str| CliError::Config(format!("invalid value for `sweep`: {why} in `{spec}`"));
        let (key, range) = spec.split_once('=').ok_or_else(|| bad("expected name=start:stop:count"))?;
        let parts: Vec<&str> = range.split(':').collect();
        if !(3..=4).contains(&parts.len()) {
            return Err(bad("expected start:stop:count[:log]"));
        }
        let start: f64 = parts[0].parse().map_err(|_| bad("start is not a number"))?;
        let stop: f64 = parts[1].parse().map_err(|_| bad("stop is not a number"))?;
        let count: usize = parts[2].parse().map_err(|_| bad("count is not an integer"))?;
        let log = match parts.get(3) {
            None | Some(&"lin") | Some(&"linear") => false,
            Some(&"log") => true,
            Some(_) => return Err(bad("spacing must be `log` or `lin`")),
        };
        if count < 2 {
            return Err(bad("count must be at least 2"));
        }
        if !start.is_finite() || !stop.is_finite() {
            return Err(bad("range must be finite"));
        }
        if log && !(start > 0.0 && stop > 0.0) {
            return Err(bad("log spacing needs positive bounds"));
        }
        Ok(Sweep {
            key: key.trim().to_string(),
            start,
            stop,
            count,
            log,
        })
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|i| {
                let s = i as f64 / (n - 1) as f64;
                if i == n - 1 {
                    self.stop
                } else if self.log {
                    (self.start.ln() + (self.stop.ln() - self.start.ln()) * s).exp()
                } else {
                    self.start + (self.stop - self.start) * s
                }
            })
            .collect()
    }

    /// One parameter set per sweep point, sorted by the swept value. Integer
    /// parameters are rounded and duplicates dropped.
    pub fn expand(&self, base: &Params) -> Result<Vec<(Value, Params)>, CliError> {
        let current = base
            .get(&self.key)
            .ok_or_else(|| CliError::Config(format!("unknown parameter `{}`", self.key)))?;
        let integer = current.is_u64() || current.is_i64();
        if !(integer || current.is_f64() || current.is_null()) {
            return Err(CliError::Config(format!(
                "invalid value for `sweep`: parameter `{}` is not numeric",
                self.key
            )));
        }
        let mut points: Vec<Value> = Vec::new();
        let mut values = self.values();
        values.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        for v in values {
            let value = if integer {
                let r = v.round();
                if r < 0.0 {
                    return Err(CliError::Config(format!(
                        "invalid value for `{}`: sweep reaches negative integer {r}",
                        self.key
                    )));
                }
                Value::from(r as u64)
            } else {
                Value::from(v)
            };
            if points.last() != Some(&value) {
                points.push(value);
            }
        }
        Ok(points
            .into_iter()
            .map(|value| {
                let mut p = base.clone();
                p.insert(self.key.clone(), value.clone());
                (value, p)
            })
            .collect())
    }
}
