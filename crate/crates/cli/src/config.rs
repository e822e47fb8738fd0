//! Configuration documents: a JSON object from `--config`, with command-line
//! flags written over its keys before typed deserialization.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

/// Flag values keyed by config field name; `None` leaves the file value.
#[derive(Default)]
pub struct Overrides(Vec<(&'static str, Value)>);

impl Overrides {
    pub fn set<T: Serialize>(&mut self, key: &'static str, v: Option<T>) -> &mut Self {
        if let Some(v) = v {
            // plain scalars and vectors always serialize
            self.0.push((key, serde_json::to_value(v).expect("serializable flag")));
        }
        self
    }
}

fn load(file: Option<&Path>) -> Result<Map<String, Value>> {
    let Some(path) = file else {
        return Ok(Map::new());
    };
    let text = fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
    match serde_json::from_str(&text).with_context(|| format!("config {} is not valid JSON", path.display()))? {
        Value::Object(m) => Ok(m),
        _ => bail!("config {} must be a JSON object", path.display()),
    }
}

/// Merges `file` and `overrides` into `T`. The seed is mandatory.
pub fn resolve<T: DeserializeOwned>(file: Option<&Path>, overrides: &Overrides) -> Result<T> {
    let mut map = load(file)?;
    for (k, v) in &overrides.0 {
        map.insert((*k).to_string(), v.clone());
    }
    if !map.contains_key("seed") {
        bail!("a seed is required: pass --seed or set \"seed\" in the config file");
    }
    serde_json::from_value(Value::Object(map)).context("invalid configuration")
}

/// Worker count: `SPECMIX_THREADS` if set, otherwise the available cores.
pub fn threads() -> Result<usize> {
    match std::env::var("SPECMIX_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(t) if t >= 1 => Ok(t),
            _ => bail!("SPECMIX_THREADS must be a positive integer, got {v:?}"),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(serde::Deserialize, Debug)]
    #[serde(deny_unknown_fields)]
    struct Demo {
        n: usize,
        seed: u64,
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        fs::write(&path, r#"{"n": 10, "seed": 1}"#).unwrap();
        let mut o = Overrides::default();
        o.set("n", Some(20usize)).set::<u64>("seed", None);
        let d: Demo = resolve(Some(&path), &o).unwrap();
        assert_eq!((d.n, d.seed), (20, 1));
    }

    #[test]
    fn seed_required_and_unknown_keys_rejected() {
        let mut o = Overrides::default();
        o.set("n", Some(3usize));
        let err = resolve::<Demo>(None, &o).unwrap_err();
        assert!(err.to_string().contains("seed"));
        o.set("seed", Some(1u64)).set("typo", Some(1));
        assert!(resolve::<Demo>(None, &o).is_err());
    }
}
