//! Run configuration: built-in defaults, overridden by command-line flags,
//! overridden in turn by keys of the `--config` JSON file.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use vsi_core::spin::{Preset, SpinSystem};

use crate::error::CliError;
use crate::formats::{read_text, Provenance};

/// Options shared by every subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Common {
    pub preset: String,
    pub seed: u64,
    pub output_dir: PathBuf,
}

impl Default for Common {
    fn default() -> Self {
        Self {
            preset: "vsi".into(),
            seed: 0,
            output_dir: PathBuf::from("vsi-out"),
        }
    }
}

impl Common {
    pub fn preset(&self) -> Result<Preset, CliError> {
        Preset::from_str(&self.preset)
            .map_err(|_| CliError::Config(format!("unknown preset `{}` (use vsi, nv, pl1..pl6)", self.preset)))
    }

    /// Preset system with optional D, d∥ and d⊥ replacements.
    pub fn spin_system(
        &self,
        zfs_d: Option<f64>,
        d_par: Option<f64>,
        d_perp: Option<f64>,
    ) -> Result<SpinSystem, CliError> {
        let mut sys = SpinSystem::preset(self.preset()?);
        if let Some(v) = zfs_d {
            sys.zfs_d = v;
        }
        if let Some(v) = d_par {
            sys.d_par_over_h = v;
        }
        if let Some(v) = d_perp {
            sys.d_perp_over_h = v;
        }
        sys.validate()?;
        Ok(sys)
    }
}

/// Flag values as JSON, with unset (`null`, empty list) entries dropped.
fn given<T: Serialize>(flags: &T) -> Map<String, Value> {
    match serde_json::to_value(flags).expect("flags serialize") {
        Value::Object(m) => m
            .into_iter()
            .filter(|(_, v)| !(v.is_null() || v.as_array().is_some_and(|a| a.is_empty())))
            .collect(),
        _ => Map::new(),
    }
}

fn overlay(base: &mut Value, top: Map<String, Value>) {
    if let Value::Object(b) = base {
        b.extend(top);
    }
}

fn from_value<T: DeserializeOwned>(v: Value, what: &str) -> Result<T, CliError> {
    serde_json::from_value(v).map_err(|e| CliError::Config(format!("{what}: {e}")))
}

/// Merges defaults, flags and the optional config file into typed options.
pub fn resolve<CF, F, P>(common_flags: &CF, flags: &F, config: Option<&Path>) -> Result<(Common, P), CliError>
where
    CF: Serialize,
    F: Serialize,
    P: Serialize + DeserializeOwned + Default,
{
    let mut common = serde_json::to_value(Common::default()).expect("defaults serialize");
    let mut params = serde_json::to_value(P::default()).expect("defaults serialize");
    overlay(&mut common, given(common_flags));
    overlay(&mut params, given(flags));
    if let Some(path) = config {
        let text = read_text(path).map_err(|e| CliError::Config(e.to_string()))?;
        let file: Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let Value::Object(file) = file else {
            return Err(CliError::Config(format!("{}: expected a JSON object", path.display())));
        };
        let common_keys: Vec<String> = common.as_object().map(|m| m.keys().cloned().collect()).unwrap_or_default();
        let (c, p): (Map<String, Value>, Map<String, Value>) =
            file.into_iter().partition(|(k, _)| common_keys.contains(k));
        overlay(&mut common, c);
        overlay(&mut params, p);
    }
    Ok((from_value(common, "options")?, from_value(params, "options")?))
}

/// Output directory plus the provenance stamped on every file.
pub struct Run {
    pub out: PathBuf,
    pub prov: Provenance,
    pub written: Vec<PathBuf>,
}

#[derive(Serialize)]
struct Hashed<'a, P> {
    command: &'a str,
    preset: &'a str,
    seed: u64,
    params: &'a P,
}

impl Run {
    /// The config hash covers the command, preset, seed and parameters but
    /// not the output directory.
    pub fn new<P: Serialize>(command: &str, common: &Common, params: &P) -> Result<Self, CliError> {
        let prov = Provenance::for_config(
            &Hashed {
                command,
                preset: &common.preset,
                seed: common.seed,
                params,
            },
            common.seed,
        );
        fs::create_dir_all(&common.output_dir)
            .map_err(|e| CliError::Output(format!("{}: {e}", common.output_dir.display())))?;
        Ok(Self {
            out: common.output_dir.clone(),
            prov,
            written: Vec::new(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    pub fn write(&mut self, name: &str, text: &str) -> Result<PathBuf, CliError> {
        let p = self.path(name);
        fs::write(&p, text).map_err(|e| CliError::Output(format!("{}: {e}", p.display())))?;
        self.written.push(p.clone());
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Debug, Default, PartialEq, Serialize, Deserialize)]
    #[serde(default, deny_unknown_fields)]
    struct P {
        a: f64,
        b: Option<f64>,
        c: Vec<f64>,
    }

    #[derive(Serialize)]
    struct Flags {
        a: Option<f64>,
        b: Option<f64>,
        c: Vec<f64>,
    }

    #[derive(Serialize)]
    struct NoCommon {
        seed: Option<u64>,
    }

    #[test]
    fn precedence() {
        let dir = tempfile::tempdir().unwrap();
        let flags = Flags {
            a: Some(1.0),
            b: Some(2.0),
            c: vec![],
        };
        let (c, p): (Common, P) = resolve(&NoCommon { seed: Some(4) }, &flags, None).unwrap();
        assert_eq!(c.seed, 4);
        assert_eq!(p, P { a: 1.0, b: Some(2.0), c: vec![] });

        let cfg = dir.path().join("c.json");
        fs::write(&cfg, r#"{"b": 7.5, "seed": 9, "c": [1, 2]}"#).unwrap();
        let (c, p): (Common, P) = resolve(&NoCommon { seed: Some(4) }, &flags, Some(&cfg)).unwrap();
        assert_eq!(c.seed, 9);
        assert_eq!(p, P { a: 1.0, b: Some(7.5), c: vec![1.0, 2.0] });
    }

    #[test]
    fn unknown_key_and_missing_file_are_config_errors() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("c.json");
        fs::write(&cfg, r#"{"zzz": 1}"#).unwrap();
        let flags = Flags { a: None, b: None, c: vec![] };
        let r: Result<(Common, P), _> = resolve(&NoCommon { seed: None }, &flags, Some(&cfg));
        assert!(matches!(r, Err(CliError::Config(_))));
        let r: Result<(Common, P), _> = resolve(&NoCommon { seed: None }, &flags, Some(&dir.path().join("nope.json")));
        assert!(matches!(r, Err(CliError::Config(_))));
    }
}
