//! Run configuration: JSON file plus command-line overrides.

use std::path::{Path, PathBuf};

use fontan_core::io::read_json;
use fontan_core::model::{HeartCoupling, ParameterSet, SpatialProfile};
use fontan_core::pde::{FluxSign, SwitchMode, TopologyKind};
use fontan_core::{Error, Result};
use serde::Deserialize;
use serde_json::{Map, Value};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    /// Parameter values; any omitted key keeps its reference value.
    #[serde(default)]
    pub params: Option<Map<String, Value>>,
    pub params_file: Option<PathBuf>,
    #[serde(default)]
    pub ode: OdeSection,
    pub sweep: Option<SweepSection>,
    pub pde: Option<PdeSection>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OdeSection {
    pub cycles: Option<usize>,
    pub tol: Option<f64>,
    pub max_cycles: Option<usize>,
    pub initial_pa: Option<f64>,
    pub initial_pv: Option<f64>,
    pub samples_per_cycle: Option<usize>,
    pub empty_heart_guard: Option<bool>,
    pub rtol: Option<f64>,
    pub atol: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub rp: Option<Vec<f64>>,
    pub rp_start: Option<f64>,
    pub rp_stop: Option<f64>,
    pub rp_step: Option<f64>,
    pub heart_rates: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PdeSection {
    #[serde(default = "fontan")]
    pub topology: TopologyKind,
    /// Profile CSV; without it the lumped-mimic profile is built from the
    /// parameter set.
    pub profile_file: Option<PathBuf>,
    pub mimic_nodes: Option<usize>,
    pub coupling: Option<HeartCoupling<f64>>,
    #[serde(default)]
    pub flux_sign: FluxSign,
    #[serde(default)]
    pub switch_mode: SwitchMode,
    pub epsilon_fraction: Option<f64>,
    pub steps_per_cycle: Option<usize>,
    pub tol: Option<f64>,
    pub max_cycles: Option<usize>,
    pub cycles: Option<usize>,
    /// Uniform initial pressure (mmHg). Mimic runs default to the lumped
    /// periodic state.
    pub initial_pressure: Option<f64>,
    /// Keep a snapshot every this many steps of the final cycle.
    pub snapshot_every: Option<usize>,
    /// Slack for the bound monitor (mmHg).
    pub bounds_slack: Option<f64>,
}

fn fontan() -> TopologyKind {
    TopologyKind::Fontan
}

/// Sets `path` (dot separated) in `root` to `value`, creating objects on
/// the way.
pub fn set_dotted(root: &mut Value, path: &str, value: Value) -> Result<()> {
    let mut cur = root;
    let keys: Vec<&str> = path.split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(Error::InvalidInput(format!("bad override key `{path}`")));
    }
    for (i, key) in keys.iter().enumerate() {
        if !cur.is_object() {
            if cur.is_null() {
                *cur = Value::Object(Map::new());
            } else {
                return Err(Error::InvalidInput(format!("override `{path}`: `{}` is not an object", keys[..i].join("."))));
            }
        }
        let obj = cur.as_object_mut().expect("object");
        if i + 1 == keys.len() {
            obj.insert((*key).to_string(), value);
            return Ok(());
        }
        cur = obj.entry(*key).or_insert(Value::Null);
    }
    unreachable!()
}

/// Parses `key=value`; the value is read as JSON and falls back to a string.
pub fn parse_override(s: &str) -> Result<(String, Value)> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| Error::InvalidInput(format!("override `{s}` is not key=value")))?;
    let value = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
    Ok((k.trim().to_string(), value))
}

/// Config with paths made absolute relative to the config file.
pub struct Loaded {
    pub raw: RawConfig,
    pub base: PathBuf,
}

pub fn load(path: Option<&Path>, overrides: &[(String, Value)]) -> Result<Loaded> {
    let (mut value, base) = match path {
        Some(p) => (
            read_json::<Value>(p)?,
            p.parent().map(Path::to_path_buf).unwrap_or_default(),
        ),
        None => (Value::Object(Map::new()), PathBuf::from(".")),
    };
    for (k, v) in overrides {
        set_dotted(&mut value, k, v.clone())?;
    }
    let raw: RawConfig = serde_json::from_value(value).map_err(|e| Error::Parse {
        path: path.map_or("<overrides>".into(), |p| p.display().to_string()),
        message: e.to_string(),
    })?;
    Ok(Loaded { raw, base })
}

impl Loaded {
    fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base.join(p)
        }
    }

    pub fn params(&self) -> Result<ParameterSet<f64>> {
        let mut v = serde_json::to_value(ParameterSet::<f64>::reference()).expect("params serialize");
        let obj = v.as_object_mut().expect("object");
        if let Some(file) = &self.raw.params_file {
            let file = self.resolve(file);
            let m: Map<String, Value> = read_json(&file)?;
            obj.extend(m);
        }
        if let Some(m) = &self.raw.params {
            obj.extend(m.clone());
        }
        let p: ParameterSet<f64> = serde_json::from_value(v).map_err(|e| Error::Parse {
            path: "params".into(),
            message: e.to_string(),
        })?;
        p.validate().into_result()?;
        Ok(p)
    }

    pub fn profile(&self) -> Result<Option<SpatialProfile<f64>>> {
        let Some(pde) = &self.raw.pde else { return Ok(None) };
        let Some(file) = &pde.profile_file else { return Ok(None) };
        let file = self.resolve(file);
        if !file.is_file() {
            return Err(Error::InvalidInput(format!("profile file {} does not exist", file.display())));
        }
        Ok(Some(SpatialProfile::from_csv_path(&file)?))
    }
}
