//! Experiment specs from TOML files and `key=value` overrides.
//!
//! The file mirrors [`ExperimentSpec`] field for field:
//!
//! ```toml
//! total_antennas = 128
//! memory = ["inf", "ft_ea:8MB"]
//! options = ["vector_wise"]
//! topologies = ["daisy_chain"]
//! num_trials = 200
//! base_seed = 7
//!
//! [scenario]
//! num_users = 4
//!
//! [[sweep]]
//! param = "L"
//! values = [2, 4, 8, 16, 32, 64, 128]
//! ```
//!
//! Overrides are applied on top of the file. A key is either a dotted path
//! into the spec (`scenario.num_subcarriers=64`), a scenario field name
//! (`area_side=150`), or one of the shorthands below:
//!
//! | key | effect |
//! |-----|--------|
//! | `L`, `K`, `M`, `tau_p`, `D` | replace that sweep axis, or set the fixed value when not swept; a comma list creates an axis |
//! | `memory` | comma list of memory models, e.g. `fap:64KB,inf` |
//! | `option` / `options` | comma list of compression options |
//! | `topology` / `topologies` | comma list of topologies |
//! | `trials` | `num_trials` |
//! | `seed` | `base_seed` |

use std::path::Path;

use seqfront_core::experiments::{ExperimentSpec, SweepAxis, SweepParam};
use toml::{Table, Value};

use crate::error::{CliError, Result};

const SCENARIO_KEYS: &[&str] = &[
    "num_aps",
    "antennas_per_ap",
    "num_users",
    "tx_power",
    "noise_power",
    "area_side",
    "num_subcarriers",
    "bandwidth",
    "prelog",
    "pilot_length",
    "pilot_power",
    "rng_seed",
];

/// Parses a spec from TOML text; missing fields take their defaults.
pub fn parse_spec(text: &str) -> Result<ExperimentSpec> {
    toml::from_str(text).map_err(|e| CliError::config(e.to_string()))
}

pub fn load_spec(path: &Path) -> Result<ExperimentSpec> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    toml::from_str(&text).map_err(|e| CliError::Config {
        origin: Some(path.to_path_buf()),
        message: e.to_string(),
    })
}

/// The spec as TOML text; parsing it back yields the same spec.
pub fn spec_to_toml(spec: &ExperimentSpec) -> String {
    toml::to_string(spec).expect("experiment specs serialise to TOML")
}

fn to_table(spec: &ExperimentSpec) -> Table {
    Table::try_from(spec).expect("experiment specs serialise to TOML")
}

fn from_table(table: Table) -> Result<ExperimentSpec> {
    Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| CliError::config(e.message().to_string()))
}

/// Interprets an override value as a TOML literal, falling back to a bare
/// string.
fn parse_value(raw: &str) -> Value {
    let raw = raw.trim();
    match toml::from_str::<Table>(&format!("v = {raw}")) {
        Ok(mut t) => t.remove("v").expect("key was just parsed"),
        Err(_) => Value::String(raw.to_string()),
    }
}

fn list_of_strings(raw: &str) -> Value {
    Value::Array(
        raw.split(',')
            .map(|s| Value::String(s.trim().to_string()))
            .filter(|v| v.as_str() != Some(""))
            .collect(),
    )
}

fn numbers(key: &str, raw: &str) -> Result<Vec<f64>> {
    raw.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::config(format!("override {key}: '{s}' is not a number")))
        })
        .collect()
}

fn set_path(table: &mut Table, path: &str, value: Value) -> Result<()> {
    let mut parts: Vec<&str> = path.split('.').collect();
    let last = parts.pop().expect("split yields at least one part");
    let mut cur = table;
    for p in parts {
        let entry = cur
            .entry(p.to_string())
            .or_insert_with(|| Value::Table(Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| CliError::config(format!("override {path}: '{p}' is not a table")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

fn set_axis(spec: &mut ExperimentSpec, param: SweepParam, key: &str, raw: &str) -> Result<()> {
    let values = numbers(key, raw)?;
    if let Some(axis) = spec.sweep.iter_mut().find(|a| a.param == param) {
        axis.values = values;
        return Ok(());
    }
    if values.len() > 1 {
        spec.sweep.push(SweepAxis { param, values });
        return Ok(());
    }
    let v = values[0];
    let as_count = || -> Result<usize> {
        if v >= 1.0 && v.fract() == 0.0 {
            Ok(v as usize)
        } else {
            Err(CliError::config(format!(
                "override {key}: expected a positive integer, got {v}"
            )))
        }
    };
    match param {
        SweepParam::L => spec.scenario.num_aps = as_count()?,
        SweepParam::K => spec.scenario.num_users = as_count()?,
        SweepParam::M => spec.total_antennas = as_count()?,
        SweepParam::TauP => spec.scenario.pilot_length = Some(as_count()?),
        SweepParam::D => spec.scenario.area_side = v,
    }
    Ok(())
}

/// Applies `key=value` overrides in order; later ones win.
pub fn apply_overrides(spec: ExperimentSpec, overrides: &[String]) -> Result<ExperimentSpec> {
    let mut spec = spec;
    for o in overrides {
        let (key, raw) = o.split_once('=').ok_or_else(|| {
            CliError::config(format!("override '{o}' is not of the form key=value"))
        })?;
        let key = key.trim();
        if let Ok(param) = key.parse::<SweepParam>() {
            if matches!(key, "L" | "K" | "M" | "tau_p" | "D") {
                set_axis(&mut spec, param, key, raw)?;
                continue;
            }
        }
        let mut table = to_table(&spec);
        match key {
            "memory" => set_path(&mut table, "memory", list_of_strings(raw))?,
            "option" | "options" => set_path(&mut table, "options", list_of_strings(raw))?,
            "topology" | "topologies" => set_path(&mut table, "topologies", list_of_strings(raw))?,
            "trials" => set_path(&mut table, "num_trials", parse_value(raw))?,
            "seed" => set_path(&mut table, "base_seed", parse_value(raw))?,
            k if SCENARIO_KEYS.contains(&k) => {
                set_path(&mut table, &format!("scenario.{k}"), parse_value(raw))?
            }
            k => set_path(&mut table, k, parse_value(raw))?,
        }
        spec = from_table(table).map_err(|e| match e {
            CliError::Config { message, .. } => {
                CliError::config(format!("override '{key}': {message}"))
            }
            other => other,
        })?;
    }
    Ok(spec)
}
