//! Scenario documents: JSON files describing users, simulation controls, and
//! optional run options. Unknown keys are rejected with the offending key
//! named; semantic violations name the field (and user index) involved.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use cr_sched_core::{
    PowerMode, PrimarySide, Scenario, UserLink, DEFAULT_BETA, DEFAULT_SEED, DEFAULT_TRIALS,
};
use serde::{Deserialize, Serialize};

use crate::presets::preset_scenario;

/// Which probability columns a run computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodArg {
    ClosedForm,
    Quadrature,
    MonteCarlo,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

/// `--power` argument; mirrors the core power modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PowerArg {
    Exact,
    Approx,
}

impl From<PowerArg> for PowerMode {
    fn from(p: PowerArg) -> Self {
        match p {
            PowerArg::Exact => PowerMode::Exact,
            PowerArg::Approx => PowerMode::Approx,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    users: Vec<UserEntry>,
    beta: Option<f64>,
    trials: Option<u64>,
    seed: Option<u64>,
    method: Option<MethodArg>,
    power_mode: Option<PowerMode>,
    primary: Option<PrimaryEntry>,
    format: Option<OutputFormat>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct UserEntry {
    d_sd: f64,
    d_sp: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PrimaryEntry {
    p_u: Option<f64>,
    p_a: Option<f64>,
    p_m: Option<f64>,
    eta0: Option<f64>,
    delta_pd_sq: Option<f64>,
}

/// A scenario plus the run options the document may carry.
#[derive(Debug, Clone)]
pub struct LoadedScenario {
    pub scenario: Scenario,
    pub method: Option<MethodArg>,
    pub format: Option<OutputFormat>,
    pub label: String,
}

/// Loads a scenario from a preset name (`fig1`..`fig4`) or a JSON file path.
pub fn load_scenario(spec: &str) -> Result<LoadedScenario> {
    if let Some(scenario) = preset_scenario(spec) {
        return Ok(LoadedScenario {
            scenario,
            method: None,
            format: None,
            label: spec.to_string(),
        });
    }

    let path = Path::new(spec);
    let text = fs::read_to_string(path).with_context(|| format!("reading scenario {spec}"))?;
    let file: ScenarioFile =
        serde_json::from_str(&text).with_context(|| format!("parsing scenario {spec}"))?;
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| spec.to_string());

    let beta = file.beta.unwrap_or(DEFAULT_BETA);
    if file.users.len() < 2 {
        bail!("users: need at least 2 entries, got {}", file.users.len());
    }
    let mut users = Vec::with_capacity(file.users.len());
    for (i, entry) in file.users.iter().enumerate() {
        let link =
            UserLink::new(entry.d_sd, entry.d_sp, beta).with_context(|| format!("users[{i}]"))?;
        users.push(link);
    }

    let mut primary = PrimarySide::default();
    if let Some(p) = file.primary {
        if let Some(v) = p.p_u {
            primary.p_u = v;
        }
        if let Some(v) = p.p_a {
            primary.p_a = v;
        }
        if let Some(v) = p.p_m {
            primary.p_m = v;
        }
        if let Some(v) = p.eta0 {
            primary.eta0 = v;
        }
        if let Some(v) = p.delta_pd_sq {
            primary.delta_pd_sq = v;
        }
    }
    primary.validate().context("primary")?;

    let scenario = Scenario {
        users,
        beta,
        primary,
        power_mode: file.power_mode.unwrap_or_default(),
        trials: file.trials.unwrap_or(DEFAULT_TRIALS),
        seed: file.seed.unwrap_or(DEFAULT_SEED),
        record_snr: false,
    };
    scenario.validate()?;

    Ok(LoadedScenario {
        scenario,
        method: file.method,
        format: file.format,
        label,
    })
}
