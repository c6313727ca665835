//! Run configuration: a JSON file that fully determines a `simulate` run.
//! Explicit flags override file fields; the seed falls back to `$BIGV_SEED`.

use serde::{Deserialize, Serialize};

use crate::AppError;
use bigv_core::{ExperimentKind, SettingPolicy};

pub const SEED_ENV: &str = "BIGV_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Option<String>,
    pub n: Option<u64>,
    pub seed: Option<u64>,
    /// "uniform" or a 3×3 matrix of setting-pair probabilities.
    pub setting_policy: Option<serde_json::Value>,
    pub out: Option<String>,
    pub summary: Option<String>,
    pub format: Option<OutputFormat>,
    pub mask_initial: Option<bool>,
}

impl RunConfig {
    pub fn load(path: &str) -> Result<Self, AppError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| AppError::Io(format!("cannot read config {path}: {e}")))?;
        serde_json::from_str(&text)
            .map_err(|e| AppError::Config(format!("bad config {path}: {e}")))
    }

    pub fn policy(&self) -> Result<SettingPolicy, AppError> {
        match &self.setting_policy {
            None => Ok(SettingPolicy::uniform()),
            Some(serde_json::Value::String(s)) if s == "uniform" => Ok(SettingPolicy::uniform()),
            Some(serde_json::Value::Array(_)) => {
                let probs: [[f64; 3]; 3] =
                    serde_json::from_value(self.setting_policy.clone().unwrap()).map_err(|e| {
                        AppError::Config(format!("setting_policy must be a 3x3 matrix: {e}"))
                    })?;
                Ok(SettingPolicy::new(probs)?)
            }
            Some(other) => Err(AppError::Config(format!(
                "setting_policy must be \"uniform\" or a 3x3 matrix, found {other}"
            ))),
        }
    }
}

/// Fully resolved simulate parameters.
pub struct ResolvedRun {
    pub kind: ExperimentKind,
    pub n: u64,
    pub seed: u64,
    pub policy: SettingPolicy,
    pub out: String,
    pub summary: String,
    pub format: OutputFormat,
    pub mask_initial: bool,
}

pub fn seed_from_env() -> Result<Option<u64>, AppError> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .parse::<u64>()
            .map(Some)
            .map_err(|_| AppError::Config(format!("{SEED_ENV}={v} is not a u64"))),
        Err(_) => Ok(None),
    }
}
