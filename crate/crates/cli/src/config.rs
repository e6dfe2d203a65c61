use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{usage, CliError};
use crate::params::{command, resolve};

pub const DEFAULT_OUTPUT_DIR: &str = "out";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub subcommand: String,
    #[serde(default)]
    pub params: BTreeMap<String, Value>,
    pub seed: u64,
    pub trials: usize,
    pub output_dir: PathBuf,
}

/// Partial config read from `--config`; present fields override flags.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    pub subcommand: Option<String>,
    pub params: Option<BTreeMap<String, Value>>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub output_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| usage(format!("invalid config: {e}")))
    }

    /// Checks the subcommand and parameters and fills in parameter defaults.
    pub fn resolved(mut self) -> Result<Self, CliError> {
        let cmd = command(&self.subcommand).ok_or_else(|| usage(format!("unknown subcommand {:?}", self.subcommand)))?;
        if self.trials == 0 {
            return Err(usage("trials must be positive"));
        }
        self.params = resolve(cmd, &self.params)?;
        Ok(self)
    }
}

impl ConfigOverrides {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| usage(format!("invalid config file: {e}")))
    }
}

/// Values gathered from the command line before defaults are applied.
#[derive(Clone, Debug, Default)]
pub struct FlagValues {
    pub subcommand: Option<String>,
    pub params: BTreeMap<String, Value>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub output_dir: Option<PathBuf>,
}

/// Applies `file` over `flags`, then subcommand defaults.
pub fn merge(flags: FlagValues, file: Option<ConfigOverrides>) -> Result<ExperimentConfig, CliError> {
    let file = file.unwrap_or_default();
    let mut params = flags.params;
    if let (Some(a), Some(b)) = (&flags.subcommand, &file.subcommand) {
        if a != b {
            params.clear();
        }
    }
    let subcommand = file
        .subcommand
        .or(flags.subcommand)
        .ok_or_else(|| usage("no subcommand given (pass one or set \"subcommand\" in --config)"))?;
    let cmd = command(&subcommand).ok_or_else(|| usage(format!("unknown subcommand {subcommand:?}")))?;
    params.extend(file.params.unwrap_or_default());
    ExperimentConfig {
        subcommand,
        params,
        seed: file.seed.or(flags.seed).unwrap_or(0),
        trials: file.trials.or(flags.trials).unwrap_or(cmd.trials),
        output_dir: file
            .output_dir
            .or(flags.output_dir)
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR)),
    }
    .resolved()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flags() -> FlagValues {
        let mut params = BTreeMap::new();
        params.insert("m".to_string(), Value::from(20u64));
        FlagValues {
            subcommand: Some("chi2-tails".into()),
            params,
            seed: Some(5),
            trials: None,
            output_dir: None,
        }
    }

    #[test]
    fn file_overrides_flags() {
        let file = ConfigOverrides::from_json(r#"{"seed": 9, "params": {"eps": 0.25}}"#).unwrap();
        let cfg = merge(flags(), Some(file)).unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.params["m"], Value::from(20u64));
        assert_eq!(cfg.params["eps"], Value::from(0.25));
        assert_eq!(cfg.trials, 100_000);
        assert_eq!(cfg.output_dir, PathBuf::from(DEFAULT_OUTPUT_DIR));
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(ConfigOverrides::from_json(r#"{"sed": 9}"#).is_err());
        let cfg = merge(flags(), None).unwrap();
        let text = cfg.to_json().replace("\"seed\"", "\"extra\": 1, \"seed\"");
        assert!(ExperimentConfig::from_json(&text).is_err());
    }

    #[test]
    fn json_round_trip_is_lossless() {
        let mut f = flags();
        f.params.insert("eps".into(), Value::from(0.1 + 0.2));
        f.seed = Some(u64::MAX);
        let cfg = merge(f, None).unwrap();
        let back = ExperimentConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(cfg, back);
        assert_eq!(back.params["eps"].as_f64().unwrap().to_bits(), (0.1f64 + 0.2).to_bits());
    }

    #[test]
    fn changing_subcommand_drops_flag_params() {
        let file = ConfigOverrides::from_json(r#"{"subcommand": "lie"}"#).unwrap();
        let cfg = merge(flags(), Some(file)).unwrap();
        assert_eq!(cfg.subcommand, "lie");
        assert!(!cfg.params.contains_key("m"));
    }
}
