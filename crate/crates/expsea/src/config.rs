//! Scenario files.
//!
//! A scenario is a TOML document mirroring [`ScenarioConfig`]: top-level `seed`,
//! `replications` and `stages`, then the `[users]`, `[users.type_weights]`,
//! `[users.intent]`, `[advertisers]`, `[advertisers.budget]`, `[advertisers.bid]`,
//! `[auction]`, `[click]`, `[action]` and optional `[report]` tables. Unknown keys
//! are rejected.

use std::fs;
use std::path::Path;

use expsea_core::ScenarioConfig;

use crate::error::Error;

pub fn parse_config(text: &str, origin: &Path) -> Result<ScenarioConfig, Error> {
    let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| Error::Parse {
        path: origin.to_path_buf(),
        message: e.to_string(),
    })?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text, path)
}

pub fn to_toml(cfg: &ScenarioConfig) -> String {
    toml::to_string(cfg).expect("scenario config is always representable as TOML")
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub replications: Option<u32>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut ScenarioConfig) {
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(r) = self.replications {
            cfg.replications = r;
        }
    }
}
