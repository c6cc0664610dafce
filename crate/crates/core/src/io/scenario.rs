//! Scenario configuration files (TOML).
//!
//! ```toml
//! seed = 42
//! periods = 57
//! intervention_period = 7
//! intervention_cost_per_period = 10.0
//!
//! [[processes]]
//! name = "logging"
//! channels = 3
//! base_level = 120.0
//! amplitude = 35.0
//! period_length = 12
//! noise_scale = 6.0
//! ```

use crate::error::{Error, Result};
use crate::synth::ScenarioConfig;

pub fn parse_scenario(source: &str) -> Result<ScenarioConfig> {
    let config: ScenarioConfig = toml::from_str(source).map_err(|e| {
        let line = e
            .span()
            .map_or(0, |s| source[..s.start].matches('\n').count() + 1);
        Error::parse(line, None, e.message().to_owned())
    })?;
    config.validate()?;
    Ok(config)
}

pub fn write_scenario(config: &ScenarioConfig) -> String {
    toml::to_string(config).expect("scenario config serializes")
}
