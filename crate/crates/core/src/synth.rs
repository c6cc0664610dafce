//! Seeded synthetic event series.
//!
//! Generated data is synthetic: a seasonal-plus-noise stand-in for enterprise
//! expense channels, used to exercise the pipeline end to end. It does not
//! reproduce any real enterprise.
//!
//! # Generator
//!
//! Every channel value is
//!
//! ```text
//! base_level + amplitude * tri((t - 1 + j) mod period_length, period_length) + noise
//! ```
//!
//! where `j` is the channel's index within its process and
//! `tri(p, L) = 1 - 4 * |p / L - 0.5|` is a triangle wave in `[-1, 1]`.
//! Noise is `noise_scale * (2u - 1)` with `u` uniform on `[0, 1)`.
//!
//! Uniforms come from SplitMix64 (increment `0x9E3779B97F4A7C15`, output mixer
//! multipliers `0xBF58476D1CE4E5B9` and `0x94D049BB133111EB`, shifts 30/27/31).
//! Each channel owns a substream: for global channel index `c` (0-based, processes
//! in config order) the initial state is `seed ^ mix(c + 1)`, with `mix` the
//! SplitMix64 output mixer. The substream yields one draw per period in order
//! `t = 1..=periods`, and `u = (draw >> 11) * 2^-53`. Only IEEE-754 add, multiply,
//! divide and abs are used, so output is bit-identical across platforms.
//!
//! When an intervention is configured, `intervention_cost_per_period` is added to
//! the first channel of every process for all periods `t >= intervention_period`.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::enterprise::EnterpriseModel;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// SplitMix64 generator.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(state: u64) -> Self {
        Self { state }
    }

    /// Substream for global channel `channel` under `seed`.
    pub fn for_channel(seed: u64, channel: u64) -> Self {
        Self::new(seed ^ mix(channel.wrapping_add(1)))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix(self.state)
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessConfig {
    pub name: String,
    pub channels: usize,
    pub base_level: f64,
    pub amplitude: f64,
    pub period_length: usize,
    pub noise_scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub periods: usize,
    pub processes: Vec<ProcessConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intervention_period: Option<usize>,
    #[serde(default)]
    pub intervention_cost_per_period: f64,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if self.periods == 0 {
            return Err(Error::Validation("periods must be at least 1".into()));
        }
        if self.processes.is_empty() {
            return Err(Error::Validation(
                "scenario needs at least one process".into(),
            ));
        }
        if let Some(p) = self.intervention_period {
            if p == 0 || p > self.periods {
                return Err(Error::Validation(format!(
                    "intervention_period {p} outside 1..={}",
                    self.periods
                )));
            }
        }
        if !self.intervention_cost_per_period.is_finite() {
            return Err(Error::Validation("intervention cost must be finite".into()));
        }
        let mut names = HashSet::new();
        for p in &self.processes {
            if p.name.is_empty() || !names.insert(p.name.as_str()) {
                return Err(Error::Validation(format!(
                    "process names must be non-empty and unique (`{}`)",
                    p.name
                )));
            }
            if p.channels == 0 {
                return Err(Error::Validation(format!(
                    "process `{}` has no channels",
                    p.name
                )));
            }
            if p.period_length == 0 {
                return Err(Error::Validation(format!(
                    "process `{}` needs period_length >= 1",
                    p.name
                )));
            }
            if !(p.noise_scale.is_finite() && p.noise_scale >= 0.0) {
                return Err(Error::Validation(format!(
                    "process `{}` has invalid noise_scale {}",
                    p.name, p.noise_scale
                )));
            }
            if !(p.base_level.is_finite() && p.amplitude.is_finite()) {
                return Err(Error::Validation(format!(
                    "process `{}` has non-finite level or amplitude",
                    p.name
                )));
            }
        }
        Ok(())
    }

    pub fn total_channels(&self) -> usize {
        self.processes.iter().map(|p| p.channels).sum()
    }

    /// Channel labels `<process>_<j>` with `j` starting at 1.
    pub fn channel_labels(&self) -> Vec<String> {
        self.processes
            .iter()
            .flat_map(|p| (1..=p.channels).map(move |j| format!("{}_{j}", p.name)))
            .collect()
    }

    /// Zero-based indices of the channels that carry the intervention cost.
    pub fn intervention_channels(&self) -> Vec<usize> {
        let mut start = 0;
        self.processes
            .iter()
            .map(|p| {
                let first = start;
                start += p.channels;
                first
            })
            .collect()
    }

    /// Three-process timber scenario (logging, river delivery, production) with an
    /// intervention from period 7.
    pub fn timber_example(seed: u64) -> Self {
        let process = |name: &str, channels, base_level, amplitude, noise_scale| ProcessConfig {
            name: name.into(),
            channels,
            base_level,
            amplitude,
            period_length: 12,
            noise_scale,
        };
        Self {
            seed,
            periods: 57,
            processes: vec![
                process("logging", 3, 120.0, 35.0, 6.0),
                process("river_delivery", 2, 80.0, 50.0, 4.0),
                process("production", 4, 200.0, 20.0, 10.0),
            ],
            intervention_period: Some(7),
            intervention_cost_per_period: 10.0,
        }
    }
}

fn triangle(phase: usize, length: usize) -> f64 {
    let x = phase as f64 / length as f64;
    1.0 - 4.0 * (x - 0.5).abs()
}

pub fn generate_series(config: &ScenarioConfig) -> Result<EnterpriseModel> {
    config.validate()?;
    let n = config.total_channels();
    let mut events = Matrix::zeros(config.periods, n);
    let bumped = config.intervention_channels();
    let mut c = 0usize;
    for p in &config.processes {
        for j in 0..p.channels {
            let mut rng = SplitMix64::for_channel(config.seed, c as u64);
            for t in 1..=config.periods {
                let season = triangle((t - 1 + j) % p.period_length, p.period_length);
                let noise = p.noise_scale * (2.0 * rng.next_f64() - 1.0);
                let mut v = p.base_level + p.amplitude * season + noise;
                if let Some(start) = config.intervention_period {
                    if t >= start && bumped.contains(&c) {
                        v += config.intervention_cost_per_period;
                    }
                }
                events.set(t - 1, c, v);
            }
            c += 1;
        }
    }
    EnterpriseModel::new(events, config.channel_labels())
}

/// `(baseline, treated)` sharing every noise draw; only the intervention differs.
pub fn paired_scenarios(config: &ScenarioConfig) -> Result<(EnterpriseModel, EnterpriseModel)> {
    let baseline = ScenarioConfig {
        intervention_period: None,
        ..config.clone()
    };
    Ok((generate_series(&baseline)?, generate_series(config)?))
}
