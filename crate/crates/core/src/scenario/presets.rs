//! The four shipped engagements, one per evader profile.

use super::config::{ConfigError, ScenarioConfig};

/// Evader-to-pursuer speed ratio shared by every shipped scenario.
pub const SPEED_RATIO: f64 = 0.9;

pub const STRAIGHT: &str = include_str!("../../scenarios/straight.json");
pub const SINUSOID: &str = include_str!("../../scenarios/sinusoid.json");
pub const RANDOM: &str = include_str!("../../scenarios/random.json");
pub const CIRCULAR: &str = include_str!("../../scenarios/circular.json");

/// `(name, json)` for each shipped scenario.
pub const ALL: [(&str, &str); 4] = [
    ("straight", STRAIGHT),
    ("sinusoid", SINUSOID),
    ("random", RANDOM),
    ("circular", CIRCULAR),
];

/// Parses a shipped scenario and checks it against [`SPEED_RATIO`].
pub fn load(name: &str) -> Result<ScenarioConfig, ConfigError> {
    let text = ALL
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .ok_or_else(|| ConfigError::Invalid(format!("no shipped scenario named {name:?}")))?;
    let cfg = ScenarioConfig::from_json(text)?;
    cfg.require_speed_ratio(SPEED_RATIO)?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn all() -> Result<Vec<ScenarioConfig>, ConfigError> {
    ALL.iter().map(|(n, _)| load(n)).collect()
}
