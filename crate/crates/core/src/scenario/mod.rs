//! Scenario configuration, the simulation loop, audits and file export.

pub mod audit;
pub mod config;
pub mod engine;
pub mod export;
pub mod presets;
pub mod profile;
pub mod sweep;

pub use config::{ConfigError, Scenario, ScenarioConfig};
pub use engine::{run, simulate, PursuerLaw, Record, SimError, SimLog, Termination};
pub use profile::EvaderProfile;
