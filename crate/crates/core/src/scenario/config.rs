use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::profile::EvaderProfile;
use crate::analysis::{self, AnalysisError, GainCertificate, Hypothesis, HypothesisSet};
use crate::dynamics::{AgentPair, ParticleState, SpeedProfile};
use crate::geometry::Vec3;
use crate::guidance;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("hypothesis {0} violated")]
    Hypothesis(Hypothesis),
    #[error("certificate: {0}")]
    Certificate(AnalysisError),
}

impl From<AnalysisError> for ConfigError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Hypothesis(h) => Self::Hypothesis(h),
            other => Self::Certificate(other),
        }
    }
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

/// Serialized form of [`SpeedProfile`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpeedSpec {
    Constant {
        speed: f64,
    },
    Sinusoidal {
        base: f64,
        amplitude: f64,
        omega: f64,
    },
}

impl From<SpeedSpec> for SpeedProfile<f64> {
    fn from(s: SpeedSpec) -> Self {
        match s {
            SpeedSpec::Constant { speed } => SpeedProfile::Constant { speed },
            SpeedSpec::Sinusoidal {
                base,
                amplitude,
                omega,
            } => SpeedProfile::Sinusoidal {
                base,
                amplitude,
                omega,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentConfig {
    pub position: [f64; 3],
    pub heading: [f64; 3],
    pub speed: SpeedSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GainSource {
    Explicit {
        mu: f64,
        /// Length scale for the PPNG gain map; defaults to `|r(0)|/10`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        r_o: Option<f64>,
    },
    Certificate {
        epsilon_o: f64,
        /// Defaults to `|r(0)|/10`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        r_o: Option<f64>,
        /// Defaults to the worst-case speed ratio `ν_e^high / ν_p^low`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        nu_max: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StopConfig {
    pub capture_radius: f64,
    pub max_time: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_threshold: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub pursuer: AgentConfig,
    pub evader: AgentConfig,
    pub evader_profile: EvaderProfile,
    pub gain: GainSource,
    pub dt: f64,
    pub stop: StopConfig,
}

/// A validated configuration with everything the engine needs.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub initial: AgentPair<f64>,
    pub pursuer_speed: SpeedProfile<f64>,
    pub evader_speed: SpeedProfile<f64>,
    pub mu: f64,
    pub r_o: f64,
    pub hypotheses: HypothesisSet<f64>,
    pub certificate: Option<GainCertificate<f64>>,
}

fn vec(a: [f64; 3]) -> Vec3<f64> {
    Vec3::from_array(a)
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Copy with an explicit gain in place of the configured source.
    pub fn with_gain(&self, mu: f64) -> Self {
        let r_o = match self.gain {
            GainSource::Explicit { r_o, .. } | GainSource::Certificate { r_o, .. } => r_o,
        };
        Self {
            gain: GainSource::Explicit { mu, r_o },
            ..self.clone()
        }
    }

    /// Extreme speed ratios `(ν_e^low/ν_p^high, ν_e^high/ν_p^low)`.
    pub fn speed_ratio_range(&self) -> (f64, f64) {
        let (pl, ph) = SpeedProfile::from(self.pursuer.speed).bounds();
        let (el, eh) = SpeedProfile::from(self.evader.speed).bounds();
        (el / ph, eh / pl)
    }

    /// Rejects configs whose speed ratio is not exactly `ratio` at all times.
    pub fn require_speed_ratio(&self, ratio: f64) -> Result<(), ConfigError> {
        let (lo, hi) = self.speed_ratio_range();
        if lo == ratio && hi == ratio {
            Ok(())
        } else {
            Err(invalid(format!(
                "speed ratio spans [{lo}, {hi}], expected exactly {ratio}"
            )))
        }
    }

    pub fn initial_state(&self) -> Result<AgentPair<f64>, ConfigError> {
        let agent = |a: &AgentConfig, who: &str| {
            if !a
                .position
                .iter()
                .chain(a.heading.iter())
                .all(|x| x.is_finite())
            {
                return Err(invalid(format!(
                    "{who} position and heading must be finite"
                )));
            }
            ParticleState::from_heading(
                vec(a.position),
                vec(a.heading),
                &SpeedProfile::from(a.speed),
                0.0,
            )
            .map_err(|e| invalid(format!("{who}: {e}")))
        };
        Ok(AgentPair {
            pursuer: agent(&self.pursuer, "pursuer")?,
            evader: agent(&self.evader, "evader")?,
        })
    }

    /// Hypothesis set implied by the config.
    ///
    /// `ν_max` comes from the certificate source when given and otherwise is
    /// the worst-case speed ratio. The set is not validated here.
    pub fn hypotheses(&self) -> Result<HypothesisSet<f64>, ConfigError> {
        let init = self.initial_state()?;
        let pp = SpeedProfile::from(self.pursuer.speed);
        let pe = SpeedProfile::from(self.evader.speed);
        let (nu_p_low, nu_p_high) = pp.bounds();
        let (nu_e_low, nu_e_high) = pe.bounds();
        let nu_max = match self.gain {
            GainSource::Certificate {
                nu_max: Some(m), ..
            } => m,
            _ => nu_e_high / nu_p_low,
        };
        let r = guidance::baseline(init.pursuer.position, init.evader.position);
        let r_dot = guidance::relative_velocity(&init.pursuer, &init.evader);
        let gamma0 =
            guidance::gamma(r, r_dot).map_err(|e| invalid(format!("initial geometry: {e}")))?;
        Ok(HypothesisSet {
            nu_p_low,
            nu_p_high,
            nu_e_low,
            nu_e_high,
            nu_max,
            alpha_p: pp.rate_bound(),
            alpha_e: pe.rate_bound(),
            kappa_e_max: self.evader_profile.curvature_bound(),
            gamma0,
            r0_initial: r.norm(),
        })
    }

    fn r_o(&self, r0: f64) -> Option<f64> {
        match self.gain {
            GainSource::Explicit { r_o, .. } | GainSource::Certificate { r_o, .. } => r_o,
        }
        .or(Some(r0 / 10.0))
    }

    /// Gain certificate, when the gain source asks for one.
    pub fn certificate(&self) -> Result<Option<GainCertificate<f64>>, ConfigError> {
        match self.gain {
            GainSource::Explicit { .. } => Ok(None),
            GainSource::Certificate { epsilon_o, .. } => {
                let h = self.hypotheses()?;
                h.validate()?;
                let r_o = self.r_o(h.r0_initial).unwrap_or_default();
                Ok(Some(analysis::certify(&h, epsilon_o, r_o)?))
            }
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.resolve().map(|_| ())
    }

    /// Validates the config and computes the initial state and gain.
    pub fn resolve(&self) -> Result<Scenario, ConfigError> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(invalid("dt must be positive"));
        }
        let stop = &self.stop;
        if !(stop.capture_radius.is_finite() && stop.capture_radius >= 0.0) {
            return Err(invalid("capture_radius must be nonnegative"));
        }
        if !(stop.max_time.is_finite() && stop.max_time > 0.0) {
            return Err(invalid("max_time must be positive"));
        }
        if let Some(g) = stop.gamma_threshold {
            if !(-1.0..=1.0).contains(&g) {
                return Err(invalid("gamma_threshold must lie in [-1, 1]"));
            }
        }
        self.evader_profile.validate().map_err(invalid)?;
        let initial = self.initial_state()?;
        let hypotheses = self.hypotheses()?;
        let r_o = self.r_o(hypotheses.r0_initial).unwrap_or_default();
        if !(r_o.is_finite() && r_o > 0.0) {
            return Err(invalid("r_o must be positive"));
        }
        let certificate = self.certificate()?;
        let mu = match (self.gain, certificate) {
            (_, Some(c)) => c.mu,
            (GainSource::Explicit { mu, .. }, None) => {
                if !(mu.is_finite() && mu >= 0.0) {
                    return Err(invalid("mu must be nonnegative"));
                }
                mu
            }
            (GainSource::Certificate { .. }, None) => {
                unreachable!("certificate source always certifies")
            }
        };
        Ok(Scenario {
            config: self.clone(),
            initial,
            pursuer_speed: self.pursuer.speed.into(),
            evader_speed: self.evader.speed.into(),
            mu,
            r_o,
            hypotheses,
            certificate,
        })
    }
}
