use thiserror::Error;

use super::config::{ConfigError, Scenario, ScenarioConfig};
use crate::dynamics::{self, AgentPair, CurvatureControl, DynamicsError, ParticleState};
use crate::guidance::{self, EngagementView, GuidanceError};

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("guidance degenerate at t = {t}: {source}")]
    Guidance {
        t: f64,
        #[source]
        source: GuidanceError,
    },
    #[error("integration failed at t = {t}: {source}")]
    Dynamics {
        t: f64,
        #[source]
        source: DynamicsError,
    },
}

impl SimError {
    /// True for failures that happen during integration rather than setup.
    pub fn is_runtime(&self) -> bool {
        !matches!(self, Self::Config(_))
    }
}

// `step_pair` needs `From<DynamicsError>`; the timestamp is patched in by the caller.
impl From<DynamicsError> for SimError {
    fn from(source: DynamicsError) -> Self {
        Self::Dynamics {
            t: f64::NAN,
            source,
        }
    }
}

/// Steering law for the pursuer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PursuerLaw {
    Mcpg {
        mu: f64,
    },
    /// PPNG with a fixed navigation constant.
    Ppng {
        n: f64,
    },
    /// PPNG whose navigation constant follows the MCPG gain map
    /// `N = μ ν_p |r|`.
    PpngGainMapped {
        mu: f64,
        r_o: f64,
    },
}

impl PursuerLaw {
    pub fn controls(
        &self,
        pursuer: &ParticleState<f64>,
        evader: &ParticleState<f64>,
    ) -> Result<CurvatureControl<f64>, GuidanceError> {
        let view = EngagementView::from_states(pursuer, evader);
        match *self {
            Self::Mcpg { mu } => guidance::mcpg_controls(&view, mu),
            Self::Ppng { n } => guidance::ppng_controls(&view, pursuer.speed, n),
            Self::PpngGainMapped { mu, r_o } => {
                let n = guidance::mcpg_ppng_gain_map(mu, pursuer.speed, r_o, view.r.norm())?;
                guidance::ppng_controls(&view, pursuer.speed, n)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Capture,
    GammaThreshold,
    MaxTime,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Capture => "capture",
            Self::GammaThreshold => "gamma_threshold",
            Self::MaxTime => "max_time",
        }
    }
}

/// One logged tick. Controls are the ones applied over the step that starts
/// at `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Record {
    pub t: f64,
    pub pursuer: ParticleState<f64>,
    pub evader: ParticleState<f64>,
    pub pursuer_control: CurvatureControl<f64>,
    pub evader_control: CurvatureControl<f64>,
    pub gamma: f64,
    pub range: f64,
    pub w_norm: f64,
    pub r_dot_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimLog {
    pub name: String,
    pub dt: f64,
    pub records: Vec<Record>,
    pub termination: Termination,
}

impl SimLog {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&Record> {
        self.records.last()
    }

    pub fn final_gamma(&self) -> Option<f64> {
        self.last().map(|r| r.gamma)
    }

    /// First logged time at which Γ ≤ `threshold`.
    pub fn time_to_gamma(&self, threshold: f64) -> Option<f64> {
        self.records
            .iter()
            .find(|r| r.gamma <= threshold)
            .map(|r| r.t)
    }

    pub fn baselines(&self) -> Vec<crate::geometry::Vec3<f64>> {
        self.records
            .iter()
            .map(|r| guidance::baseline(r.pursuer.position, r.evader.position))
            .collect()
    }
}

/// Runs the config with MCPG at its configured gain.
pub fn run(cfg: &ScenarioConfig) -> Result<SimLog, SimError> {
    let s = cfg.resolve()?;
    simulate(&s, PursuerLaw::Mcpg { mu: s.mu })
}

/// Integrates a resolved scenario under the given pursuer law.
pub fn simulate(s: &Scenario, law: PursuerLaw) -> Result<SimLog, SimError> {
    let cfg = &s.config;
    let dt = cfg.dt;
    let profile = cfg.evader_profile;
    let steps = (cfg.stop.max_time / dt).round() as usize;
    let mut pair = s.initial;
    let mut records = Vec::with_capacity(steps.min(1 << 22) + 1);
    let guide = |t: f64| move |source| SimError::Guidance { t, source };

    for k in 0..=steps {
        let t = k as f64 * dt;
        // Held profiles are constant over the step; sample them once.
        let held = profile
            .hold_time()
            .map(|_| profile.control(profile.sample_time(t, t, dt)));
        let evader_at =
            |tau: f64| held.unwrap_or_else(|| profile.control(profile.sample_time(tau, t, dt)));
        let record = log_record(t, &pair, &law, evader_at(t)).map_err(guide(t))?;
        records.push(record);
        let termination = if record.range <= cfg.stop.capture_radius {
            Some(Termination::Capture)
        } else if cfg.stop.gamma_threshold.is_some_and(|g| record.gamma <= g) {
            Some(Termination::GammaThreshold)
        } else if k == steps {
            Some(Termination::MaxTime)
        } else {
            None
        };
        if let Some(termination) = termination {
            return Ok(SimLog {
                name: cfg.name.clone(),
                dt,
                records,
                termination,
            });
        }

        let stage_controls = |tau: f64, p: &ParticleState<f64>, e: &ParticleState<f64>| {
            let cp = law.controls(p, e).map_err(guide(tau))?;
            Ok::<_, SimError>((cp, evader_at(tau)))
        };
        pair = dynamics::step_pair(
            &pair,
            (&s.pursuer_speed, &s.evader_speed),
            t,
            dt,
            stage_controls,
        )
        .map_err(|e| match e {
            SimError::Dynamics { source, .. } => SimError::Dynamics { t, source },
            other => other,
        })?;
    }
    unreachable!("loop always terminates at k == steps")
}

fn log_record(
    t: f64,
    pair: &AgentPair<f64>,
    law: &PursuerLaw,
    evader_control: CurvatureControl<f64>,
) -> Result<Record, GuidanceError> {
    let (p, e) = (&pair.pursuer, &pair.evader);
    let r = guidance::baseline(p.position, e.position);
    let r_dot = guidance::relative_velocity(p, e);
    let gamma = guidance::gamma(r, r_dot)?;
    let w = guidance::transverse_w(r, r_dot)?;
    Ok(Record {
        t,
        pursuer: *p,
        evader: *e,
        pursuer_control: law.controls(p, e)?,
        evader_control,
        gamma,
        range: r.norm(),
        w_norm: w.norm(),
        r_dot_norm: r_dot.norm(),
    })
}
