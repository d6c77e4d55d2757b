//! Open-loop evader curvature profiles.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::CurvatureControl;

fn default_hold_time() -> f64 {
    0.5
}

/// Evader steering as a function of time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EvaderProfile {
    /// Zero curvature.
    Straight {},
    /// `u = A sin(Ωt + φ)`, `v = A cos(Ωt + φ)`.
    Sinusoid {
        amplitude: f64,
        omega: f64,
        #[serde(default)]
        phase: f64,
    },
    /// Seeded uniform samples in `[−κ, κ]²`, clipped to magnitude `κ` and
    /// held constant for `hold_time`.
    Random {
        seed: u64,
        #[serde(default = "default_hold_time")]
        hold_time: f64,
        curvature_bound: f64,
    },
    /// Constant curvatures: a circle (or helix segment) of radius `1/√(u²+v²)`.
    Circular { u: f64, v: f64 },
}

impl EvaderProfile {
    pub fn validate(&self) -> Result<(), &'static str> {
        match *self {
            Self::Straight {} => Ok(()),
            Self::Sinusoid {
                amplitude,
                omega,
                phase,
            } => {
                if amplitude.is_finite() && omega.is_finite() && phase.is_finite() {
                    Ok(())
                } else {
                    Err("sinusoid parameters must be finite")
                }
            }
            Self::Random {
                hold_time,
                curvature_bound,
                ..
            } => {
                if !(hold_time.is_finite() && hold_time > 0.0) {
                    Err("random hold_time must be positive")
                } else if !(curvature_bound.is_finite() && curvature_bound >= 0.0) {
                    Err("random curvature_bound must be nonnegative")
                } else {
                    Ok(())
                }
            }
            Self::Circular { u, v } => {
                if u.is_finite() && v.is_finite() {
                    Ok(())
                } else {
                    Err("circular curvatures must be finite")
                }
            }
        }
    }

    /// Curvature controls at time `t`.
    pub fn control(&self, t: f64) -> CurvatureControl<f64> {
        match *self {
            Self::Straight {} => CurvatureControl::zero(),
            Self::Sinusoid {
                amplitude,
                omega,
                phase,
            } => {
                let arg = omega * t + phase;
                CurvatureControl::new(amplitude * arg.sin(), amplitude * arg.cos())
            }
            Self::Random {
                seed,
                hold_time,
                curvature_bound,
            } => {
                let window = (t / hold_time).floor().max(0.0) as u64;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(window);
                let k = curvature_bound;
                let (u, v) = if k > 0.0 {
                    (rng.gen_range(-k..=k), rng.gen_range(-k..=k))
                } else {
                    (0.0, 0.0)
                };
                CurvatureControl::new(u, v).saturate(k)
            }
            Self::Circular { u, v } => CurvatureControl::new(u, v),
        }
    }

    /// A priori bound on `√(u² + v²)`.
    pub fn curvature_bound(&self) -> f64 {
        match *self {
            Self::Straight {} => 0.0,
            Self::Sinusoid { amplitude, .. } => amplitude.abs(),
            Self::Random {
                curvature_bound, ..
            } => curvature_bound,
            Self::Circular { u, v } => u.hypot(v),
        }
    }

    /// Hold time of a piecewise-constant profile.
    pub fn hold_time(&self) -> Option<f64> {
        match *self {
            Self::Random { hold_time, .. } => Some(hold_time),
            _ => None,
        }
    }

    /// Time at which to sample the control for an RK4 stage at `stage_time`
    /// of the step starting at `step_start`.
    ///
    /// Piecewise-constant profiles are held over the whole step at the value
    /// of the step midpoint, so a switch never falls inside a step.
    pub fn sample_time(&self, stage_time: f64, step_start: f64, dt: f64) -> f64 {
        if self.hold_time().is_some() {
            step_start + 0.5 * dt
        } else {
            stage_time
        }
    }

    /// Time elapsed since the last control switch, as seen by the step
    /// starting at `step_start`. `None` for continuous profiles.
    pub fn time_since_switch(&self, step_start: f64, dt: f64) -> Option<f64> {
        self.hold_time().map(|h| {
            let s = step_start + 0.5 * dt;
            (s - (s / h).floor() * h - 0.5 * dt).max(0.0)
        })
    }

    /// Whether the control is continuous over the steps starting at
    /// `t_prev` and `t_next`.
    pub fn smooth_across(&self, t_prev: f64, t_next: f64, dt: f64) -> bool {
        match self.hold_time() {
            Some(h) => ((t_prev + 0.5 * dt) / h).floor() == ((t_next + 0.5 * dt) / h).floor(),
            None => true,
        }
    }
}
