//! Invariant checks over simulation logs.
//!
//! Each check reports the worst violation it saw against its tolerance; a
//! negative `worst` means every sample held with margin.

use std::fmt;

use super::config::{Scenario, ScenarioConfig};
use super::engine::{run, SimError, SimLog};
use super::profile::EvaderProfile;
use crate::analysis::{self, AnalysisError, GainCertificate, HypothesisSet};
use crate::guidance;

/// Fraction of a log treated as the initial transient.
pub const TRANSIENT_FRACTION: f64 = 0.05;

/// Ticks sampled by [`gamma_rate_oracle`].
pub const ORACLE_SAMPLES: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub name: &'static str,
    pub worst: f64,
    pub tolerance: f64,
    pub samples: usize,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.samples > 0 && self.worst <= self.tolerance
    }
}

impl fmt::Display for AuditReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: worst {:.3e} vs tolerance {:.1e} over {} samples",
            if self.passed() { "ok" } else { "VIOLATED" },
            self.name,
            self.worst,
            self.tolerance,
            self.samples
        )
    }
}

fn report(name: &'static str, tolerance: f64, values: impl Iterator<Item = f64>) -> AuditReport {
    let (worst, samples) = values.fold((f64::NEG_INFINITY, 0), |(w, n), v| {
        (if v.is_nan() || v > w { v } else { w }, n + 1)
    });
    AuditReport {
        name,
        worst,
        tolerance,
        samples,
    }
}

/// Γ stays below `tanh(atanh Γ₀ − c₂ t)` while `|r| ≥ r_o` and `1 − Γ² > ε`.
pub fn envelope(log: &SimLog, cert: &GainCertificate<f64>) -> Result<AuditReport, AnalysisError> {
    let g0 = log.records.first().ok_or(AnalysisError::EmptyLog)?.gamma;
    let mut excess = Vec::new();
    for r in &log.records {
        if r.range >= cert.r_o && 1.0 - r.gamma * r.gamma > cert.epsilon {
            excess.push(r.gamma - analysis::gamma_envelope(g0, cert.c2, r.t)?);
        }
    }
    Ok(report("gamma envelope", 1e-3, excess.into_iter()))
}

/// `ν_p^low (1 − ν_max) ≤ |ṙ| ≤ ν_p^high (1 + ν_max)`.
pub fn relative_speed_band(log: &SimLog, h: &HypothesisSet<f64>) -> AuditReport {
    let (lo, hi) = (h.min_relative_speed(), h.max_relative_speed());
    report(
        "relative speed band",
        1e-12 * hi,
        log.records
            .iter()
            .map(|r| (lo - r.r_dot_norm).max(r.r_dot_norm - hi)),
    )
}

/// `|r(t)| ≥ |r(0)| − ν_p^high (1 + ν_max) t`.
pub fn shrink_bound(log: &SimLog, h: &HypothesisSet<f64>) -> AuditReport {
    report(
        "range shrink bound",
        1e-9,
        log.records.iter().map(|r| h.shrink_bound(r.t) - r.range),
    )
}

/// The pursuer-control term of dΓ/dt is never positive.
pub fn control_sign(log: &SimLog) -> Result<AuditReport, AnalysisError> {
    let mut terms = Vec::with_capacity(log.len());
    let mut scale: f64 = 0.0;
    for r in &log.records {
        let t = analysis::gamma_rate_terms(
            &r.pursuer,
            &r.evader,
            &r.pursuer_control,
            &r.evader_control,
        )?;
        scale = scale.max(r.pursuer_control.magnitude() * r.pursuer.speed * r.pursuer.speed);
        terms.push(t.pursuer_control);
    }
    Ok(report(
        "control term sign",
        1e-12 * (1.0 + scale),
        terms.into_iter(),
    ))
}

/// `|w|² = |ṙ|² (1 − Γ²)`, error relative to `|ṙ|²`.
pub fn transverse_identity(log: &SimLog) -> AuditReport {
    report(
        "transverse identity",
        1e-10,
        log.records.iter().map(|r| {
            let v2 = r.r_dot_norm * r.r_dot_norm;
            (r.w_norm * r.w_norm - v2 * (1.0 - r.gamma * r.gamma)).abs() / v2
        }),
    )
}

/// Ticks eligible for the finite-difference oracle: past the transient, with
/// both neighbours logged and no evader control switch inside the stencil.
///
/// A switch restarts the pursuer's transient, so for piecewise-constant
/// profiles the first [`TRANSIENT_FRACTION`] of every hold window is skipped
/// as well.
pub fn oracle_ticks(log: &SimLog, profile: &EvaderProfile, samples: usize) -> Vec<usize> {
    let n = log.len();
    if n < 3 || samples == 0 {
        return Vec::new();
    }
    let dt = log.dt;
    let skip = ((TRANSIENT_FRACTION * n as f64).floor() as usize).max(1);
    let settled = |k: usize| {
        let prev = log.records[k - 1].t;
        profile.smooth_across(prev, log.records[k].t, dt)
            && match (profile.time_since_switch(prev, dt), profile.hold_time()) {
                (Some(since), Some(h)) => since >= TRANSIENT_FRACTION * h,
                _ => true,
            }
    };
    let eligible: Vec<usize> = (skip..n - 1).filter(|&k| settled(k)).collect();
    if eligible.len() <= samples {
        return eligible;
    }
    (0..samples)
        .map(|i| eligible[i * (eligible.len() - 1) / (samples - 1).max(1)])
        .collect()
}

/// dΓ/dt from the model against centered differences of logged Γ.
pub fn gamma_rate_oracle(
    log: &SimLog,
    profile: &EvaderProfile,
) -> Result<AuditReport, AnalysisError> {
    let dt = log.dt;
    let mut errs = Vec::new();
    for k in oracle_ticks(log, profile, ORACLE_SAMPLES) {
        let r = &log.records[k];
        let model =
            analysis::gamma_dot(&r.pursuer, &r.evader, &r.pursuer_control, &r.evader_control)?;
        let fd = (log.records[k + 1].gamma - log.records[k - 1].gamma) / (2.0 * dt);
        errs.push((model - fd).abs());
    }
    Ok(report(
        "gamma rate oracle",
        (10.0 * dt * dt).max(1e-5),
        errs.into_iter(),
    ))
}

/// Deviation of both frames from orthonormality.
pub fn frame_orthonormality(log: &SimLog) -> AuditReport {
    report(
        "frame orthonormality",
        1e-12,
        log.records.iter().map(|r| {
            r.pursuer
                .frame
                .orthonormality_error()
                .max(r.evader.frame.orthonormality_error())
        }),
    )
}

/// Logged speeds against the configured speed profiles.
pub fn speed_tracking(log: &SimLog, s: &Scenario) -> AuditReport {
    report(
        "speed tracking",
        1e-12,
        log.records.iter().map(|r| {
            (r.pursuer.speed - s.pursuer_speed.speed(r.t))
                .abs()
                .max((r.evader.speed - s.evader_speed.speed(r.t)).abs())
        }),
    )
}

/// Largest post-transient `|w| / |ṙ|`.
pub fn transverse_ratio(log: &SimLog) -> Option<f64> {
    let skip = (TRANSIENT_FRACTION * log.len() as f64).floor() as usize;
    log.records
        .get(skip..)
        .filter(|t| !t.is_empty())
        .map(|tail| {
            tail.iter()
                .map(|r| r.w_norm / r.r_dot_norm)
                .fold(0.0, f64::max)
        })
}

/// Post-transient baseline dispersion in degrees.
pub fn dispersion_degrees(log: &SimLog) -> Result<f64, AnalysisError> {
    Ok(analysis::baseline_dispersion(&log.baselines(), TRANSIENT_FRACTION)?.to_degrees())
}

/// Equivalence of the MCPG acceleration and the range-scaled PPNG acceleration
/// along a log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivalenceSample {
    pub t: f64,
    /// `N^MCPG = μ ν_p r_o`.
    pub navigation_gain: f64,
    /// `N^MCPG |r| / r_o`.
    pub effective_gain: f64,
    pub mcpg_accel: f64,
    /// `|A^MCPG − (|r|/r_o) A^PPNG(N^MCPG)|`.
    pub residual: f64,
}

impl EquivalenceSample {
    /// Residual relative to `|A^MCPG|`; zero when both vanish.
    pub fn relative(&self) -> f64 {
        if self.residual == 0.0 {
            0.0
        } else {
            self.residual / self.mcpg_accel
        }
    }
}

pub fn equivalence(
    log: &SimLog,
    mu: f64,
    r_o: f64,
) -> Result<Vec<EquivalenceSample>, guidance::GuidanceError> {
    log.records
        .iter()
        .map(|r| {
            let view = guidance::EngagementView::from_states(&r.pursuer, &r.evader);
            let nu = r.pursuer.speed;
            let a_m = guidance::mcpg_acceleration(&view, mu, nu)?;
            let n = guidance::mcpg_navigation_gain(mu, nu, r_o)?;
            let omega = guidance::los_rate(view.r, view.r_dot)?;
            let a_p = guidance::ppng_lateral(omega, view.x_p * nu, n);
            let range = view.r.norm();
            Ok(EquivalenceSample {
                t: r.t,
                navigation_gain: n,
                effective_gain: n * range / r_o,
                mcpg_accel: a_m.norm(),
                residual: (a_m - a_p * (range / r_o)).norm(),
            })
        })
        .collect()
}

/// The invariants every certified run must satisfy.
pub fn certified_run(log: &SimLog, s: &Scenario) -> Result<Vec<AuditReport>, AnalysisError> {
    let mut out = Vec::new();
    if let Some(cert) = &s.certificate {
        out.push(envelope(log, cert)?);
    }
    out.push(relative_speed_band(log, &s.hypotheses));
    out.push(shrink_bound(log, &s.hypotheses));
    out.push(control_sign(log)?);
    out.push(transverse_identity(log));
    out.push(gamma_rate_oracle(log, &s.config.evader_profile)?);
    out.push(frame_orthonormality(log));
    out.push(speed_tracking(log, s));
    Ok(out)
}

/// Change in Γ when `dt` is halved, compared at the last coarse tick that the
/// refined run also logged.
pub fn refinement_delta(cfg: &ScenarioConfig) -> Result<f64, SimError> {
    let coarse = run(cfg)?;
    let mut half = cfg.clone();
    half.dt = cfg.dt / 2.0;
    let fine = run(&half)?;
    let last = fine.len() - 1;
    let (k, r) = coarse
        .records
        .iter()
        .enumerate()
        .rev()
        .find(|(k, _)| 2 * k <= last)
        .expect("both runs log t = 0");
    Ok((fine.records[2 * k].gamma - r.gamma).abs())
}
