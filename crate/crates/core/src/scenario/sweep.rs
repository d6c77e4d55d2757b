//! Gain sweeps and the MCPG/PPNG comparison run.

use rayon::prelude::*;
use serde::Serialize;

use super::audit::{self, EquivalenceSample};
use super::config::{Scenario, ScenarioConfig};
use super::engine::{simulate, PursuerLaw, SimError, SimLog};
use super::export::DEFAULT_EPSILON;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub mu: f64,
    pub time_to_target: Option<f64>,
    pub final_gamma: f64,
    pub final_time: f64,
    pub termination: &'static str,
}

/// Runs the config once per gain, in parallel, returning rows in gain order.
///
/// The target is `−1 + ε` with ε from the config's certificate when it has
/// one.
pub fn sweep(cfg: &ScenarioConfig, gains: &[f64]) -> Result<Vec<SweepRow>, SimError> {
    let base = cfg.resolve()?;
    let epsilon = base.certificate.map_or(DEFAULT_EPSILON, |c| c.epsilon);
    gains
        .par_iter()
        .map(|&mu| {
            let s = cfg.with_gain(mu).resolve()?;
            let log = simulate(&s, PursuerLaw::Mcpg { mu })?;
            let last = log.last().expect("runs log at least one tick");
            Ok(SweepRow {
                mu,
                time_to_target: log.time_to_gamma(epsilon - 1.0),
                final_gamma: last.gamma,
                final_time: last.t,
                termination: log.termination.as_str(),
            })
        })
        .collect()
}

/// Gain table as CSV text; a missed target is written as `nan`.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("mu,time_to_target,final_gamma,final_time,termination\n");
    for r in rows {
        let t = r
            .time_to_target
            .map_or("nan".to_string(), |t| format!("{t:.16e}"));
        out.push_str(&format!(
            "{:.16e},{t},{:.16e},{:.16e},{}\n",
            r.mu, r.final_gamma, r.final_time, r.termination
        ));
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub mcpg: SimLog,
    pub ppng: SimLog,
    /// Evaluated on the MCPG trajectory.
    pub residuals: Vec<EquivalenceSample>,
    /// Largest pursuer position gap between the two runs.
    pub max_separation: f64,
}

impl Comparison {
    pub fn max_relative_residual(&self) -> f64 {
        self.residuals
            .iter()
            .map(EquivalenceSample::relative)
            .fold(0.0, f64::max)
    }
}

/// Runs MCPG and PPNG with the range-scheduled gain map on the same config.
pub fn compare_guidance(cfg: &ScenarioConfig) -> Result<Comparison, SimError> {
    let s: Scenario = cfg.resolve()?;
    let mcpg = simulate(&s, PursuerLaw::Mcpg { mu: s.mu })?;
    let ppng = simulate(
        &s,
        PursuerLaw::PpngGainMapped {
            mu: s.mu,
            r_o: s.r_o,
        },
    )?;
    let residuals = if s.mu > 0.0 {
        // Every MCPG tick already passed the same guards.
        audit::equivalence(&mcpg, s.mu, s.r_o).expect("logged states are nondegenerate")
    } else {
        Vec::new()
    };
    let max_separation = mcpg
        .records
        .iter()
        .zip(&ppng.records)
        .map(|(a, b)| (a.pursuer.position - b.pursuer.position).norm())
        .fold(0.0, f64::max);
    Ok(Comparison {
        mcpg,
        ppng,
        residuals,
        max_separation,
    })
}
