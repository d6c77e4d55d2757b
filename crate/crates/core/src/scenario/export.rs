//! CSV logs and JSON metrics.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use super::audit::{self, EquivalenceSample};
use super::config::Scenario;
use super::engine::SimLog;
use crate::analysis::GainCertificate;

pub const CSV_HEADER: &str = "t,rpx,rpy,rpz,rex,rey,rez,up,vp,ue,ve,gamma,rnorm,wnorm";

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("log is empty")]
    EmptyLog,
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn push_row(out: &mut String, values: &[f64]) {
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write!(out, "{v:.16e}").expect("writing to a String");
    }
    out.push('\n');
}

/// Trajectory log as CSV text with 17 significant digits per value.
pub fn csv_string(log: &SimLog) -> Result<String, ExportError> {
    if log.is_empty() {
        return Err(ExportError::EmptyLog);
    }
    let mut out = String::with_capacity(64 + log.len() * 14 * 24);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in &log.records {
        let (p, e) = (r.pursuer.position, r.evader.position);
        push_row(
            &mut out,
            &[
                r.t,
                p.x,
                p.y,
                p.z,
                e.x,
                e.y,
                e.z,
                r.pursuer_control.u,
                r.pursuer_control.v,
                r.evader_control.u,
                r.evader_control.v,
                r.gamma,
                r.range,
                r.w_norm,
            ],
        );
    }
    Ok(out)
}

/// Per-tick equivalence residuals as CSV text.
pub fn residual_csv_string(samples: &[EquivalenceSample]) -> Result<String, ExportError> {
    if samples.is_empty() {
        return Err(ExportError::EmptyLog);
    }
    let mut out = String::from("t,n_mcpg,n_eff,accel,residual\n");
    for s in samples {
        push_row(
            &mut out,
            &[
                s.t,
                s.navigation_gain,
                s.effective_gain,
                s.mcpg_accel,
                s.residual,
            ],
        );
    }
    Ok(out)
}

pub fn write_text(path: impl AsRef<Path>, text: &str) -> Result<(), ExportError> {
    let path = path.as_ref();
    std::fs::write(path, text).map_err(|source| ExportError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_csv(log: &SimLog, path: impl AsRef<Path>) -> Result<(), ExportError> {
    write_text(path, &csv_string(log)?)
}

/// Flat certificate record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertificateRecord {
    pub epsilon: f64,
    pub r_o: f64,
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub mu: f64,
    pub gamma0: f64,
    pub r0: f64,
}

impl CertificateRecord {
    pub fn new(c: &GainCertificate<f64>, gamma0: f64, r0: f64) -> Self {
        Self {
            epsilon: c.epsilon,
            r_o: c.r_o,
            c0: c.c0,
            c1: c.c1,
            c2: c.c2,
            horizon: c.horizon,
            mu: c.mu,
            gamma0,
            r0,
        }
    }
}

/// Summary of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metrics {
    pub scenario: String,
    pub termination: &'static str,
    pub ticks: usize,
    pub final_time: f64,
    pub final_gamma: f64,
    pub final_range: f64,
    pub mu: f64,
    pub epsilon: f64,
    pub gamma_target: f64,
    pub time_to_target: Option<f64>,
    pub baseline_dispersion_deg: f64,
    pub max_transverse_ratio: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate_c0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate_c1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate_c2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate_t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate_r_o: Option<f64>,
    /// Largest relative MCPG/PPNG acceleration gap, for comparison runs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equivalence_residual: Option<f64>,
}

/// ε used for the time-to-target metric when the gain is explicit.
pub const DEFAULT_EPSILON: f64 = 0.02;

impl Metrics {
    pub fn new(log: &SimLog, s: &Scenario) -> Result<Self, ExportError> {
        let last = log.last().ok_or(ExportError::EmptyLog)?;
        let epsilon = s.certificate.map_or(DEFAULT_EPSILON, |c| c.epsilon);
        let target = epsilon - 1.0;
        let c = s.certificate;
        Ok(Self {
            scenario: log.name.clone(),
            termination: log.termination.as_str(),
            ticks: log.len(),
            final_time: last.t,
            final_gamma: last.gamma,
            final_range: last.range,
            mu: s.mu,
            epsilon,
            gamma_target: target,
            time_to_target: log.time_to_gamma(target),
            baseline_dispersion_deg: audit::dispersion_degrees(log)
                .map_err(|_| ExportError::EmptyLog)?,
            max_transverse_ratio: audit::transverse_ratio(log).ok_or(ExportError::EmptyLog)?,
            certificate_c0: c.map(|c| c.c0),
            certificate_c1: c.map(|c| c.c1),
            certificate_c2: c.map(|c| c.c2),
            certificate_t: c.map(|c| c.horizon),
            certificate_r_o: c.map(|c| c.r_o),
            equivalence_residual: None,
        })
    }

    pub fn to_json(&self) -> Result<String, ExportError> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{presets, run, Termination};

    fn short_log() -> (SimLog, Scenario) {
        let mut cfg = presets::load("straight").unwrap();
        cfg.stop.max_time = 0.01;
        let s = cfg.resolve().unwrap();
        (run(&cfg).unwrap(), s)
    }

    #[test]
    fn header_and_shape() {
        let (log, _) = short_log();
        let text = csv_string(&log).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(text.lines().count(), log.len() + 1);
        assert!(!text.contains('\r'));
        assert!(text.ends_with('\n'));
        for line in lines {
            assert_eq!(line.split(',').count(), 14);
            for field in line.split(',') {
                let v: f64 = field.parse().unwrap();
                assert!(v.is_finite());
            }
        }
    }

    #[test]
    fn values_round_trip_exactly() {
        let (log, _) = short_log();
        let text = csv_string(&log).unwrap();
        let row: Vec<f64> = text
            .lines()
            .nth(3)
            .unwrap()
            .split(',')
            .map(|f| f.parse().unwrap())
            .collect();
        let r = &log.records[2];
        assert_eq!(row[0], r.t);
        assert_eq!(row[1], r.pursuer.position.x);
        assert_eq!(row[11], r.gamma);
        assert_eq!(row[13], r.w_norm);
    }

    #[test]
    fn empty_log_is_an_error() {
        let log = SimLog {
            name: "e".into(),
            dt: 1e-3,
            records: vec![],
            termination: Termination::MaxTime,
        };
        assert!(matches!(csv_string(&log), Err(ExportError::EmptyLog)));
        assert!(matches!(
            residual_csv_string(&[]),
            Err(ExportError::EmptyLog)
        ));
    }

    #[test]
    fn write_failure_names_path() {
        let (log, _) = short_log();
        let e = write_csv(&log, "/nonexistent-dir/x.csv").unwrap_err();
        assert!(e.to_string().contains("/nonexistent-dir/x.csv"));
    }

    #[test]
    fn metrics_are_flat() {
        let (log, s) = short_log();
        let m = Metrics::new(&log, &s).unwrap();
        let v: serde_json::Value = serde_json::from_str(&m.to_json().unwrap()).unwrap();
        let obj = v.as_object().unwrap();
        assert!(obj.values().all(|x| !x.is_object() && !x.is_array()));
        assert!(obj.contains_key("certificate_c2"));
        assert_eq!(obj["termination"], "max_time");
    }

    #[test]
    fn certificate_record_keys() {
        let (_, s) = short_log();
        let rec = CertificateRecord::new(
            &s.certificate.unwrap(),
            s.hypotheses.gamma0,
            s.hypotheses.r0_initial,
        );
        let v = serde_json::to_value(rec).unwrap();
        for k in ["epsilon", "r_o", "c0", "c1", "c2", "T", "mu"] {
            assert!(v.get(k).is_some(), "{k}");
        }
    }
}
