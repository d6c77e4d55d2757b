//! Convergence analysis for MCPG: the rate of change of Γ, the bound
//! constants, and a computable certificate of finite-time accessibility.
//!
//! Under the hypotheses
//!
//! - A1: `0 < ν_p^low ≤ ν_p ≤ ν_p^high`
//! - A2: `0 < ν_e^low ≤ ν_e ≤ ν_e^high`
//! - A3: `ν_e/ν_p ≤ ν_max < 1`
//! - A4: evader curvature `√(u_e² + v_e²)` bounded by `κ_e`
//! - A5: `|ν̇_p| ≤ α_p`, `|ν̇_e| ≤ α_e`
//! - A6: `Γ(0) < 1`
//! - A7: `|r(0)| > 0`
//!
//! the feedback gain produced by [`certify`] drives Γ to `−1 + ε` no later
//! than the horizon `T`, and Γ stays below `tanh(atanh Γ₀ − c₂ t)` while
//! `|r| ≥ r_o`.

use std::fmt;

use thiserror::Error;

use crate::dynamics::{CurvatureControl, ParticleState};
use crate::geometry::Vec3;
use crate::guidance::{self, GuidanceError};
use crate::scalar::Scalar;

/// Smallest `c₂` the certificate will use when the chosen accuracy is
/// already met at `t = 0`.
pub const MIN_C2: f64 = 1e-6;

/// The hypothesis that a [`HypothesisSet`] fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    A1,
    A2,
    A3,
    A4,
    A5,
    A6,
    A7,
}

impl Hypothesis {
    pub fn description(&self) -> &'static str {
        match self {
            Self::A1 => "pursuer speed bounds must satisfy 0 < low <= high < inf",
            Self::A2 => "evader speed bounds must satisfy 0 < low <= high < inf",
            Self::A3 => "speed ratio bound must satisfy nu_e/nu_p <= nu_max < 1",
            Self::A4 => "evader curvature bound must be finite and nonnegative",
            Self::A5 => "speed-rate bounds must be finite and nonnegative",
            Self::A6 => "initial gamma must be below 1",
            Self::A7 => "initial baseline length must be positive",
        }
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}: {}", self, self.description())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("hypothesis {0}")]
    Hypothesis(Hypothesis),
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("empty log")]
    EmptyLog,
    #[error(transparent)]
    Guidance(#[from] GuidanceError),
}

/// Bounds on speeds, speed rates and evader curvature, plus the initial
/// engagement geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypothesisSet<T> {
    pub nu_p_low: T,
    pub nu_p_high: T,
    pub nu_e_low: T,
    pub nu_e_high: T,
    pub nu_max: T,
    pub alpha_p: T,
    pub alpha_e: T,
    pub kappa_e_max: T,
    pub gamma0: T,
    pub r0_initial: T,
}

impl<T: Scalar> HypothesisSet<T> {
    /// Checks A1 through A7, reporting the first violation.
    pub fn validate(&self) -> Result<(), AnalysisError> {
        let z = T::zero();
        let fin = |x: T| x.is_finite();
        let fail = |h| Err(AnalysisError::Hypothesis(h));
        if !(fin(self.nu_p_low)
            && fin(self.nu_p_high)
            && z < self.nu_p_low
            && self.nu_p_low <= self.nu_p_high)
        {
            return fail(Hypothesis::A1);
        }
        if !(fin(self.nu_e_low)
            && fin(self.nu_e_high)
            && z < self.nu_e_low
            && self.nu_e_low <= self.nu_e_high)
        {
            return fail(Hypothesis::A2);
        }
        if !(fin(self.nu_max) && self.nu_max > z && self.nu_max < T::one())
            || self.nu_e_high > self.nu_max * self.nu_p_low
        {
            return fail(Hypothesis::A3);
        }
        if !(fin(self.kappa_e_max) && self.kappa_e_max >= z) {
            return fail(Hypothesis::A4);
        }
        if !(fin(self.alpha_p) && fin(self.alpha_e) && self.alpha_p >= z && self.alpha_e >= z) {
            return fail(Hypothesis::A5);
        }
        if !(self.gamma0.is_finite() && self.gamma0 >= -T::one() && self.gamma0 < T::one()) {
            return fail(Hypothesis::A6);
        }
        if !(fin(self.r0_initial) && self.r0_initial > z) {
            return fail(Hypothesis::A7);
        }
        Ok(())
    }

    /// `ν_p^high (1 + ν_max)`, the largest possible relative speed.
    pub fn max_relative_speed(&self) -> T {
        self.nu_p_high * (T::one() + self.nu_max)
    }

    /// `ν_p^low (1 − ν_max)`, the smallest possible relative speed.
    pub fn min_relative_speed(&self) -> T {
        self.nu_p_low * (T::one() - self.nu_max)
    }

    /// Lower bound on the baseline length at time `t`.
    pub fn shrink_bound(&self, t: T) -> T {
        self.r0_initial - self.max_relative_speed() * t
    }
}

/// Constants realizing the sufficient conditions for finite-time
/// accessibility.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainCertificate<T> {
    pub epsilon: T,
    pub r_o: T,
    pub c0: T,
    pub c1: T,
    pub c2: T,
    /// Horizon over which `|r| ≥ r_o` is guaranteed.
    pub horizon: T,
    pub mu: T,
}

impl<T: Scalar> GainCertificate<T> {
    /// Γ threshold `−1 + ε` the certificate guarantees by the horizon.
    pub fn gamma_target(&self) -> T {
        self.epsilon - T::one()
    }

    /// Checks the internal consistency of the constants.
    pub fn is_consistent(&self, h: &HypothesisSet<T>) -> bool {
        let se = self.epsilon.sqrt();
        let tol = T::lit(1e-12) * (T::one() + self.c0.abs());
        self.epsilon > T::zero()
            && self.epsilon < T::one()
            && self.c1 >= T::zero()
            && self.c0 + tol >= T::lit(2.0) * self.c1 / se
            && (self.c2 - (self.c0 - self.c1 / se)).abs() <= tol
            && self.c2 > T::zero()
            && self.r_o > T::zero()
            && self.r_o < h.r0_initial
            && self.horizon > T::zero()
            && self.mu > T::zero()
    }
}

/// Terms of dΓ/dt along trajectories.
///
/// Their sum is the full rate; `pursuer_control` is the only term the
/// pursuer's curvatures enter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaRateTerms<T> {
    /// `(|ṙ|/|r|)(1 − Γ²)`.
    pub geometric: T,
    /// `ν̇_p (b·x_p)`.
    pub pursuer_speed: T,
    /// `−ν̇_e (b·x_e)`.
    pub evader_speed: T,
    /// `ν_p² [(b·y_p) u_p + (b·z_p) v_p]`.
    pub pursuer_control: T,
    /// `−ν_e² [(b·y_e) u_e + (b·z_e) v_e]`.
    pub evader_control: T,
}

impl<T: Scalar> GammaRateTerms<T> {
    pub fn total(&self) -> T {
        self.geometric
            + self.pursuer_speed
            + self.evader_speed
            + self.pursuer_control
            + self.evader_control
    }
}

/// Relative acceleration `r̈` of the pair under the given controls.
pub fn relative_acceleration<T: Scalar>(
    pursuer: &ParticleState<T>,
    evader: &ParticleState<T>,
    cp: &CurvatureControl<T>,
    ce: &CurvatureControl<T>,
) -> Vec3<T> {
    let (fp, fe) = (&pursuer.frame, &evader.frame);
    let (np, ne) = (pursuer.speed, evader.speed);
    fp.x * pursuer.speed_rate - fe.x * evader.speed_rate + (fp.y * cp.u + fp.z * cp.v) * (np * np)
        - (fe.y * ce.u + fe.z * ce.v) * (ne * ne)
}

/// Decomposed dΓ/dt.
pub fn gamma_rate_terms<T: Scalar>(
    pursuer: &ParticleState<T>,
    evader: &ParticleState<T>,
    cp: &CurvatureControl<T>,
    ce: &CurvatureControl<T>,
) -> Result<GammaRateTerms<T>, AnalysisError> {
    let r = guidance::baseline(pursuer.position, evader.position);
    let r_dot = guidance::relative_velocity(pursuer, evader);
    let g = guidance::gamma(r, r_dot)?;
    let (nr, nv) = (r.norm(), r_dot.norm());
    let b = (r / nr - r_dot * (g / nv)) / nv;
    let (fp, fe) = (&pursuer.frame, &evader.frame);
    let (np, ne) = (pursuer.speed, evader.speed);
    Ok(GammaRateTerms {
        geometric: nv / nr * (T::one() - g * g),
        pursuer_speed: pursuer.speed_rate * b.dot(fp.x),
        evader_speed: -evader.speed_rate * b.dot(fe.x),
        pursuer_control: np * np * (b.dot(fp.y) * cp.u + b.dot(fp.z) * cp.v),
        evader_control: -ne * ne * (b.dot(fe.y) * ce.u + b.dot(fe.z) * ce.v),
    })
}

/// dΓ/dt for the given pair and controls.
pub fn gamma_dot<T: Scalar>(
    pursuer: &ParticleState<T>,
    evader: &ParticleState<T>,
    cp: &CurvatureControl<T>,
    ce: &CurvatureControl<T>,
) -> Result<T, AnalysisError> {
    Ok(gamma_rate_terms(pursuer, evader, cp, ce)?.total())
}

/// `c₁ = [α_p + α_e + (ν_e^high)² κ_e] / [ν_p^low (1 − ν_max)]`.
pub fn compute_c1<T: Scalar>(h: &HypothesisSet<T>) -> Result<T, AnalysisError> {
    h.validate()?;
    let ne = h.nu_e_high;
    Ok((h.alpha_p + h.alpha_e + ne * ne * h.kappa_e_max) / h.min_relative_speed())
}

fn mu_factor<T: Scalar>(h: &HypothesisSet<T>) -> T {
    let lo = h.nu_p_low;
    h.max_relative_speed() / (lo * lo * lo * (T::one() - h.nu_max))
}

/// Gain realizing a given `c₀`:
/// `μ = [ν_p^high(1+ν_max) / ((ν_p^low)³(1−ν_max))] · [ν_p^high(1+ν_max)/r_o + c₀]`.
pub fn mu_for_c0<T: Scalar>(h: &HypothesisSet<T>, r_o: T, c0: T) -> Result<T, AnalysisError> {
    h.validate()?;
    if !(r_o.is_finite() && r_o > T::zero()) {
        return Err(AnalysisError::InvalidArgument("r_o must be positive"));
    }
    if !c0.is_finite() {
        return Err(AnalysisError::InvalidArgument("c0 must be finite"));
    }
    Ok(mu_factor(h) * (h.max_relative_speed() / r_o + c0))
}

/// Inverse of [`mu_for_c0`].
pub fn c0_from_mu<T: Scalar>(h: &HypothesisSet<T>, r_o: T, mu: T) -> Result<T, AnalysisError> {
    h.validate()?;
    if !(r_o.is_finite() && r_o > T::zero()) {
        return Err(AnalysisError::InvalidArgument("r_o must be positive"));
    }
    Ok(mu / mu_factor(h) - h.max_relative_speed() / r_o)
}

/// `ε = min(ε_o, 1 − Γ₀²)`.
pub fn select_epsilon<T: Scalar>(epsilon_o: T, gamma0: T) -> Result<T, AnalysisError> {
    if !(epsilon_o > T::zero() && epsilon_o < T::one()) {
        return Err(AnalysisError::InvalidArgument(
            "epsilon_o must lie in (0, 1)",
        ));
    }
    if !(gamma0.is_finite() && gamma0 < T::one()) {
        return Err(AnalysisError::Hypothesis(Hypothesis::A6));
    }
    if gamma0 < -T::one() {
        return Err(AnalysisError::InvalidArgument("gamma0 must lie in [-1, 1)"));
    }
    Ok(epsilon_o.min(T::one() - gamma0 * gamma0))
}

fn check_r_o<T: Scalar>(h: &HypothesisSet<T>, r_o: T) -> Result<(), AnalysisError> {
    if !(r_o.is_finite() && r_o > T::zero()) {
        return Err(AnalysisError::InvalidArgument("r_o must be positive"));
    }
    if r_o >= h.r0_initial {
        return Err(AnalysisError::InvalidArgument(
            "r_o must be smaller than |r(0)|",
        ));
    }
    Ok(())
}

/// `T = (|r(0)| − r_o) / (ν_p^high (1 + ν_max))`.
pub fn horizon_t<T: Scalar>(h: &HypothesisSet<T>, r_o: T) -> Result<T, AnalysisError> {
    h.validate()?;
    check_r_o(h, r_o)?;
    Ok((h.r0_initial - r_o) / h.max_relative_speed())
}

/// `tanh(atanh Γ₀ − c₂ t)`, the upper envelope on Γ.
pub fn gamma_envelope<T: Scalar>(gamma0: T, c2: T, t: T) -> Result<T, AnalysisError> {
    if gamma0.is_nan() || gamma0.abs() >= T::one() {
        return Err(AnalysisError::InvalidArgument("|gamma0| must be below 1"));
    }
    if !(c2.is_finite() && c2 > T::zero()) {
        return Err(AnalysisError::InvalidArgument("c2 must be positive"));
    }
    if !(t.is_finite() && t >= T::zero()) {
        return Err(AnalysisError::InvalidArgument("t must be nonnegative"));
    }
    Ok((gamma0.atanh() - c2 * t).tanh())
}

/// Smallest `c₂` for which the envelope reaches `−1 + ε` by the horizon:
/// `ν_p^high(1+ν_max) [atanh Γ₀ − ½ ln(ε/(2−ε))] / (|r(0)| − r_o)`.
pub fn required_c2<T: Scalar>(
    h: &HypothesisSet<T>,
    r_o: T,
    epsilon: T,
) -> Result<T, AnalysisError> {
    h.validate()?;
    check_r_o(h, r_o)?;
    if !(epsilon > T::zero() && epsilon < T::one()) {
        return Err(AnalysisError::InvalidArgument("epsilon must lie in (0, 1)"));
    }
    let half = T::lit(0.5);
    let target = half * (epsilon / (T::lit(2.0) - epsilon)).ln();
    Ok(h.max_relative_speed() * (h.gamma0.atanh() - target) / (h.r0_initial - r_o))
}

/// Builds the canonical gain certificate: minimal `c₂` meeting the horizon
/// requirement, then the minimal consistent `c₀`, and the gain it implies.
pub fn certify<T: Scalar>(
    h: &HypothesisSet<T>,
    epsilon_o: T,
    r_o: T,
) -> Result<GainCertificate<T>, AnalysisError> {
    h.validate()?;
    check_r_o(h, r_o)?;
    let epsilon = select_epsilon(epsilon_o, h.gamma0)?;
    let c1 = compute_c1(h)?;
    let required = required_c2(h, r_o, epsilon)?;
    let c2_target = required.max(T::lit(MIN_C2));
    let slack = c1 / epsilon.sqrt();
    let c0 = (c2_target + slack).max(T::lit(2.0) * slack);
    let c2 = c0 - slack;
    let mu = mu_for_c0(h, r_o, c0)?;
    let horizon = horizon_t(h, r_o)?;
    Ok(GainCertificate {
        epsilon,
        r_o,
        c0,
        c1,
        c2,
        horizon,
        mu,
    })
}

/// Largest angle between any post-transient baseline direction and their
/// mean direction, in radians.
///
/// The first `transient_fraction` of the samples is skipped.
pub fn baseline_dispersion<T: Scalar>(
    baselines: &[Vec3<T>],
    transient_fraction: T,
) -> Result<T, AnalysisError> {
    if !(transient_fraction >= T::zero() && transient_fraction < T::one()) {
        return Err(AnalysisError::InvalidArgument(
            "transient fraction must lie in [0, 1)",
        ));
    }
    let skip = (transient_fraction * T::from_count(baselines.len()))
        .floor()
        .to_usize()
        .unwrap_or(0);
    let tail = baselines.get(skip..).unwrap_or(&[]);
    if tail.is_empty() {
        return Err(AnalysisError::EmptyLog);
    }
    let mut units = Vec::with_capacity(tail.len());
    for r in tail {
        units.push(r.try_normalize().ok_or(GuidanceError::Collision(0.0))?);
    }
    let sum = units.iter().fold(Vec3::zero(), |acc, u| acc + *u);
    let mean = sum.try_normalize().ok_or(AnalysisError::InvalidArgument(
        "baseline directions cancel out",
    ))?;
    Ok(units
        .iter()
        .map(|u| u.angle_to(mean))
        .fold(T::zero(), T::max))
}
