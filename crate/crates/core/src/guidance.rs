//! Relative geometry between pursuer and evader and the two guidance laws:
//! motion camouflage proportional guidance (MCPG) and pure proportional
//! navigation (PPNG).

use thiserror::Error;

use crate::dynamics::{CurvatureControl, ParticleState};
use crate::geometry::{cross, FrenetFrame, Vec3};
use crate::scalar::Scalar;

/// Baselines or relative velocities shorter than this are rejected.
pub const GUARD: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GuidanceError {
    #[error("baseline length {0:e} is below the non-collision guard")]
    Collision(f64),
    #[error("relative speed {0:e} is below the guard")]
    ZeroRelativeVelocity(f64),
    #[error("{0} must be positive and finite")]
    NonPositive(&'static str),
}

fn guard_baseline<T: Scalar>(r: Vec3<T>) -> Result<T, GuidanceError> {
    let n = r.norm();
    if n < T::lit(GUARD) || !n.is_finite() {
        Err(GuidanceError::Collision(n.to_f64().unwrap_or(f64::NAN)))
    } else {
        Ok(n)
    }
}

fn guard_velocity<T: Scalar>(r_dot: Vec3<T>) -> Result<T, GuidanceError> {
    let n = r_dot.norm();
    if n < T::lit(GUARD) || !n.is_finite() {
        Err(GuidanceError::ZeroRelativeVelocity(
            n.to_f64().unwrap_or(f64::NAN),
        ))
    } else {
        Ok(n)
    }
}

fn positive<T: Scalar>(x: T, what: &'static str) -> Result<T, GuidanceError> {
    if x.is_finite() && x > T::zero() {
        Ok(x)
    } else {
        Err(GuidanceError::NonPositive(what))
    }
}

/// Baseline vector from evader to pursuer.
#[inline]
pub fn baseline<T: Scalar>(r_p: Vec3<T>, r_e: Vec3<T>) -> Vec3<T> {
    r_p - r_e
}

/// Relative velocity `ṙ = ν_p x_p − ν_e x_e`.
#[inline]
pub fn relative_velocity<T: Scalar>(
    pursuer: &ParticleState<T>,
    evader: &ParticleState<T>,
) -> Vec3<T> {
    pursuer.velocity() - evader.velocity()
}

/// Component of `r_dot` transverse to the baseline: `ṙ − (r̂·ṙ) r̂`.
pub fn transverse_w<T: Scalar>(r: Vec3<T>, r_dot: Vec3<T>) -> Result<Vec3<T>, GuidanceError> {
    let n = guard_baseline(r)?;
    let rhat = r / n;
    Ok(r_dot - rhat * rhat.dot(r_dot))
}

/// Double-cross form of the transverse component: `r̂ × (ṙ × r̂)`.
pub fn transverse_w_cross<T: Scalar>(r: Vec3<T>, r_dot: Vec3<T>) -> Result<Vec3<T>, GuidanceError> {
    let n = guard_baseline(r)?;
    let rhat = r / n;
    Ok(cross(rhat, cross(r_dot, rhat)))
}

/// Cosine of the angle between the baseline and the relative velocity.
///
/// `−1` is pure shortening, `0` pure rotation, `+1` pure lengthening.
pub fn gamma<T: Scalar>(r: Vec3<T>, r_dot: Vec3<T>) -> Result<T, GuidanceError> {
    let nr = guard_baseline(r)?;
    let nv = guard_velocity(r_dot)?;
    let g = (r / nr).dot(r_dot / nv);
    Ok(g.max(-T::one()).min(T::one()))
}

/// Departure from motion camouflage, `1 − Γ²`.
pub fn departure<T: Scalar>(r: Vec3<T>, r_dot: Vec3<T>) -> Result<T, GuidanceError> {
    let g = gamma(r, r_dot)?;
    Ok(T::one() - g * g)
}

/// Angular velocity of the line of sight, `ω = (r/|r|²) × ṙ`.
///
/// Evaluated as `(r̂ × ṙ)/|r|` so that near camouflage it rounds exactly like
/// the MCPG steering direction.
pub fn los_rate<T: Scalar>(r: Vec3<T>, r_dot: Vec3<T>) -> Result<Vec3<T>, GuidanceError> {
    let n = guard_baseline(r)?;
    Ok(cross(r / n, r_dot) / n)
}

/// The quantities the pursuer needs to evaluate either guidance law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngagementView<T> {
    pub r: Vec3<T>,
    pub r_dot: Vec3<T>,
    pub x_p: Vec3<T>,
    pub y_p: Vec3<T>,
    pub z_p: Vec3<T>,
}

impl<T: Scalar> EngagementView<T> {
    pub fn new(r: Vec3<T>, r_dot: Vec3<T>, pursuer_frame: &FrenetFrame<T>) -> Self {
        Self {
            r,
            r_dot,
            x_p: pursuer_frame.x,
            y_p: pursuer_frame.y,
            z_p: pursuer_frame.z,
        }
    }

    pub fn from_states(pursuer: &ParticleState<T>, evader: &ParticleState<T>) -> Self {
        Self::new(
            baseline(pursuer.position, evader.position),
            relative_velocity(pursuer, evader),
            &pursuer.frame,
        )
    }

    fn r_dot_cross_rhat(&self) -> Result<Vec3<T>, GuidanceError> {
        let n = guard_baseline(self.r)?;
        Ok(cross(self.r_dot, self.r / n))
    }
}

/// MCPG steering direction `a = x_p × (ṙ × r̂)`, always normal to `x_p`.
pub fn mcpg_lateral<T: Scalar>(view: &EngagementView<T>) -> Result<Vec3<T>, GuidanceError> {
    Ok(cross(view.x_p, view.r_dot_cross_rhat()?))
}

fn check_gain<T: Scalar>(mu: T) -> Result<(), GuidanceError> {
    if mu.is_finite() && mu >= T::zero() {
        Ok(())
    } else {
        Err(GuidanceError::NonPositive("feedback gain"))
    }
}

/// MCPG curvatures `u_p = μ (a·y_p)`, `v_p = μ (a·z_p)`.
///
/// A zero gain yields an open-loop (straight-flying) pursuer.
pub fn mcpg_controls<T: Scalar>(
    view: &EngagementView<T>,
    mu: T,
) -> Result<CurvatureControl<T>, GuidanceError> {
    check_gain(mu)?;
    let a = mcpg_lateral(view)?;
    Ok(CurvatureControl::new(
        mu * a.dot(view.y_p),
        mu * a.dot(view.z_p),
    ))
}

/// Triple-product form of the MCPG curvatures:
/// `u_p = −μ (ṙ × r̂)·z_p`, `v_p = μ (ṙ × r̂)·y_p`.
pub fn mcpg_controls_triple<T: Scalar>(
    view: &EngagementView<T>,
    mu: T,
) -> Result<CurvatureControl<T>, GuidanceError> {
    check_gain(mu)?;
    let q = view.r_dot_cross_rhat()?;
    Ok(CurvatureControl::new(
        -mu * q.dot(view.z_p),
        mu * q.dot(view.y_p),
    ))
}

/// Pursuer lateral acceleration under MCPG, `μ ν_p² a`.
pub fn mcpg_acceleration<T: Scalar>(
    view: &EngagementView<T>,
    mu: T,
    nu_p: T,
) -> Result<Vec3<T>, GuidanceError> {
    check_gain(mu)?;
    Ok(mcpg_lateral(view)? * (mu * nu_p * nu_p))
}

/// PPNG lateral acceleration `A = N (Ω_L × V_M)`.
#[inline]
pub fn ppng_lateral<T: Scalar>(omega_l: Vec3<T>, v_m: Vec3<T>, n: T) -> Vec3<T> {
    cross(omega_l, v_m) * n
}

/// Curvatures realizing a lateral acceleration for a particle of speed `nu`:
/// `ν² (y u + z v) = A`.
pub fn curvatures_for_acceleration<T: Scalar>(
    accel: Vec3<T>,
    frame: &FrenetFrame<T>,
    nu: T,
) -> CurvatureControl<T> {
    let s = nu * nu;
    CurvatureControl::new(accel.dot(frame.y) / s, accel.dot(frame.z) / s)
}

/// PPNG curvatures for the pursuer with navigation constant `n`.
pub fn ppng_controls<T: Scalar>(
    view: &EngagementView<T>,
    nu_p: T,
    n: T,
) -> Result<CurvatureControl<T>, GuidanceError> {
    let omega = los_rate(view.r, view.r_dot)?;
    let frame = FrenetFrame::new(view.x_p, view.y_p, view.z_p);
    let a = ppng_lateral(omega, view.x_p * nu_p, n);
    Ok(curvatures_for_acceleration(a, &frame, nu_p))
}

/// Dimensionless MCPG navigation gain `N = μ ν_p r_o`.
pub fn mcpg_navigation_gain<T: Scalar>(mu: T, nu_p: T, r_o: T) -> Result<T, GuidanceError> {
    positive(mu, "feedback gain")?;
    positive(nu_p, "pursuer speed")?;
    positive(r_o, "length scale")?;
    Ok(mu * nu_p * r_o)
}

/// Instantaneous PPNG-equivalent gain of MCPG at the given range,
/// `μ ν_p r_o · (range / r_o)`.
///
/// MCPG acts as PPNG whose navigation constant is scheduled linearly in range.
pub fn mcpg_ppng_gain_map<T: Scalar>(mu: T, nu_p: T, r_o: T, range: T) -> Result<T, GuidanceError> {
    let n = mcpg_navigation_gain(mu, nu_p, r_o)?;
    positive(range, "range")?;
    Ok(n * (range / r_o))
}
