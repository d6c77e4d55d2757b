//! Two-agent kinematic model: unit-tangent particles steered by natural
//! curvatures, and its RK4 integration with per-step frame repair.
//!
//! Each agent obeys
//!
//! ```text
//! ṙ = ν x,   ẋ = ν (y u + z v),   ẏ = −ν x u,   ż = −ν x v
//! ```
//!
//! with speed `ν(t)` supplied by a [`SpeedProfile`].

use thiserror::Error;

use crate::geometry::{FrenetFrame, GeometryError, Vec3};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("time step must be positive and finite")]
    InvalidStep,
    #[error("frame degenerated during integration: {0}")]
    Frame(#[from] GeometryError),
    #[error("invalid speed profile: {0}")]
    InvalidProfile(&'static str),
}

/// Natural curvature pair `(u, v)` steering the tangent toward `y` and `z`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CurvatureControl<T> {
    pub u: T,
    pub v: T,
}

impl<T: Scalar> CurvatureControl<T> {
    pub const fn new(u: T, v: T) -> Self {
        Self { u, v }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero())
    }

    /// Total curvature `√(u² + v²)`.
    pub fn magnitude(&self) -> T {
        self.u.hypot(self.v)
    }

    /// Scales the pair down so that its magnitude does not exceed `cap`.
    pub fn saturate(self, cap: T) -> Self {
        let m = self.magnitude();
        if m > cap && m > T::zero() {
            let s = cap / m;
            Self::new(self.u * s, self.v * s)
        } else {
            self
        }
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.v.is_finite()
    }
}

/// Speed as a function of time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpeedProfile<T> {
    Constant {
        speed: T,
    },
    /// `ν(t) = base + amplitude·sin(omega·t)`.
    Sinusoidal {
        base: T,
        amplitude: T,
        omega: T,
    },
}

impl<T: Scalar> SpeedProfile<T> {
    pub fn constant(speed: T) -> Self {
        Self::Constant { speed }
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        match *self {
            Self::Constant { speed } => {
                if !(speed.is_finite() && speed > T::zero()) {
                    return Err(DynamicsError::InvalidProfile(
                        "speed must be positive and finite",
                    ));
                }
            }
            Self::Sinusoidal {
                base,
                amplitude,
                omega,
            } => {
                if !(base.is_finite() && amplitude.is_finite() && omega.is_finite()) {
                    return Err(DynamicsError::InvalidProfile("parameters must be finite"));
                }
                if base - amplitude.abs() <= T::zero() {
                    return Err(DynamicsError::InvalidProfile("speed must stay positive"));
                }
            }
        }
        Ok(())
    }

    pub fn speed(&self, t: T) -> T {
        match *self {
            Self::Constant { speed } => speed,
            Self::Sinusoidal {
                base,
                amplitude,
                omega,
            } => base + amplitude * (omega * t).sin(),
        }
    }

    pub fn rate(&self, t: T) -> T {
        match *self {
            Self::Constant { .. } => T::zero(),
            Self::Sinusoidal {
                amplitude, omega, ..
            } => amplitude * omega * (omega * t).cos(),
        }
    }

    /// `(ν_low, ν_high)` over all time.
    pub fn bounds(&self) -> (T, T) {
        match *self {
            Self::Constant { speed } => (speed, speed),
            Self::Sinusoidal {
                base, amplitude, ..
            } => (base - amplitude.abs(), base + amplitude.abs()),
        }
    }

    /// Upper bound on `|ν̇|`.
    pub fn rate_bound(&self) -> T {
        match *self {
            Self::Constant { .. } => T::zero(),
            Self::Sinusoidal {
                amplitude, omega, ..
            } => (amplitude * omega).abs(),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.rate_bound() == T::zero()
    }
}

/// Position, frame and speed of one agent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleState<T> {
    pub position: Vec3<T>,
    pub frame: FrenetFrame<T>,
    pub speed: T,
    pub speed_rate: T,
}

impl<T: Scalar> ParticleState<T> {
    pub fn new(position: Vec3<T>, frame: FrenetFrame<T>, speed: T, speed_rate: T) -> Self {
        Self {
            position,
            frame,
            speed,
            speed_rate,
        }
    }

    /// State at time `t` with heading `tangent`, speed taken from `profile`.
    pub fn from_heading(
        position: Vec3<T>,
        tangent: Vec3<T>,
        profile: &SpeedProfile<T>,
        t: T,
    ) -> Result<Self, DynamicsError> {
        profile.validate()?;
        let frame = FrenetFrame::from_tangent(tangent)?;
        Ok(Self::new(
            position,
            frame,
            profile.speed(t),
            profile.rate(t),
        ))
    }

    pub fn velocity(&self) -> Vec3<T> {
        self.frame.x * self.speed
    }

    fn advanced(&self, k: &ParticleRate<T>, h: T) -> Self {
        Self {
            position: self.position + k.position * h,
            frame: FrenetFrame::new(
                self.frame.x + k.x * h,
                self.frame.y + k.y * h,
                self.frame.z + k.z * h,
            ),
            speed: self.speed + k.speed * h,
            speed_rate: self.speed_rate,
        }
    }

    fn with_profile(mut self, profile: &SpeedProfile<T>, t: T) -> Self {
        self.speed = profile.speed(t);
        self.speed_rate = profile.rate(t);
        self
    }
}

/// Time derivative of a [`ParticleState`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleRate<T> {
    pub position: Vec3<T>,
    pub x: Vec3<T>,
    pub y: Vec3<T>,
    pub z: Vec3<T>,
    pub speed: T,
}

impl<T: Scalar> ParticleRate<T> {
    fn combine(k1: &Self, k2: &Self, k3: &Self, k4: &Self) -> Self {
        let two = T::lit(2.0);
        let sixth = T::one() / T::lit(6.0);
        let mix =
            |a: Vec3<T>, b: Vec3<T>, c: Vec3<T>, d: Vec3<T>| (a + b * two + c * two + d) * sixth;
        Self {
            position: mix(k1.position, k2.position, k3.position, k4.position),
            x: mix(k1.x, k2.x, k3.x, k4.x),
            y: mix(k1.y, k2.y, k3.y, k4.y),
            z: mix(k1.z, k2.z, k3.z, k4.z),
            speed: (k1.speed + k2.speed * two + k3.speed * two + k4.speed) * sixth,
        }
    }
}

/// Right-hand side of the particle equations for the given controls.
pub fn state_derivative<T: Scalar>(
    s: &ParticleState<T>,
    c: &CurvatureControl<T>,
) -> ParticleRate<T> {
    let nu = s.speed;
    let f = &s.frame;
    ParticleRate {
        position: f.x * nu,
        x: (f.y * c.u + f.z * c.v) * nu,
        y: f.x * (-nu * c.u),
        z: f.x * (-nu * c.v),
        speed: s.speed_rate,
    }
}

fn check_dt<T: Scalar>(dt: T) -> Result<(), DynamicsError> {
    if dt.is_finite() && dt > T::zero() {
        Ok(())
    } else {
        Err(DynamicsError::InvalidStep)
    }
}

/// Classical RK4 step with a constant control, without frame repair.
pub fn step_unrepaired<T: Scalar>(
    s: &ParticleState<T>,
    c: &CurvatureControl<T>,
    profile: &SpeedProfile<T>,
    t: T,
    dt: T,
) -> Result<ParticleState<T>, DynamicsError> {
    check_dt(dt)?;
    let half = dt / T::lit(2.0);
    let s1 = s.with_profile(profile, t);
    let k1 = state_derivative(&s1, c);
    let s2 = s1.advanced(&k1, half).with_profile(profile, t + half);
    let k2 = state_derivative(&s2, c);
    let s3 = s1.advanced(&k2, half).with_profile(profile, t + half);
    let k3 = state_derivative(&s3, c);
    let s4 = s1.advanced(&k3, dt).with_profile(profile, t + dt);
    let k4 = state_derivative(&s4, c);
    let k = ParticleRate::combine(&k1, &k2, &k3, &k4);
    Ok(s1.advanced(&k, dt).with_profile(profile, t + dt))
}

/// RK4 step with a constant control followed by Gram–Schmidt frame repair.
pub fn step<T: Scalar>(
    s: &ParticleState<T>,
    c: &CurvatureControl<T>,
    profile: &SpeedProfile<T>,
    t: T,
    dt: T,
) -> Result<ParticleState<T>, DynamicsError> {
    let mut next = step_unrepaired(s, c, profile, t, dt)?;
    next.frame = next.frame.orthonormalize()?;
    Ok(next)
}

/// Pursuer and evader advanced together.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentPair<T> {
    pub pursuer: ParticleState<T>,
    pub evader: ParticleState<T>,
}

/// RK4 step of the coupled two-agent system with feedback evaluated at every
/// stage.
///
/// `controls(stage_time, pursuer, evader)` returns the pursuer and evader
/// curvatures for the given intermediate state. Both frames are repaired after
/// the step.
pub fn step_pair<T, E, F>(
    pair: &AgentPair<T>,
    profiles: (&SpeedProfile<T>, &SpeedProfile<T>),
    t: T,
    dt: T,
    mut controls: F,
) -> Result<AgentPair<T>, E>
where
    T: Scalar,
    E: From<DynamicsError>,
    F: FnMut(
        T,
        &ParticleState<T>,
        &ParticleState<T>,
    ) -> Result<(CurvatureControl<T>, CurvatureControl<T>), E>,
{
    check_dt(dt)?;
    let (pp, pe) = profiles;
    let half = dt / T::lit(2.0);
    let mut eval = |tau: T, p: &ParticleState<T>, e: &ParticleState<T>| {
        let (cp, ce) = controls(tau, p, e)?;
        Ok::<_, E>((state_derivative(p, &cp), state_derivative(e, &ce)))
    };

    let p1 = pair.pursuer.with_profile(pp, t);
    let e1 = pair.evader.with_profile(pe, t);
    let (kp1, ke1) = eval(t, &p1, &e1)?;
    let p2 = p1.advanced(&kp1, half).with_profile(pp, t + half);
    let e2 = e1.advanced(&ke1, half).with_profile(pe, t + half);
    let (kp2, ke2) = eval(t + half, &p2, &e2)?;
    let p3 = p1.advanced(&kp2, half).with_profile(pp, t + half);
    let e3 = e1.advanced(&ke2, half).with_profile(pe, t + half);
    let (kp3, ke3) = eval(t + half, &p3, &e3)?;
    let p4 = p1.advanced(&kp3, dt).with_profile(pp, t + dt);
    let e4 = e1.advanced(&ke3, dt).with_profile(pe, t + dt);
    let (kp4, ke4) = eval(t + dt, &p4, &e4)?;

    let kp = ParticleRate::combine(&kp1, &kp2, &kp3, &kp4);
    let ke = ParticleRate::combine(&ke1, &ke2, &ke3, &ke4);
    let mut pursuer = p1.advanced(&kp, dt).with_profile(pp, t + dt);
    let mut evader = e1.advanced(&ke, dt).with_profile(pe, t + dt);
    pursuer.frame = pursuer
        .frame
        .orthonormalize()
        .map_err(DynamicsError::from)?;
    evader.frame = evader.frame.orthonormalize().map_err(DynamicsError::from)?;
    Ok(AgentPair { pursuer, evader })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(x: f64, y: f64, z: f64) -> Vec3<f64> {
        Vec3::new(x, y, z)
    }

    fn unit_state() -> ParticleState<f64> {
        ParticleState::new(Vec3::zero(), FrenetFrame::identity(), 1.0, 0.0)
    }

    #[test]
    fn zero_curvature_is_straight_flight() {
        let mut s = unit_state();
        s.speed = 2.5;
        let k = state_derivative(&s, &CurvatureControl::zero());
        assert_eq!(k.x, Vec3::zero());
        assert_eq!(k.y, Vec3::zero());
        assert_eq!(k.z, Vec3::zero());
        assert_eq!(k.position, v(2.5, 0., 0.));
    }

    #[test]
    fn unit_curvature_substitution() {
        let k = state_derivative(&unit_state(), &CurvatureControl::new(1.0, 0.0));
        assert_eq!(k.x, v(0., 1., 0.));
        assert_eq!(k.y, v(-1., 0., 0.));
        assert_eq!(k.z, v(0., 0., 0.));
    }

    #[test]
    fn frame_rate_is_skew() {
        // d/dt (F^T F) = K^T F + F^T K vanishes for a skew frame rate.
        let f = FrenetFrame::from_tangent(v(0.2, -0.7, 0.4)).unwrap();
        let s = ParticleState::new(Vec3::zero(), f, 1.3, 0.0);
        let k = state_derivative(&s, &CurvatureControl::new(0.7, -2.1));
        let cols = [(f.x, k.x), (f.y, k.y), (f.z, k.z)];
        for (a, da) in cols {
            for (b, db) in cols {
                assert!((da.dot(b) + a.dot(db)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn straight_step_is_exact() {
        let s = unit_state();
        let p = SpeedProfile::constant(1.0);
        let n = step(&s, &CurvatureControl::zero(), &p, 0.0, 0.1).unwrap();
        assert_eq!(n.position, v(0.1, 0., 0.));
        assert_eq!(n.frame, FrenetFrame::identity());
    }

    #[test]
    fn rejects_bad_step() {
        let p = SpeedProfile::constant(1.0);
        assert_eq!(
            step(&unit_state(), &CurvatureControl::zero(), &p, 0.0, 0.0),
            Err(DynamicsError::InvalidStep)
        );
        assert_eq!(
            step(&unit_state(), &CurvatureControl::zero(), &p, 0.0, f64::NAN),
            Err(DynamicsError::InvalidStep)
        );
    }

    fn circle_error(dt: f64, horizon: f64) -> f64 {
        // Constant (u, 0) at unit speed traces a circle of radius 1/u in the
        // initial x–y plane: r(t) = (sin(ut)/u, (1 − cos(ut))/u, 0).
        let u = 2.0;
        let p = SpeedProfile::constant(1.0);
        let c = CurvatureControl::new(u, 0.0);
        let n = (horizon / dt).round() as usize;
        let mut s = unit_state();
        for k in 0..n {
            s = step(&s, &c, &p, k as f64 * dt, dt).unwrap();
        }
        let t = n as f64 * dt;
        let exact = v((u * t).sin() / u, (1.0 - (u * t).cos()) / u, 0.0);
        (s.position - exact).norm()
    }

    #[test]
    fn circular_arc_matches_closed_form() {
        assert!(circle_error(1e-3, 1.0) < 1e-8);
    }

    #[test]
    fn halving_step_divides_error_by_sixteen() {
        let e1 = circle_error(0.04, 1.0);
        let e2 = circle_error(0.02, 1.0);
        let ratio = e1 / e2;
        assert!((12.0..20.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn constant_speed_preserved() {
        let p = SpeedProfile::constant(1.7);
        let mut s = ParticleState::from_heading(Vec3::zero(), v(1., 1., 0.), &p, 0.0).unwrap();
        let c = CurvatureControl::new(3.0, -4.0);
        for k in 0..2000 {
            s = step(&s, &c, &p, k as f64 * 1e-3, 1e-3).unwrap();
            assert!((s.velocity().norm() / 1.7 - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn reversal_returns_to_start() {
        // Time reversal maps (x, y, z, u, v) to (−x, −y, z, −u, v).
        let p = SpeedProfile::constant(1.0);
        let start = ParticleState::from_heading(v(1., 2., 3.), v(0.3, 0.5, -0.2), &p, 0.0).unwrap();
        let c = CurvatureControl::new(0.8, -1.1);
        let dt = 1e-3;
        let mut s = start;
        for k in 0..1000 {
            s = step(&s, &c, &p, k as f64 * dt, dt).unwrap();
        }
        s.frame = FrenetFrame::new(-s.frame.x, -s.frame.y, s.frame.z);
        let back = CurvatureControl::new(-c.u, c.v);
        for k in 0..1000 {
            s = step(&s, &back, &p, k as f64 * dt, dt).unwrap();
        }
        assert!((s.position - start.position).norm() < 1e-6);
        assert!((-s.frame.x - start.frame.x).norm() < 1e-6);
    }

    #[test]
    fn saturate_caps_magnitude() {
        let c = CurvatureControl::new(3.0f64, 4.0).saturate(1.0);
        assert!((c.magnitude() - 1.0).abs() < 1e-15);
        assert!((c.u - 0.6).abs() < 1e-15);
        let small = CurvatureControl::new(0.1, 0.0);
        assert_eq!(small.saturate(1.0), small);
    }

    #[test]
    fn speed_profile_validation() {
        assert!(SpeedProfile::constant(0.0).validate().is_err());
        assert!(SpeedProfile::Sinusoidal {
            base: 1.0,
            amplitude: 1.0,
            omega: 1.0
        }
        .validate()
        .is_err());
        assert!(SpeedProfile::Sinusoidal {
            base: 1.0,
            amplitude: 0.2,
            omega: 3.0
        }
        .validate()
        .is_ok());
    }

    #[test]
    fn scripted_speed_is_integrated_consistently() {
        // Position along a straight line is the integral of ν(t).
        let p = SpeedProfile::Sinusoidal {
            base: 1.0,
            amplitude: 0.3,
            omega: 2.0,
        };
        let mut s = ParticleState::from_heading(Vec3::zero(), Vec3::e1(), &p, 0.0).unwrap();
        let dt = 1e-3;
        for k in 0..1000 {
            s = step(&s, &CurvatureControl::zero(), &p, k as f64 * dt, dt).unwrap();
        }
        let exact = 1.0 + 0.3 * (1.0 - (2.0f64).cos()) / 2.0;
        assert!((s.position.x - exact).abs() < 1e-12);
        assert!((s.speed - p.speed(1.0)).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn drift_before_repair_is_small(
            u in -10.0..10.0f64,
            w in -10.0..10.0f64,
            dt in 1e-4..1e-2f64,
            h in (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64),
        ) {
            let t = v(h.0, h.1, h.2);
            prop_assume!(t.norm() > 1e-3);
            let p = SpeedProfile::constant(1.0);
            let s = ParticleState::from_heading(Vec3::zero(), t, &p, 0.0).unwrap();
            let c = CurvatureControl::new(u, w);
            let raw = step_unrepaired(&s, &c, &p, 0.0, dt).unwrap();
            prop_assert!(raw.frame.orthonormality_error() <= 1e-6);
            let fixed = step(&s, &c, &p, 0.0, dt).unwrap();
            prop_assert!(fixed.frame.orthonormality_error() <= 1e-12);
        }

        #[test]
        fn scripted_speed_respects_bounds(
            base in 0.5..2.0f64,
            frac in 0.0..0.9f64,
            omega in 0.0..5.0f64,
            t in 0.0..100.0f64,
        ) {
            let p = SpeedProfile::Sinusoidal { base, amplitude: base * frac, omega };
            let (lo, hi) = p.bounds();
            let s = p.speed(t);
            prop_assert!(lo > 0.0);
            prop_assert!(s >= lo - 1e-12 && s <= hi + 1e-12);
            prop_assert!(p.rate(t).abs() <= p.rate_bound() + 1e-12);
        }
    }
}
