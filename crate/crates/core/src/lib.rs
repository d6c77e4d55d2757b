//! Three-dimensional motion-camouflage pursuit.
//!
//! Pursuer and evader are unit-speed-direction particles described by natural
//! Frenet frames and steered by natural curvatures. The pursuer runs motion
//! camouflage proportional guidance (MCPG), which drives the baseline between
//! the two agents to a fixed direction. The crate provides:
//!
//! - [`geometry`]: vectors and orthonormal frames,
//! - [`dynamics`]: the particle model and its RK4 integration,
//! - [`guidance`]: Γ, the transverse velocity, line-of-sight rate, MCPG and PPNG,
//! - [`analysis`]: dΓ/dt, the bound constants and gain certificates,
//! - [`scenario`]: configuration, the simulation loop, audits and export.
//!
//! Numeric modules are generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below name the double-precision instances used by the scenario engine.

pub mod analysis;
pub mod dynamics;
pub mod geometry;
pub mod guidance;
pub mod scalar;
pub mod scenario;

pub use analysis::{GainCertificate, HypothesisSet};
pub use dynamics::{CurvatureControl, ParticleState, SpeedProfile};
pub use geometry::{FrenetFrame, Vec3};
pub use guidance::EngagementView;
pub use scalar::Scalar;

pub type Vec3d = Vec3<f64>;
pub type Vec3f = Vec3<f32>;
pub type FrenetFramed = FrenetFrame<f64>;
pub type FrenetFramef = FrenetFrame<f32>;
pub type ParticleStated = ParticleState<f64>;
pub type ParticleStatef = ParticleState<f32>;
pub type CurvatureControld = CurvatureControl<f64>;
pub type CurvatureControlf = CurvatureControl<f32>;
pub type HypothesisSetd = HypothesisSet<f64>;
pub type GainCertificated = GainCertificate<f64>;
