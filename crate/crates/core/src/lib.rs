//! Decay of transverse spin polarization for a dilute spin-1/2 gas in a
//! magnetic-field gradient.
//!
//! The crate computes the attenuation of `<σ+>` three ways and cross-checks
//! them:
//!
//! * [`kinetic`]: first- and second-order distortions of the spin-resolved
//!   Wigner distributions, driven by hard-sphere collision integrals from
//!   [`scattering`].
//! * [`classical`]: the exact diffusion-damped precession solution and the
//!   collisionless (ballistic) limit.
//! * [`mc`]: a seeded random-walk oracle with velocity resampling at the
//!   collision rate.
//!
//! Gas conditions and the validity diagnostics live in [`gas`]; gradient
//! waveform calculus (exact `F`, `∫F`, `∫F²`) lives in [`gradient`].
//!
//! All quantities are SI internally. The JSON boundary types in [`config`]
//! accept practical units (K, atm, Å, MHz/T) and convert on the way in.

pub mod classical;
pub mod cli;
pub mod config;
pub mod constants;
mod error;
pub mod gas;
pub mod gradient;
pub mod kinetic;
pub mod mc;
pub mod quadrature;
pub mod scattering;
pub mod validation;

pub use error::{Error, Result};

pub use classical::{no_collision_attenuation, regime_ratio, torrey_attenuation, ClassicalDecay};
pub use gas::{derive, diagnostics, maxwell_boltzmann, DerivedParams, DiagnosticsReport, GasConditions, StatisticsSign};
pub use gradient::GradientWaveform;
pub use kinetic::{
    analytic_h1_plus, h2_plus, relaxation, solve_h1, transverse_attenuation, AttenuationResult, FirstOrderSolution,
    PolarizationState, RelaxationParams,
};
pub use mc::{simulate, velocity_autocorrelation, MCConfig, MCResult};
pub use scattering::{thermal_integrals, CollisionIntegrals, CollisionModel, GeometricCrossSection, HardSphereModel};
