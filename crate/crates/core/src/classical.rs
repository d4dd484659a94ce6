//! Classical reference decays: diffusive (Torrey) and collisionless.
//!
//! Only the transverse magnetization decays here; `M_z` has no decay channel
//! in either form.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::BOLTZMANN;
use crate::gas::positive;
use crate::kinetic::precession_phase;
use crate::{GradientWaveform, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalDecay {
    pub t: f64,
    /// In (0, 1].
    pub magnitude: f64,
    /// `−ln(magnitude)`, kept separately since the magnitude underflows.
    pub exponent: f64,
    pub phase: Complex64,
    /// `α·T` when known; collisionless results carry `None`.
    pub regime_ratio: Option<f64>,
}

/// `exp(−γ²D∫₀ᵗF²)` with the precession phase at `x`.
pub fn torrey_attenuation(waveform: &GradientWaveform, diffusion: f64, gamma: f64, t: f64, x: [f64; 3]) -> Result<ClassicalDecay> {
    positive("D", diffusion)?;
    let m = waveform.moments(t)?;
    let exponent = gamma * gamma * diffusion * m.int_f2;
    Ok(ClassicalDecay {
        t,
        magnitude: (-exponent).exp(),
        exponent,
        phase: precession_phase(waveform, gamma, t, x, m.f),
        regime_ratio: None,
    })
}

/// `exp(−γ²(kT/M)(∫₀ᵗF)²)`, the collisionless form as stated in the kinetic
/// derivation.
///
/// Averaging `exp(iφ)` over a Gaussian velocity with variance `kT/M` gives
/// half this exponent; see [`free_streaming_attenuation`].
pub fn no_collision_attenuation(waveform: &GradientWaveform, temperature: f64, mass: f64, gamma: f64, t: f64) -> Result<ClassicalDecay> {
    collisionless(waveform, temperature, mass, gamma, t, 1.0)
}

/// Exact collisionless average `exp(−γ²(kT/M)(∫₀ᵗF)²/2)`, phase measured
/// relative to the final position.
pub fn free_streaming_attenuation(waveform: &GradientWaveform, temperature: f64, mass: f64, gamma: f64, t: f64) -> Result<ClassicalDecay> {
    collisionless(waveform, temperature, mass, gamma, t, 0.5)
}

fn collisionless(waveform: &GradientWaveform, temperature: f64, mass: f64, gamma: f64, t: f64, factor: f64) -> Result<ClassicalDecay> {
    positive("temperature", temperature)?;
    positive("mass", mass)?;
    let m = waveform.moments(t)?;
    let v2 = BOLTZMANN * temperature / mass;
    let exponent = factor * gamma * gamma * v2 * m.int_f * m.int_f;
    Ok(ClassicalDecay {
        t,
        magnitude: (-exponent).exp(),
        exponent,
        phase: Complex64::from_polar(1.0, -gamma * waveform.b0() * t),
        regime_ratio: None,
    })
}

/// `α·T`, the ratio of the collisionless to the diffusive exponent up to an
/// O(1) waveform factor.
pub fn regime_ratio(alpha: f64, duration: f64) -> f64 {
    alpha * duration
}
