//! JSON boundary: practical-unit keys outside, SI inside.

use serde::{Deserialize, Serialize};

use crate::constants::{ANGSTROM, ATMOSPHERE, ATOMIC_MASS_UNIT, MEGA_RAD_PER_S_PER_T};
use crate::gas::StatisticsSign;
use crate::kinetic::SigmaPlusConvention;
use crate::mc::PhaseReference;
use crate::{Error, GasConditions, GradientWaveform, Result};

/// Flat JSON view of [`GasConditions`]. The gyromagnetic ratio in MHz/T is
/// read as an angular frequency (204 MHz/T for ³He is 2.04×10⁸ rad·s⁻¹·T⁻¹).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GasConditionsJson {
    #[serde(rename = "temperature_K")]
    pub temperature_k: f64,
    pub pressure_atm: f64,
    pub particle_mass_amu: f64,
    #[serde(rename = "gyromagnetic_ratio_MHz_per_T")]
    pub gyromagnetic_ratio_mhz_per_t: f64,
    pub hard_core_radius_angstrom: f64,
    pub statistics_sign: StatisticsSign,
}

impl TryFrom<GasConditionsJson> for GasConditions {
    type Error = Error;

    fn try_from(j: GasConditionsJson) -> Result<Self> {
        let g = GasConditions {
            temperature: j.temperature_k,
            pressure: j.pressure_atm * ATMOSPHERE,
            particle_mass: j.particle_mass_amu * ATOMIC_MASS_UNIT,
            gyromagnetic_ratio: j.gyromagnetic_ratio_mhz_per_t * MEGA_RAD_PER_S_PER_T,
            hard_core_radius: j.hard_core_radius_angstrom * ANGSTROM,
            statistics_sign: j.statistics_sign,
        };
        g.validate()?;
        Ok(g)
    }
}

impl From<GasConditions> for GasConditionsJson {
    fn from(g: GasConditions) -> Self {
        GasConditionsJson {
            temperature_k: g.temperature,
            pressure_atm: g.pressure / ATMOSPHERE,
            particle_mass_amu: g.particle_mass / ATOMIC_MASS_UNIT,
            gyromagnetic_ratio_mhz_per_t: g.gyromagnetic_ratio / MEGA_RAD_PER_S_PER_T,
            hard_core_radius_angstrom: g.hard_core_radius / ANGSTROM,
            statistics_sign: g.statistics_sign,
        }
    }
}

/// `{"B0_T", "u", "breakpoints": [[t_s, G_T_per_m], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveformJson {
    #[serde(rename = "B0_T", default)]
    pub b0_t: f64,
    #[serde(default = "default_direction")]
    pub u: [f64; 3],
    #[serde(default)]
    pub breakpoints: Vec<(f64, f64)>,
}

fn default_direction() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

impl TryFrom<WaveformJson> for GradientWaveform {
    type Error = Error;

    fn try_from(j: WaveformJson) -> Result<Self> {
        GradientWaveform::new(j.breakpoints, j.u, j.b0_t)
    }
}

impl From<GradientWaveform> for WaveformJson {
    fn from(w: GradientWaveform) -> Self {
        WaveformJson { b0_t: w.b0(), u: w.direction(), breakpoints: w.breakpoints().to_vec() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelChoice {
    /// Short-wavelength amplitude through the angular quadrature.
    #[default]
    HardSphere,
    /// `σ_U ≡ πa²`.
    Geometric,
}

/// Grid of `ka/ħ` values for `xsec`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XsecOptions {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Default for XsecOptions {
    fn default() -> Self {
        XsecOptions { start: 5.0, stop: 40.0, points: 36 }
    }
}

impl XsecOptions {
    pub fn grid(&self) -> Result<Vec<f64>> {
        if !(self.start > 0.0 && self.stop >= self.start && self.points >= 1) {
            return Err(Error::invalid("xsec", "need 0 < start <= stop and points >= 1"));
        }
        if self.points == 1 {
            return Ok(vec![self.start]);
        }
        let step = (self.stop - self.start) / (self.points - 1) as f64;
        Ok((0..self.points).map(|i| self.start + step * i as f64).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayOptions {
    /// Defaults to the waveform duration.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_end_s: Option<f64>,
    pub points: usize,
    /// Position along `u`, m.
    #[serde(default)]
    pub position_m: f64,
}

impl Default for DecayOptions {
    fn default() -> Self {
        DecayOptions { t_end_s: None, points: 101, position_m: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McOptions {
    pub n_particles: usize,
    pub seed: u64,
    /// Defaults to the kinetic collision rate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub collision_rate_per_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt_s: Option<f64>,
    /// Defaults to the waveform duration.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_end_s: Option<f64>,
    #[serde(default)]
    pub phase_reference: PhaseReference,
}

impl Default for McOptions {
    fn default() -> Self {
        McOptions {
            n_particles: 100_000,
            seed: 1,
            collision_rate_per_s: None,
            dt_s: None,
            t_end_s: None,
            phase_reference: PhaseReference::Origin,
        }
    }
}

/// Initial spin state after a tip at `t = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolarizationOptions {
    /// Magnitude of the polarization vector, in [0, 1].
    pub polarization: f64,
    pub tip_angle_deg: f64,
    #[serde(default)]
    pub sigma_plus_convention: SigmaPlusConvention,
}

impl Default for PolarizationOptions {
    fn default() -> Self {
        PolarizationOptions { polarization: 1.0, tip_angle_deg: 90.0, sigma_plus_convention: SigmaPlusConvention::default() }
    }
}

/// One JSON document describing a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub gas: GasConditions,
    #[serde(default = "GradientWaveform::zero")]
    pub waveform: GradientWaveform,
    #[serde(default)]
    pub collision_model: ModelChoice,
    #[serde(default)]
    pub polarization: PolarizationOptions,
    #[serde(default)]
    pub xsec: XsecOptions,
    #[serde(default)]
    pub decay: DecayOptions,
    #[serde(default)]
    pub mc: McOptions,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("RunConfig always serializes")
    }

    /// ³He at room temperature and 7 atm with the given waveform.
    pub fn helium3(waveform: GradientWaveform) -> Self {
        RunConfig {
            gas: GasConditions::helium3_room_temperature(),
            waveform,
            collision_model: ModelChoice::default(),
            polarization: PolarizationOptions::default(),
            xsec: XsecOptions::default(),
            decay: DecayOptions::default(),
            mc: McOptions::default(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "gas": {
            "temperature_K": 293.0,
            "pressure_atm": 7.0,
            "particle_mass_amu": 3.0160293,
            "gyromagnetic_ratio_MHz_per_T": 204.0,
            "hard_core_radius_angstrom": 2.4,
            "statistics_sign": -1
        }
    }"#;

    #[test]
    fn minimal_config_uses_defaults() {
        let c = RunConfig::from_json(MINIMAL).unwrap();
        assert!(c.waveform.is_empty());
        assert_eq!(c.collision_model, ModelChoice::HardSphere);
        assert_eq!(c.gas.statistics_sign, StatisticsSign::Fermion);
        assert!((c.gas.gyromagnetic_ratio - 2.04e8).abs() < 1e-3);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = MINIMAL.replacen("\"pressure_atm\"", "\"pressure_bar\": 1.0, \"pressure_atm\"", 1);
        assert!(RunConfig::from_json(&bad).is_err());
        let bad = MINIMAL.replacen("{", "{\"extra\": 1,", 1);
        assert!(RunConfig::from_json(&bad).is_err());
    }

    #[test]
    fn invalid_values_are_rejected() {
        let bad = MINIMAL.replace("\"statistics_sign\": -1", "\"statistics_sign\": 0");
        assert!(RunConfig::from_json(&bad).is_err());
        let bad = MINIMAL.replace("293.0", "-1.0");
        assert!(RunConfig::from_json(&bad).is_err());
    }

    #[test]
    fn round_trip() {
        let w = GradientWaveform::new(vec![(0.0, 0.1), (1e-3, -0.2), (2e-3, 0.0)], [0.6, 0.8, 0.0], 1.5).unwrap();
        let mut c = RunConfig::helium3(w);
        c.mc.collision_rate_per_s = Some(1e4);
        c.collision_model = ModelChoice::Geometric;
        let back = RunConfig::from_json(&c.to_json()).unwrap();
        assert_eq!(back.waveform, c.waveform);
        assert_eq!(back.mc, c.mc);
        assert_eq!(back.collision_model, c.collision_model);
        for (a, b) in [
            (back.gas.temperature, c.gas.temperature),
            (back.gas.pressure, c.gas.pressure),
            (back.gas.particle_mass, c.gas.particle_mass),
            (back.gas.gyromagnetic_ratio, c.gas.gyromagnetic_ratio),
            (back.gas.hard_core_radius, c.gas.hard_core_radius),
        ] {
            assert!((a - b).abs() <= 1e-15 * b.abs());
        }
    }

    #[test]
    fn xsec_grid() {
        let g = XsecOptions { start: 5.0, stop: 10.0, points: 6 }.grid().unwrap();
        assert_eq!(g, vec![5.0, 6.0, 7.0, 8.0, 9.0, 10.0]);
        assert!(XsecOptions { start: 0.0, stop: 1.0, points: 2 }.grid().is_err());
    }
}
