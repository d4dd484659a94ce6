//! Physical conditions of the gas, the derived thermal scales and the
//! validity diagnostics for the perturbative treatment.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::constants::{ATMOSPHERE, BOLTZMANN, HBAR, HELIUM3_GAMMA, HELIUM3_MASS};
use crate::{Error, Result};

/// Largest acceptable range-to-spacing ratio `a/d` (triple collisions).
pub const MAX_RANGE_OVER_SPACING: f64 = 0.3;
/// Largest acceptable `γħF/p̄` (shift of the off-diagonal momentum argument).
pub const MAX_GRADIENT_MOMENTUM_RATIO: f64 = 1.0e-3;
/// Smallest acceptable `k̄a/ħ` for the short-wavelength amplitude.
pub const MIN_KA_OVER_HBAR: f64 = 5.0;
/// Largest acceptable degeneracy parameter `nλ̄³`.
pub const MAX_DEGENERACY: f64 = 1.0e-2;

/// Sign `ε` entering the exchange terms: `-1` for fermions, `+1` for bosons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum StatisticsSign {
    Fermion,
    Boson,
}

impl StatisticsSign {
    pub fn value(self) -> f64 {
        match self {
            StatisticsSign::Fermion => -1.0,
            StatisticsSign::Boson => 1.0,
        }
    }
}

impl TryFrom<i8> for StatisticsSign {
    type Error = String;

    fn try_from(v: i8) -> std::result::Result<Self, String> {
        match v {
            -1 => Ok(StatisticsSign::Fermion),
            1 => Ok(StatisticsSign::Boson),
            other => Err(format!("statistics_sign must be -1 or +1, got {other}")),
        }
    }
}

impl From<StatisticsSign> for i8 {
    fn from(s: StatisticsSign) -> i8 {
        s.value() as i8
    }
}

/// Physical inputs, SI units throughout.
///
/// Serialized through [`crate::config::GasConditionsJson`], which carries
/// practical units in its key names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "crate::config::GasConditionsJson", into = "crate::config::GasConditionsJson")]
pub struct GasConditions {
    /// K
    pub temperature: f64,
    /// Pa
    pub pressure: f64,
    /// kg
    pub particle_mass: f64,
    /// rad·s⁻¹·T⁻¹
    pub gyromagnetic_ratio: f64,
    /// m
    pub hard_core_radius: f64,
    pub statistics_sign: StatisticsSign,
}

impl GasConditions {
    /// ³He at 293 K and 7 atm with a 2.4 Å hard core.
    pub fn helium3_room_temperature() -> Self {
        GasConditions {
            temperature: 293.0,
            pressure: 7.0 * ATMOSPHERE,
            particle_mass: HELIUM3_MASS,
            gyromagnetic_ratio: HELIUM3_GAMMA,
            hard_core_radius: 2.4e-10,
            statistics_sign: StatisticsSign::Fermion,
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive("temperature", self.temperature)?;
        positive("pressure", self.pressure)?;
        positive("particle_mass", self.particle_mass)?;
        positive("hard_core_radius", self.hard_core_radius)?;
        if !self.gyromagnetic_ratio.is_finite() {
            return Err(Error::invalid("gyromagnetic_ratio", "must be finite"));
        }
        Ok(())
    }

    /// `kT`, J.
    pub fn thermal_energy(&self) -> f64 {
        BOLTZMANN * self.temperature
    }
}

pub(crate) fn positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be finite and > 0, got {v}")))
    }
}

/// Thermodynamic and kinematic scales derived from [`GasConditions`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    /// `n = P/kT`, m⁻³
    pub number_density: f64,
    /// `d = n^(-1/3)`, m
    pub mean_spacing: f64,
    /// `β⁽ᴹ⁾ = 1/(2MkT)`, (kg·m·s⁻¹)⁻²
    pub beta_m: f64,
    /// `p̄ = M·√(8kT/πM)`, kg·m·s⁻¹
    pub mean_momentum: f64,
    /// `k̄ = √(8μkT/π)`, kg·m·s⁻¹
    pub mean_relative_momentum: f64,
    /// `λ̄ = ħ/p̄`, m
    pub mean_wavelength: f64,
    /// `μ = M/2`, kg
    pub reduced_mass: f64,
    /// `nλ̄³`
    pub degeneracy: f64,
    /// `M`, kg
    pub particle_mass: f64,
    /// `kT`, J
    pub thermal_energy: f64,
}

/// Derive the thermal scales. The number density uses the ideal-gas closure.
pub fn derive(conditions: &GasConditions) -> Result<DerivedParams> {
    conditions.validate()?;
    let kt = conditions.thermal_energy();
    let mass = conditions.particle_mass;
    let reduced_mass = 0.5 * mass;

    let number_density = conditions.pressure / kt;
    let mean_spacing = number_density.cbrt().recip();
    let mean_momentum = mass * (8.0 * kt / (PI * mass)).sqrt();
    let mean_relative_momentum = (8.0 * reduced_mass * kt / PI).sqrt();
    let mean_wavelength = HBAR / mean_momentum;

    Ok(DerivedParams {
        number_density,
        mean_spacing,
        beta_m: 1.0 / (2.0 * mass * kt),
        mean_momentum,
        mean_relative_momentum,
        mean_wavelength,
        reduced_mass,
        degeneracy: number_density * mean_wavelength.powi(3),
        particle_mass: mass,
        thermal_energy: kt,
    })
}

/// Maxwell-Boltzmann momentum-space density `(β/π)^{3/2} exp(-βp²)` with
/// `β = 1/(2·mass·kT)`. Normalized so that `∫d³p B(p) = 1`.
pub fn maxwell_boltzmann(p: f64, mass: f64, temperature: f64) -> f64 {
    let beta = 1.0 / (2.0 * mass * BOLTZMANN * temperature);
    (beta / PI).powf(1.5) * (-beta * p * p).exp()
}

/// One named validity check with its threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidityFlag {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    /// `"max"` when the value must not exceed the threshold, `"min"` when it
    /// must not fall below it.
    pub bound: String,
    pub pass: bool,
}

impl ValidityFlag {
    fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        ValidityFlag { name: name.into(), value, threshold, bound: "max".into(), pass: value <= threshold }
    }

    fn at_least(name: &str, value: f64, threshold: f64) -> Self {
        ValidityFlag { name: name.into(), value, threshold, bound: "min".into(), pass: value >= threshold }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub a_over_d: f64,
    /// `γħF_peak/p̄`
    pub gradient_momentum_ratio: f64,
    /// `k̄a/ħ`
    pub ka_over_hbar: f64,
    pub degeneracy: f64,
    pub validity_flags: Vec<ValidityFlag>,
}

impl DiagnosticsReport {
    pub fn all_pass(&self) -> bool {
        self.validity_flags.iter().all(|f| f.pass)
    }

    pub fn failing(&self) -> impl Iterator<Item = &ValidityFlag> {
        self.validity_flags.iter().filter(|f| !f.pass)
    }
}

/// Evaluate the dimensionless ratios that control the approximations. Failing
/// checks are reported in the flags, never returned as errors.
pub fn diagnostics(conditions: &GasConditions, f_peak: f64) -> Result<DiagnosticsReport> {
    if !(f_peak.is_finite() && f_peak >= 0.0) {
        return Err(Error::invalid("f_peak", format!("must be finite and >= 0, got {f_peak}")));
    }
    let derived = derive(conditions)?;
    let a = conditions.hard_core_radius;

    let a_over_d = a / derived.mean_spacing;
    let gradient_momentum_ratio = conditions.gyromagnetic_ratio.abs() * HBAR * f_peak / derived.mean_momentum;
    let ka_over_hbar = derived.mean_relative_momentum * a / HBAR;

    let validity_flags = vec![
        ValidityFlag::at_most("a_over_d", a_over_d, MAX_RANGE_OVER_SPACING),
        ValidityFlag::at_most("gradient_momentum_ratio", gradient_momentum_ratio, MAX_GRADIENT_MOMENTUM_RATIO),
        ValidityFlag::at_least("ka_over_hbar", ka_over_hbar, MIN_KA_OVER_HBAR),
        ValidityFlag::at_most("degeneracy", derived.degeneracy, MAX_DEGENERACY),
    ];

    Ok(DiagnosticsReport { a_over_d, gradient_momentum_ratio, ka_over_hbar, degeneracy: derived.degeneracy, validity_flags })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, QuadOptions};
    use approx::assert_relative_eq;

    fn he3() -> GasConditions {
        GasConditions::helium3_room_temperature()
    }

    #[test]
    fn number_density_matches_ideal_gas_by_hand() {
        // 7 * 101325 / (1.380649e-23 * 293)
        let d = derive(&he3()).unwrap();
        assert_relative_eq!(d.number_density, 1.753_330_345_65e26, max_relative = 1e-9);
    }

    #[test]
    fn range_over_spacing_near_quoted_value() {
        let r = diagnostics(&he3(), 0.0).unwrap();
        assert!((r.a_over_d / 0.13 - 1.0).abs() < 0.05, "a/d = {}", r.a_over_d);
    }

    #[test]
    fn doubling_temperature_halves_density() {
        let mut hot = he3();
        hot.temperature *= 2.0;
        let n1 = derive(&he3()).unwrap().number_density;
        let n2 = derive(&hot).unwrap().number_density;
        assert_eq!(n1, 2.0 * n2);
    }

    #[test]
    fn spacing_is_inverse_cube_root() {
        let d = derive(&he3()).unwrap();
        assert_relative_eq!(d.mean_spacing * d.number_density.cbrt(), 1.0, max_relative = 1e-15);
        assert_eq!(d.reduced_mass, 0.5 * d.particle_mass);
    }

    #[test]
    fn maxwell_boltzmann_peak_value() {
        let (m, t) = (HELIUM3_MASS, 293.0);
        let beta = 1.0 / (2.0 * m * BOLTZMANN * t);
        assert_relative_eq!(maxwell_boltzmann(0.0, m, t), (beta / PI).powf(1.5), max_relative = 1e-15);
    }

    fn radial_moment(power: i32, m: f64, t: f64) -> f64 {
        let scale = (2.0 * m * BOLTZMANN * t).sqrt();
        let opts = QuadOptions { rel_tol: 1e-12, initial_panels: 16, ..Default::default() };
        let est = integrate(
            |s: f64| {
                let p = s * scale;
                [4.0 * PI * p * p * p.powi(power) * maxwell_boltzmann(p, m, t) * scale]
            },
            0.0,
            12.0,
            &opts,
        )
        .unwrap();
        est.value[0]
    }

    #[test]
    fn maxwell_boltzmann_normalized_and_second_moment() {
        let (m, t) = (HELIUM3_MASS, 293.0);
        assert!((radial_moment(0, m, t) - 1.0).abs() < 1e-8);
        let p2 = radial_moment(2, m, t);
        assert_relative_eq!(p2, 3.0 * m * BOLTZMANN * t, max_relative = 1e-8);
    }

    #[test]
    fn reference_gradient_ratio_and_ka() {
        let r = diagnostics(&he3(), 3.5e-5).unwrap();
        assert!((r.gradient_momentum_ratio / 9.5e-8 - 1.0).abs() < 0.15, "{}", r.gradient_momentum_ratio);
        assert!((r.ka_over_hbar / 12.5 - 1.0).abs() < 0.10, "{}", r.ka_over_hbar);
        assert!(r.all_pass());
        assert!(r.degeneracy < 1e-2);
    }

    #[test]
    fn zero_peak_gives_zero_ratio() {
        assert_eq!(diagnostics(&he3(), 0.0).unwrap().gradient_momentum_ratio, 0.0);
    }

    #[test]
    fn failing_flags_are_reported_not_thrown() {
        let mut cold = he3();
        cold.temperature = 0.5;
        let r = diagnostics(&cold, 1.0).unwrap();
        let failing: Vec<_> = r.failing().map(|f| f.name.as_str()).collect();
        assert!(failing.contains(&"ka_over_hbar"));
        assert!(failing.contains(&"gradient_momentum_ratio"));
    }

    #[test]
    fn rejects_bad_inputs() {
        let mut g = he3();
        g.pressure = -1.0;
        assert!(derive(&g).is_err());
        assert!(diagnostics(&he3(), -1.0).is_err());
        assert!(StatisticsSign::try_from(0).is_err());
    }
}
