//! Physical constants (CODATA 2018, SI) and the practical-unit factors used at
//! the configuration boundary.

/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Unified atomic mass unit, kg.
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;

/// One standard atmosphere, Pa.
pub const ATMOSPHERE: f64 = 101_325.0;
/// One ångström, m.
pub const ANGSTROM: f64 = 1.0e-10;
/// `MHz/T` to `rad·s⁻¹·T⁻¹`, reading the MHz figure as an angular frequency.
pub const MEGA_RAD_PER_S_PER_T: f64 = 1.0e6;
/// mm²/s to m²/s.
pub const MM2_PER_S: f64 = 1.0e-6;

/// Atomic mass of ³He, u.
pub const HELIUM3_MASS_AMU: f64 = 3.016_029_3;
/// ³He mass, kg.
pub const HELIUM3_MASS: f64 = HELIUM3_MASS_AMU * ATOMIC_MASS_UNIT;
/// Angular gyromagnetic ratio of ³He as quoted in the 204 MHz/T convention.
pub const HELIUM3_GAMMA: f64 = 204.0 * MEGA_RAD_PER_S_PER_T;
