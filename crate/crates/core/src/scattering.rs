//! Short-wavelength hard-sphere scattering and the thermal collision integrals
//! `I_U`, `I_I`, `I_π`.
//!
//! The amplitude is written as `t = (πħ²a/μ)·b(x, θ)` with `x = ka/ħ` and the
//! dimensionless bracket
//!
//! ```text
//! b(x, θ) = i·x·(1 + cos θ)·J₁(x sin θ)/(x sin θ) + exp(−2i·x·sin(θ/2))
//! ```
//!
//! so that `dσ_U/dΩ = μ²|t|²/(4π²ħ⁴) = (a²/4)|b|²`.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::{BOLTZMANN, HBAR};
use crate::gas::{positive, MIN_KA_OVER_HBAR};
use crate::quadrature::{integrate, QuadOptions};
use crate::{Error, GasConditions, Result};

/// Radial cutoff in units of `√(2μkT)`.
pub const RADIAL_CUTOFF: f64 = 8.0;

/// `J₁(z)/z`, with the removable point at `z = 0` handled by its series.
pub fn j1_over_x(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        0.5 - z * z / 16.0
    } else {
        libm::j1(z) / z
    }
}

/// Dimensionless bracket `b(x, θ)`; no domain checks.
pub fn bracket(x: f64, theta: f64) -> Complex64 {
    let (s, c) = theta.sin_cos();
    let shadow = Complex64::new(0.0, x * (1.0 + c) * j1_over_x(x * s));
    shadow + Complex64::from_polar(1.0, -2.0 * x * (0.5 * theta).sin())
}

fn check_angle(theta: f64) -> Result<()> {
    if (0.0..=PI).contains(&theta) {
        Ok(())
    } else {
        Err(Error::Domain { quantity: "theta", value: theta, domain: "[0, π]".into() })
    }
}

/// Differential cross sections at one `(k, θ)`, m²/sr.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DifferentialCrossSections {
    pub unsymmetrized: f64,
    /// `|t(θ) + ε t(π−θ)|²/2` in cross-section units.
    pub symmetrized: f64,
    /// `t(π−θ)·t*(θ)` in cross-section units; complex.
    pub interference: Complex64,
}

/// Angular integrals at one `k`, m².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossSections {
    /// `σ_U(k) = ∫dΩ (1 − cos θ) dσ_U/dΩ`
    pub transport: f64,
    /// `∫dΩ dσ_U/dΩ`
    pub total: f64,
    /// `σ_I(k) = ∫dΩ cos θ dσ_I/dΩ`; the real part vanishes up to quadrature error.
    pub interference: Complex64,
    /// Largest component error estimate.
    pub error: f64,
}

/// What a collision model has to supply to the thermal averages.
pub trait CollisionModel: Sync {
    fn radius(&self) -> f64;
    fn reduced_mass(&self) -> f64;
    /// `σ_U` and `σ_I` at relative momentum `k`.
    fn cross_sections(&self, k: f64) -> Result<CrossSections>;
    /// `Re t(k, π)`, J·m³.
    fn backward_amplitude_re(&self, k: f64) -> f64;
}

/// Short-wavelength hard sphere: illuminated-side reflection plus shadow
/// diffraction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardSphereModel {
    /// m
    pub radius: f64,
    /// kg
    pub reduced_mass: f64,
}

impl HardSphereModel {
    pub fn new(radius: f64, reduced_mass: f64) -> Result<Self> {
        positive("radius", radius)?;
        positive("reduced_mass", reduced_mass)?;
        Ok(HardSphereModel { radius, reduced_mass })
    }

    pub fn for_gas(gas: &GasConditions) -> Result<Self> {
        Self::new(gas.hard_core_radius, 0.5 * gas.particle_mass)
    }

    /// `x = ka/ħ`.
    pub fn ka_over_hbar(&self, k: f64) -> f64 {
        k * self.radius / HBAR
    }

    /// Relative momentum with `ka/ħ = x`.
    pub fn momentum_for(&self, x: f64) -> f64 {
        x * HBAR / self.radius
    }

    /// `πħ²a/μ`, the prefactor `(2πħ²/μ)(a/2)`.
    pub fn amplitude_scale(&self) -> f64 {
        PI * HBAR * HBAR * self.radius / self.reduced_mass
    }

    /// Set when `ka/ħ` is below the range where the short-wavelength form is
    /// trustworthy.
    pub fn validity_warning(&self, k: f64) -> Option<String> {
        let x = self.ka_over_hbar(k);
        (x < MIN_KA_OVER_HBAR).then(|| {
            format!("ka/hbar = {x:.3} is below {MIN_KA_OVER_HBAR}; the short-wavelength amplitude is unreliable")
        })
    }

    fn check_momentum(k: f64) -> Result<()> {
        if k.is_finite() && k > 0.0 {
            Ok(())
        } else {
            Err(Error::Domain { quantity: "k", value: k, domain: "(0, ∞)".into() })
        }
    }

    /// `t(k, θ)`, J·m³.
    pub fn amplitude(&self, k: f64, theta: f64) -> Result<Complex64> {
        Self::check_momentum(k)?;
        check_angle(theta)?;
        Ok(self.amplitude_scale() * bracket(self.ka_over_hbar(k), theta))
    }

    pub fn differential_cross_sections(&self, k: f64, theta: f64, epsilon: f64) -> Result<DifferentialCrossSections> {
        Self::check_momentum(k)?;
        check_angle(theta)?;
        let x = self.ka_over_hbar(k);
        let forward = bracket(x, theta);
        let backward = bracket(x, PI - theta);
        let unit = 0.25 * self.radius * self.radius;
        Ok(DifferentialCrossSections {
            unsymmetrized: unit * forward.norm_sqr(),
            symmetrized: 0.5 * unit * (forward + epsilon * backward).norm_sqr(),
            interference: unit * backward * forward.conj(),
        })
    }

    /// Angular integrals at `ka/ħ = x`, as multiples of `πa²`.
    pub fn reduced_cross_sections(x: f64, rel_tol: f64) -> Result<CrossSections> {
        // ~2x panels gives well over ten GK nodes per oscillation of J₁(x sin θ)
        // and of the illuminated-side phase.
        let panels = ((2.0 * x).ceil() as usize).max(8);
        let opts = QuadOptions { rel_tol, initial_panels: panels, ..Default::default() };
        let est = integrate(
            |theta: f64| {
                let (s, c) = theta.sin_cos();
                let f = bracket(x, theta);
                let g = bracket(x, PI - theta);
                let m = f.norm_sqr();
                let i = g * f.conj();
                [s * (1.0 - c) * m, s * m, s * c * i.re, s * c * i.im]
            },
            0.0,
            PI,
            &opts,
        )?;
        let v = est.value;
        Ok(CrossSections {
            transport: 0.5 * v[0],
            total: 0.5 * v[1],
            interference: Complex64::new(0.5 * v[2], 0.5 * v[3]),
            error: 0.5 * est.max_error(),
        })
    }

    /// Transport cross section `σ_U` computed from the illuminated-side or
    /// shadow term alone, as a multiple of `πa²`.
    pub fn reduced_transport_partial(x: f64, shadow: bool) -> Result<f64> {
        let opts = QuadOptions { rel_tol: 1e-9, initial_panels: ((2.0 * x).ceil() as usize).max(8), ..Default::default() };
        let est = integrate(
            |theta: f64| {
                let (s, c) = theta.sin_cos();
                let term = if shadow { x * (1.0 + c) * j1_over_x(x * s) } else { 1.0 };
                [s * (1.0 - c) * term * term]
            },
            0.0,
            PI,
            &opts,
        )?;
        Ok(0.5 * est.value[0])
    }

    /// `σ_U(k)`, m².
    pub fn transport_cross_section(&self, k: f64) -> Result<f64> {
        Ok(self.cross_sections(k)?.transport)
    }

    /// `Im σ_I(k)`, m².
    pub fn interference_cross_section(&self, k: f64) -> Result<f64> {
        Ok(self.cross_sections(k)?.interference.im)
    }
}

impl CollisionModel for HardSphereModel {
    fn radius(&self) -> f64 {
        self.radius
    }

    fn reduced_mass(&self) -> f64 {
        self.reduced_mass
    }

    fn cross_sections(&self, k: f64) -> Result<CrossSections> {
        Self::check_momentum(k)?;
        let r = Self::reduced_cross_sections(self.ka_over_hbar(k), 1e-9)?;
        let area = PI * self.radius * self.radius;
        Ok(CrossSections {
            transport: area * r.transport,
            total: area * r.total,
            interference: area * r.interference,
            error: area * r.error,
        })
    }

    fn backward_amplitude_re(&self, k: f64) -> f64 {
        self.amplitude_scale() * (2.0 * self.ka_over_hbar(k)).cos()
    }
}

/// Idealized `σ_U ≡ πa²`, no exchange amplitude. Serves as the closed-form
/// reference for the collision rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometricCrossSection {
    pub radius: f64,
    pub reduced_mass: f64,
}

impl GeometricCrossSection {
    pub fn new(radius: f64, reduced_mass: f64) -> Result<Self> {
        positive("radius", radius)?;
        positive("reduced_mass", reduced_mass)?;
        Ok(GeometricCrossSection { radius, reduced_mass })
    }

    pub fn for_gas(gas: &GasConditions) -> Result<Self> {
        Self::new(gas.hard_core_radius, 0.5 * gas.particle_mass)
    }
}

impl CollisionModel for GeometricCrossSection {
    fn radius(&self) -> f64 {
        self.radius
    }

    fn reduced_mass(&self) -> f64 {
        self.reduced_mass
    }

    fn cross_sections(&self, _k: f64) -> Result<CrossSections> {
        let area = PI * self.radius * self.radius;
        Ok(CrossSections { transport: area, total: 2.0 * area, interference: Complex64::new(0.0, 0.0), error: 0.0 })
    }

    fn backward_amplitude_re(&self, _k: f64) -> f64 {
        0.0
    }
}

/// Maxwell-Boltzmann averages over the relative momentum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollisionIntegrals {
    /// `⟨k³σ_U⟩`, (kg·m·s⁻¹)³·m²
    pub i_u: f64,
    /// `Im ⟨k³σ_I⟩`; the integral itself is pure imaginary.
    pub im_i_i: f64,
    /// `⟨k² Re t(k, π)⟩`, (kg·m·s⁻¹)²·J·m³
    pub i_pi: f64,
    pub i_u_error: f64,
    pub im_i_i_error: f64,
    /// Real part of the `I_I` estimate; zero up to quadrature error.
    pub re_i_i: f64,
    pub i_pi_error: f64,
    /// `∫|k² Re t(k, π)|` weight, the natural scale of the `I_π` cancellation.
    pub i_pi_scale: f64,
}

/// `I_U`, `I_I`, `I_π` at temperature `T`, relative tolerance 10⁻⁶.
pub fn thermal_integrals<M: CollisionModel + ?Sized>(model: &M, temperature: f64) -> Result<CollisionIntegrals> {
    positive("temperature", temperature)?;
    let k0 = (2.0 * model.reduced_mass() * BOLTZMANN * temperature).sqrt();
    let x0 = k0 * model.radius() / HBAR;
    let norm = 4.0 / PI.sqrt();

    let panels = (2.0 * (RADIAL_CUTOFF * x0 / PI).ceil()) as usize;
    let opts = QuadOptions { rel_tol: 1e-6, initial_panels: panels.max(8), ..Default::default() };
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let est = integrate(
        |s: f64| {
            let w = s.powi(5) * (-s * s).exp();
            match model.cross_sections(k0 * s) {
                Ok(cs) => [w * cs.transport, w * cs.interference.im, w * cs.interference.re],
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    [f64::NAN; 3]
                }
            }
        },
        0.0,
        RADIAL_CUTOFF,
        &opts,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let est = est?;
    let scale = norm * k0.powi(3);

    // I_π is exponentially suppressed; the integrand cancels almost exactly,
    // so the tolerance is set against ∫|·| rather than the result.
    let abs_opts = QuadOptions { rel_tol: 1e-10, initial_panels: panels.max(8), ..Default::default() };
    let magnitude = integrate(
        |s: f64| [s.powi(4) * (-s * s).exp() * model.backward_amplitude_re(k0 * s).abs()],
        0.0,
        RADIAL_CUTOFF,
        &abs_opts,
    )?
    .value[0];
    let pi_opts = QuadOptions { rel_tol: 0.0, abs_tol: 1e-10 * magnitude, initial_panels: panels.max(8), ..Default::default() };
    let pi_est = if magnitude > 0.0 {
        integrate(
            |s: f64| [s.powi(4) * (-s * s).exp() * model.backward_amplitude_re(k0 * s)],
            0.0,
            RADIAL_CUTOFF,
            &pi_opts,
        )?
    } else {
        crate::quadrature::Estimate { value: [0.0], error: [0.0], evaluations: 0 }
    };
    let pi_scale = norm * k0 * k0;

    Ok(CollisionIntegrals {
        i_u: scale * est.value[0],
        im_i_i: scale * est.value[1],
        re_i_i: scale * est.value[2],
        i_u_error: scale * est.error[0],
        im_i_i_error: scale * est.error[1],
        i_pi: pi_scale * pi_est.value[0],
        i_pi_error: pi_scale * pi_est.error[0],
        i_pi_scale: pi_scale * magnitude,
    })
}

/// Closed form of `I_π` for the hard-sphere amplitude, integrating the
/// Gaussian over the whole real line (the cutoff tail is below 10⁻²⁷).
pub fn hard_sphere_i_pi(model: &HardSphereModel, temperature: f64) -> f64 {
    let k0 = (2.0 * model.reduced_mass * BOLTZMANN * temperature).sqrt();
    let x0 = k0 * model.radius / HBAR;
    // ∫₀^∞ s⁴ e^{−s²} cos(qs) ds = (√π/2) e^{−q²/4} (3/4 − 3q²/4 + q⁴/16), q = 2x0
    let q2 = 4.0 * x0 * x0;
    let poly = 0.75 - 0.75 * q2 + q2 * q2 / 16.0;
    let radial = 0.5 * PI.sqrt() * (-x0 * x0).exp() * poly;
    4.0 / PI.sqrt() * k0 * k0 * model.amplitude_scale() * radial
}
