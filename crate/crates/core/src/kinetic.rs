//! Collision rate, diffusion constant, the first-order distortion ODEs and the
//! second-order attenuation of the transverse polarization.
//!
//! The distortions are momentum independent, `f⁽¹⁾ ∝ (u·p) h⁽¹⁾(t)`. The two
//! population equations are integrated in the weighted form `y = n_σ h_σ`, so
//! an empty spin population never forces a division by zero.

use num_complex::Complex64;
use ode_solvers::{Dopri5, OutputType, System, Vector4};
use serde::{Deserialize, Serialize};

use crate::constants::HBAR;
use crate::gas::positive;
use crate::{CollisionIntegrals, DerivedParams, Error, GradientWaveform, Result};

/// Above this second-order deficit the truncated expansion is flagged.
pub const SECOND_ORDER_WARNING: f64 = 0.2;

/// `α` and `D = kT/(Mα)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelaxationParams {
    /// s⁻¹
    pub alpha: f64,
    /// m²·s⁻¹
    pub diffusion: f64,
}

/// `α = (4β/3M)·n·I_U`, `D = kT/(Mα)`.
pub fn relaxation(derived: &DerivedParams, integrals: &CollisionIntegrals) -> Result<RelaxationParams> {
    positive("I_U", integrals.i_u)?;
    let m = derived.particle_mass;
    let alpha = 4.0 * derived.beta_m / (3.0 * m) * derived.number_density * integrals.i_u;
    positive("alpha", alpha)?;
    Ok(RelaxationParams { alpha, diffusion: derived.thermal_energy / (m * alpha) })
}

/// Closed-form `α` for `σ_U ≡ πa²`: `(8√π/3)·n·a²·√(kT/M)`.
pub fn geometric_alpha(derived: &DerivedParams, radius: f64) -> f64 {
    8.0 * std::f64::consts::PI.sqrt() / 3.0
        * derived.number_density
        * radius
        * radius
        * (derived.thermal_energy / derived.particle_mass).sqrt()
}

/// How `⟨σ₊⟩` is tied to `n₊`: `⟨σ₊⟩ = c·n₊/n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaPlusConvention {
    /// `c = 1`
    #[default]
    ZerothOrder,
    /// `c = 2`, from the trace over the Wigner matrix.
    WignerTrace,
}

impl SigmaPlusConvention {
    pub fn constant(self) -> f64 {
        match self {
            SigmaPlusConvention::ZerothOrder => 1.0,
            SigmaPlusConvention::WignerTrace => 2.0,
        }
    }
}

/// Zeroth-order spin populations and coherence, m⁻³.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarizationState {
    pub n_half: f64,
    pub n_mhalf: f64,
    pub n_plus: Complex64,
    pub convention: SigmaPlusConvention,
}

impl PolarizationState {
    pub fn new(n_half: f64, n_mhalf: f64, n_plus: Complex64, convention: SigmaPlusConvention) -> Result<Self> {
        if !(n_half.is_finite() && n_mhalf.is_finite() && n_half >= 0.0 && n_mhalf >= 0.0 && n_half + n_mhalf > 0.0) {
            return Err(Error::invalid("populations", "need n_half, n_mhalf >= 0 with a positive sum"));
        }
        if !(n_plus.re.is_finite() && n_plus.im.is_finite()) {
            return Err(Error::invalid("n_plus", "must be finite"));
        }
        let s = PolarizationState { n_half, n_mhalf, n_plus, convention };
        let p = s.polarization();
        if p > 1.0 + 1e-12 {
            return Err(Error::invalid("n_plus", format!("polarization vector has length {p} > 1")));
        }
        Ok(s)
    }

    /// Polarization `P` tipped by `tip_angle` (rad) from the field axis.
    pub fn tipped(n: f64, polarization: f64, tip_angle: f64, convention: SigmaPlusConvention) -> Result<Self> {
        positive("n", n)?;
        if !(0.0..=1.0).contains(&polarization) {
            return Err(Error::invalid("polarization", format!("must lie in [0, 1], got {polarization}")));
        }
        let (s, c) = tip_angle.sin_cos();
        let z = polarization * c;
        let sigma_plus = polarization * s;
        Self::new(0.5 * n * (1.0 + z), 0.5 * n * (1.0 - z), Complex64::new(n * sigma_plus / convention.constant(), 0.0), convention)
    }

    pub fn density(&self) -> f64 {
        self.n_half + self.n_mhalf
    }

    /// `n_{1/2} − n_{−1/2}`
    pub fn imbalance(&self) -> f64 {
        self.n_half - self.n_mhalf
    }

    /// `⟨σ₊⟩ = c·n₊/n`
    pub fn sigma_plus(&self) -> Complex64 {
        self.convention.constant() * self.n_plus / self.density()
    }

    /// Length of the polarization vector.
    pub fn polarization(&self) -> f64 {
        let z = self.imbalance() / self.density();
        (z * z + self.sigma_plus().norm_sqr()).sqrt()
    }
}

/// Options for [`solve_h1`].
#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    /// Include the ε terms carrying `I_I` and `I_π`.
    pub exchange: bool,
    pub epsilon: f64,
    /// Output times, s; sorted, inside the waveform domain.
    pub times: Vec<f64>,
    pub rtol: f64,
    /// Step cap per segment between breakpoints and output times.
    pub max_steps: u32,
}

impl SolveOptions {
    pub fn new(times: Vec<f64>, epsilon: f64) -> Self {
        SolveOptions { exchange: true, epsilon, times, rtol: 1e-8, max_steps: 1_000_000 }
    }

    pub fn without_exchange(mut self) -> Self {
        self.exchange = false;
        self
    }

    /// `points` equally spaced times on `[0, t_end]`.
    pub fn uniform(t_end: f64, points: usize, epsilon: f64) -> Self {
        let n = points.max(2);
        Self::new((0..n).map(|i| t_end * i as f64 / (n - 1) as f64).collect(), epsilon)
    }
}

/// `h⁽¹⁾` trajectories on the requested time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirstOrderSolution {
    /// s
    pub times: Vec<f64>,
    /// `n_{1/2}·h⁽¹⁾_{1/2}`
    pub weighted_half: Vec<f64>,
    /// `n_{−1/2}·h⁽¹⁾_{−1/2}`
    pub weighted_mhalf: Vec<f64>,
    /// Zero where the population is empty (the function is undefined there).
    pub h1_half: Vec<f64>,
    pub h1_mhalf: Vec<f64>,
    pub h1_plus: Vec<Complex64>,
    /// `(n_{1/2} − n_{−1/2})·ħβF(t)`, the exact value of the weighted sum.
    pub sum_rule_target: Vec<f64>,
    pub exchange: bool,
    pub accepted_steps: u32,
    pub rejected_steps: u32,
}

impl FirstOrderSolution {
    /// Largest `|y₁ + y₂ − δn ħβF|`, relative to the largest term involved.
    pub fn sum_rule_residual(&self) -> f64 {
        let mut worst = 0.0_f64;
        let mut scale = 0.0_f64;
        for i in 0..self.times.len() {
            let (a, b, c) = (self.weighted_half[i], self.weighted_mhalf[i], self.sum_rule_target[i]);
            worst = worst.max((a + b - c).abs());
            scale = scale.max(a.abs()).max(b.abs()).max(c.abs());
        }
        if scale == 0.0 {
            0.0
        } else {
            worst / scale
        }
    }
}

#[derive(Clone, Copy)]
struct FirstOrderSystem<'a> {
    waveform: &'a GradientWaveform,
    alpha: f64,
    // A = 4β/(3M)
    a: f64,
    i_u: f64,
    im_i_i: f64,
    i_pi: f64,
    beta: f64,
    mass: f64,
    n_half: f64,
    n_mhalf: f64,
    n_plus_sq: f64,
    epsilon: f64,
    // physical = scaled · unit
    y_unit: f64,
    h_unit: f64,
}

impl FirstOrderSystem<'_> {
    fn derivative(&self, t: f64, y1: f64, y2: f64, h: Complex64) -> (f64, f64, Complex64) {
        let m = self.waveform.moments(t.min(self.waveform.duration())).unwrap_or_default();
        let g = self.waveform.gradient(t.min(self.waveform.duration())).unwrap_or(0.0);
        let n = self.n_half + self.n_mhalf;
        let dn = self.n_half - self.n_mhalf;
        let hb = HBAR * self.beta;

        let direct = self.a * self.i_u * (self.n_half * y2 - self.n_mhalf * y1);
        let exchange_pop = self.epsilon
            * self.n_plus_sq
            * h.im
            * (-2.0 * self.a * self.im_i_i + 8.0 * self.beta / (3.0 * HBAR) * self.i_pi);
        let dy1 = self.n_half * hb * g + direct + exchange_pop;
        let dy2 = -self.n_mhalf * hb * g - direct - exchange_pop;

        let sum = y1 + y2;
        let diff = Complex64::new(y1 - y2, 0.0) - dn * h;
        let i = Complex64::i();
        let dh = i * m.f / self.mass + self.a * ((sum - n * h) * self.i_u + self.epsilon * diff * (i * self.im_i_i))
            - i * self.epsilon * 4.0 * self.beta / (3.0 * HBAR) * diff * self.i_pi;
        (dy1, dy2, dh)
    }
}

impl System<f64, Vector4<f64>> for FirstOrderSystem<'_> {
    // Independent variable τ = αt; unknowns scaled to O(1).
    fn system(&self, tau: f64, q: &Vector4<f64>, dq: &mut Vector4<f64>) {
        let t = tau / self.alpha;
        let (dy1, dy2, dh) = self.derivative(
            t,
            q[0] * self.y_unit,
            q[1] * self.y_unit,
            Complex64::new(q[2], q[3]) * self.h_unit,
        );
        let ys = 1.0 / (self.alpha * self.y_unit);
        let hs = 1.0 / (self.alpha * self.h_unit);
        dq[0] = dy1 * ys;
        dq[1] = dy2 * ys;
        dq[2] = dh.re * hs;
        dq[3] = dh.im * hs;
    }
}

/// Integrate the four real first-order equations from zero initial data.
///
/// The solver restarts at every waveform breakpoint so that kinks in `G` never
/// fall inside a step.
pub fn solve_h1(
    waveform: &GradientWaveform,
    derived: &DerivedParams,
    integrals: &CollisionIntegrals,
    state: &PolarizationState,
    options: &SolveOptions,
) -> Result<FirstOrderSolution> {
    let relax = relaxation(derived, integrals)?;
    let alpha = relax.alpha;
    let times = options.times.iter().map(|&t| waveform.check_domain(t)).collect::<Result<Vec<f64>>>()?;
    let t_end = times.last().copied().unwrap_or(0.0);
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("times", "must be sorted"));
    }
    positive("rtol", options.rtol)?;

    let f_ref = waveform.peak_f().max(f64::MIN_POSITIVE);
    let h_unit = f_ref / (derived.particle_mass * alpha);
    let n = state.density();
    let eps = if options.exchange { options.epsilon } else { 0.0 };
    let sys = FirstOrderSystem {
        waveform,
        alpha,
        a: 4.0 * derived.beta_m / (3.0 * derived.particle_mass),
        i_u: integrals.i_u,
        im_i_i: integrals.im_i_i,
        i_pi: integrals.i_pi,
        beta: derived.beta_m,
        mass: derived.particle_mass,
        n_half: state.n_half,
        n_mhalf: state.n_mhalf,
        n_plus_sq: state.n_plus.norm_sqr(),
        epsilon: eps,
        y_unit: n * h_unit,
        h_unit,
    };

    // Segment ends: breakpoints and output times, in τ.
    let mut stops: Vec<f64> = waveform
        .breakpoints()
        .iter()
        .map(|&(t, _)| t)
        .filter(|&t| t > 0.0 && t < t_end)
        .chain(times.iter().copied())
        .collect();
    stops.sort_by(f64::total_cmp);
    stops.dedup();

    let mut q = Vector4::zeros();
    let mut tau = 0.0;
    let (mut accepted, mut rejected) = (0u32, 0u32);
    let mut at_stop = Vec::with_capacity(stops.len());
    for &t in &stops {
        let target = t * alpha;
        if target > tau {
            let mut stepper = Dopri5::from_param(
                sys,
                tau,
                target,
                target - tau,
                q,
                options.rtol,
                1e-12,
                0.9,
                0.04,
                0.2,
                10.0,
                0.1,
                0.0,
                options.max_steps,
                1000,
                OutputType::Sparse,
            );
            match stepper.integrate() {
                Ok(stats) => {
                    accepted += stats.accepted_steps;
                    rejected += stats.rejected_steps;
                }
                Err(e) => {
                    return Err(Error::Integration { t: tau / alpha, accepted, rejected, message: e.to_string() });
                }
            }
            q = *stepper.y_out().last().expect("solver reports the end state");
            tau = target;
            if !q.iter().all(|v| v.is_finite()) {
                return Err(Error::Integration { t, accepted, rejected, message: "non-finite state".into() });
            }
        }
        at_stop.push((t, q));
    }

    let hb = HBAR * derived.beta_m;
    let mut out = FirstOrderSolution {
        times: Vec::with_capacity(options.times.len()),
        weighted_half: Vec::new(),
        weighted_mhalf: Vec::new(),
        h1_half: Vec::new(),
        h1_mhalf: Vec::new(),
        h1_plus: Vec::new(),
        sum_rule_target: Vec::new(),
        exchange: options.exchange,
        accepted_steps: accepted,
        rejected_steps: rejected,
    };
    for &t in &times {
        let q = if t == 0.0 {
            Vector4::zeros()
        } else {
            at_stop.iter().find(|(s, _)| *s == t).map(|(_, q)| *q).expect("every output time is a stop")
        };
        let y1 = q[0] * sys.y_unit;
        let y2 = q[1] * sys.y_unit;
        out.times.push(t);
        out.weighted_half.push(y1);
        out.weighted_mhalf.push(y2);
        out.h1_half.push(if state.n_half > 0.0 { y1 / state.n_half } else { 0.0 });
        out.h1_mhalf.push(if state.n_mhalf > 0.0 { y2 / state.n_mhalf } else { 0.0 });
        out.h1_plus.push(Complex64::new(q[2], q[3]) * h_unit);
        out.sum_rule_target.push(state.imbalance() * hb * waveform.f(t)?);
    }
    Ok(out)
}

/// Closed-form `h⁽¹⁾₊` with the exchange terms dropped:
/// `Im h = C/M`, `Re h = α(δn/n)ħβ·C`, `C = e^{−αt}∫₀ᵗF e^{αt'}dt'`.
pub fn analytic_h1_plus(
    waveform: &GradientWaveform,
    alpha: f64,
    derived: &DerivedParams,
    state: &PolarizationState,
    t: f64,
) -> Result<Complex64> {
    let c = waveform.exp_convolution(alpha, t)?;
    let re = alpha * state.imbalance() / state.density() * HBAR * derived.beta_m * c;
    Ok(Complex64::new(re, c / derived.particle_mass))
}

/// `h⁽²⁾₊ = −∫₀ᵗF²/(M²α)`, (kg·m·s⁻¹)⁻² per unit γ².
pub fn h2_plus(waveform: &GradientWaveform, alpha: f64, mass: f64, t: f64) -> Result<f64> {
    positive("alpha", alpha)?;
    positive("mass", mass)?;
    Ok(-waveform.int_f2(t)? / (mass * mass * alpha))
}

/// Transverse polarization at one instant, normalized to its initial value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttenuationResult {
    pub t: f64,
    /// `exp[−iγ(B₀t + (u·x)F(t))]`
    pub phase: Complex64,
    /// `1 − γ²D∫₀ᵗF²`
    pub attenuation: f64,
    pub validity_warning: Option<String>,
}

/// Second-order attenuation and the precession phase at position `x`.
pub fn transverse_attenuation(
    waveform: &GradientWaveform,
    relax: &RelaxationParams,
    gamma: f64,
    t: f64,
    x: [f64; 3],
) -> Result<AttenuationResult> {
    let m = waveform.moments(t)?;
    let deficit = gamma * gamma * relax.diffusion * m.int_f2;
    Ok(AttenuationResult {
        t,
        phase: precession_phase(waveform, gamma, t, x, m.f),
        attenuation: 1.0 - deficit,
        validity_warning: (deficit > SECOND_ORDER_WARNING).then(|| {
            format!("second-order deficit {deficit:.3} exceeds {SECOND_ORDER_WARNING}; use the resummed exponential")
        }),
    })
}

pub(crate) fn precession_phase(waveform: &GradientWaveform, gamma: f64, t: f64, x: [f64; 3], f: f64) -> Complex64 {
    let u = waveform.direction();
    let ux = u[0] * x[0] + u[1] * x[1] + u[2] * x[2];
    Complex64::from_polar(1.0, -gamma * (waveform.b0() * t + ux * f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::MM2_PER_S;
    use crate::{derive, thermal_integrals, GasConditions, GeometricCrossSection, HardSphereModel};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::sync::OnceLock;

    fn he3() -> (DerivedParams, CollisionIntegrals) {
        static CACHE: OnceLock<(DerivedParams, CollisionIntegrals)> = OnceLock::new();
        *CACHE.get_or_init(|| {
            let gas = GasConditions::helium3_room_temperature();
            let d = derive(&gas).unwrap();
            let ci = thermal_integrals(&HardSphereModel::for_gas(&gas).unwrap(), gas.temperature).unwrap();
            (d, ci)
        })
    }

    fn geometric() -> (DerivedParams, CollisionIntegrals) {
        let gas = GasConditions::helium3_room_temperature();
        let d = derive(&gas).unwrap();
        let ci = thermal_integrals(&GeometricCrossSection::for_gas(&gas).unwrap(), gas.temperature).unwrap();
        (d, ci)
    }

    #[test]
    fn geometric_alpha_matches_closed_form() {
        let (d, ci) = geometric();
        let r = relaxation(&d, &ci).unwrap();
        assert_relative_eq!(r.alpha, geometric_alpha(&d, 2.4e-10), max_relative = 1e-9);
        assert_relative_eq!(r.alpha * r.diffusion, d.thermal_energy / d.particle_mass, max_relative = 1e-12);
        // Closed form at the reference conditions (numpy oracle): 4.2901e10 s⁻¹, 18.83 mm²/s.
        assert_relative_eq!(r.alpha, 4.2901e10, max_relative = 1e-4);
        assert_relative_eq!(r.diffusion / MM2_PER_S, 18.83, max_relative = 1e-3);
    }

    #[test]
    fn hard_sphere_alpha_reference() {
        let (d, ci) = he3();
        let r = relaxation(&d, &ci).unwrap();
        assert_relative_eq!(r.alpha, 4.464e10, max_relative = 1e-3);
    }

    #[test]
    fn tipped_state() {
        let s = PolarizationState::tipped(2.0, 1.0, std::f64::consts::FRAC_PI_2, SigmaPlusConvention::ZerothOrder).unwrap();
        assert_relative_eq!(s.n_half, 1.0, max_relative = 1e-15);
        assert_relative_eq!(s.sigma_plus().re, 1.0, max_relative = 1e-15);
        let w = PolarizationState::tipped(2.0, 1.0, std::f64::consts::FRAC_PI_2, SigmaPlusConvention::WignerTrace).unwrap();
        assert_relative_eq!(w.n_plus.re, 1.0, max_relative = 1e-15);
        assert!(PolarizationState::new(1.0, 1.0, Complex64::new(3.0, 0.0), SigmaPlusConvention::ZerothOrder).is_err());
        assert!(PolarizationState::tipped(1.0, 1.5, 0.0, SigmaPlusConvention::ZerothOrder).is_err());
    }

    fn small_problem() -> (DerivedParams, CollisionIntegrals, f64) {
        let (d, ci) = he3();
        let alpha = relaxation(&d, &ci).unwrap().alpha;
        (d, ci, alpha)
    }

    #[test]
    fn zero_gradient_gives_zero_solution() {
        let (d, ci, alpha) = small_problem();
        let w = GradientWaveform::zero_for(10.0 / alpha).unwrap();
        let s = PolarizationState::tipped(d.number_density, 0.7, 1.0, SigmaPlusConvention::ZerothOrder).unwrap();
        let sol = solve_h1(&w, &d, &ci, &s, &SolveOptions::uniform(10.0 / alpha, 11, -1.0)).unwrap();
        assert!(sol.h1_plus.iter().all(|h| h.norm() == 0.0));
        assert!(sol.weighted_half.iter().all(|&y| y == 0.0));
    }

    #[test]
    fn constant_gradient_matches_closed_form() {
        let (d, ci, alpha) = small_problem();
        let t_end = 20.0 / alpha;
        let w = GradientWaveform::constant(0.12, t_end).unwrap();
        let s = PolarizationState::tipped(d.number_density, 0.6, 0.8, SigmaPlusConvention::ZerothOrder).unwrap();
        let sol = solve_h1(&w, &d, &ci, &s, &SolveOptions::uniform(t_end, 21, -1.0).without_exchange()).unwrap();
        for (i, &t) in sol.times.iter().enumerate().skip(1) {
            let exact = analytic_h1_plus(&w, alpha, &d, &s, t).unwrap();
            assert!((sol.h1_plus[i].im - exact.im).abs() <= 1e-6 * exact.im.abs(), "t={t}");
            assert!((sol.h1_plus[i].re - exact.re).abs() <= 1e-6 * exact.re.abs(), "t={t}");
        }
        assert!(sol.sum_rule_residual() < 1e-6);
    }

    #[test]
    fn re_over_im_bounded_and_vanishes_without_imbalance() {
        let (d, ci, alpha) = small_problem();
        let t_end = 30.0 / alpha;
        let w = GradientWaveform::constant(0.12, t_end).unwrap();
        let unpolarized_z = PolarizationState::tipped(d.number_density, 1.0, std::f64::consts::FRAC_PI_2, SigmaPlusConvention::ZerothOrder).unwrap();
        let sol = solve_h1(&w, &d, &ci, &unpolarized_z, &SolveOptions::uniform(t_end, 5, -1.0).without_exchange()).unwrap();
        assert!(sol.h1_plus.iter().all(|h| h.re.abs() <= 1e-12 * h.im.abs().max(1e-300)));

        // Re/Im = (δn/n)·ħα/(2kT) = (4/π)(δn/n)·λ̄/ℓ with ℓ = v̄/α, so the
        // bound needs |δn/n| ≤ π/4.
        let s = PolarizationState::tipped(d.number_density, 0.5, 0.3, SigmaPlusConvention::ZerothOrder).unwrap();
        let h = analytic_h1_plus(&w, alpha, &d, &s, t_end).unwrap();
        let mean_free_path = d.mean_momentum / d.particle_mass / alpha;
        assert!(h.re.abs() / h.im.abs() <= d.mean_wavelength / mean_free_path);
    }

    #[test]
    fn h2_constant_gradient() {
        let (g, t, m, a) = (0.3, 2.0, 5e-27, 4e10);
        let w = GradientWaveform::constant(g, t).unwrap();
        assert_relative_eq!(h2_plus(&w, a, m, t).unwrap(), -g * g * t.powi(3) / (3.0 * m * m * a), max_relative = 1e-14);
        assert_eq!(h2_plus(&GradientWaveform::zero(), a, m, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn attenuation_basics() {
        let relax = RelaxationParams { alpha: 1.0, diffusion: 23.1 * MM2_PER_S };
        let w = GradientWaveform::zero().with_b0(0.01);
        let r = transverse_attenuation(&w, &relax, 2.04e8, 1e-3, [0.0, 0.0, 0.5]).unwrap();
        assert_eq!(r.attenuation, 1.0);
        assert!((r.phase - Complex64::from_polar(1.0, -2.04e8 * 0.01 * 1e-3)).norm() < 1e-12);
        assert!(r.validity_warning.is_none());

        let (g, t) = (0.05, 0.01);
        let w = GradientWaveform::constant(g, t).unwrap();
        let r = transverse_attenuation(&w, &relax, 2.04e8, t, [0.0; 3]).unwrap();
        let expect = 1.0 - 2.04e8f64.powi(2) * relax.diffusion * g * g * t.powi(3) / 3.0;
        assert_relative_eq!(r.attenuation, expect, max_relative = 1e-12);
    }

    #[test]
    fn measured_point_second_order_warns() {
        // γ²∫F² = 0.032 s/mm² and D = 23.1 mm²/s; realise with a constant gradient.
        let gamma = 2.04e8;
        let t: f64 = 1e-3;
        let target = 0.032 / MM2_PER_S;
        let g = (3.0 * target / (gamma * gamma * t.powi(3))).sqrt();
        let w = GradientWaveform::constant(g, t).unwrap();
        let relax = RelaxationParams { alpha: 1.0, diffusion: 23.1 * MM2_PER_S };
        let r = transverse_attenuation(&w, &relax, gamma, t, [0.0; 3]).unwrap();
        assert_relative_eq!(1.0 - r.attenuation, 0.7392, max_relative = 1e-9);
        assert!(r.validity_warning.is_some());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn linear_in_gradient(scale in 0.1f64..10.0, g in -0.5f64..0.5) {
            prop_assume!(g.abs() > 1e-3);
            let (d, ci, alpha) = small_problem();
            let t_end = 5.0 / alpha;
            let w1 = GradientWaveform::new(vec![(0.0, g), (t_end, -0.5 * g)], [0.0, 0.0, 1.0], 0.0).unwrap();
            let w2 = GradientWaveform::new(vec![(0.0, scale * g), (t_end, -0.5 * scale * g)], [0.0, 0.0, 1.0], 0.0).unwrap();
            let s = PolarizationState::tipped(d.number_density, 0.8, 0.7, SigmaPlusConvention::ZerothOrder).unwrap();
            let o = SolveOptions::uniform(t_end, 3, -1.0);
            let a = solve_h1(&w1, &d, &ci, &s, &o).unwrap();
            let b = solve_h1(&w2, &d, &ci, &s, &o).unwrap();
            let (ha, hb) = (a.h1_plus[2], b.h1_plus[2]);
            prop_assert!((hb - scale * ha).norm() <= 1e-6 * hb.norm());

            let relax = RelaxationParams { alpha, diffusion: 2e-5 };
            let da = 1.0 - transverse_attenuation(&w1, &relax, 2.04e8, t_end, [0.0; 3]).unwrap().attenuation;
            let db = 1.0 - transverse_attenuation(&w2, &relax, 2.04e8, t_end, [0.0; 3]).unwrap().attenuation;
            prop_assert!((db - scale * scale * da).abs() <= 1e-10 * db.abs());
        }

        #[test]
        fn h2_never_positive(g0 in -1.0f64..1.0, g1 in -1.0f64..1.0, t in 0.01f64..1.0) {
            let w = GradientWaveform::new(vec![(0.0, g0), (1.0, g1)], [0.0, 0.0, 1.0], 0.0).unwrap();
            prop_assert!(h2_plus(&w, 1e3, 1.0, t).unwrap() <= 0.0);
        }
    }
}
