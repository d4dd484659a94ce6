//! Random-walk oracle for the transverse decay.
//!
//! Only the displacement along `u` enters the phase, so particles move in one
//! dimension. Between collisions they fly ballistically; at each collision
//! (Poisson, rate `α`) the velocity is redrawn from the thermal distribution,
//! which gives `⟨v(0)v(t)⟩ = (kT/M)e^{−αt}` and hence `D = kT/(Mα)` exactly.
//!
//! The ensemble is split into fixed blocks. Block `b` draws from ChaCha8
//! seeded with `seed` on stream `b`, so results do not depend on the thread
//! count; block sums are combined in block order.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::BOLTZMANN;
use crate::gas::positive;
use crate::{Error, GradientWaveform, Result};

pub const BLOCKS: usize = 50;
pub const MIN_PARTICLES: usize = 1000;
/// Per-particle step budget.
pub const MAX_STEPS: usize = 10_000_000;

/// Where the position entering `φ = −γ∫(u·x)G` is measured from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseReference {
    /// The common starting point `x = 0`.
    #[default]
    Origin,
    /// The particle's own final position; adds `γ·x(T)·F(T)`.
    FinalPosition,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MCConfig {
    pub n_particles: usize,
    /// Largest trapezoid step, s.
    pub dt: f64,
    pub seed: u64,
    /// `α`, s⁻¹; zero for free flight.
    pub collision_rate: f64,
    pub temperature: f64,
    pub mass: f64,
    pub gamma: f64,
    pub waveform: GradientWaveform,
    /// End of the run; the waveform duration when `None`.
    pub t_end: Option<f64>,
    pub phase_reference: PhaseReference,
}

impl MCConfig {
    /// Step `min(0.1/α, T/10⁴)`, phase measured from the origin.
    pub fn new(
        waveform: GradientWaveform,
        temperature: f64,
        mass: f64,
        gamma: f64,
        collision_rate: f64,
        n_particles: usize,
        seed: u64,
    ) -> Self {
        let mut c = MCConfig {
            n_particles,
            dt: f64::INFINITY,
            seed,
            collision_rate,
            temperature,
            mass,
            gamma,
            waveform,
            t_end: None,
            phase_reference: PhaseReference::Origin,
        };
        c.dt = c.default_dt();
        c
    }

    pub fn with_t_end(mut self, t_end: f64) -> Self {
        self.t_end = Some(t_end);
        self.dt = self.default_dt();
        self
    }

    pub fn default_dt(&self) -> f64 {
        let t = self.duration();
        let mut dt = t / 1e4;
        if self.collision_rate > 0.0 {
            dt = dt.min(0.1 / self.collision_rate);
        }
        dt
    }

    pub fn duration(&self) -> f64 {
        self.t_end.unwrap_or_else(|| self.waveform.duration())
    }

    /// Number of trapezoid steps: the smallest count whose step is ≤ `dt`.
    pub fn steps(&self) -> usize {
        (self.duration() / self.dt).ceil().max(1.0) as usize
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_particles < MIN_PARTICLES {
            return Err(Error::invalid("n_particles", format!("need at least {MIN_PARTICLES}, got {}", self.n_particles)));
        }
        positive("temperature", self.temperature)?;
        positive("mass", self.mass)?;
        positive("dt", self.dt)?;
        if !self.gamma.is_finite() {
            return Err(Error::invalid("gamma", "must be finite"));
        }
        if !(self.collision_rate.is_finite() && self.collision_rate >= 0.0) {
            return Err(Error::invalid("collision_rate", "must be finite and >= 0"));
        }
        if self.collision_rate > 0.0 && self.dt > 0.1 / self.collision_rate * (1.0 + 1e-12) {
            return Err(Error::invalid("dt", format!("must not exceed 0.1/collision_rate = {:e}", 0.1 / self.collision_rate)));
        }
        let t = self.duration();
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::invalid("t_end", "run length must be finite and > 0 (set t_end for an empty waveform)"));
        }
        self.waveform.check_domain(t)?;
        if self.steps() > MAX_STEPS {
            return Err(Error::invalid("dt", format!("{} steps per particle exceeds the budget of {MAX_STEPS}", self.steps())));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MCResult {
    /// `⟨exp(iφ)⟩`
    pub mean_attenuation: Complex64,
    /// Jackknife error of the complex mean.
    pub std_error: f64,
    pub n_collisions_mean: f64,
    pub n_particles: usize,
    pub seed: u64,
    pub steps: usize,
}

// Neumaier compensated sum.
#[derive(Debug, Clone, Copy, Default)]
struct Sum {
    s: f64,
    c: f64,
}

impl Sum {
    fn add(&mut self, x: f64) {
        let t = self.s + x;
        if self.s.abs() >= x.abs() {
            self.c += (self.s - t) + x;
        } else {
            self.c += (x - t) + self.s;
        }
        self.s = t;
    }

    fn value(&self) -> f64 {
        self.s + self.c
    }
}

fn block_range(n: usize, b: usize) -> std::ops::Range<usize> {
    let base = n / BLOCKS;
    let extra = n % BLOCKS;
    let start = b * base + b.min(extra);
    start..start + base + usize::from(b < extra)
}

fn block_rng(seed: u64, block: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block as u64);
    rng
}

struct BlockSum {
    count: usize,
    re: f64,
    im: f64,
    collisions: f64,
}

/// Ensemble mean of `exp(iφ)` with a 50-block jackknife error.
pub fn simulate(config: &MCConfig) -> Result<MCResult> {
    config.validate()?;
    let steps = config.steps();
    let t_end = config.duration();
    let h = t_end / steps as f64;
    let grid: Vec<f64> = (0..=steps).map(|j| config.waveform.gradient(t_end * j as f64 / steps as f64)).collect::<Result<_>>()?;
    let f_end = config.waveform.f(t_end)?;
    let sigma = (BOLTZMANN * config.temperature / config.mass).sqrt();
    let exp = (config.collision_rate > 0.0).then(|| Exp::new(config.collision_rate).expect("rate checked positive"));

    let blocks: Vec<Result<BlockSum>> = (0..BLOCKS)
        .into_par_iter()
        .map(|b| {
            let range = block_range(config.n_particles, b);
            let mut rng = block_rng(config.seed, b);
            let (mut re, mut im, mut coll) = (Sum::default(), Sum::default(), Sum::default());
            for particle in range.clone() {
                let mut v: f64 = sigma * rng.sample::<f64, _>(StandardNormal);
                let mut next = exp.map_or(f64::INFINITY, |e| rng.sample(e));
                let (mut x, mut tc, mut collisions) = (0.0_f64, 0.0_f64, 0u64);
                let mut prev = 0.0;
                let mut acc = 0.0;
                for (j, &g) in grid.iter().enumerate().skip(1) {
                    let t1 = if j == steps { t_end } else { h * j as f64 };
                    while next < t1 {
                        x += v * (next - tc);
                        tc = next;
                        v = sigma * rng.sample::<f64, _>(StandardNormal);
                        next += exp.map_or(f64::INFINITY, |e| rng.sample(e));
                        collisions += 1;
                    }
                    x += v * (t1 - tc);
                    tc = t1;
                    let cur = x * g;
                    acc += 0.5 * h * (prev + cur);
                    prev = cur;
                }
                let mut phi = -config.gamma * acc;
                if config.phase_reference == PhaseReference::FinalPosition {
                    phi += config.gamma * x * f_end;
                }
                if !phi.is_finite() {
                    return Err(Error::NonFinite { particle, step: steps, t: t_end });
                }
                let (s, c) = phi.sin_cos();
                re.add(c);
                im.add(s);
                coll.add(collisions as f64);
            }
            Ok(BlockSum { count: range.len(), re: re.value(), im: im.value(), collisions: coll.value() })
        })
        .collect();
    let blocks: Vec<BlockSum> = blocks.into_iter().collect::<Result<_>>()?;

    let (mut re, mut im, mut coll) = (Sum::default(), Sum::default(), Sum::default());
    for b in &blocks {
        re.add(b.re);
        im.add(b.im);
        coll.add(b.collisions);
    }
    let n = config.n_particles as f64;
    let mean = Complex64::new(re.value() / n, im.value() / n);

    let leave_out: Vec<Complex64> = blocks
        .iter()
        .map(|b| Complex64::new(re.value() - b.re, im.value() - b.im) / (n - b.count as f64))
        .collect();
    let centre = leave_out.iter().sum::<Complex64>() / BLOCKS as f64;
    let spread: f64 = leave_out.iter().map(|z| (z - centre).norm_sqr()).sum();
    let std_error = ((BLOCKS as f64 - 1.0) / BLOCKS as f64 * spread).sqrt();

    Ok(MCResult {
        mean_attenuation: mean,
        std_error,
        n_collisions_mean: coll.value() / n,
        n_particles: config.n_particles,
        seed: config.seed,
        steps,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AutocorrelationPoint {
    /// s
    pub lag: f64,
    /// `⟨v(0)v(lag)⟩`, m²·s⁻²
    pub correlation: f64,
    pub std_error: f64,
}

/// Empirical `⟨v(0)v(τ)⟩` of the velocity along `u` under the same collision
/// process as [`simulate`].
pub fn velocity_autocorrelation(config: &MCConfig, lags: &[f64]) -> Result<Vec<AutocorrelationPoint>> {
    if config.n_particles < MIN_PARTICLES {
        return Err(Error::invalid("n_particles", format!("need at least {MIN_PARTICLES}")));
    }
    positive("temperature", config.temperature)?;
    positive("mass", config.mass)?;
    if !(config.collision_rate.is_finite() && config.collision_rate >= 0.0) {
        return Err(Error::invalid("collision_rate", "must be finite and >= 0"));
    }
    if lags.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
        return Err(Error::invalid("lags", "must be finite and >= 0"));
    }
    let mut order: Vec<usize> = (0..lags.len()).collect();
    order.sort_by(|&a, &b| lags[a].total_cmp(&lags[b]));
    let sigma = (BOLTZMANN * config.temperature / config.mass).sqrt();
    let exp = (config.collision_rate > 0.0).then(|| Exp::new(config.collision_rate).expect("rate checked positive"));

    let blocks: Vec<(Vec<Sum>, Vec<Sum>)> = (0..BLOCKS)
        .into_par_iter()
        .map(|b| {
            let mut rng = block_rng(config.seed, b);
            let mut first = vec![Sum::default(); lags.len()];
            let mut second = vec![Sum::default(); lags.len()];
            for _ in block_range(config.n_particles, b) {
                let v0: f64 = sigma * rng.sample::<f64, _>(StandardNormal);
                let mut v = v0;
                let mut next = exp.map_or(f64::INFINITY, |e| rng.sample(e));
                for &i in &order {
                    while next <= lags[i] {
                        v = sigma * rng.sample::<f64, _>(StandardNormal);
                        next += exp.map_or(f64::INFINITY, |e| rng.sample(e));
                    }
                    let p = v0 * v;
                    first[i].add(p);
                    second[i].add(p * p);
                }
            }
            (first, second)
        })
        .collect();

    let n = config.n_particles as f64;
    Ok((0..lags.len())
        .map(|i| {
            let (mut s1, mut s2) = (Sum::default(), Sum::default());
            for (a, b) in &blocks {
                s1.add(a[i].value());
                s2.add(b[i].value());
            }
            let mean = s1.value() / n;
            let var = (s2.value() / n - mean * mean).max(0.0) * n / (n - 1.0);
            AutocorrelationPoint { lag: lags[i], correlation: mean, std_error: (var / n).sqrt() }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::HELIUM3_MASS;

    // Laboratory-scale toy: slow collisions so runs stay short.
    fn toy(alpha: f64, g: f64, t: f64, n: usize) -> MCConfig {
        MCConfig::new(GradientWaveform::constant(g, t).unwrap(), 293.0, HELIUM3_MASS, 2.04e8, alpha, n, 7)
    }

    #[test]
    fn zero_gradient_is_exactly_one() {
        let c = MCConfig::new(GradientWaveform::zero(), 293.0, HELIUM3_MASS, 2.04e8, 1e4, 2000, 3).with_t_end(1e-3);
        let r = simulate(&c).unwrap();
        assert_eq!(r.mean_attenuation, Complex64::new(1.0, 0.0));
        assert_eq!(r.std_error, 0.0);
    }

    #[test]
    fn seed_determinism() {
        let c = toy(2e4, 1e-4, 1e-3, 2000);
        let a = simulate(&c).unwrap();
        let b = simulate(&c).unwrap();
        assert_eq!(a, b);
        let mut other = c.clone();
        other.seed += 1;
        assert_ne!(simulate(&other).unwrap().mean_attenuation, a.mean_attenuation);
    }

    #[test]
    fn config_rules() {
        let mut c = toy(1e4, 1e-4, 1e-3, 2000);
        c.dt = 1.0 / 1e4;
        assert!(c.validate().is_err());
        let c = toy(1e4, 1e-4, 1e-3, 999);
        assert!(c.validate().is_err());
        let c = MCConfig::new(GradientWaveform::zero(), 293.0, HELIUM3_MASS, 2.04e8, 0.0, 2000, 1);
        assert!(c.validate().is_err());
    }

    #[test]
    fn block_ranges_cover_everything() {
        for n in [1000, 1049, 100_003] {
            let total: usize = (0..BLOCKS).map(|b| block_range(n, b).len()).sum();
            assert_eq!(total, n);
            assert_eq!(block_range(n, BLOCKS - 1).end, n);
        }
    }

    #[test]
    fn collision_count_matches_rate() {
        let (alpha, t) = (5e4, 2e-3);
        let r = simulate(&toy(alpha, 0.0, t, 4000)).unwrap();
        let expect = alpha * t;
        assert!((r.n_collisions_mean - expect).abs() < 4.0 * (expect / 4000.0).sqrt(), "{}", r.n_collisions_mean);
    }

    #[test]
    fn autocorrelation_is_exponential() {
        let alpha = 1e4;
        let c = toy(alpha, 0.0, 1e-3, 200_000);
        let v2 = BOLTZMANN * 293.0 / HELIUM3_MASS;
        let pts = velocity_autocorrelation(&c, &[1.0 / alpha, 0.0, 20.0 / alpha]).unwrap();
        assert!((pts[1].correlation - v2).abs() < 3.0 * pts[1].std_error);
        assert!((pts[0].correlation - v2 * (-1.0f64).exp()).abs() < 3.0 * pts[0].std_error);
        assert!(pts[2].correlation.abs() < 3.0 * pts[2].std_error);
    }

    #[test]
    fn error_shrinks_with_particle_count() {
        // √100 = 10 between the two runs; 20% slack.
        let small = simulate(&toy(0.0, 2e-2, 2e-4, 1000)).unwrap();
        let large = simulate(&toy(0.0, 2e-2, 2e-4, 100_000)).unwrap();
        let ratio = small.std_error / large.std_error;
        assert!((ratio / 10.0 - 1.0).abs() < 0.2, "{ratio}");
    }
}
