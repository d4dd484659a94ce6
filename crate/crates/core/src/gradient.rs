//! Piecewise-linear gradient waveforms `G(t)` and their exact moments.
//!
//! Between breakpoints `G` is linear, so `F(t) = ∫₀ᵗ G` is piecewise
//! quadratic, `∫F` piecewise cubic and `∫F²` piecewise quintic. Every moment
//! is evaluated in closed form from cumulative values stored at the
//! breakpoints; nothing here uses numerical quadrature.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Field model `B_z = B0 + (u·x) G(t)` with a piecewise-linear `G`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "crate::config::WaveformJson", into = "crate::config::WaveformJson")]
pub struct GradientWaveform {
    /// `(t [s], G [T/m])`, strictly increasing in `t`, first at `t = 0`.
    breakpoints: Vec<(f64, f64)>,
    direction: [f64; 3],
    /// Tesla.
    b0: f64,
    // F, ∫F, ∫F² at each breakpoint.
    cumulative: Vec<Moments>,
}

/// `F(t)`, `∫₀ᵗF` and `∫₀ᵗF²` at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Moments {
    /// T·s·m⁻¹
    pub f: f64,
    /// T·s²·m⁻¹
    pub int_f: f64,
    /// T²·s³·m⁻²
    pub int_f2: f64,
}

// One linear piece, expressed relative to its start time.
#[derive(Debug, Clone, Copy)]
struct Piece {
    start: Moments,
    g0: f64,
    slope: f64,
}

impl Piece {
    fn at(&self, s: f64) -> Moments {
        let (f0, g0, c2) = (self.start.f, self.g0, 0.5 * self.slope);
        let f = f0 + s * (g0 + s * c2);
        let int_f = self.start.int_f + s * (f0 + s * (0.5 * g0 + s * c2 / 3.0));
        // (f0 + g0 s + c2 s²)² integrated term by term
        let int_sq = s
            * (f0 * f0
                + s * (f0 * g0
                    + s * ((g0 * g0 + 2.0 * f0 * c2) / 3.0 + s * (0.5 * g0 * c2 + s * (c2 * c2 / 5.0)))));
        Moments { f, int_f, int_f2: self.start.int_f2 + int_sq }
    }

    fn gradient(&self, s: f64) -> f64 {
        self.g0 + self.slope * s
    }
}

impl GradientWaveform {
    pub fn new(breakpoints: Vec<(f64, f64)>, direction: [f64; 3], b0: f64) -> Result<Self> {
        let norm = direction.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm.is_nan() || (norm - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("u", format!("direction must be a unit vector, |u| = {norm}")));
        }
        if !b0.is_finite() {
            return Err(Error::invalid("B0", "must be finite"));
        }
        if let Some(&(t0, _)) = breakpoints.first() {
            if t0 != 0.0 {
                return Err(Error::invalid("breakpoints", format!("first time must be 0, got {t0}")));
            }
        }
        for (i, &(t, g)) in breakpoints.iter().enumerate() {
            if !(t.is_finite() && g.is_finite()) {
                return Err(Error::invalid("breakpoints", format!("entry {i} is not finite")));
            }
            if i > 0 && t <= breakpoints[i - 1].0 {
                return Err(Error::invalid("breakpoints", format!("times must be strictly increasing at entry {i}")));
            }
        }

        let mut cumulative = Vec::with_capacity(breakpoints.len());
        if !breakpoints.is_empty() {
            cumulative.push(Moments::default());
        }
        for w in breakpoints.windows(2) {
            let (t0, g0) = w[0];
            let (t1, g1) = w[1];
            let piece = Piece { start: *cumulative.last().unwrap(), g0, slope: (g1 - g0) / (t1 - t0) };
            cumulative.push(piece.at(t1 - t0));
        }
        Ok(GradientWaveform { breakpoints, direction, b0, cumulative })
    }

    /// `G ≡ 0` for all `t ≥ 0`.
    pub fn zero() -> Self {
        GradientWaveform::new(Vec::new(), [0.0, 0.0, 1.0], 0.0).unwrap()
    }

    /// `G ≡ 0` on `[0, duration]`.
    pub fn zero_for(duration: f64) -> Result<Self> {
        Self::constant(0.0, duration)
    }

    /// Constant `G` on `[0, duration]`, gradient along `z`.
    pub fn constant(g: f64, duration: f64) -> Result<Self> {
        GradientWaveform::new(vec![(0.0, g), (duration, g)], [0.0, 0.0, 1.0], 0.0)
    }

    /// `+g` on `[0, δ]` then `-g` on `[δ, 2δ]` with instantaneous switching
    /// approximated by a linear ramp of width `ramp` (may be tiny).
    pub fn bipolar(g: f64, delta: f64, ramp: f64) -> Result<Self> {
        if !(ramp > 0.0 && ramp < delta) {
            return Err(Error::invalid("ramp", "must lie in (0, delta)"));
        }
        let h = 0.5 * ramp;
        GradientWaveform::new(
            vec![(0.0, g), (delta - h, g), (delta + h, -g), (2.0 * delta, -g)],
            [0.0, 0.0, 1.0],
            0.0,
        )
    }

    pub fn with_b0(mut self, b0: f64) -> Self {
        self.b0 = b0;
        self
    }

    pub fn breakpoints(&self) -> &[(f64, f64)] {
        &self.breakpoints
    }

    pub fn direction(&self) -> [f64; 3] {
        self.direction
    }

    pub fn b0(&self) -> f64 {
        self.b0
    }

    /// End of the domain. Infinite for the empty (`G ≡ 0`) waveform.
    pub fn duration(&self) -> f64 {
        match self.breakpoints.last() {
            Some(&(t, _)) => t,
            None => f64::INFINITY,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.breakpoints.is_empty()
    }

    // Accepts a few ulps past the end so that `duration` computed another way
    // (e.g. 20/α) still lands inside; returns t clamped to [0, T].
    pub(crate) fn check_domain(&self, t: f64) -> Result<f64> {
        let end = self.duration();
        if t >= 0.0 && t <= end + 8.0 * f64::EPSILON * end {
            Ok(t.min(end))
        } else {
            Err(Error::Domain { quantity: "t", value: t, domain: format!("[0, {}]", self.duration()) })
        }
    }

    // Piece containing t and the offset into it. None for the empty waveform.
    fn locate(&self, t: f64) -> Option<(Piece, f64)> {
        let n = self.breakpoints.len();
        if n == 0 {
            return None;
        }
        if n == 1 {
            return Some((Piece { start: self.cumulative[0], g0: self.breakpoints[0].1, slope: 0.0 }, 0.0));
        }
        let idx = self.breakpoints.partition_point(|&(tb, _)| tb <= t).clamp(1, n - 1) - 1;
        let (t0, g0) = self.breakpoints[idx];
        let (t1, g1) = self.breakpoints[idx + 1];
        Some((Piece { start: self.cumulative[idx], g0, slope: (g1 - g0) / (t1 - t0) }, t - t0))
    }

    /// `G(t)`, T/m.
    pub fn gradient(&self, t: f64) -> Result<f64> {
        let t = self.check_domain(t)?;
        Ok(self.locate(t).map_or(0.0, |(p, s)| p.gradient(s)))
    }

    /// `F(t)`, `∫₀ᵗF`, `∫₀ᵗF²` in one evaluation.
    pub fn moments(&self, t: f64) -> Result<Moments> {
        let t = self.check_domain(t)?;
        Ok(self.locate(t).map_or(Moments::default(), |(p, s)| p.at(s)))
    }

    /// `F(t) = ∫₀ᵗ G(t') dt'`, T·s/m.
    pub fn f(&self, t: f64) -> Result<f64> {
        Ok(self.moments(t)?.f)
    }

    /// `∫₀ᵗ F(t') dt'`, T·s²/m.
    pub fn int_f(&self, t: f64) -> Result<f64> {
        Ok(self.moments(t)?.int_f)
    }

    /// `∫₀ᵗ F²(t') dt'`, T²·s³/m².
    pub fn int_f2(&self, t: f64) -> Result<f64> {
        Ok(self.moments(t)?.int_f2)
    }

    /// `max |F(t)|` over the domain.
    pub fn peak_f(&self) -> f64 {
        let mut peak = self.cumulative.iter().fold(0.0_f64, |m, c| m.max(c.f.abs()));
        for (i, w) in self.breakpoints.windows(2).enumerate() {
            let (t0, g0) = w[0];
            let (t1, g1) = w[1];
            // F is extremal inside a piece where G changes sign.
            if g0 * g1 < 0.0 {
                let s = g0 / (g0 - g1) * (t1 - t0);
                let piece = Piece { start: self.cumulative[i], g0, slope: (g1 - g0) / (t1 - t0) };
                peak = peak.max(piece.at(s).f.abs());
            }
        }
        peak
    }

    /// `e^{-αt} ∫₀ᵗ F(t') e^{αt'} dt'`, evaluated exactly piece by piece.
    ///
    /// Tends to `F(t)/α` when `F` varies slowly on the scale `1/α`; reduces
    /// to `∫₀ᵗF` at `α = 0`.
    pub fn exp_convolution(&self, alpha: f64, t: f64) -> Result<f64> {
        let t = self.check_domain(t)?;
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::invalid("alpha", format!("must be finite and >= 0, got {alpha}")));
        }
        let mut acc = 0.0;
        for (i, w) in self.breakpoints.windows(2).enumerate() {
            let (t0, g0) = w[0];
            let (t1, g1) = w[1];
            if t0 >= t {
                break;
            }
            let end = t1.min(t);
            let span = end - t0;
            let piece = Piece { start: self.cumulative[i], g0, slope: (g1 - g0) / (t1 - t0) };
            // F(end - u) = q0 + q1 u + q2 u²
            let q0 = piece.at(span).f;
            let q1 = -piece.gradient(span);
            let q2 = 0.5 * piece.slope;
            let kernel = q0 * exp_moment(0, alpha, span) + q1 * exp_moment(1, alpha, span) + q2 * exp_moment(2, alpha, span);
            acc = acc * (-alpha * span).exp() + kernel;
        }
        Ok(acc)
    }
}

/// `∫₀^Δ u^m e^{-αu} du` without cancellation for small or large `αΔ`.
pub(crate) fn exp_moment(m: u32, alpha: f64, span: f64) -> f64 {
    let x = alpha * span;
    let mp1 = m as f64 + 1.0;
    if x <= 1.0 {
        // Δ^{m+1} Σ_k (-x)^k / (k! (m+1+k))
        let mut term = 1.0;
        let mut sum = 1.0 / mp1;
        for k in 1..60 {
            term *= -x / k as f64;
            let add = term / (mp1 + k as f64);
            sum += add;
            if add.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        span.powi(m as i32 + 1) * sum
    } else {
        // m!/α^{m+1} (1 - e^{-x} Σ_{i≤m} x^i/i!)
        let mut partial = 0.0;
        let mut term = 1.0;
        let mut factorial = 1.0;
        for i in 0..=m {
            if i > 0 {
                term *= x / i as f64;
                factorial *= i as f64;
            }
            partial += term;
        }
        factorial / alpha.powi(m as i32 + 1) * (1.0 - (-x).exp() * partial)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn constant_gradient_moments() {
        let (g, t) = (0.37, 2.5);
        let w = GradientWaveform::constant(g, 3.0).unwrap();
        let m = w.moments(t).unwrap();
        assert_relative_eq!(m.f, g * t, max_relative = 1e-15);
        assert_relative_eq!(m.int_f, g * t * t / 2.0, max_relative = 1e-15);
        assert_relative_eq!(m.int_f2, g * g * t.powi(3) / 3.0, max_relative = 1e-14);
    }

    #[test]
    fn bipolar_pair_refocuses() {
        // Ideal bipolar pair: two constant pieces joined at δ. Use a ramp of
        // 1e-9 δ and compare with the ideal values at matching precision.
        let (g, d) = (2.0, 1.5);
        let w = GradientWaveform::bipolar(g, d, 1e-9 * d).unwrap();
        assert!(w.f(2.0 * d).unwrap().abs() < 1e-12);
        // Hand integration: ∫₀^δ (gt)² + ∫_δ^{2δ} (g(2δ - t))² = 2g²δ³/3
        assert_relative_eq!(w.int_f2(2.0 * d).unwrap(), 2.0 * g * g * d.powi(3) / 3.0, max_relative = 1e-8);
    }

    #[test]
    fn zero_waveform() {
        let w = GradientWaveform::zero();
        assert_eq!(w.moments(17.0).unwrap(), Moments::default());
        assert_eq!(w.peak_f(), 0.0);
        let w = GradientWaveform::zero_for(1.0).unwrap();
        assert_eq!(w.f(0.5).unwrap(), 0.0);
    }

    #[test]
    fn domain_errors() {
        let w = GradientWaveform::constant(1.0, 1.0).unwrap();
        assert!(w.f(-1e-9).is_err());
        assert!(w.int_f2(1.0 + 1e-9).is_err());
        assert!(GradientWaveform::new(vec![(0.1, 1.0)], [0.0, 0.0, 1.0], 0.0).is_err());
        assert!(GradientWaveform::new(vec![(0.0, 1.0), (0.0, 1.0)], [0.0, 0.0, 1.0], 0.0).is_err());
        assert!(GradientWaveform::new(vec![(0.0, 1.0)], [0.0, 0.5, 1.0], 0.0).is_err());
    }

    #[test]
    fn peak_inside_piece() {
        // G ramps from +1 to -1 over [0, 2]; F peaks at t = 1 with F = 1/2.
        let w = GradientWaveform::new(vec![(0.0, 1.0), (2.0, -1.0)], [1.0, 0.0, 0.0], 0.0).unwrap();
        assert_relative_eq!(w.peak_f(), 0.5, max_relative = 1e-15);
    }

    #[test]
    fn convolution_constant_gradient() {
        // e^{-αt}∫₀ᵗ G t' e^{αt'} dt' = (G/α)(t - (1 - e^{-αt})/α)
        let (g, alpha) = (1.3, 4.0);
        let w = GradientWaveform::constant(g, 10.0).unwrap();
        for &t in &[0.01, 0.2, 1.0, 7.5] {
            let exact = g / alpha * (t - (1.0 - (-alpha * t).exp()) / alpha);
            assert_relative_eq!(w.exp_convolution(alpha, t).unwrap(), exact, max_relative = 1e-13);
        }
        // Zero rate reduces to ∫F.
        assert_relative_eq!(w.exp_convolution(0.0, 3.0).unwrap(), w.int_f(3.0).unwrap(), max_relative = 1e-15);
    }

    #[test]
    fn convolution_approaches_f_over_alpha() {
        let w = GradientWaveform::constant(1.0, 1.0).unwrap();
        let alpha = 1e6;
        let c = w.exp_convolution(alpha, 1.0).unwrap();
        assert_relative_eq!(c * alpha, w.f(1.0).unwrap(), max_relative = 2e-6);
    }

    fn arb_waveform() -> impl Strategy<Value = GradientWaveform> {
        prop::collection::vec((0.05f64..1.0, -3.0f64..3.0), 2..8).prop_map(|pts| {
            let mut t = 0.0;
            let mut bp = Vec::new();
            for (i, (dt, g)) in pts.into_iter().enumerate() {
                if i > 0 {
                    t += dt;
                }
                bp.push((t, g));
            }
            GradientWaveform::new(bp, [0.0, 0.0, 1.0], 0.0).unwrap()
        })
    }

    // Composite Simpson on a fine grid, piece by piece so kinks sit on nodes.
    fn simpson_int_f2(w: &GradientWaveform, t_end: f64) -> f64 {
        let mut total = 0.0;
        for win in w.breakpoints().windows(2) {
            let (a, b) = (win[0].0, win[1].0.min(t_end));
            if a >= t_end {
                break;
            }
            let n = 2000;
            let h = (b - a) / n as f64;
            let f2 = |x: f64| w.f(x).unwrap().powi(2);
            let mut s = f2(a) + f2(b);
            for i in 1..n {
                s += if i % 2 == 1 { 4.0 } else { 2.0 } * f2(a + i as f64 * h);
            }
            total += s * h / 3.0;
        }
        total
    }

    proptest! {
        #[test]
        fn int_f2_matches_fine_quadrature(w in arb_waveform(), frac in 0.1f64..1.0) {
            let t = frac * w.duration();
            let exact = w.int_f2(t).unwrap();
            let numeric = simpson_int_f2(&w, t);
            // Simpson is exact for cubics; F² is quartic per piece, so the
            // residual is O(h⁴) and far below this bound.
            prop_assert!((exact - numeric).abs() <= 1e-10 * numeric.abs().max(1e-12));
        }

        #[test]
        fn moments_are_additive(w in arb_waveform(), f1 in 0.0f64..1.0, f2 in 0.0f64..1.0) {
            let (ta, tb) = if f1 < f2 { (f1, f2) } else { (f2, f1) };
            let (t1, t2) = (ta * w.duration(), tb * w.duration());
            let m1 = w.moments(t1).unwrap();
            let m2 = w.moments(t2).unwrap();
            // ∫_{t1}^{t2} F² with F(t) = F(t1) + ∫_{t1}^t G, by Simpson on the tail
            let n = 4000;
            let h = (t2 - t1) / n as f64;
            let mut tail = 0.0;
            for i in 0..n {
                let (a, b) = (t1 + i as f64 * h, t1 + (i + 1) as f64 * h);
                let fa = w.f(a).unwrap();
                let fm = w.f(0.5 * (a + b)).unwrap();
                let fb = w.f(b).unwrap();
                tail += (fa * fa + 4.0 * fm * fm + fb * fb) * h / 6.0;
            }
            prop_assert!((m1.int_f2 + tail - m2.int_f2).abs() <= 1e-8 * m2.int_f2.abs().max(1e-9));
            prop_assert!(m2.int_f2 >= m1.int_f2 - 1e-15);
        }

        #[test]
        fn time_reversal_of_balanced_waveform(w in arb_waveform()) {
            // Force G(d) = 0, then append G(t) = -G(2d - t) so that F(2d) = 0.
            let d = w.duration();
            let mut bp: Vec<(f64, f64)> = w.breakpoints().to_vec();
            bp.last_mut().unwrap().1 = 0.0;
            let tail: Vec<(f64, f64)> = bp.iter().rev().skip(1).map(|&(t, g)| (2.0 * d - t, -g)).collect();
            bp.extend(tail);
            let balanced = GradientWaveform::new(bp.clone(), [0.0, 0.0, 1.0], 0.0).unwrap();
            let total = balanced.duration();
            prop_assert!(balanced.f(total).unwrap().abs() < 1e-12);
            let reversed: Vec<(f64, f64)> = bp.iter().rev().map(|&(t, g)| (total - t, g)).collect();
            let reversed = GradientWaveform::new(reversed, [0.0, 0.0, 1.0], 0.0).unwrap();
            let a = balanced.int_f2(total).unwrap();
            let b = reversed.int_f2(total).unwrap();
            prop_assert!((a - b).abs() <= 1e-10 * a.abs().max(1e-12));
        }

        #[test]
        fn convolution_matches_quadrature(w in arb_waveform(), alpha in 0.0f64..30.0) {
            let t = w.duration();
            let n = 20000;
            let h = t / n as f64;
            let mut s = 0.0;
            for i in 0..n {
                let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
                let g = |x: f64| w.f(x.min(t)).unwrap() * (-alpha * (t - x)).exp();
                s += (g(a) + 4.0 * g(0.5 * (a + b)) + g(b)) * h / 6.0;
            }
            let exact = w.exp_convolution(alpha, t).unwrap();
            let scale = w.peak_f() * t;
            prop_assert!((exact - s).abs() <= 1e-9 * scale.max(1e-12));
        }
    }
}
