//! Globally adaptive 15-point Gauss-Kronrod quadrature for small vector-valued
//! integrands.
//!
//! The interval is first split into `initial_panels` equal panels so that an
//! oscillatory integrand can be seeded with a few nodes per period; panels
//! are then bisected in order of decreasing error until the total error
//! estimate meets the tolerance.

// Kronrod nodes and weights are kept at full published precision.
#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    /// Relative to the largest component of the integral.
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub initial_panels: usize,
    pub max_subdivisions: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { rel_tol: 1e-10, abs_tol: 0.0, initial_panels: 1, max_subdivisions: 20_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<const N: usize> {
    pub value: [f64; N],
    /// Per-component error estimates.
    pub error: [f64; N],
    pub evaluations: usize,
}

impl<const N: usize> Estimate<N> {
    pub fn max_error(&self) -> f64 {
        self.error.iter().copied().fold(0.0, f64::max)
    }
}

struct Panel<const N: usize> {
    a: f64,
    b: f64,
    value: [f64; N],
    error: [f64; N],
}

impl<const N: usize> Panel<N> {
    fn key(&self) -> f64 {
        self.error.iter().copied().fold(0.0, f64::max)
    }
}

impl<const N: usize> PartialEq for Panel<N> {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}
impl<const N: usize> Eq for Panel<N> {}
impl<const N: usize> PartialOrd for Panel<N> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<const N: usize> Ord for Panel<N> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().total_cmp(&other.key())
    }
}

fn gauss_kronrod<const N: usize, F>(f: &mut F, a: f64, b: f64) -> Panel<N>
where
    F: FnMut(f64) -> [f64; N],
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = [0.0; N];
    let mut gauss = [0.0; N];
    for i in 0..N {
        kronrod[i] = WGK[7] * fc[i];
        gauss[i] = WG[3] * fc[i];
    }
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        for i in 0..N {
            let s = f1[i] + f2[i];
            kronrod[i] += WGK[j] * s;
            if j % 2 == 1 {
                gauss[i] += WG[j / 2] * s;
            }
        }
    }
    let mut value = [0.0; N];
    let mut error = [0.0; N];
    for i in 0..N {
        value[i] = kronrod[i] * half;
        error[i] = ((kronrod[i] - gauss[i]) * half).abs();
    }
    Panel { a, b, value, error }
}

fn totals<const N: usize>(heap: &BinaryHeap<Panel<N>>) -> ([f64; N], [f64; N]) {
    let mut value = [0.0; N];
    let mut error = [0.0; N];
    for p in heap.iter() {
        for i in 0..N {
            value[i] += p.value[i];
            error[i] += p.error[i];
        }
    }
    (value, error)
}

/// Integrate `f` over `[a, b]`.
///
/// Convergence requires every component error to be at most
/// `max(abs_tol, rel_tol · max_i |I_i|)`. Fails with
/// [`Error::QuadratureNonConvergence`] carrying the achieved error when the
/// subdivision budget runs out.
pub fn integrate<const N: usize, F>(mut f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<Estimate<N>>
where
    F: FnMut(f64) -> [f64; N],
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::invalid("interval", format!("[{a}, {b}] must be finite")));
    }
    let panels = opts.initial_panels.max(1);
    let width = (b - a) / panels as f64;
    let mut heap = BinaryHeap::with_capacity(panels * 4);
    for p in 0..panels {
        let lo = a + width * p as f64;
        let hi = if p + 1 == panels { b } else { lo + width };
        heap.push(gauss_kronrod(&mut f, lo, hi));
    }
    let mut evaluations = 15 * panels;
    let min_width = (b - a).abs() * 1e-13;
    let mut subdivisions = 0;

    let (mut value, mut error) = totals(&heap);

    loop {
        let scale = value.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let tol = opts.abs_tol.max(opts.rel_tol * scale);
        let worst = error.iter().copied().fold(0.0, f64::max);
        if worst.is_nan() {
            return Err(Error::QuadratureNonConvergence { achieved: worst, requested: tol, subdivisions });
        }
        if worst <= tol {
            // Running totals can drift after many splits; confirm with a fresh sum.
            let (v, e) = totals(&heap);
            let scale = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
            let tol = opts.abs_tol.max(opts.rel_tol * scale);
            if e.iter().all(|x| *x <= tol) {
                return Ok(Estimate { value: v, error: e, evaluations });
            }
            value = v;
            error = e;
        }
        let top = heap.pop().expect("heap holds at least one panel");
        if subdivisions >= opts.max_subdivisions || (top.b - top.a).abs() < min_width {
            return Err(Error::QuadratureNonConvergence { achieved: worst, requested: tol, subdivisions });
        }
        let mid = 0.5 * (top.a + top.b);
        let left = gauss_kronrod(&mut f, top.a, mid);
        let right = gauss_kronrod(&mut f, mid, top.b);
        for i in 0..N {
            value[i] += left.value[i] + right.value[i] - top.value[i];
            error[i] += left.error[i] + right.error[i] - top.error[i];
        }
        error.iter_mut().for_each(|e| *e = e.max(0.0));
        heap.push(left);
        heap.push(right);
        evaluations += 30;
        subdivisions += 1;
    }
}

/// Scalar convenience wrapper around [`integrate`]; returns `(value, error)`.
pub fn integrate_scalar<F>(mut f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    let est = integrate(|x| [f(x)], a, b, opts)?;
    Ok((est.value[0], est.error[0]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomials_are_exact() {
        let (v, _) = integrate_scalar(|x| 3.0 * x * x - x + 2.0, -1.0, 2.0, &QuadOptions::default()).unwrap();
        assert!((v - 13.5).abs() < 1e-13);
    }

    #[test]
    fn oscillatory_bessel_integral() {
        // ∫_0^∞ J1(u)²/u du = 1/2; truncate where the tail is below 1e-4.
        let opts = QuadOptions { rel_tol: 1e-10, initial_panels: 400, ..Default::default() };
        let (v, _) = integrate_scalar(
            |u| {
                let j = if u < 1e-8 { 0.5 * u } else { libm::j1(u) };
                if u == 0.0 {
                    0.0
                } else {
                    j * j / u
                }
            },
            0.0,
            2000.0,
            &opts,
        )
        .unwrap();
        assert!((v - 0.5).abs() < 2e-4, "{v}");
    }

    #[test]
    fn vector_components_share_nodes() {
        let est = integrate(|x: f64| [x.sin(), x.cos()], 0.0, PI, &QuadOptions::default()).unwrap();
        assert!((est.value[0] - 2.0).abs() < 1e-12);
        assert!(est.value[1].abs() < 1e-12);
    }

    #[test]
    fn non_convergence_reports_achieved_error() {
        let opts = QuadOptions { rel_tol: 1e-14, max_subdivisions: 3, ..Default::default() };
        match integrate_scalar(|x| (1.0 / x).sin(), 1e-3, 1.0, &opts) {
            Err(Error::QuadratureNonConvergence { achieved, subdivisions, .. }) => {
                assert!(achieved > 0.0);
                assert_eq!(subdivisions, 3);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }
}
