// Build a gradient waveform from breakpoints and inspect its moments.

use spindecay::GradientWaveform;

fn main() -> spindecay::Result<()> {
    // Trapezoid up, flat gap, trapezoid down: a refocused pair with F(T) = 0.
    let w = GradientWaveform::new(
        vec![(0.0, 0.0), (1e-4, 0.03), (9e-4, 0.03), (1e-3, 0.0), (2e-3, 0.0), (2.1e-3, -0.03), (2.9e-3, -0.03), (3e-3, 0.0)],
        [0.0, 0.0, 1.0],
        0.0,
    )?;

    println!("{:>10} {:>10} {:>12} {:>12} {:>12}", "t [ms]", "G [T/m]", "F [T s/m]", "int F", "int F^2");
    for i in 0..=12 {
        let t = w.duration() * i as f64 / 12.0;
        let m = w.moments(t)?;
        println!("{:>10.3} {:>10.4} {:>12.4e} {:>12.4e} {:>12.4e}", t * 1e3, w.gradient(t)?, m.f, m.int_f, m.int_f2);
    }
    println!("peak |F| = {:.4e} T s/m", w.peak_f());

    let alpha = 1e4;
    println!("e^-at conv at the end, alpha = {alpha:e}: {:.4e}", w.exp_convolution(alpha, w.duration())?);
    Ok(())
}
