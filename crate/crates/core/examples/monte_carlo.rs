// Random-walk estimate of the attenuation against the diffusive exponential
// as the collision rate grows, plus the velocity autocorrelation.

use spindecay::constants::BOLTZMANN;
use spindecay::{simulate, torrey_attenuation, velocity_autocorrelation, GasConditions, GradientWaveform, MCConfig};

fn main() -> spindecay::Result<()> {
    let gas = GasConditions::helium3_room_temperature();
    let (temp, mass, gamma) = (gas.temperature, gas.particle_mass, gas.gyromagnetic_ratio);
    let v2 = BOLTZMANN * temp / mass;
    let duration: f64 = 1e-3;

    println!("{:>10} {:>10} {:>12} {:>12} {:>10}", "alpha", "alpha T", "|<e^iphi>|", "torrey", "SE");
    for alpha in [0.0, 1e4, 1e5, 4e5] {
        // Gradient scaled so the diffusive exponent stays at 0.5 where it applies.
        let d = if alpha > 0.0 { v2 / alpha } else { v2 / 1e5 };
        let g = (3.0 * 0.5 / (gamma * gamma * d * duration.powi(3))).sqrt();
        let w = GradientWaveform::constant(g, duration)?;
        let r = simulate(&MCConfig::new(w.clone(), temp, mass, gamma, alpha, 20_000, 7))?;
        let torrey = torrey_attenuation(&w, d, gamma, duration, [0.0; 3])?.magnitude;
        println!("{alpha:>10.0e} {:>10.0} {:>12.5} {:>12.5} {:>10.1e}", alpha * duration, r.mean_attenuation.norm(), torrey, r.std_error);
    }

    let alpha = 1e5;
    let cfg = MCConfig::new(GradientWaveform::zero_for(10.0 / alpha)?, temp, mass, gamma, alpha, 20_000, 3);
    println!();
    for p in velocity_autocorrelation(&cfg, &[0.0, 0.5 / alpha, 1.0 / alpha, 2.0 / alpha])? {
        println!("<v(0)v({:.1}/alpha)> / (kT/M) = {:.4}  (exp: {:.4})", p.lag * alpha, p.correlation / v2, (-p.lag * alpha).exp());
    }
    Ok(())
}
