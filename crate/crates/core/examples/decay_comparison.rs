// Stejskal-Tanner style attenuation for a trapezoidal gradient pair:
// kinetic second order, the diffusive exponential and the collisionless form.

use spindecay::classical::free_streaming_attenuation;
use spindecay::cli::collision_integrals;
use spindecay::config::ModelChoice;
use spindecay::{derive, no_collision_attenuation, relaxation, torrey_attenuation, transverse_attenuation, GasConditions, GradientWaveform};

fn main() -> spindecay::Result<()> {
    let gas = GasConditions::helium3_room_temperature();
    let relax = relaxation(&derive(&gas)?, &collision_integrals(&gas, ModelChoice::HardSphere)?)?;
    let gamma = gas.gyromagnetic_ratio;
    println!("D = {:.3} mm^2/s", relax.diffusion * 1e6);

    println!("{:>10} {:>12} {:>12} {:>12} {:>12}", "G [T/m]", "b [s/m^2]", "2nd order", "exp(-bD)", "collisionless");
    for g in [0.0, 0.0025, 0.005, 0.01, 0.02] {
        let w = GradientWaveform::bipolar(g, 2e-3, 2e-4)?;
        let t = w.duration();
        let b = gamma * gamma * w.int_f2(t)?;
        let second = transverse_attenuation(&w, &relax, gamma, t, [0.0; 3])?;
        let torrey = torrey_attenuation(&w, relax.diffusion, gamma, t, [0.0; 3])?;
        let ballistic = no_collision_attenuation(&w, gas.temperature, gas.particle_mass, gamma, t)?;
        println!("{g:>10.3} {b:>12.4e} {:>12.6} {:>12.6} {:>12.6}", second.attenuation, torrey.magnitude, ballistic.magnitude);
        if let Some(msg) = second.validity_warning {
            println!("{:>10} {msg}", "");
        }
    }

    // In the middle of the pair F is large and the collisionless form has
    // long since vanished; the exact free-flight average halves its exponent.
    let w = GradientWaveform::bipolar(1e-6, 2e-3, 2e-4)?;
    let mid = 0.5 * w.duration();
    let stated = no_collision_attenuation(&w, gas.temperature, gas.particle_mass, gamma, mid)?;
    let exact = free_streaming_attenuation(&w, gas.temperature, gas.particle_mass, gamma, mid)?;
    println!("mid-pair collisionless exponent {:.4e}, free streaming {:.4e}", stated.exponent, exact.exponent);
    Ok(())
}
