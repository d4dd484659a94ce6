// Integrate the linear response `h⁽¹⁾` through a bipolar gradient pair and
// compare with the closed form. Exchange is then switched on.

use spindecay::cli::collision_integrals;
use spindecay::config::ModelChoice;
use spindecay::kinetic::{SigmaPlusConvention, SolveOptions};
use spindecay::{analytic_h1_plus, derive, relaxation, solve_h1, GasConditions, GradientWaveform, PolarizationState};

fn main() -> spindecay::Result<()> {
    let gas = GasConditions::helium3_room_temperature();
    let derived = derive(&gas)?;
    let integrals = collision_integrals(&gas, ModelChoice::HardSphere)?;
    let alpha = relaxation(&derived, &integrals)?.alpha;

    // A pulse pair a few collision times long, so the lag behind F is visible.
    let lobe = 8.0 / alpha;
    let w = GradientWaveform::bipolar(0.05, lobe, 0.25 * lobe)?;
    let state = PolarizationState::tipped(derived.number_density, 0.5, 60f64.to_radians(), SigmaPlusConvention::ZerothOrder)?;

    let options = SolveOptions::uniform(w.duration(), 13, gas.statistics_sign.value());
    let plain = solve_h1(&w, &derived, &integrals, &state, &options.clone().without_exchange())?;
    let with_x = solve_h1(&w, &derived, &integrals, &state, &options)?;

    let quasi = |t: f64| w.f(t).map(|f| f / (derived.particle_mass * alpha));
    println!("{:>8} {:>13} {:>13} {:>13} {:>13}", "alpha t", "Im h (ode)", "Im h (exact)", "F/(M alpha)", "Im h (exch)");
    for (i, &t) in plain.times.iter().enumerate() {
        let exact = analytic_h1_plus(&w, alpha, &derived, &state, t)?;
        println!(
            "{:>8.2} {:>13.5e} {:>13.5e} {:>13.5e} {:>13.5e}",
            alpha * t,
            plain.h1_plus[i].im,
            exact.im,
            quasi(t)?,
            with_x.h1_plus[i].im
        );
    }
    println!("sum-rule residual {:.2e}, steps {} accepted / {} rejected", with_x.sum_rule_residual(), with_x.accepted_steps, with_x.rejected_steps);
    Ok(())
}
