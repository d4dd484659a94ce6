// Collision rate and diffusion constant versus temperature, for the full
// amplitude and the constant `πa²` cross section.

use spindecay::cli::collision_integrals;
use spindecay::config::ModelChoice;
use spindecay::constants::MM2_PER_S;
use spindecay::kinetic::geometric_alpha;
use spindecay::{derive, relaxation, GasConditions};

fn main() -> spindecay::Result<()> {
    let base = GasConditions::helium3_room_temperature();
    println!("{:>6} {:>12} {:>10} {:>12} {:>10} {:>12}", "T [K]", "alpha_hs", "D_hs", "alpha_geo", "D_geo", "closed form");
    for temperature in [100.0, 200.0, 293.0, 400.0, 600.0] {
        let gas = GasConditions { temperature, ..base };
        let derived = derive(&gas)?;
        let hs = relaxation(&derived, &collision_integrals(&gas, ModelChoice::HardSphere)?)?;
        let geo = relaxation(&derived, &collision_integrals(&gas, ModelChoice::Geometric)?)?;
        println!(
            "{temperature:>6.0} {:>12.4e} {:>10.3} {:>12.4e} {:>10.3} {:>12.4e}",
            hs.alpha,
            hs.diffusion / MM2_PER_S,
            geo.alpha,
            geo.diffusion / MM2_PER_S,
            geometric_alpha(&derived, gas.hard_core_radius),
        );
    }
    println!("(D in mm^2/s, alpha in 1/s; fixed pressure, so n falls as 1/T)");
    Ok(())
}
