// Hard-sphere transport and interference cross sections against `ka/ħ`,
// and the thermal averages that feed the collision rate.

use spindecay::scattering::{hard_sphere_i_pi, CollisionModel};
use spindecay::{thermal_integrals, GasConditions, GeometricCrossSection, HardSphereModel};

fn main() -> spindecay::Result<()> {
    println!("{:>8} {:>12} {:>12} {:>12}", "ka/hbar", "sigma_U/pa2", "sigma_T/pa2", "Im sI/pa2");
    for x in [2.0, 5.0, 8.0, 11.56, 12.5, 20.0, 40.0] {
        let r = HardSphereModel::reduced_cross_sections(x, 1e-9)?;
        println!("{x:>8.2} {:>12.5} {:>12.5} {:>12.5}", r.transport, r.total, r.interference.im);
    }

    let gas = GasConditions::helium3_room_temperature();
    let hs = HardSphereModel::for_gas(&gas)?;
    let geo = GeometricCrossSection::for_gas(&gas)?;
    let full = thermal_integrals(&hs, gas.temperature)?;
    let flat = thermal_integrals(&geo, gas.temperature)?;
    println!();
    println!("I_U    hard sphere {:.6e}   geometric {:.6e}   ratio {:.5}", full.i_u, flat.i_u, full.i_u / flat.i_u);
    println!("Im I_I hard sphere {:.6e}   (|I_I|/I_U = {:.3e})", full.im_i_i, full.im_i_i.abs() / full.i_u);
    // e^{-x0^2} suppression puts the exact I_pi far below the quadrature's
    // absolute floor at room temperature; the quadrature only bounds it.
    println!("I_pi   closed form {:.6e}   quadrature {:.1e} +- {:.1e}", hard_sphere_i_pi(&hs, gas.temperature), full.i_pi, full.i_pi_error);
    let cold = 0.5;
    let q = thermal_integrals(&hs, cold)?;
    println!("I_pi at {cold} K: closed form {:.6e}   quadrature {:.6e}", hard_sphere_i_pi(&hs, cold), q.i_pi);

    let k = hs.momentum_for(1.0);
    if let Some(w) = hs.validity_warning(k) {
        println!("at ka/hbar = 1: {w}");
    }
    println!("sigma_U at ka/hbar = 1: {:.4} pi a^2", hs.cross_sections(k)?.transport / (std::f64::consts::PI * hs.radius().powi(2)));
    Ok(())
}
