// Derived thermal scales and validity flags for ³He, then a colder, denser
// gas where the dilute short-wavelength picture starts to break down.

use spindecay::constants::{ATMOSPHERE, MM2_PER_S};
use spindecay::validation::REFERENCE_F_PEAK;
use spindecay::{derive, diagnostics, GasConditions};

fn report(label: &str, gas: &GasConditions) -> spindecay::Result<()> {
    let d = derive(gas)?;
    println!("{label}");
    println!("  n            = {:.4e} m^-3", d.number_density);
    println!("  d = n^-1/3   = {:.4e} m", d.mean_spacing);
    println!("  p_bar        = {:.4e} kg m/s", d.mean_momentum);
    println!("  lambda_bar   = {:.4e} m", d.mean_wavelength);
    println!("  kT/M         = {:.4e} m^2/s^2 ({:.1} mm^2/s per ns)", d.thermal_energy / d.particle_mass, d.thermal_energy / d.particle_mass * 1e-9 / MM2_PER_S);
    for flag in diagnostics(gas, REFERENCE_F_PEAK)?.validity_flags {
        println!("  {:<24} {:>12.4e}  {}", flag.name, flag.value, if flag.pass { "ok" } else { "VIOLATED" });
    }
    Ok(())
}

fn main() -> spindecay::Result<()> {
    let he3 = GasConditions::helium3_room_temperature();
    report("3He, 293 K, 7 atm", &he3)?;

    let cold = GasConditions { temperature: 4.0, pressure: 10.0 * ATMOSPHERE, ..he3 };
    report("3He, 4 K, 10 atm", &cold)?;
    Ok(())
}
