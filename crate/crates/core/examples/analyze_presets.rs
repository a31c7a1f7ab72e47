//! Well analytics and validity margins for both presets.
//!
//! ```text
//! cargo run --release --example analyze_presets
//! ```

use std::f64::consts::PI;

use biasflip::experiments::{displacement_ratio, Scenario};
use biasflip::units::UnitScale;

fn main() -> biasflip::Result<()> {
    for s in [Scenario::ion_be9(), Scenario::atom_rb87()] {
        let a = s.analysis()?;
        let v = s.validity()?;
        let units = UnitScale::oscillator(s.params.mass(), a.omega_ref);
        let r = displacement_ratio(&s)?;
        println!("== {}", s.name.label());
        println!("  minima        {:.4e} m, {:.4e} m", a.x_minus, a.x_plus);
        println!("  D             {:.4e} m", a.distance);
        println!("  bias          {:.4e} J  ({:.1} hbar Omega_0)", a.bias, a.bias / units.energy_unit);
        println!("  Omega_0 / 2pi {:.4e} Hz", a.omega_ref / (2.0 * PI));
        println!("  a0            {:.4e} m", units.length_unit);
        println!("  d             {:.4e} m", r * units.length_unit);
        println!("  R             {r:.4}");
        println!("  freq. var.    {:.4e} Hz", v.frequency_variation / (2.0 * PI));
        println!("  D variation   {:.4e} m", v.distance_variation);
        println!("  status        {:?}", v.status);
    }
    Ok(())
}
