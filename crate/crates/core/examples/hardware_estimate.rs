//! Force and optical power needed to compensate the atom inversion.

use biasflip::experiments::{hardware_feasibility, Scenario};

fn main() -> biasflip::Result<()> {
    let s = Scenario::atom_rb87();
    for tf in [20e-6, 63e-6, 200e-6] {
        let h = hardware_feasibility(&s, tf)?;
        println!("t_f = {tf:.1e} s");
        println!("  travel            {:.3e} m", h.travel);
        println!("  a_max (exact)     {:.3e} m/s^2, bound {:.3e}", h.a_max, h.a_max_bound);
        println!("  magnetic gradient {:.3e} T/m (bound {:.3e})", h.gradient_g, h.gradient_g_bound);
        println!("  P / w^3           {:.3e} W/m^3", h.dipole_power_over_waist_cubed);
        println!("  waist at 1 W      {:.3e} m", h.waist_for_one_watt);
    }
    Ok(())
}
