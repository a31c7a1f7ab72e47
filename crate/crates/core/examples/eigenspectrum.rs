//! Lowest levels of the atom double well across the inversion.

use biasflip::experiments::{eigenspectrum, Scenario};

fn main() -> biasflip::Result<()> {
    let s = Scenario::atom_rb87();
    for lambda in [s.lambda0, 0.0, -s.lambda0] {
        let sp = eigenspectrum(&s, lambda, 6)?;
        println!("delta_x = {lambda:+.2e} m");
        for (i, e) in sp.solution.energies.iter().enumerate() {
            let side = sp.labels[i].map_or("both", |l| l.side.name());
            println!("  {i}  {e:>12.6} hbar Omega_0  {side:<5}  left fraction {:.6}", sp.left_fractions[i]);
        }
    }
    Ok(())
}
