//! Uncompensated ion excitation against the forced harmonic oscillator.

use biasflip::experiments::{Experiment, Scenario};
use biasflip::protocols::ProtocolKind;

fn main() -> biasflip::Result<()> {
    let e = Experiment::prepare(Scenario::ion_be9())?;
    let t = e.period();
    println!("{:>6}  {:>12}  {:>12}", "t_f/T", "TDSE", "oracle");
    for k in [0.5, 1.0, 1.25, 1.5, 2.0, 2.5, 3.0] {
        let spec = e.protocol(ProtocolKind::Polynomial, k * t)?;
        let m = e.run_protocol(&spec)?;
        let o = e.forced_oscillator_excitation(&spec)?;
        println!("{k:>6.2}  {:>12.4e}  {o:>12.4e}", m.excitation_energy_hbar_omega);
    }
    Ok(())
}
