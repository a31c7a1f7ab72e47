//! Linear ramp fidelity around one and two trap periods.
//!
//! Excitation vanishes when t_f is a whole number of periods.

use biasflip::experiments::{Experiment, Scenario};
use biasflip::protocols::ProtocolKind;

fn main() -> biasflip::Result<()> {
    let e = Experiment::prepare(Scenario::ion_be9())?;
    let t = e.period();
    println!("T = {t:.4e} s");
    for i in 0..=24 {
        let x = 0.8 + 1.4 * i as f64 / 24.0;
        let m = e.run_protocol(&e.protocol(ProtocolKind::Faquad, x * t)?)?;
        println!("{x:6.3} T  F = {:.8}  E_ex = {:.3e}", m.fidelity, m.excitation_energy_hbar_omega);
    }
    Ok(())
}
