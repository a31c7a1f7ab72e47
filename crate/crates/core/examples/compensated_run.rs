//! A single compensated inversion per preset, with and without the force.

use biasflip::experiments::{Experiment, Scenario};
use biasflip::protocols::ProtocolKind;

fn main() -> biasflip::Result<()> {
    for (s, tf) in [(Scenario::ion_be9(), 0.05e-6), (Scenario::atom_rb87(), 63e-6)] {
        let e = Experiment::prepare(s)?;
        for kind in [ProtocolKind::Polynomial, ProtocolKind::PolynomialCompensated] {
            let m = e.run_protocol(&e.protocol(kind, tf)?)?;
            println!(
                "{:<10} {:<12} t_f = {tf:.2e} s  F = {:.8}  E_ex = {:.3e} hbar Omega_0",
                s.name.label(),
                kind.label(),
                m.fidelity,
                m.excitation_energy_hbar_omega
            );
        }
    }
    Ok(())
}
