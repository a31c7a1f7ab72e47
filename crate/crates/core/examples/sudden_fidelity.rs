//! Instant bias flip against the Gaussian-overlap estimate.

use biasflip::experiments::{Experiment, Scenario};

fn main() -> biasflip::Result<()> {
    for s in [Scenario::ion_be9(), Scenario::atom_rb87()] {
        let e = Experiment::prepare(s)?;
        let r = e.ratio_r();
        println!(
            "{:<10} R = {r:.4}  sudden F = {:.5}  exp(-R^2/4) = {:.5}",
            s.name.label(),
            e.sudden_fidelity(),
            (-r * r / 4.0).exp()
        );
    }
    Ok(())
}
