//! Time-step convergence of an ion run: halving dt should shrink the error
//! fourfold.

use biasflip::dynamics::convergence_check;
use biasflip::experiments::{Experiment, Scenario, ScenarioPotential};
use biasflip::protocols::ProtocolKind;

fn main() -> biasflip::Result<()> {
    let e = Experiment::prepare(Scenario::ion_be9())?;
    for kind in [ProtocolKind::Polynomial, ProtocolKind::PolynomialCompensated] {
        let spec = e.protocol(kind, 0.1e-6)?;
        let provider = ScenarioPotential { experiment: &e, spec, compensated: kind.is_compensated() };
        let cfg = e.propagation_config(spec.t_final);
        let t = e.units.time_to_internal(spec.t_final);
        let rep = convergence_check(e.initial_state(), &provider, 1.0, t, &cfg)?;
        println!(
            "{:<12} dt = {:.3e}  |dt - dt/2| = {:.3e}  |dt/2 - dt/4| = {:.3e}  ratio {:.3}",
            kind.label(),
            rep.dt,
            rep.discrepancy_coarse,
            rep.discrepancy_fine,
            rep.ratio
        );
    }
    Ok(())
}
