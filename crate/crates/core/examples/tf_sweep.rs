//! Fidelity and excitation versus t_f for three protocols, as CSV on stdout.
//!
//! `BIASFLIP_THREADS` limits the worker count.

use biasflip::experiments::{log_spaced, sweep_tf, Experiment, Scenario};
use biasflip::export::sweep_csv;
use biasflip::protocols::ProtocolKind;

fn main() -> biasflip::Result<()> {
    let preset = std::env::args().nth(1).unwrap_or_else(|| "ion".into());
    let s = Scenario::preset(&preset)?;
    let e = Experiment::prepare(s)?;
    let t = e.period();
    let kinds = [ProtocolKind::PolynomialCompensated, ProtocolKind::Polynomial, ProtocolKind::Faquad];
    let grid = log_spaced(t / 10.0, 3.0 * t, 20);
    let cells = sweep_tf(&e, &kinds, &grid)?;
    print!("{}", sweep_csv(&cells)?);
    Ok(())
}
