//! Density snapshots of the atom during compensated and plain inversions.
//!
//! ```text
//! cargo run --release --example density_evolution -- out/
//! ```

use std::path::PathBuf;

use biasflip::experiments::{Experiment, Scenario};
use biasflip::export::{density_header, density_row, CsvSink};
use biasflip::protocols::ProtocolKind;

fn main() -> biasflip::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "density-out".into()));
    std::fs::create_dir_all(&dir)?;
    let e = Experiment::prepare(Scenario::atom_rb87())?;
    let per_m = 1.0 / e.units.length_unit;
    for kind in [ProtocolKind::PolynomialCompensated, ProtocolKind::Polynomial] {
        let path = dir.join(format!("density_{}.csv", kind.label()));
        let mut sink = CsvSink::new(std::fs::File::create(&path)?, &density_header(&e.positions_si()))?;
        let spec = e.protocol(kind, 63e-6)?;
        let out = e.run_protocol_observed(&spec, Some(100), &mut |t, psi| {
            let d: Vec<f64> = psi.density().iter().map(|x| x * per_m).collect();
            sink.row(density_row(t, &d)).expect("row written");
        })?;
        sink.flush()?;
        println!("{}: F = {:.6}, {}", kind.label(), out.metrics.fidelity, path.display());
    }
    Ok(())
}
