//! Control ramps and compensated slopes for the ion, written as CSV.
//!
//! ```text
//! cargo run --release --example design_trajectories -- out/
//! ```

use std::path::PathBuf;

use biasflip::experiments::Scenario;
use biasflip::export::trajectory_csv;
use biasflip::protocols::{compensate, minima_trajectory, ProtocolKind};

fn main() -> biasflip::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "design-out".into()));
    std::fs::create_dir_all(&dir)?;
    let s = Scenario::ion_be9();

    let ramp = s.protocol(ProtocolKind::Faquad, 0.1e-6)?;
    let faquad = minima_trajectory(&ramp, &s.params, 0, s.well)?;
    std::fs::write(dir.join("faquad.csv"), trajectory_csv(&faquad, "N")?)?;

    for tf in [0.07e-6, 0.1e-6, 0.3e-6] {
        let spec = s.protocol(ProtocolKind::PolynomialCompensated, tf)?;
        let traj = compensate(&minima_trajectory(&spec, &s.params, 0, s.well)?, &s.params);
        let name = format!("compensated_{:.0}ns.csv", tf * 1e9);
        std::fs::write(dir.join(&name), trajectory_csv(&traj, "N")?)?;
        println!(
            "{name}: peak |gamma_eff| = {:.3e} N, peak |x0''| = {:.3e} m/s^2",
            traj.peak_lambda_eff(),
            traj.peak_acceleration()
        );
    }
    println!("wrote {}", dir.display());
    Ok(())
}
