//! A custom ion trap described in TOML, run through the same pipeline as
//! the presets.

use biasflip::config::RunConfig;
use biasflip::experiments::Experiment;
use biasflip::protocols::ProtocolKind;

const CONFIG: &str = r#"
[scenario]
kind = "ion"
alpha_N_per_m = -6.0e-12
beta_N_per_m3 = 8.0e-3
gamma0_N = 5.0e-20
mass_kg = 1.4965e-26
well = "right"

[protocol]
t_final_s = 1.0e-7
"#;

fn main() -> biasflip::Result<()> {
    let cfg = RunConfig::from_toml_str(CONFIG)?;
    print!("{}", cfg.canonical()?);
    let s = cfg.scenario()?;
    let (start, end) = cfg.endpoints(&s)?;
    let e = Experiment::prepare_between(s, start, end)?;
    let tf = cfg.protocol.t_final.unwrap_or(e.period());
    for kind in ProtocolKind::ALL {
        let m = e.run_protocol(&e.protocol(kind, tf)?)?;
        println!("{:<12} F = {:.8}", kind.label(), m.fidelity);
    }
    Ok(())
}
