use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn biasflip(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_biasflip"))
        .args(args)
        .env("BIASFLIP_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn analyze_presets() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = biasflip(&["analyze", "--preset", "ion-be9", "--out", out]);
    assert_eq!(code(&o), 0, "{o:?}");
    let v = read_json(&dir.path().join("analysis.json"));
    let omega = v["omega_ref_rad_per_s"].as_f64().unwrap();
    assert!((omega / (2.0 * std::f64::consts::PI * 5.6e6) - 1.0).abs() < 0.02);
    assert!((v["displacement_m"].as_f64().unwrap() / 9.2e-9 - 1.0).abs() < 0.02);

    let o = biasflip(&["analyze", "--preset", "atom-rb87", "--json"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)[stdout(&o).find('{').unwrap()..]).unwrap();
    assert!((v["analysis"]["distance"].as_f64().unwrap() / 5e-6 - 1.0).abs() < 0.02);
    assert!((v["analysis"]["bias"].as_f64().unwrap() / 2.02e-32 - 1.0).abs() < 0.03);
}

#[test]
fn symmetric_custom_config_has_no_bias() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sym.toml");
    std::fs::write(
        &cfg,
        "[scenario]\nkind = \"ion\"\nalpha_N_per_m = -4.7e-12\nbeta_N_per_m3 = 5.2e-3\ngamma0_N = 0.0\nmass_kg = 1.4965e-26\n",
    )
    .unwrap();
    let out = dir.path().join("o");
    let o = biasflip(&["analyze", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{o:?}");
    let v = read_json(&out.join("analysis.json"));
    let a = &v["analysis"];
    assert_eq!(a["bias"].as_f64().unwrap(), 0.0);
    let (lo, hi) = (a["x_minus"].as_f64().unwrap(), a["x_plus"].as_f64().unwrap());
    assert!((lo + hi).abs() < 1e-12 * hi.abs());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let lost = dir.path().join("lost.toml");
    std::fs::write(&lost, "[scenario]\npreset = \"ion\"\ngamma0_N = 1e-15\n").unwrap();
    assert_eq!(code(&biasflip(&["analyze", "--config", lost.to_str().unwrap()])), 2);
    assert_eq!(code(&biasflip(&["design", "--config", lost.to_str().unwrap()])), 2);

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[scenario]\nkind = \"ion\"\nalpha = 1\n").unwrap();
    assert_eq!(code(&biasflip(&["analyze", "--config", bad.to_str().unwrap()])), 3);
    let bad_json = dir.path().join("bad.json");
    std::fs::write(&bad_json, "{\"scenario\": {\"preset\": 7}}").unwrap();
    assert_eq!(code(&biasflip(&["simulate", "--config", bad_json.to_str().unwrap()])), 3);

    assert_eq!(code(&biasflip(&["simulate", "--protocol", "compensated", "--tf", "0"])), 1);
    assert_eq!(code(&biasflip(&["simulate", "--well", "up"])), 1);
    assert_eq!(code(&biasflip(&["teleport"])), 1);
}

#[test]
fn sweep_with_no_surviving_cell_exits_four() {
    // a single step per run blows up the energy on every cell
    let o = biasflip(&["sweep", "--preset", "ion", "--protocol", "polynomial", "--tf", "1e-7,2e-7", "--dt", "1e-6"]);
    assert_eq!(code(&o), 4, "{}", stdout(&o));
}

#[test]
fn simulate_examples() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ion");
    let o = biasflip(&["simulate", "--preset", "ion-be9", "--protocol", "sudden", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let f = read_json(&out.join("metrics.json"))["metrics"]["fidelity"].as_f64().unwrap();
    assert!((f - 0.89).abs() <= 0.01, "{f}");

    let out = dir.path().join("atom");
    let o = biasflip(&[
        "simulate",
        "--preset",
        "atom-rb87",
        "--protocol",
        "compensated",
        "--tf",
        "63e-6",
        "--snapshots",
        "200",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let f = read_json(&out.join("metrics.json"))["metrics"]["fidelity"].as_f64().unwrap();
    assert!(f > 0.999, "{f}");
    let density = std::fs::read_to_string(out.join("density.csv")).unwrap();
    let mut rdr = csv::Reader::from_reader(density.as_bytes());
    let header = rdr.headers().unwrap().clone();
    assert_eq!(&header[0], "t_s");
    assert!(header[1].ends_with("_m"));
    let rows: Vec<_> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 11);
    assert_eq!(rows[0].len(), 1025);
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str| {
        let out = dir.path().join(name);
        let o = Command::new(env!("CARGO_BIN_EXE_biasflip"))
            .args(["sweep", "--preset", "ion", "--tf", "3e-8,1e-7,2e-7", "--out", out.to_str().unwrap()])
            .env("BIASFLIP_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(code(&o), 0);
        (
            std::fs::read(out.join("sweep.csv")).unwrap(),
            std::fs::read(out.join("sweep.json")).unwrap(),
        )
    };
    let a = run("a", "1");
    let b = run("b", "4");
    assert_eq!(a, b);
    let text = String::from_utf8(a.0).unwrap();
    assert!(text.starts_with("protocol,t_f_s,fidelity,excitation_energy_J,excitation_energy_hbar_omega,error\r\n"));
    assert_eq!(text.lines().count(), 10);
}

#[test]
fn single_point_sweep_equals_simulate() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    let swp = dir.path().join("swp");
    let base = ["--preset", "ion", "--protocol", "faquad", "--tf", "1.5e-7"];
    let mut args = vec!["simulate"];
    args.extend(base);
    args.extend(["--out", sim.to_str().unwrap()]);
    assert_eq!(code(&biasflip(&args)), 0);
    let mut args = vec!["sweep"];
    args.extend(base);
    args.extend(["--out", swp.to_str().unwrap()]);
    assert_eq!(code(&biasflip(&args)), 0);
    let m_sim = read_json(&sim.join("metrics.json"))["metrics"].clone();
    let m_swp = read_json(&swp.join("sweep.json"))["cells"][0]["metrics"].clone();
    assert_eq!(m_sim, m_swp);
    assert_eq!(
        serde_json::to_string(&m_sim).unwrap(),
        serde_json::to_string(&m_swp).unwrap()
    );
}

#[test]
fn design_trajectories() {
    let dir = tempfile::tempdir().unwrap();
    let read = |name: &str| -> Vec<Vec<f64>> {
        let text = std::fs::read_to_string(dir.path().join(name)).unwrap();
        csv::Reader::from_reader(text.as_bytes())
            .records()
            .map(|r| r.unwrap().iter().map(|x| x.parse().unwrap()).collect())
            .collect()
    };
    let gamma0 = 86.4e-21;

    let o = biasflip(&["design", "--preset", "ion", "--tf", "7e-8", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{o:?}");
    // FAQUAD: a straight line from gamma0 to -gamma0
    for row in read("trajectory_faquad.csv") {
        let expected = gamma0 * (1.0 - 2.0 * row[0]);
        assert!((row[2] - expected).abs() < 1e-9 * gamma0);
    }
    // compensated at 0.07 us: gamma_eff swings through zero three times
    // with one interior minimum and one interior maximum
    let eff: Vec<f64> = read("trajectory_compensated.csv").iter().map(|r| r[3]).collect();
    let crossings = eff.windows(2).filter(|w| w[0].signum() != w[1].signum() && w[1] != 0.0).count();
    let extrema = eff
        .windows(3)
        .filter(|w| (w[1] - w[0]) * (w[2] - w[1]) < 0.0)
        .count();
    assert_eq!(crossings, 3, "{crossings}");
    assert_eq!(extrema, 2, "{extrema}");
    assert!(eff.iter().cloned().fold(0.0, f64::min) < -0.5 * gamma0);

    // long durations: gamma_eff coincides with gamma
    let o = biasflip(&["design", "--preset", "ion", "--protocol", "compensated", "--tf", "2e-5", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let dev = read("trajectory_compensated.csv")
        .iter()
        .map(|r| (r[3] - r[2]).abs())
        .fold(0.0, f64::max);
    assert!(dev < 1e-3 * gamma0, "{dev}");
}

#[test]
fn eig_labels_wells() {
    let dir = tempfile::tempdir().unwrap();
    let o = biasflip(&["eig", "--preset", "ion", "--well", "right", "--states", "3", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{o:?}");
    let text = std::fs::read_to_string(dir.path().join("eigenspectrum.csv")).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(rdr.headers().unwrap(), vec!["n", "energy_J", "side", "mass_fraction"]);
    let rows: Vec<_> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| &r[2] == "right"));

    let o = biasflip(&["eig", "--preset", "atom", "--lambda", "-2e-7", "--states", "4", "--json"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    let v: Value = serde_json::from_str(&s[s.find('{').unwrap()..]).unwrap();
    let sides: Vec<&str> = v["levels"].as_array().unwrap().iter().map(|l| l["side"].as_str().unwrap()).collect();
    assert!(sides.contains(&"left") && sides.contains(&"right"), "{sides:?}");
}

#[test]
fn config_echo_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("in.json");
    std::fs::write(
        &cfg,
        r#"{"scenario": {"preset": "atom-rb87", "well": "right"}, "protocol": {"kinds": ["faquad"], "t_final_s": 3e-3}}"#,
    )
    .unwrap();
    let out = dir.path().join("o");
    let o = biasflip(&["analyze", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{o:?}");
    let echo = std::fs::read_to_string(out.join("config.toml")).unwrap();
    let out2 = dir.path().join("o2");
    let o = biasflip(&["analyze", "--config", out.join("config.toml").to_str().unwrap(), "--out", out2.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let echo2 = std::fs::read_to_string(out2.join("config.toml")).unwrap();
    assert_eq!(echo.replace(out.to_str().unwrap(), ""), echo2.replace(out2.to_str().unwrap(), ""));
    assert!(echo.contains("t_final_s = 0.003"));
}
