//! `biasflip` command line.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 lost double well or
//! violated parallel-motion regime, 3 bad config, 4 numerical failure.

use std::ffi::OsString;
use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::config::{OutputFormat, RunConfig};
use crate::error::{Error, Result};
use crate::experiments::{
    displacement_ratio, eigenspectrum, log_spaced, sweep_tf, EigenMode, Experiment, Scenario,
};
use crate::export::{self, CsvSink};
use crate::potentials::{validity_report, Validity, WellSide};
use crate::protocols::{self, check_compensated, compensate, minima_trajectory, ProtocolKind};
use crate::units::UnitScale;

#[derive(Debug, Parser)]
#[command(name = "biasflip", version, about = "Bias inversion of asymmetric double wells")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minima, frequencies, displacement ratio and validity margins.
    Analyze(Common),
    /// Control and minimum trajectories for each protocol.
    Design(DesignArgs),
    /// One protocol run with optional density snapshots.
    Simulate(SimulateArgs),
    /// Fidelity and excitation energy over a range of durations.
    Sweep(SweepArgs),
    /// Low-lying eigenstates at one control value.
    Eig(EigArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// ion-be9 or atom-rb87.
    #[arg(long)]
    pub preset: Option<String>,
    /// TOML, or JSON with a .json extension.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_parser = parse_well)]
    pub well: Option<WellSide>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Diagonalize the full potential for end-point states (default).
    #[arg(long, conflicts_with = "harmonic_eigenstates")]
    pub exact_eigenstates: bool,
    /// Use harmonic ground states at the exact minima.
    #[arg(long)]
    pub harmonic_eigenstates: bool,
    /// Also print the JSON report on stdout.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Args)]
pub struct DesignArgs {
    #[command(flatten)]
    pub common: Common,
    /// Comma-separated protocol kinds.
    #[arg(long, value_delimiter = ',')]
    pub protocol: Vec<ProtocolKind>,
    /// Duration in seconds; defaults to one trap period.
    #[arg(long)]
    pub tf: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub protocol: Option<ProtocolKind>,
    #[arg(long)]
    pub tf: Option<f64>,
    /// Density snapshot stride in time steps.
    #[arg(long)]
    pub snapshots: Option<usize>,
    /// Fixed time step in seconds.
    #[arg(long)]
    pub dt: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_delimiter = ',')]
    pub protocol: Vec<ProtocolKind>,
    /// Explicit comma-separated durations in seconds.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["tf_min", "tf_max"])]
    pub tf: Vec<f64>,
    #[arg(long, requires = "tf_max")]
    pub tf_min: Option<f64>,
    #[arg(long, requires = "tf_min")]
    pub tf_max: Option<f64>,
    #[arg(long)]
    pub tf_points: Option<usize>,
    #[arg(long)]
    pub dt: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct EigArgs {
    #[command(flatten)]
    pub common: Common,
    /// Control value in SI (N for ions, m for atoms); defaults to the initial one.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub states: Option<usize>,
}

fn parse_well(s: &str) -> std::result::Result<WellSide, String> {
    match s.to_ascii_lowercase().as_str() {
        "left" => Ok(WellSide::Left),
        "right" => Ok(WellSide::Right),
        _ => Err(format!("expected `left` or `right`, got `{s}`")),
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NotDoubleWell(_) | Error::ValidityViolation(_) => 2,
        Error::Config(_) => 3,
        Error::UnstableStep { .. }
        | Error::NormLoss { .. }
        | Error::EdgeLeakage { .. }
        | Error::NotConverged(_)
        | Error::ConvergenceFailure(_)
        | Error::GridTooCoarse { .. }
        | Error::GridTooSmall(_)
        | Error::Ambiguous { .. }
        | Error::NoWellState(_)
        | Error::ShiftTooLarge { .. } => 4,
        _ => 1,
    }
}

/// Parses `args` (program name first), runs, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Analyze(c) => cmd_analyze(&c),
        Command::Design(a) => cmd_design(&a),
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Sweep(a) => cmd_sweep(&a),
        Command::Eig(a) => cmd_eig(&a),
    }
}

/// Config file (if any) with command-line flags layered on top.
fn merged_config(c: &Common) -> Result<RunConfig> {
    let mut cfg = match &c.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(p) = &c.preset {
        cfg.scenario.preset = Some(p.clone());
        cfg.scenario.kind = None;
    }
    if cfg.scenario.preset.is_none() && cfg.scenario.kind.is_none() {
        cfg.scenario.preset = Some("ion-be9".into());
    }
    if let Some(w) = c.well {
        cfg.scenario.well = Some(w);
    }
    if c.exact_eigenstates {
        cfg.numerics.eigenstates = Some(EigenMode::Exact);
    }
    if c.harmonic_eigenstates {
        cfg.numerics.eigenstates = Some(EigenMode::Harmonic);
    }
    if let Some(o) = &c.out {
        cfg.output.dir = Some(o.to_string_lossy().into_owned());
    }
    Ok(cfg)
}

struct Output {
    dir: Option<PathBuf>,
    print_json: bool,
}

impl Output {
    fn new(cfg: &RunConfig, common: &Common) -> Result<Self> {
        let dir = cfg.output.dir.as_ref().map(PathBuf::from);
        if let Some(d) = &dir {
            std::fs::create_dir_all(d)?;
            std::fs::write(d.join("config.toml"), cfg.canonical()?)?;
        }
        Ok(Self {
            dir,
            print_json: common.json,
        })
    }

    fn path(&self, name: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(name))
    }

    fn write(&self, name: &str, contents: &str) -> Result<()> {
        if let Some(p) = self.path(name) {
            std::fs::write(p, contents)?;
        }
        Ok(())
    }

    fn report(&self, cfg: &RunConfig, name: &str, value: &Value) -> Result<()> {
        let text = export::to_sorted_json(value)?;
        if cfg.has_format(OutputFormat::Json) {
            self.write(name, &text)?;
        }
        if self.print_json {
            print!("{text}");
        }
        Ok(())
    }
}

fn json_of<T: serde::Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Io(e.to_string()))
}

fn scenario_json(s: &Scenario) -> Result<Value> {
    Ok(json!({
        "name": s.name.label(),
        "params": json_of(&s.params)?,
        "lambda0": s.lambda0,
        "control_unit": s.params.control_unit(),
        "well": s.well.name(),
        "eigenstates": json_of(&s.eigen_mode)?,
        "grid": json_of(&s.grid)?,
    }))
}

pub fn cmd_analyze(c: &Common) -> Result<i32> {
    let cfg = merged_config(c)?;
    let scenario = cfg.scenario()?;
    let (start, end) = cfg.endpoints(&scenario)?;
    let analysis = scenario.analysis()?;
    let validity = validity_report(&scenario.params, start.abs().max(end.abs()))?;
    let ratio = displacement_ratio(&scenario)?;
    let omega = analysis.omega_ref;
    let units = UnitScale::oscillator(scenario.params.mass(), omega);
    let out = Output::new(&cfg, c)?;

    let two_pi = 2.0 * std::f64::consts::PI;
    println!("scenario        {}", scenario.name.label());
    println!("x_minus         {:.6e} m", analysis.x_minus);
    println!("x_plus          {:.6e} m", analysis.x_plus);
    println!("distance D      {:.6e} m", analysis.distance);
    println!("bias delta      {:.6e} J", analysis.bias);
    println!("omega_minus/2pi {:.6e} Hz", analysis.omega_minus / two_pi);
    println!("omega_plus/2pi  {:.6e} Hz", analysis.omega_plus / two_pi);
    println!("Omega_0/2pi     {:.6e} Hz", omega / two_pi);
    println!("a0              {:.6e} m", units.length_unit);
    println!("displacement d  {:.6e} m", ratio * units.length_unit);
    println!("ratio R         {ratio:.6}");
    println!("parallel margin {:.3e}", validity.parallel_margin);
    println!("two-well margin {:.3e}", validity.two_minima_margin);
    println!("validity        {:?}", validity.status);

    let report = json!({
        "scenario": scenario_json(&scenario)?,
        "analysis": json_of(&analysis)?,
        "validity": json_of(&validity)?,
        "omega_ref_rad_per_s": omega,
        "period_s": two_pi / omega,
        "a0_m": units.length_unit,
        "displacement_m": ratio * units.length_unit,
        "ratio_r": ratio,
        "lambda_start": start,
        "lambda_end": end,
    });
    out.report(&cfg, "analysis.json", &report)?;
    Ok(0)
}

pub fn cmd_design(a: &DesignArgs) -> Result<i32> {
    let mut cfg = merged_config(&a.common)?;
    if !a.protocol.is_empty() {
        cfg.protocol.kinds = Some(a.protocol.clone());
    }
    if let Some(tf) = a.tf {
        cfg.protocol.t_final = Some(tf);
    }
    let scenario = cfg.scenario()?;
    let (start, end) = cfg.endpoints(&scenario)?;
    let params = &scenario.params;
    let validity = validity_report(params, start.abs().max(end.abs()))?;
    if validity.status == Validity::Fail {
        return Err(Error::ValidityViolation(format!(
            "parallel margin {:.3} over |lambda| <= {:e}",
            validity.parallel_margin,
            start.abs().max(end.abs())
        )));
    }
    let tf = match cfg.protocol.t_final {
        Some(t) => t,
        None => scenario.period()?,
    };
    let kinds = cfg.protocol.kinds.clone().unwrap_or_else(|| {
        vec![ProtocolKind::Polynomial, ProtocolKind::Faquad, ProtocolKind::PolynomialCompensated]
    });
    let out = Output::new(&cfg, &a.common)?;
    let unit = params.control_unit();
    let mut per_kind = serde_json::Map::new();
    let mut csv_names = Vec::new();
    for kind in &kinds {
        let spec = protocols::build(*kind, start, end, tf)?;
        let mut traj = minima_trajectory(&spec, params, 0, scenario.well)?;
        let mut check = Value::Null;
        if kind.is_compensated() {
            traj = compensate(&traj, params);
            // advisory: the run itself only needs the uncompensated range
            check = match check_compensated(&traj, params) {
                Ok(r) => json!({ "status": json_of(&r.status)?, "parallel_margin": r.parallel_margin }),
                Err(e) => json!({ "status": "fail", "message": e.to_string() }),
            };
        }
        let name = format!("trajectory_{}.csv", kind.label());
        if cfg.has_format(OutputFormat::Csv) {
            out.write(&name, &export::trajectory_csv(&traj, unit)?)?;
        }
        csv_names.push(name);
        println!(
            "{:<12} t_f {:.4e} s  peak |x0''| {:.4e} m/s^2  peak |lambda_eff| {:.4e} {unit}",
            kind.label(),
            spec.t_final,
            traj.peak_acceleration(),
            traj.peak_lambda_eff()
        );
        per_kind.insert(
            kind.label().to_string(),
            json!({
                "t_final_s": spec.t_final,
                "samples": traj.len(),
                "peak_acceleration_m_per_s2": traj.peak_acceleration(),
                "peak_lambda_eff": traj.peak_lambda_eff(),
                "compensation": json_of(&traj.compensation)?,
                "compensated_validity": check,
                "faquad_c": spec.faquad_c,
            }),
        );
    }
    if cfg.has_format(OutputFormat::Gnuplot) {
        out.write("design.gp", &design_gnuplot(&csv_names, unit))?;
    }
    let report = json!({
        "scenario": scenario_json(&scenario)?,
        "control_unit": unit,
        "lambda_start": start,
        "lambda_end": end,
        "validity": json_of(&validity)?,
        "protocols": Value::Object(per_kind),
    });
    out.report(&cfg, "design.json", &report)?;
    Ok(0)
}

fn design_gnuplot(files: &[String], unit: &str) -> String {
    let parts: Vec<String> = files
        .iter()
        .map(|f| format!("'{f}' using 1:4 with lines title '{f}'"))
        .collect();
    format!(
        "set datafile separator ','\nset key autotitle columnhead\nset xlabel 's = t / t_f'\nset ylabel 'lambda_eff ({unit})'\nplot {}\n",
        parts.join(", \\\n     ")
    )
}

fn prepare(cfg: &RunConfig) -> Result<Experiment> {
    let scenario = cfg.scenario()?;
    let (start, end) = cfg.endpoints(&scenario)?;
    let exp = Experiment::prepare_between(scenario, start, end)?;
    match cfg.numerics.dt {
        Some(dt) => exp.with_time_step(dt),
        None => Ok(exp),
    }
}

pub fn cmd_simulate(a: &SimulateArgs) -> Result<i32> {
    let mut cfg = merged_config(&a.common)?;
    if let Some(k) = a.protocol {
        cfg.protocol.kinds = Some(vec![k]);
    }
    if let Some(tf) = a.tf {
        cfg.protocol.t_final = Some(tf);
    }
    if let Some(s) = a.snapshots {
        cfg.numerics.snapshot_stride = Some(s);
    }
    if let Some(dt) = a.dt {
        cfg.numerics.dt = Some(dt);
    }
    let kind = match cfg.protocol.kinds.as_deref() {
        None | Some([]) => ProtocolKind::Polynomial,
        Some([k]) => *k,
        Some(_) => return Err(Error::InvalidParameter("simulate runs a single protocol".into())),
    };
    let exp = prepare(&cfg)?;
    let tf = match cfg.protocol.t_final {
        Some(t) => t,
        None => exp.period(),
    };
    let spec = exp.protocol(kind, tf)?;
    let out = Output::new(&cfg, &a.common)?;
    let stride = cfg.numerics.snapshot_stride.filter(|s| *s > 0);

    let mut sink = match (stride, out.path("density.csv")) {
        (Some(_), Some(p)) => {
            let header = export::density_header(&exp.positions_si());
            Some(CsvSink::new(BufWriter::new(File::create(p)?), &header)?)
        }
        _ => None,
    };
    let per_m = 1.0 / exp.units.length_unit;
    let mut rows = 0usize;
    let mut write_err: Option<Error> = None;
    let outcome = exp.run_protocol_observed(&spec, stride, &mut |t, psi| {
        if let Some(s) = sink.as_mut() {
            let d: Vec<f64> = psi.density().iter().map(|x| x * per_m).collect();
            let r = s.row(export::density_row(t, &d)).and_then(|_| s.flush());
            if let Err(e) = r {
                write_err.get_or_insert(e);
            }
        }
        rows += 1;
    });
    if let Some(mut s) = sink.take() {
        s.flush()?;
    }
    let outcome = outcome?;
    if let Some(e) = write_err {
        return Err(e);
    }
    let m = &outcome.metrics;
    println!("protocol        {}", m.protocol.label());
    println!("t_f             {:.6e} s", m.t_final);
    println!("fidelity        {:.10}", m.fidelity);
    println!("E_ex            {:.6e} J ({:.6e} hbar Omega_0)", m.excitation_energy, m.excitation_energy_hbar_omega);
    println!("sudden ref      {:.6}", m.sudden_fidelity_reference);
    let report = json!({
        "scenario": scenario_json(&exp.scenario)?,
        "metrics": json_of(m)?,
        "period_s": exp.period(),
        "steps": outcome.propagation.as_ref().map(|p| p.steps),
        "dt_s": outcome.propagation.as_ref().map(|p| p.dt * exp.units.time_unit),
        "snapshot_rows": rows,
    });
    out.report(&cfg, "metrics.json", &report)?;
    Ok(0)
}

pub fn cmd_sweep(a: &SweepArgs) -> Result<i32> {
    let mut cfg = merged_config(&a.common)?;
    if !a.protocol.is_empty() {
        cfg.protocol.kinds = Some(a.protocol.clone());
    }
    if !a.tf.is_empty() {
        cfg.protocol.tf_list = Some(a.tf.clone());
        cfg.protocol.tf_min = None;
        cfg.protocol.tf_max = None;
    }
    if let (Some(lo), Some(hi)) = (a.tf_min, a.tf_max) {
        cfg.protocol.tf_list = None;
        cfg.protocol.tf_min = Some(lo);
        cfg.protocol.tf_max = Some(hi);
    }
    if let Some(n) = a.tf_points {
        cfg.protocol.tf_points = Some(n);
    }
    if let Some(dt) = a.dt {
        cfg.numerics.dt = Some(dt);
    }
    let exp = prepare(&cfg)?;
    let kinds = cfg.protocol.kinds.clone().unwrap_or_else(|| {
        vec![ProtocolKind::PolynomialCompensated, ProtocolKind::Polynomial, ProtocolKind::Faquad]
    });
    let grid = match cfg.tf_grid()? {
        Some(g) => g,
        None => log_spaced(exp.period() / 20.0, 5.0 * exp.period(), 20),
    };
    let out = Output::new(&cfg, &a.common)?;
    let cells = sweep_tf(&exp, &kinds, &grid)?;
    let ok = cells.iter().filter(|c| c.is_ok()).count();
    if cfg.has_format(OutputFormat::Csv) {
        out.write("sweep.csv", &export::sweep_csv(&cells)?)?;
    }
    if cfg.has_format(OutputFormat::Gnuplot) {
        let labels: Vec<&str> = kinds.iter().map(|k| k.label()).collect();
        out.write("sweep.gp", &export::sweep_gnuplot("sweep.csv", &labels))?;
    }
    for c in &cells {
        match &c.metrics {
            Some(m) => println!(
                "{:<12} {:.4e} s  F {:.8}  E_ex {:.4e} hbar Omega_0",
                c.protocol.label(),
                c.t_final,
                m.fidelity,
                m.excitation_energy_hbar_omega
            ),
            None => println!(
                "{:<12} {:.4e} s  error: {}",
                c.protocol.label(),
                c.t_final,
                c.error.as_deref().unwrap_or("")
            ),
        }
    }
    let report = json!({
        "scenario": scenario_json(&exp.scenario)?,
        "period_s": exp.period(),
        "ratio_r": exp.ratio_r(),
        "sudden_fidelity": exp.sudden_fidelity(),
        "cells": json_of(&cells)?,
        "succeeded": ok,
        "failed": cells.len() - ok,
    });
    out.report(&cfg, "sweep.json", &report)?;
    if ok == 0 {
        eprintln!("error: every sweep cell failed");
        return Ok(4);
    }
    Ok(0)
}

pub fn cmd_eig(a: &EigArgs) -> Result<i32> {
    let mut cfg = merged_config(&a.common)?;
    if let Some(k) = a.states {
        cfg.numerics.states = Some(k);
    }
    let scenario = cfg.scenario()?;
    let lambda = a.lambda.unwrap_or(scenario.lambda0);
    let k = cfg.numerics.states.unwrap_or(6);
    let spec = eigenspectrum(&scenario, lambda, k)?;
    let out = Output::new(&cfg, &a.common)?;
    if cfg.has_format(OutputFormat::Csv) {
        out.write("eigenspectrum.csv", &export::eigenspectrum_csv(&spec)?)?;
    }
    let energies = spec.energies_si();
    let mut levels = Vec::new();
    for (i, e) in energies.iter().enumerate() {
        let (side, frac) = match &spec.labels[i] {
            Some(l) => (l.side.name(), l.mass_fraction),
            None => ("both", spec.left_fractions[i]),
        };
        println!(
            "{i:>3}  {e:.10e} J  {:>14.8} hbar Omega_0  {side:<5} {frac:.8}",
            spec.solution.energies[i]
        );
        levels.push(json!({
            "n": i,
            "energy_J": e,
            "energy_hbar_omega": spec.solution.energies[i],
            "side": side,
            "mass_fraction": frac,
            "residual": spec.solution.residuals[i],
        }));
    }
    let report = json!({
        "scenario": scenario_json(&scenario)?,
        "lambda": lambda,
        "center_m": spec.center,
        "hbar_omega_J": spec.units.energy_unit,
        "levels": levels,
    });
    out.report(&cfg, "eig.json", &report)?;
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_code_contract() {
        assert_eq!(exit_code(&Error::NotDoubleWell("x".into())), 2);
        assert_eq!(exit_code(&Error::ValidityViolation("x".into())), 2);
        assert_eq!(exit_code(&Error::Config("x".into())), 3);
        assert_eq!(exit_code(&Error::UnstableStep { time: 0.0 }), 4);
        assert_eq!(exit_code(&Error::NonPositiveDuration(0.0)), 1);
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run(["biasflip", "frobnicate"]), 1);
        assert_eq!(run(["biasflip", "analyze", "--well", "middle"]), 1);
        assert_eq!(run(["biasflip", "--help"]), 0);
    }

    #[test]
    fn flags_override_config() {
        let c = Common {
            preset: Some("atom".into()),
            well: Some(WellSide::Right),
            harmonic_eigenstates: true,
            ..Default::default()
        };
        let cfg = merged_config(&c).unwrap();
        let s = cfg.scenario().unwrap();
        assert!(s.is_atom());
        assert_eq!(s.well, WellSide::Right);
        assert_eq!(s.eigen_mode, EigenMode::Harmonic);
    }

    #[test]
    fn analyze_ion_writes_sorted_json() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().to_string_lossy().into_owned();
        assert_eq!(run(["biasflip", "analyze", "--preset", "ion-be9", "--out", &out]), 0);
        let text = std::fs::read_to_string(dir.path().join("analysis.json")).unwrap();
        let v: Value = serde_json::from_str(&text).unwrap();
        let r = v["ratio_r"].as_f64().unwrap();
        assert!((r - 0.65).abs() < 0.02, "{r}");
        assert!(text.find("\"a0_m\"").unwrap() < text.find("\"analysis\"").unwrap());
    }
}
