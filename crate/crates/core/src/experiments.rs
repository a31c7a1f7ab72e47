//! Scenario presets, protocol runs, t_f sweeps and hardware estimates.
//!
//! All propagation happens in oscillator units of the reference frequency
//! `Omega_0`; results are reported in SI.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{propagate_observed, PotentialProvider, PropagationConfig, PropagationResult};
use crate::error::{Error, Result};
use crate::grid::{expectation_energy, inner_product, Grid, Wavefunction};
use crate::potentials::{
    validity_report, AtomLatticeParams, IonQuarticParams, PotentialParams, Validity, ValidityReport,
    WellAnalysis, WellSide,
};
use crate::protocols::{self, ProtocolKind, ProtocolSpec};
use crate::spectral::{classify_state, classify_wells, harmonic_eigenstate, solve_stationary, EigenSolution, WellLabel};
use crate::units::{mass_be9_ion, mass_rb87, UnitScale, CONSTANTS, PLANCK};

/// Initial slope of the ion inversion, N.
pub const ION_GAMMA0: f64 = 86.4e-21;
/// Initial lattice displacement of the atom inversion, m.
pub const ATOM_DELTA_X0: f64 = 200e-9;
/// Dipole polarizability used for the optical compensation estimate, m^2 s.
pub const RB87_POLARIZABILITY: f64 = 1.3e-36;
/// Environment variable capping sweep parallelism.
pub const THREADS_ENV: &str = "BIASFLIP_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioName {
    IonBe9,
    AtomRb87,
    Custom,
}

impl ScenarioName {
    pub fn label(self) -> &'static str {
        match self {
            ScenarioName::IonBe9 => "ion-be9",
            ScenarioName::AtomRb87 => "atom-rb87",
            ScenarioName::Custom => "custom",
        }
    }
}

/// How target and initial states are built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EigenMode {
    /// Diagonalization of the full potential on the grid.
    #[default]
    Exact,
    /// Harmonic-oscillator ground state at the exact minimum and curvature.
    Harmonic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridMode {
    /// A single well on a window around its path.
    Windowed,
    /// Both central wells on one grid.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub mode: GridMode,
    /// Span in oscillator lengths `a_0`.
    pub span_a0: f64,
    pub n_points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Scenario {
    pub name: ScenarioName,
    /// Potential at the initial control `lambda0`.
    pub params: PotentialParams,
    pub lambda0: f64,
    pub grid: GridSpec,
    pub well: WellSide,
    pub eigen_mode: EigenMode,
}

impl Scenario {
    pub fn ion_be9() -> Self {
        Self {
            name: ScenarioName::IonBe9,
            params: PotentialParams::Ion(IonQuarticParams {
                alpha: -4.7e-12,
                beta: 5.2e-3,
                gamma: ION_GAMMA0,
                mass: mass_be9_ion(),
            }),
            lambda0: ION_GAMMA0,
            grid: GridSpec {
                mode: GridMode::Windowed,
                span_a0: 64.0,
                n_points: 512,
            },
            well: WellSide::Left,
            eigen_mode: EigenMode::Exact,
        }
    }

    pub fn atom_rb87() -> Self {
        Self {
            name: ScenarioName::AtomRb87,
            params: PotentialParams::Atom(AtomLatticeParams {
                omega: 2.0 * PI * 59.4,
                v0: PLANCK * 1.4e3,
                d_lattice: 5.18e-6,
                delta_x: ATOM_DELTA_X0,
                mass: mass_rb87(),
            }),
            lambda0: ATOM_DELTA_X0,
            grid: GridSpec {
                mode: GridMode::Full,
                span_a0: 64.0,
                n_points: 1024,
            },
            well: WellSide::Left,
            eigen_mode: EigenMode::Exact,
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "ion-be9" | "ion" => Ok(Self::ion_be9()),
            "atom-rb87" | "atom" => Ok(Self::atom_rb87()),
            other => Err(Error::InvalidParameter(format!("unknown preset `{other}`"))),
        }
    }

    pub fn custom(params: PotentialParams, well: WellSide) -> Self {
        let (mode, n_points) = match params {
            PotentialParams::Ion(_) => (GridMode::Windowed, 512),
            PotentialParams::Atom(_) => (GridMode::Full, 1024),
        };
        Self {
            name: ScenarioName::Custom,
            lambda0: params.control(),
            params,
            grid: GridSpec {
                mode,
                span_a0: 64.0,
                n_points,
            },
            well,
            eigen_mode: EigenMode::Exact,
        }
    }

    pub fn with_lambda0(mut self, lambda0: f64) -> Self {
        self.lambda0 = lambda0;
        self.params = self.params.with_control(lambda0);
        self
    }

    pub fn with_well(mut self, well: WellSide) -> Self {
        self.well = well;
        self
    }

    pub fn with_eigen_mode(mut self, mode: EigenMode) -> Self {
        self.eigen_mode = mode;
        self
    }

    pub fn is_atom(&self) -> bool {
        matches!(self.params, PotentialParams::Atom(_))
    }

    pub fn analysis(&self) -> Result<WellAnalysis> {
        self.params.analyze()
    }

    pub fn validity(&self) -> Result<ValidityReport> {
        validity_report(&self.params, self.lambda0)
    }

    /// Reference frequency `Omega_0`, rad/s.
    pub fn omega_ref(&self) -> Result<f64> {
        self.params.omega_ref()
    }

    pub fn period(&self) -> Result<f64> {
        Ok(2.0 * PI / self.omega_ref()?)
    }

    /// Inversion from `lambda0` to `-lambda0`.
    pub fn protocol(&self, kind: ProtocolKind, t_final: f64) -> Result<ProtocolSpec> {
        protocols::build(kind, self.lambda0, -self.lambda0, t_final)
    }
}

/// `R = d / a_0` for the chosen well's travel under the inversion.
pub fn displacement_ratio(scenario: &Scenario) -> Result<f64> {
    ratio_between(scenario, scenario.lambda0, -scenario.lambda0)
}

fn ratio_between(scenario: &Scenario, start: f64, end: f64) -> Result<f64> {
    let p = &scenario.params;
    let a = p.minimum_jet(start, scenario.well)?.x;
    let b = p.minimum_jet(end, scenario.well)?.x;
    let units = UnitScale::oscillator(p.mass(), scenario.omega_ref()?);
    Ok((b - a).abs() / units.length_unit)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunMetrics {
    pub protocol: ProtocolKind,
    pub t_final: f64,
    pub fidelity: f64,
    /// J.
    pub excitation_energy: f64,
    /// In units of `hbar Omega_0`.
    pub excitation_energy_hbar_omega: f64,
    pub sudden_fidelity_reference: f64,
    pub ratio_r: f64,
    pub well: WellSide,
    pub max_norm_drift: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub metrics: RunMetrics,
    pub propagation: Option<PropagationResult>,
}

#[derive(Debug, Clone, PartialEq)]
struct LocalState {
    state: Wavefunction,
    energy: f64,
}

/// A scenario with its grid, units and end-point eigenstates resolved.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub scenario: Scenario,
    pub units: UnitScale,
    pub grid: Grid,
    /// SI position of the grid origin.
    pub center: f64,
    pub lambda_start: f64,
    pub lambda_end: f64,
    initial: LocalState,
    target: LocalState,
    sudden: f64,
    ratio: f64,
    time_step: Option<f64>,
}

impl Experiment {
    /// Resolves the inversion `lambda0 -> -lambda0`.
    pub fn prepare(scenario: Scenario) -> Result<Self> {
        Self::prepare_between(scenario, scenario.lambda0, -scenario.lambda0)
    }

    pub fn prepare_between(scenario: Scenario, lambda_start: f64, lambda_end: f64) -> Result<Self> {
        scenario.params.validate()?;
        let lambda_max = lambda_start.abs().max(lambda_end.abs());
        let report = validity_report(&scenario.params, lambda_max)?;
        if report.status == Validity::Fail {
            return Err(Error::ValidityViolation(format!(
                "parallel margin {:.3}, frequency margin {:.3} at |lambda| = {:e}",
                report.parallel_margin, report.frequency_margin, lambda_max
            )));
        }
        let omega = scenario.omega_ref()?;
        let units = UnitScale::oscillator(scenario.params.mass(), omega);
        let p = &scenario.params;
        let center = match scenario.grid.mode {
            GridMode::Windowed => {
                0.5 * (p.minimum_jet(lambda_start, scenario.well)?.x + p.minimum_jet(lambda_end, scenario.well)?.x)
            }
            GridMode::Full => {
                let sym = p.with_control(0.0).analyze()?;
                0.5 * (sym.x_minus + sym.x_plus)
            }
        };
        let grid = Grid::centered(0.0, scenario.grid.span_a0, scenario.grid.n_points)?;
        let ratio = ratio_between(&scenario, lambda_start, lambda_end)?;
        let initial = local_ground(&scenario, &units, &grid, center, lambda_start)?;
        let target = local_ground(&scenario, &units, &grid, center, lambda_end)?;
        let sudden = inner_product(&target.state, &initial.state)?.norm();
        Ok(Self {
            scenario,
            units,
            grid,
            center,
            lambda_start,
            lambda_end,
            initial,
            target,
            sudden,
            ratio,
            time_step: None,
        })
    }

    /// Protocol of `kind` between this experiment's end points.
    pub fn protocol(&self, kind: ProtocolKind, t_final: f64) -> Result<ProtocolSpec> {
        protocols::build(kind, self.lambda_start, self.lambda_end, t_final)
    }

    pub fn omega_ref(&self) -> f64 {
        self.units.omega()
    }

    pub fn period(&self) -> f64 {
        2.0 * PI * self.units.time_unit
    }

    pub fn hbar_omega(&self) -> f64 {
        self.units.energy_unit
    }

    pub fn ratio_r(&self) -> f64 {
        self.ratio
    }

    pub fn sudden_fidelity(&self) -> f64 {
        self.sudden
    }

    pub fn initial_state(&self) -> &Wavefunction {
        &self.initial.state
    }

    pub fn target_state(&self) -> &Wavefunction {
        &self.target.state
    }

    /// SI positions of the grid points.
    pub fn positions_si(&self) -> Vec<f64> {
        self.grid
            .points()
            .iter()
            .map(|u| self.center + u * self.units.length_unit)
            .collect()
    }

    /// Potential in `hbar Omega_0` with control `lambda` and an extra linear
    /// term `-force (x - center)`.
    pub fn sample_potential(&self, lambda: f64, force: f64, out: &mut [f64]) {
        sample_potential(&self.scenario, &self.units, &self.grid, self.center, lambda, force, out)
    }

    fn local_ground(&self, lambda: f64) -> Result<LocalState> {
        local_ground(&self.scenario, &self.units, &self.grid, self.center, lambda)
    }

    /// `(1/2)|int x0'' e^{i t} dt|^2` in units of `hbar Omega_0`: the
    /// excitation of a rigid harmonic well following the same trajectory.
    pub fn forced_oscillator_excitation(&self, spec: &ProtocolSpec) -> Result<f64> {
        if spec.is_sudden() {
            return Err(Error::NonPositiveDuration(spec.t_final));
        }
        let n = 20_000;
        let tu = self.units.time_unit;
        let accel = self.units.length_unit / (tu * tu);
        let h = spec.t_final / n as f64;
        let mut amp = num_complex::Complex64::new(0.0, 0.0);
        for i in 0..=n {
            let t = i as f64 * h;
            let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            let a = spec.drive_at(t, &self.scenario.params, self.scenario.well)?.x0_ddot / accel;
            amp += num_complex::Complex64::from_polar(w * a, t / tu);
        }
        amp *= h / tu / 3.0;
        Ok(0.5 * amp.norm_sqr())
    }

    /// Fixes the propagation step to `dt` seconds instead of the default
    /// `min(T, t_f) / 2000`.
    pub fn with_time_step(mut self, dt: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidParameter(format!("time step must be positive, got {dt}")));
        }
        self.time_step = Some(dt);
        Ok(self)
    }

    pub fn propagation_config(&self, t_final: f64) -> PropagationConfig {
        let t = self.units.time_to_internal(t_final);
        match self.time_step {
            Some(dt) => PropagationConfig::new(self.units.time_to_internal(dt).min(t)),
            None => PropagationConfig::for_period(2.0 * PI, t),
        }
    }

    pub fn run_protocol(&self, spec: &ProtocolSpec) -> Result<RunMetrics> {
        Ok(self.run_protocol_detailed(spec, None)?.metrics)
    }

    /// Runs `spec` from the initial well state; `snapshots` sets the density
    /// snapshot stride in steps.
    pub fn run_protocol_detailed(&self, spec: &ProtocolSpec, snapshots: Option<usize>) -> Result<RunOutcome> {
        self.run_protocol_observed(spec, snapshots, &mut |_, _| {})
    }

    /// As [`Self::run_protocol_detailed`], streaming snapshots to `observer`
    /// with SI time.
    pub fn run_protocol_observed(
        &self,
        spec: &ProtocolSpec,
        snapshots: Option<usize>,
        observer: &mut dyn FnMut(f64, &Wavefunction),
    ) -> Result<RunOutcome> {
        let (start, target) = if spec.lambda_start == self.lambda_start && spec.lambda_end == self.lambda_end {
            (self.initial.clone(), self.target.clone())
        } else {
            (self.local_ground(spec.lambda_start)?, self.local_ground(spec.lambda_end)?)
        };
        let (final_state, propagation) = if spec.is_sudden() {
            (start.state.clone(), None)
        } else {
            let provider = ScenarioPotential {
                experiment: self,
                spec: *spec,
                compensated: spec.kind.is_compensated(),
            };
            let t_int = self.units.time_to_internal(spec.t_final);
            let mut cfg = self.propagation_config(spec.t_final);
            cfg.record_every = 100;
            if let Some(s) = snapshots {
                cfg = cfg.with_snapshots(s);
            }
            let tu = self.units.time_unit;
            let result = propagate_observed(&start.state, &provider, 1.0, t_int, &cfg, &mut |t, psi| {
                observer(t * tu, psi)
            })?;
            (result.final_state.clone(), Some(result))
        };
        let fidelity = inner_product(&target.state, &final_state)?.norm();
        let mut v_end = vec![0.0; self.grid.len()];
        self.sample_potential(spec.lambda_end, 0.0, &mut v_end);
        let e_ex = expectation_energy(&final_state, &v_end, 1.0)? - target.energy;
        let metrics = RunMetrics {
            protocol: spec.kind,
            t_final: spec.t_final,
            fidelity,
            excitation_energy: e_ex * self.units.energy_unit,
            excitation_energy_hbar_omega: e_ex,
            sudden_fidelity_reference: self.sudden,
            ratio_r: self.ratio,
            well: self.scenario.well,
            max_norm_drift: propagation.as_ref().map_or(0.0, |p| p.max_norm_drift()),
        };
        Ok(RunOutcome { metrics, propagation })
    }
}

fn sample_potential(
    scenario: &Scenario,
    units: &UnitScale,
    grid: &Grid,
    center: f64,
    lambda: f64,
    force: f64,
    out: &mut [f64],
) {
    let a0 = units.length_unit;
    let e = units.energy_unit;
    match (&scenario.params, scenario.grid.mode) {
        (PotentialParams::Ion(p), GridMode::Windowed) => {
            let q = p.with_gamma(lambda - force);
            for (i, v) in out.iter_mut().enumerate() {
                *v = q.relative_value(center, grid.x(i) * a0) / e;
            }
        }
        (params, _) => {
            let q = params.with_control(lambda);
            for (i, v) in out.iter_mut().enumerate() {
                let u = grid.x(i) * a0;
                *v = (q.value(center + u) - force * u) / e;
            }
        }
    }
}

/// Lowest state of the scenario's well at control `lambda`.
fn local_ground(scenario: &Scenario, units: &UnitScale, grid: &Grid, center: f64, lambda: f64) -> Result<LocalState> {
    let mut v = vec![0.0; grid.len()];
    sample_potential(scenario, units, grid, center, lambda, 0.0, &mut v);
    let params = scenario.params.with_control(lambda);
    let state = match scenario.eigen_mode {
        EigenMode::Exact => {
            let k = match scenario.grid.mode {
                GridMode::Windowed => 2,
                GridMode::Full => 4,
            };
            let sol = solve_stationary(&v, grid, 1.0, k)?;
            let barrier = (params.analyze()?.barrier_x - center) / units.length_unit;
            let labels = classify_wells(&sol, barrier)?;
            let idx = labels.lowest(scenario.well)?.index_in_spectrum;
            return Ok(LocalState {
                energy: sol.energies[idx],
                state: sol.states[idx].clone(),
            });
        }
        EigenMode::Harmonic => {
            let x0 = params.minimum_jet(lambda, scenario.well)?.x;
            let omega = (params.curvature(x0) / params.mass()).sqrt() * units.time_unit;
            let c = (x0 - center) / units.length_unit;
            harmonic_eigenstate(0, omega, c, 1.0, grid)?
        }
    };
    let energy = expectation_energy(&state, &v, 1.0)?;
    Ok(LocalState { state, energy })
}

/// The scenario potential along a protocol, in oscillator units.
pub struct ScenarioPotential<'a> {
    pub experiment: &'a Experiment,
    pub spec: ProtocolSpec,
    pub compensated: bool,
}

impl PotentialProvider for ScenarioPotential<'_> {
    fn fill(&self, t: f64, grid: &Grid, out: &mut [f64]) -> Result<()> {
        let exp = self.experiment;
        if !grid.same_as(&exp.grid) {
            return Err(Error::GridMismatch);
        }
        let t_si = exp.units.time_to_si(t);
        let lambda = self.spec.lambda(t_si);
        let force = if self.compensated {
            let drive = self.spec.drive_at(t_si, &exp.scenario.params, exp.scenario.well)?;
            exp.scenario.params.mass() * drive.x0_ddot
        } else {
            0.0
        };
        exp.sample_potential(lambda, force, out);
        Ok(())
    }
}

/// Overlap of the initial well state with the target, no propagation.
pub fn sudden_fidelity(scenario: &Scenario) -> Result<f64> {
    Ok(Experiment::prepare(*scenario)?.sudden_fidelity())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepCell {
    pub protocol: ProtocolKind,
    pub t_final: f64,
    pub metrics: Option<RunMetrics>,
    pub error: Option<String>,
}

impl SweepCell {
    pub fn is_ok(&self) -> bool {
        self.metrics.is_some()
    }
}

/// Worker count from `BIASFLIP_THREADS`, if set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|n| *n > 0)
}

/// Every `(kind, t_f)` cell, ordered by kind then `t_f`. Failures are kept
/// as per-cell error strings.
pub fn sweep_tf(experiment: &Experiment, kinds: &[ProtocolKind], tf_grid: &[f64]) -> Result<Vec<SweepCell>> {
    if tf_grid.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::NonPositiveDuration(
            tf_grid.iter().cloned().find(|t| !(*t > 0.0)).unwrap_or(0.0),
        ));
    }
    if tf_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("t_f grid must be strictly ascending".into()));
    }
    let jobs: Vec<(ProtocolKind, f64)> = kinds
        .iter()
        .flat_map(|k| tf_grid.iter().map(move |t| (*k, *t)))
        .collect();
    let run = |&(kind, tf): &(ProtocolKind, f64)| {
        let outcome = experiment
            .protocol(kind, tf)
            .and_then(|spec| experiment.run_protocol(&spec));
        match outcome {
            Ok(m) => SweepCell {
                protocol: kind,
                t_final: tf,
                metrics: Some(m),
                error: None,
            },
            Err(e) => SweepCell {
                protocol: kind,
                t_final: tf,
                metrics: None,
                error: Some(e.to_string()),
            },
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap() {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    Ok(pool.install(|| jobs.par_iter().map(run).collect()))
}

/// `n` log-spaced durations in `[lo, hi]`.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HardwareEstimate {
    pub t_final: f64,
    /// Travel of the compensated well, m.
    pub travel: f64,
    /// Mean-value lower bound `2 d / t_f^2`, m/s^2.
    pub a_max_bound: f64,
    /// Peak `|x0''|` of the quintic trajectory, m/s^2.
    pub a_max: f64,
    /// Magnetic gradient `m a_max / mu_B`, T/m.
    pub gradient_g: f64,
    pub gradient_g_bound: f64,
    pub polarizability: f64,
    /// `m a_max / alpha_p`, W/m^3.
    pub dipole_power_over_waist_cubed: f64,
    /// Waist giving the required intensity gradient with 1 W, m.
    pub waist_for_one_watt: f64,
}

/// Low-lying levels of a scenario at one control value.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub lambda: f64,
    /// SI position of the grid origin; energies are measured from `V` there.
    pub center: f64,
    pub units: UnitScale,
    /// Energies in `hbar Omega_0`.
    pub solution: EigenSolution,
    /// `None` for a state spread over both wells.
    pub labels: Vec<Option<WellLabel>>,
    /// Probability on the left of the barrier, per state.
    pub left_fractions: Vec<f64>,
}

impl Spectrum {
    pub fn energies_si(&self) -> Vec<f64> {
        self.solution.energies.iter().map(|e| e * self.units.energy_unit).collect()
    }

    pub fn positions_si(&self) -> Vec<f64> {
        self.solution
            .grid
            .points()
            .iter()
            .map(|u| self.center + u * self.units.length_unit)
            .collect()
    }
}

/// The `k` lowest levels at control `lambda` on the scenario's grid. A
/// windowed grid follows the scenario's well.
pub fn eigenspectrum(scenario: &Scenario, lambda: f64, k: usize) -> Result<Spectrum> {
    let params = scenario.params.with_control(lambda);
    params.validate()?;
    let analysis = params.analyze()?;
    let units = UnitScale::oscillator(params.mass(), scenario.omega_ref()?);
    let center = match scenario.grid.mode {
        GridMode::Windowed => params.minimum_jet(lambda, scenario.well)?.x,
        GridMode::Full => {
            let sym = params.with_control(0.0).analyze()?;
            0.5 * (sym.x_minus + sym.x_plus)
        }
    };
    let grid = Grid::centered(0.0, scenario.grid.span_a0, scenario.grid.n_points)?;
    let mut v = vec![0.0; grid.len()];
    sample_potential(scenario, &units, &grid, center, lambda, 0.0, &mut v);
    if scenario.grid.mode == GridMode::Full || !matches!(params, PotentialParams::Ion(_)) {
        let origin = params.value(center) / units.energy_unit;
        v.iter_mut().for_each(|x| *x -= origin);
    }
    let solution = solve_stationary(&v, &grid, 1.0, k)?;
    let barrier = (analysis.barrier_x - center) / units.length_unit;
    let labels = solution
        .states
        .iter()
        .enumerate()
        .map(|(i, psi)| match classify_state(psi, barrier, i) {
            Ok(l) => Ok(Some(l)),
            Err(Error::Ambiguous { .. }) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<_>>>()?;
    let left_fractions = solution
        .states
        .iter()
        .map(|psi| psi.probability_below(barrier) / psi.norm_squared())
        .collect();
    Ok(Spectrum {
        lambda,
        center,
        units,
        solution,
        labels,
        left_fractions,
    })
}

/// Requirements for producing the compensating force on a neutral atom.
pub fn hardware_feasibility(scenario: &Scenario, t_final: f64) -> Result<HardwareEstimate> {
    if !scenario.is_atom() {
        return Err(Error::WrongScenario { expected: "atom" });
    }
    let spec = scenario.protocol(ProtocolKind::PolynomialCompensated, t_final)?;
    let traj = protocols::minima_trajectory(&spec, &scenario.params, 20_000, scenario.well)?;
    let travel = (traj.x0.last().copied().unwrap_or(0.0) - traj.x0[0]).abs();
    let mass = scenario.params.mass();
    let a_max_bound = 2.0 * travel / (t_final * t_final);
    let a_max = traj.peak_acceleration().max(a_max_bound);
    let power = mass * a_max / RB87_POLARIZABILITY;
    Ok(HardwareEstimate {
        t_final,
        travel,
        a_max_bound,
        a_max,
        gradient_g: mass * a_max / CONSTANTS.bohr_magneton,
        gradient_g_bound: mass * a_max_bound / CONSTANTS.bohr_magneton,
        polarizability: RB87_POLARIZABILITY,
        dipole_power_over_waist_cubed: power,
        waist_for_one_watt: (1.0 / power).cbrt(),
    })
}
