//! Split-operator propagation of the time-dependent Schrodinger equation,
//! in units with `hbar = 1`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{energy_with, FourierPair, Grid, Wavefunction};

/// Number of grid points at each edge watched for leakage.
const EDGE_POINTS: usize = 5;
/// Largest tolerated density mass in the edge strips.
pub const EDGE_TOL: f64 = 1e-12;
/// Largest tolerated norm drift without an absorber.
pub const NORM_TOL: f64 = 1e-6;

/// Samples `V(x_i; t)` on a grid. Any compensating linear term is part of
/// the provider.
pub trait PotentialProvider {
    fn fill(&self, t: f64, grid: &Grid, out: &mut [f64]) -> Result<()>;
}

impl<P: PotentialProvider + ?Sized> PotentialProvider for &P {
    fn fill(&self, t: f64, grid: &Grid, out: &mut [f64]) -> Result<()> {
        (**self).fill(t, grid, out)
    }
}

/// A time-independent potential given by its samples.
#[derive(Debug, Clone, PartialEq)]
pub struct StaticPotential(pub Vec<f64>);

impl PotentialProvider for StaticPotential {
    fn fill(&self, _t: f64, grid: &Grid, out: &mut [f64]) -> Result<()> {
        if self.0.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        out.copy_from_slice(&self.0);
        Ok(())
    }
}

/// `V(x, t)` from a closure taking `(x, t)`.
pub struct FnPotential<F>(pub F);

impl<F: Fn(f64, f64) -> f64> PotentialProvider for FnPotential<F> {
    fn fill(&self, t: f64, grid: &Grid, out: &mut [f64]) -> Result<()> {
        for (i, v) in out.iter_mut().enumerate() {
            *v = (self.0)(grid.x(i), t);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Absorber {
    None,
    /// Multiplicative `1 - s sin^2` mask over the outer tenth of each side.
    Mask(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PropagationConfig {
    pub dt: f64,
    /// Steps between norm and energy records.
    pub record_every: usize,
    /// Steps between density snapshots; `None` keeps no snapshots.
    pub store_every: Option<usize>,
    pub absorber: Absorber,
    pub check_edges: bool,
}

impl PropagationConfig {
    pub fn new(dt: f64) -> Self {
        Self {
            dt,
            record_every: 10,
            store_every: None,
            absorber: Absorber::None,
            check_edges: true,
        }
    }

    /// `min(T, t_final) / 2000` for oscillation period `T`.
    pub fn for_period(period: f64, t_final: f64) -> Self {
        let base = if t_final > 0.0 { period.min(t_final) } else { period };
        Self::new(base / 2000.0)
    }

    pub fn with_snapshots(mut self, every: usize) -> Self {
        self.store_every = Some(every.max(1));
        self
    }

    /// Rejects steps coarser than `period / 200`.
    pub fn check_resolution(&self, period: f64) -> Result<()> {
        if !(self.dt > 0.0) || self.dt > period / 200.0 * (1.0 + 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "dt = {:e} exceeds the resolution floor {:e}",
                self.dt,
                period / 200.0
            )));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidParameter("record_every must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropagationResult {
    pub final_state: Wavefunction,
    /// Times of the norm and energy records.
    pub times: Vec<f64>,
    pub norm_history: Vec<f64>,
    pub energy_history: Vec<f64>,
    pub snapshot_times: Vec<f64>,
    pub density_snapshots: Option<Vec<Vec<f64>>>,
    pub steps: usize,
    pub dt: f64,
}

impl PropagationResult {
    pub fn max_norm_drift(&self) -> f64 {
        self.norm_history.iter().fold(0.0, |m, n| m.max((n - 1.0).abs()))
    }
}

fn edge_mass(psi: &Wavefunction) -> f64 {
    let a = psi.amplitudes();
    let n = a.len();
    let strip = EDGE_POINTS.min(n / 2);
    let s: f64 = a[..strip].iter().chain(&a[n - strip..]).map(|z| z.norm_sqr()).sum();
    s * psi.grid().dx()
}

fn absorber_mask(grid: &Grid, strength: f64) -> Vec<f64> {
    let n = grid.len();
    let width = (n / 10).max(1);
    (0..n)
        .map(|i| {
            let depth = if i < width {
                (width - i) as f64 / width as f64
            } else if i >= n - width {
                (i + 1 - (n - width)) as f64 / width as f64
            } else {
                0.0
            };
            1.0 - strength * (0.5 * std::f64::consts::PI * depth).sin().powi(2)
        })
        .collect()
}

/// Strang splitting with the potential sampled at step midpoints. Adjacent
/// potential half-steps are merged between records.
pub fn propagate(
    psi0: &Wavefunction,
    potential: &impl PotentialProvider,
    mass: f64,
    t_final: f64,
    config: &PropagationConfig,
) -> Result<PropagationResult> {
    propagate_observed(psi0, potential, mass, t_final, config, &mut |_, _| {})
}

/// As [`propagate`], also handing every snapshot to `observer` as it is
/// taken, so callers can stream data that survives a later failure.
pub fn propagate_observed(
    psi0: &Wavefunction,
    potential: &impl PotentialProvider,
    mass: f64,
    t_final: f64,
    config: &PropagationConfig,
    observer: &mut dyn FnMut(f64, &Wavefunction),
) -> Result<PropagationResult> {
    if !(t_final >= 0.0) || !t_final.is_finite() {
        return Err(Error::NonPositiveDuration(t_final));
    }
    if !(config.dt > 0.0) || config.record_every == 0 {
        return Err(Error::InvalidParameter("dt must be positive and record_every at least 1".into()));
    }
    let grid = *psi0.grid();
    let n = grid.len();
    let fft = FourierPair::new(n);
    let mut scratch = fft.scratch();
    let steps = if t_final == 0.0 { 0 } else { (t_final / config.dt).ceil().max(1.0) as usize };
    let dt = if steps == 0 { 0.0 } else { t_final / steps as f64 };

    let kinetic: Vec<Complex64> = grid
        .momenta()
        .iter()
        .map(|k| Complex64::from_polar(1.0, -0.5 * k * k / mass * dt))
        .collect();
    let mask = match config.absorber {
        Absorber::Mask(s) => Some(absorber_mask(&grid, s)),
        Absorber::None => None,
    };

    let mut psi = psi0.clone();
    let mut v = vec![0.0; n];
    let mut pending = vec![0.0; n];
    let mut has_pending = false;

    let mut result = PropagationResult {
        final_state: psi0.clone(),
        times: Vec::new(),
        norm_history: Vec::new(),
        energy_history: Vec::new(),
        snapshot_times: Vec::new(),
        density_snapshots: config.store_every.map(|_| Vec::new()),
        steps,
        dt,
    };

    potential.fill(0.0, &grid, &mut v)?;
    let e0 = energy_with(&fft, &mut scratch, &psi, &v, mass)?;
    // largest energy the grid can represent at t = 0
    let k_max = grid.k(n / 2).abs();
    let v_span = v.iter().fold(0.0, |m: f64, x| m.max((x - e0).abs()));
    let energy_scale = (v_span + 0.5 * k_max * k_max / mass).max(e0.abs()).max(1e-300);
    let record = |result: &mut PropagationResult,
                      psi: &Wavefunction,
                      t: f64,
                      v_now: &[f64],
                      scratch: &mut [Complex64]|
     -> Result<()> {
        let norm = psi.norm_squared();
        let energy = energy_with(&fft, scratch, psi, v_now, mass)?;
        if !energy.is_finite() || (energy - e0).abs() > 10.0 * energy_scale {
            return Err(Error::UnstableStep { time: t });
        }
        if mask.is_none() && (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NormLoss { time: t, norm });
        }
        if config.check_edges {
            let edge = edge_mass(psi);
            if edge > EDGE_TOL {
                return Err(Error::EdgeLeakage { time: t, density: edge });
            }
        }
        result.times.push(t);
        result.norm_history.push(norm);
        result.energy_history.push(energy);
        Ok(())
    };

    let initial_norm = psi0.norm_squared();
    if mask.is_none() && (initial_norm - 1.0).abs() > NORM_TOL {
        return Err(Error::InvalidParameter(format!("initial state has norm {initial_norm}")));
    }
    record(&mut result, &psi, 0.0, &v, &mut scratch)?;
    if let (Some(snaps), Some(_)) = (result.density_snapshots.as_mut(), config.store_every) {
        snaps.push(psi.density());
        result.snapshot_times.push(0.0);
        observer(0.0, &psi);
    }

    let mut v_end = vec![0.0; n];
    for step in 0..steps {
        let t_mid = (step as f64 + 0.5) * dt;
        potential.fill(t_mid, &grid, &mut v)?;
        {
            let amps = psi.amplitudes_mut();
            for i in 0..n {
                let phase = if has_pending { pending[i] + v[i] } else { v[i] };
                amps[i] *= Complex64::from_polar(1.0, -0.5 * phase * dt);
            }
            fft.forward(amps, &mut scratch);
            for (z, k) in amps.iter_mut().zip(&kinetic) {
                *z *= k;
            }
            fft.inverse(amps, &mut scratch);
        }
        let done = step + 1;
        let t = done as f64 * dt;
        let recording = done % config.record_every == 0 || done == steps;
        let snapshot = config.store_every.is_some_and(|s| done % s == 0 || done == steps);
        if recording || snapshot || mask.is_some() {
            let amps = psi.amplitudes_mut();
            for i in 0..n {
                amps[i] *= Complex64::from_polar(1.0, -0.5 * v[i] * dt);
            }
            if let Some(m) = &mask {
                amps.iter_mut().zip(m).for_each(|(z, f)| *z *= f);
            }
            has_pending = false;
        } else {
            pending.copy_from_slice(&v);
            has_pending = true;
        }
        if recording {
            potential.fill(t, &grid, &mut v_end)?;
            record(&mut result, &psi, t, &v_end, &mut scratch)?;
        }
        if snapshot {
            if let Some(snaps) = result.density_snapshots.as_mut() {
                snaps.push(psi.density());
                result.snapshot_times.push(t);
                observer(t, &psi);
            }
        }
    }
    result.final_state = psi;
    Ok(result)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub dt: f64,
    /// `|psi_dt - psi_{dt/2}|`.
    pub discrepancy_coarse: f64,
    /// `|psi_{dt/2} - psi_{dt/4}|`.
    pub discrepancy_fine: f64,
    pub ratio: f64,
    /// Ratio inside `[3.5, 4.5]`, the second-order signature.
    pub second_order: bool,
}

fn distance(a: &Wavefunction, b: &Wavefunction) -> f64 {
    let s: f64 = a
        .amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum();
    (s * a.grid().dx()).sqrt()
}

/// Propagates at `dt`, `dt/2` and `dt/4` and compares final states.
pub fn convergence_check(
    psi0: &Wavefunction,
    potential: &impl PotentialProvider,
    mass: f64,
    t_final: f64,
    config: &PropagationConfig,
) -> Result<ConvergenceReport> {
    let run = |div: f64| {
        let cfg = PropagationConfig {
            dt: config.dt / div,
            record_every: usize::MAX,
            store_every: None,
            ..*config
        };
        propagate(psi0, potential, mass, t_final, &cfg).map(|r| r.final_state)
    };
    let (a, b, c) = (run(1.0)?, run(2.0)?, run(4.0)?);
    let coarse = distance(&a, &b);
    let fine = distance(&b, &c);
    let ratio = coarse / fine.max(1e-300);
    if fine > 1e-6 {
        return Err(Error::NotConverged(fine));
    }
    Ok(ConvergenceReport {
        dt: config.dt,
        discrepancy_coarse: coarse,
        discrepancy_fine: fine,
        ratio,
        second_order: (3.5..=4.5).contains(&ratio),
    })
}
