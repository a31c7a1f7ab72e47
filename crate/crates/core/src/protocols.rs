//! Control trajectories for the bias inversion and the compensating force.
//!
//! A protocol maps time to the control parameter `lambda(t)` (the ion slope
//! `gamma` or the lattice displacement `dx`). The compensated shortcut adds a
//! linear potential `-m x0''(t) x`, where `x0(t)` is the trajectory of the
//! well minimum; for the ion this is folded into an effective slope.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{FourierPair, Wavefunction};
use crate::potentials::{
    validity_report, IonQuarticParams, MinimumJet, PotentialParams, Validity,
    ValidityReport, WellSide,
};
use crate::units::HBAR;

/// Minimum number of trajectory samples.
pub const MIN_SAMPLES: usize = 2000;
/// Minimum samples per oscillation period `2 pi / Omega_0`.
pub const SAMPLES_PER_PERIOD: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProtocolKind {
    Sudden,
    Polynomial,
    Faquad,
    #[serde(rename = "compensated")]
    PolynomialCompensated,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 4] = [
        ProtocolKind::Sudden,
        ProtocolKind::Polynomial,
        ProtocolKind::Faquad,
        ProtocolKind::PolynomialCompensated,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ProtocolKind::Sudden => "sudden",
            ProtocolKind::Polynomial => "polynomial",
            ProtocolKind::Faquad => "faquad",
            ProtocolKind::PolynomialCompensated => "compensated",
        }
    }

    pub fn is_compensated(self) -> bool {
        matches!(self, ProtocolKind::PolynomialCompensated)
    }
}

impl std::str::FromStr for ProtocolKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sudden" => Ok(ProtocolKind::Sudden),
            "polynomial" | "poly" => Ok(ProtocolKind::Polynomial),
            "faquad" | "linear" => Ok(ProtocolKind::Faquad),
            "compensated" | "polynomial-compensated" | "shortcut" => {
                Ok(ProtocolKind::PolynomialCompensated)
            }
            other => Err(Error::InvalidParameter(format!("unknown protocol `{other}`"))),
        }
    }
}

/// A control protocol. `poly_coeffs` are the coefficients of `lambda` as a
/// polynomial in `s = t / t_final`, lowest order first.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProtocolSpec {
    pub kind: ProtocolKind,
    pub lambda_start: f64,
    pub lambda_end: f64,
    pub t_final: f64,
    pub faquad_c: Option<f64>,
    pub poly_coeffs: [f64; 6],
}

fn check_duration(t_final: f64) -> Result<()> {
    if t_final > 0.0 && t_final.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveDuration(t_final))
    }
}

/// Quintic connection with vanishing first and second derivatives at both ends.
pub fn build_polynomial(lambda_start: f64, lambda_end: f64, t_final: f64) -> Result<ProtocolSpec> {
    check_duration(t_final)?;
    let d = lambda_end - lambda_start;
    Ok(ProtocolSpec {
        kind: ProtocolKind::Polynomial,
        lambda_start,
        lambda_end,
        t_final,
        faquad_c: None,
        poly_coeffs: [lambda_start, 0.0, 0.0, 10.0 * d, -15.0 * d, 6.0 * d],
    })
}

/// The polynomial reference process with the compensating force switched on.
pub fn build_compensated(lambda_start: f64, lambda_end: f64, t_final: f64) -> Result<ProtocolSpec> {
    Ok(ProtocolSpec {
        kind: ProtocolKind::PolynomialCompensated,
        ..build_polynomial(lambda_start, lambda_end, t_final)?
    })
}

/// Linear ramp: the FAQUAD solution for rigid harmonic transport.
pub fn build_faquad(lambda_start: f64, lambda_end: f64, t_final: f64) -> Result<ProtocolSpec> {
    check_duration(t_final)?;
    Ok(ProtocolSpec {
        kind: ProtocolKind::Faquad,
        lambda_start,
        lambda_end,
        t_final,
        faquad_c: None,
        poly_coeffs: [lambda_start, lambda_end - lambda_start, 0.0, 0.0, 0.0, 0.0],
    })
}

/// Instantaneous switch; represented with `t_final = 0`.
pub fn build_sudden(lambda_start: f64, lambda_end: f64) -> ProtocolSpec {
    ProtocolSpec {
        kind: ProtocolKind::Sudden,
        lambda_start,
        lambda_end,
        t_final: 0.0,
        faquad_c: None,
        poly_coeffs: [lambda_end, 0.0, 0.0, 0.0, 0.0, 0.0],
    }
}

pub fn build(kind: ProtocolKind, lambda_start: f64, lambda_end: f64, t_final: f64) -> Result<ProtocolSpec> {
    match kind {
        ProtocolKind::Sudden => Ok(build_sudden(lambda_start, lambda_end)),
        ProtocolKind::Polynomial => build_polynomial(lambda_start, lambda_end, t_final),
        ProtocolKind::Faquad => build_faquad(lambda_start, lambda_end, t_final),
        ProtocolKind::PolynomialCompensated => build_compensated(lambda_start, lambda_end, t_final),
    }
}

/// `m x0' / sqrt(2 hbar m Omega_0)` for a linear ramp covering `travel` in
/// `t_final` (SI inputs).
pub fn faquad_constant(mass: f64, omega_ref: f64, travel: f64, t_final: f64) -> f64 {
    mass * (travel / t_final) / (2.0 * HBAR * mass * omega_ref).sqrt()
}

/// `hbar |<phi_0|d_t phi_1>| / |E_1 - E_0|` for harmonic levels of a well
/// moving at velocity `x0_dot`.
pub fn harmonic_adiabaticity(mass: f64, omega: f64, x0_dot: f64) -> f64 {
    // <phi_0|d_x phi_1> = sqrt(m omega / 2 hbar)
    let coupling = x0_dot.abs() * (mass * omega / (2.0 * HBAR)).sqrt();
    HBAR * coupling / (HBAR * omega)
}

impl ProtocolSpec {
    pub fn with_faquad_c(mut self, c: f64) -> Self {
        self.faquad_c = Some(c);
        self
    }

    pub fn is_sudden(&self) -> bool {
        self.kind == ProtocolKind::Sudden
    }

    fn s(&self, t: f64) -> Option<f64> {
        if self.t_final <= 0.0 || t >= self.t_final {
            None
        } else if t <= 0.0 {
            Some(0.0)
        } else {
            Some(t / self.t_final)
        }
    }

    pub fn lambda(&self, t: f64) -> f64 {
        match self.s(t) {
            Some(s) => self.poly_coeffs.iter().rev().fold(0.0, |acc, c| acc * s + c),
            None if self.t_final <= 0.0 && t <= 0.0 => self.lambda_start,
            None => self.lambda_end,
        }
    }

    pub fn lambda_dot(&self, t: f64) -> f64 {
        let Some(s) = self.s(t) else { return 0.0 };
        let c = &self.poly_coeffs;
        let ds = c[1] + s * (2.0 * c[2] + s * (3.0 * c[3] + s * (4.0 * c[4] + s * 5.0 * c[5])));
        ds / self.t_final
    }

    pub fn lambda_ddot(&self, t: f64) -> f64 {
        let Some(s) = self.s(t) else { return 0.0 };
        let c = &self.poly_coeffs;
        let dss = 2.0 * c[2] + s * (6.0 * c[3] + s * (12.0 * c[4] + s * 20.0 * c[5]));
        dss / (self.t_final * self.t_final)
    }

    /// Coefficients of `lambda` as a polynomial in `t` (SI).
    pub fn coefficients_in_time(&self) -> [f64; 6] {
        let mut out = self.poly_coeffs;
        if self.t_final > 0.0 {
            for (n, c) in out.iter_mut().enumerate() {
                *c /= self.t_final.powi(n as i32);
            }
        }
        out
    }

    /// Control value and well kinematics at time `t`.
    pub fn drive_at(&self, t: f64, wells: &impl MinimumMap, side: WellSide) -> Result<DriveSample> {
        let lambda = self.lambda(t);
        let lambda_dot = self.lambda_dot(t);
        let lambda_ddot = self.lambda_ddot(t);
        let jet = wells.minimum_jet(lambda, side)?;
        Ok(DriveSample {
            t,
            lambda,
            lambda_dot,
            lambda_ddot,
            x0: jet.x,
            x0_dot: jet.dx_dlambda * lambda_dot,
            x0_ddot: jet.d2x_dlambda2 * lambda_dot * lambda_dot + jet.dx_dlambda * lambda_ddot,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveSample {
    pub t: f64,
    pub lambda: f64,
    pub lambda_dot: f64,
    pub lambda_ddot: f64,
    pub x0: f64,
    pub x0_dot: f64,
    pub x0_ddot: f64,
}

/// Anything whose well minimum moves with a scalar control.
pub trait MinimumMap {
    fn minimum_jet(&self, lambda: f64, side: WellSide) -> Result<MinimumJet>;
    fn mass(&self) -> f64;
    fn omega_ref(&self) -> Result<f64>;
    /// Rejects control ranges outside the rigid-transport regime.
    fn check_range(&self, _lambda_max: f64) -> Result<()> {
        Ok(())
    }
}

impl MinimumMap for PotentialParams {
    fn minimum_jet(&self, lambda: f64, side: WellSide) -> Result<MinimumJet> {
        PotentialParams::minimum_jet(self, lambda, side)
    }
    fn mass(&self) -> f64 {
        PotentialParams::mass(self)
    }
    fn omega_ref(&self) -> Result<f64> {
        PotentialParams::omega_ref(self)
    }
    fn check_range(&self, lambda_max: f64) -> Result<()> {
        let report = validity_report(self, lambda_max)?;
        if report.status == Validity::Fail {
            return Err(Error::ValidityViolation(format!(
                "margins at |lambda| = {lambda_max:e}: parallel {:.3}, frequency {:.3}, two-minima {:.3}",
                report.parallel_margin, report.frequency_margin, report.two_minima_margin
            )));
        }
        Ok(())
    }
}

/// A harmonic well of fixed frequency whose centre is the control itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidHarmonic {
    pub omega: f64,
    pub mass: f64,
}

impl RigidHarmonic {
    pub fn value(&self, x: f64, center: f64) -> f64 {
        0.5 * self.mass * self.omega * self.omega * (x - center) * (x - center)
    }
}

impl MinimumMap for RigidHarmonic {
    fn minimum_jet(&self, lambda: f64, _side: WellSide) -> Result<MinimumJet> {
        Ok(MinimumJet {
            x: lambda,
            dx_dlambda: 1.0,
            d2x_dlambda2: 0.0,
        })
    }
    fn mass(&self) -> f64 {
        self.mass
    }
    fn omega_ref(&self) -> Result<f64> {
        Ok(self.omega)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Compensation {
    None,
    /// Folded into the slope of an existing linear term.
    Slope,
    /// Attached as an extra `-F(t) x` potential with `F = m x0''`.
    LinearTerm,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolTrajectory {
    pub kind: ProtocolKind,
    pub well: WellSide,
    pub t_final: f64,
    pub times: Vec<f64>,
    pub lambda: Vec<f64>,
    pub lambda_dot: Vec<f64>,
    pub lambda_ddot: Vec<f64>,
    pub x0: Vec<f64>,
    pub x0_dot: Vec<f64>,
    pub x0_ddot: Vec<f64>,
    pub lambda_eff: Vec<f64>,
    pub compensation: Compensation,
    /// `m x0''(t)` when the compensation is a separate linear term.
    pub linear_force: Option<Vec<f64>>,
}

impl ProtocolTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn peak_acceleration(&self) -> f64 {
        self.x0_ddot.iter().fold(0.0, |m, a| m.max(a.abs()))
    }

    pub fn peak_lambda_eff(&self) -> f64 {
        self.lambda_eff.iter().fold(0.0, |m, a| m.max(a.abs()))
    }
}

/// Samples the well-minimum trajectory of `side` along `spec`.
///
/// At least [`MIN_SAMPLES`] samples and [`SAMPLES_PER_PERIOD`] per period are
/// used regardless of `n_samples`.
pub fn minima_trajectory(
    spec: &ProtocolSpec,
    wells: &impl MinimumMap,
    n_samples: usize,
    side: WellSide,
) -> Result<ProtocolTrajectory> {
    wells.check_range(spec.lambda_start.abs().max(spec.lambda_end.abs()))?;
    let times: Vec<f64> = if spec.is_sudden() {
        vec![0.0, 0.0]
    } else {
        let period = 2.0 * PI / wells.omega_ref()?;
        let per_period = (SAMPLES_PER_PERIOD as f64 * spec.t_final / period).ceil() as usize;
        let n = n_samples.max(MIN_SAMPLES).max(per_period).max(2);
        (0..n)
            .map(|i| spec.t_final * i as f64 / (n - 1) as f64)
            .collect()
    };
    let mut traj = ProtocolTrajectory {
        kind: spec.kind,
        well: side,
        t_final: spec.t_final,
        times: Vec::with_capacity(times.len()),
        lambda: Vec::with_capacity(times.len()),
        lambda_dot: Vec::with_capacity(times.len()),
        lambda_ddot: Vec::with_capacity(times.len()),
        x0: Vec::with_capacity(times.len()),
        x0_dot: Vec::with_capacity(times.len()),
        x0_ddot: Vec::with_capacity(times.len()),
        lambda_eff: Vec::with_capacity(times.len()),
        compensation: Compensation::None,
        linear_force: None,
    };
    for (i, &t) in times.iter().enumerate() {
        let d = if spec.is_sudden() {
            let lambda = if i == 0 { spec.lambda_start } else { spec.lambda_end };
            let jet = wells.minimum_jet(lambda, side)?;
            DriveSample {
                t,
                lambda,
                lambda_dot: 0.0,
                lambda_ddot: 0.0,
                x0: jet.x,
                x0_dot: 0.0,
                x0_ddot: 0.0,
            }
        } else {
            spec.drive_at(t, wells, side)?
        };
        traj.times.push(t);
        traj.lambda.push(d.lambda);
        traj.lambda_dot.push(d.lambda_dot);
        traj.lambda_ddot.push(d.lambda_ddot);
        traj.x0.push(d.x0);
        traj.x0_dot.push(d.x0_dot);
        traj.x0_ddot.push(d.x0_ddot);
        traj.lambda_eff.push(d.lambda);
    }
    Ok(traj)
}

/// Adds the compensating force `-m x0'' x`. For the ion it becomes the
/// effective slope `gamma - m x0''`; for the atom it is kept as a separate
/// linear term and `lambda_eff` is left unchanged.
pub fn compensate(traj: &ProtocolTrajectory, params: &PotentialParams) -> ProtocolTrajectory {
    let mass = params.mass();
    let mut out = traj.clone();
    if traj.kind == ProtocolKind::Polynomial {
        out.kind = ProtocolKind::PolynomialCompensated;
    }
    match params {
        PotentialParams::Ion(_) => {
            out.lambda_eff = traj
                .lambda
                .iter()
                .zip(&traj.x0_ddot)
                .map(|(l, a)| l - mass * a)
                .collect();
            out.compensation = Compensation::Slope;
        }
        PotentialParams::Atom(_) => {
            out.lambda_eff = traj.lambda.clone();
            out.linear_force = Some(traj.x0_ddot.iter().map(|a| mass * a).collect());
            out.compensation = Compensation::LinearTerm;
        }
    }
    out
}

/// Validity of the compensated configuration at its largest effective
/// control. A lost well or a failing margin is a `ValidityViolation`. The
/// atom's separate linear term leaves the lattice displacement untouched and
/// is cancelled in the comoving frame, so only `lambda_eff` is checked.
pub fn check_compensated(traj: &ProtocolTrajectory, params: &PotentialParams) -> Result<ValidityReport> {
    let peak = traj.peak_lambda_eff();
    let report = match validity_report(params, peak) {
        Ok(r) => r,
        Err(Error::NotDoubleWell(msg)) => return Err(Error::ValidityViolation(msg)),
        Err(e) => return Err(e),
    };
    if report.status == Validity::Fail {
        return Err(Error::ValidityViolation(format!(
            "compensated control peaks at {peak:e}, parallel margin {:.3}",
            report.parallel_margin
        )));
    }
    Ok(report)
}

/// `((3 m gamma0 / (4 sqrt 2)) sqrt(-beta/alpha^5))^{1/2}`: durations well
/// above this keep the compensated slope inside the parallel-motion regime.
pub fn short_time_bound(params: &IonQuarticParams, gamma0: f64) -> f64 {
    let inner = 3.0 * params.mass * gamma0.abs() / (4.0 * 2f64.sqrt())
        * (-params.beta / params.alpha.powi(5)).sqrt();
    inner.sqrt()
}

/// Applies `exp(i p x0 / hbar) exp(-i m v0 x / hbar)` in units with
/// `hbar = 1`: a momentum kick followed by a translation by `-x0`.
pub fn displacement_unitary_apply(
    psi: &Wavefunction,
    x0: f64,
    v0: f64,
    mass: f64,
) -> Result<Wavefunction> {
    let grid = *psi.grid();
    check_shift(x0, grid.span())?;
    let mut amps = psi.amplitudes().to_vec();
    for (i, z) in amps.iter_mut().enumerate() {
        *z *= Complex64::from_polar(1.0, -mass * v0 * grid.x(i));
    }
    translate(&mut amps, &grid, -x0);
    Wavefunction::new(grid, amps)
}

/// Inverse of [`displacement_unitary_apply`].
pub fn displacement_unitary_inverse(
    psi: &Wavefunction,
    x0: f64,
    v0: f64,
    mass: f64,
) -> Result<Wavefunction> {
    let grid = *psi.grid();
    check_shift(x0, grid.span())?;
    let mut amps = psi.amplitudes().to_vec();
    translate(&mut amps, &grid, x0);
    for (i, z) in amps.iter_mut().enumerate() {
        *z *= Complex64::from_polar(1.0, mass * v0 * grid.x(i));
    }
    Wavefunction::new(grid, amps)
}

fn check_shift(x0: f64, span: f64) -> Result<()> {
    if x0.abs() > 0.25 * span {
        Err(Error::ShiftTooLarge { shift: x0, span })
    } else {
        Ok(())
    }
}

/// `psi(x) -> psi(x - shift)` by a Fourier phase.
fn translate(amps: &mut [Complex64], grid: &crate::grid::Grid, shift: f64) {
    if shift == 0.0 {
        return;
    }
    let fft = FourierPair::new(grid.len());
    let mut scratch = fft.scratch();
    fft.forward(amps, &mut scratch);
    let n = grid.len();
    for (j, z) in amps.iter_mut().enumerate() {
        // the Nyquist mode has no symmetric partner; drop its odd part
        let phase = if j == n / 2 {
            Complex64::new((grid.k(j) * shift).cos(), 0.0)
        } else {
            Complex64::from_polar(1.0, -grid.k(j) * shift)
        };
        *z *= phase;
    }
    fft.inverse(amps, &mut scratch);
}
