//! Double-well potential models and their closed-form analytics.
//!
//! Two scenarios are supported: the quartic trap `beta x^4 + alpha x^2 + gamma x`
//! used for ions, and the dipole trap plus lattice
//! `m omega^2 x^2 / 2 + V0 cos^2(pi (x - dx) / d_l)` used for neutral atoms.
//! In both the control parameter `lambda` is the one quantity varied during
//! a bias inversion (`gamma` or `dx`). Everything here is in SI units.

mod atom;
mod ion;
mod validity;

pub use atom::{atom_closed_form, atom_minima, atom_minima_expansion, AtomExpansion};
pub use ion::{ion_minima, ion_minima_approx, IonApproxMinima};
pub use validity::{validity_report, Validity, ValidityReport};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::HBAR;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WellSide {
    Left,
    Right,
}

impl WellSide {
    pub fn mirrored(self) -> Self {
        match self {
            WellSide::Left => WellSide::Right,
            WellSide::Right => WellSide::Left,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            WellSide::Left => "left",
            WellSide::Right => "right",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IonQuarticParams {
    /// N/m, negative.
    pub alpha: f64,
    /// N/m^3, positive.
    pub beta: f64,
    /// N, the slope of the linear term.
    pub gamma: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomLatticeParams {
    /// Dipole-trap angular frequency, rad/s.
    pub omega: f64,
    /// Lattice depth, J.
    pub v0: f64,
    /// Lattice constant, m.
    pub d_lattice: f64,
    /// Lattice displacement relative to the trap centre, m.
    pub delta_x: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PotentialParams {
    Ion(IonQuarticParams),
    Atom(AtomLatticeParams),
}

/// Intermediates of the trigonometric solution of
/// `x^3 + a x^2 + b x + c = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CubicIntermediates {
    pub a_coef: f64,
    pub b_coef: f64,
    pub c_coef: f64,
    pub q_val: f64,
    pub r_val: f64,
    pub theta: f64,
}

impl CubicIntermediates {
    pub fn from_coefficients(a: f64, b: f64, c: f64) -> Self {
        let q = (a * a - 3.0 * b) / 9.0;
        let r = (2.0 * a * a * a - 9.0 * a * b + 27.0 * c) / 54.0;
        Self::from_qr(a, q, r)
    }

    /// Builds the record from `a`, `Q` and `R`, recovering `b` and `c`.
    pub fn from_qr(a: f64, q: f64, r: f64) -> Self {
        let b = (a * a - 9.0 * q) / 3.0;
        let c = (54.0 * r - 2.0 * a * a * a + 9.0 * a * b) / 27.0;
        let theta = if q > 0.0 {
            (r / q.powf(1.5)).clamp(-1.0, 1.0).acos()
        } else {
            f64::NAN
        };
        Self {
            a_coef: a,
            b_coef: b,
            c_coef: c,
            q_val: q,
            r_val: r,
            theta,
        }
    }

    /// True when the cubic has three distinct real roots.
    pub fn has_three_roots(&self) -> bool {
        self.q_val > 0.0 && self.r_val * self.r_val < self.q_val.powi(3)
    }

    /// `R / sqrt(Q^3)`; magnitude 1 marks a degenerate root.
    pub fn discriminant_ratio(&self) -> f64 {
        self.r_val / self.q_val.powf(1.5)
    }

    /// Root `-2 sqrt(Q) cos((theta + shift)/3) - a/3`.
    pub fn root(&self, shift: f64) -> f64 {
        -2.0 * self.q_val.sqrt() * ((self.theta + shift) / 3.0).cos() - self.a_coef / 3.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WellAnalysis {
    pub x_minus: f64,
    pub x_plus: f64,
    pub barrier_x: f64,
    pub distance: f64,
    /// `V(x_plus) - V(x_minus)`.
    pub bias: f64,
    pub omega_minus: f64,
    pub omega_plus: f64,
    pub omega_ref: f64,
    /// Travel of each minimum over the inversion `lambda -> -lambda`.
    pub displacement: f64,
    /// `displacement / a0` with `a0 = sqrt(hbar / (m omega_ref))`.
    pub ratio: f64,
}

impl WellAnalysis {
    pub fn minimum(&self, side: WellSide) -> f64 {
        match side {
            WellSide::Left => self.x_minus,
            WellSide::Right => self.x_plus,
        }
    }

    pub fn omega(&self, side: WellSide) -> f64 {
        match side {
            WellSide::Left => self.omega_minus,
            WellSide::Right => self.omega_plus,
        }
    }

    pub fn oscillator_length(&self, mass: f64) -> f64 {
        (HBAR / (mass * self.omega_ref)).sqrt()
    }
}

/// Position of one minimum and its first two derivatives with respect to the
/// control parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimumJet {
    pub x: f64,
    pub dx_dlambda: f64,
    pub d2x_dlambda2: f64,
}

impl PotentialParams {
    pub fn mass(&self) -> f64 {
        match self {
            PotentialParams::Ion(p) => p.mass,
            PotentialParams::Atom(p) => p.mass,
        }
    }

    pub fn control(&self) -> f64 {
        match self {
            PotentialParams::Ion(p) => p.gamma,
            PotentialParams::Atom(p) => p.delta_x,
        }
    }

    pub fn with_control(&self, lambda: f64) -> Self {
        match *self {
            PotentialParams::Ion(p) => PotentialParams::Ion(IonQuarticParams { gamma: lambda, ..p }),
            PotentialParams::Atom(p) => {
                PotentialParams::Atom(AtomLatticeParams { delta_x: lambda, ..p })
            }
        }
    }

    /// SI unit of the control parameter.
    pub fn control_unit(&self) -> &'static str {
        match self {
            PotentialParams::Ion(_) => "N",
            PotentialParams::Atom(_) => "m",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PotentialParams::Ion(p) => p.validate(),
            PotentialParams::Atom(p) => p.validate(),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match self {
            PotentialParams::Ion(p) => p.value(x),
            PotentialParams::Atom(p) => p.value(x),
        }
    }

    pub fn slope(&self, x: f64) -> f64 {
        match self {
            PotentialParams::Ion(p) => p.slope(x),
            PotentialParams::Atom(p) => p.slope(x),
        }
    }

    pub fn curvature(&self, x: f64) -> f64 {
        match self {
            PotentialParams::Ion(p) => p.curvature(x),
            PotentialParams::Atom(p) => p.curvature(x),
        }
    }

    /// `V(center + offset) - V(center)`, evaluated without catastrophic
    /// cancellation for offsets much smaller than `center`.
    pub fn relative_value(&self, center: f64, offset: f64) -> f64 {
        match self {
            PotentialParams::Ion(p) => p.relative_value(center, offset),
            PotentialParams::Atom(p) => p.value(center + offset) - p.value(center),
        }
    }

    /// Pointwise potential at the given positions.
    pub fn evaluate(&self, x: &[f64]) -> Vec<f64> {
        x.iter().map(|&x| self.value(x)).collect()
    }

    pub fn analyze(&self) -> Result<WellAnalysis> {
        match self {
            PotentialParams::Ion(p) => ion_minima(p).map(|(w, _)| w),
            PotentialParams::Atom(p) => atom_minima(p).map(|(w, _)| w),
        }
    }

    /// Reference frequency of the symmetric configuration.
    pub fn omega_ref(&self) -> Result<f64> {
        match self {
            PotentialParams::Ion(p) => Ok(p.omega_ref()),
            PotentialParams::Atom(p) => p.omega_ref(),
        }
    }

    /// Minimum on `side` at control value `lambda`, with its control
    /// derivatives from implicit differentiation of `dV/dx = 0`.
    pub fn minimum_jet(&self, lambda: f64, side: WellSide) -> Result<MinimumJet> {
        match self {
            PotentialParams::Ion(p) => p.with_gamma(lambda).minimum_jet(side),
            PotentialParams::Atom(p) => p.with_delta_x(lambda).minimum_jet(side),
        }
    }
}

/// Common tail of the per-scenario analyses.
pub(crate) fn assemble_analysis(
    params: &PotentialParams,
    minima: (f64, f64, f64),
    mirrored: (f64, f64),
    omega_ref: f64,
) -> WellAnalysis {
    let (x_minus, barrier_x, x_plus) = minima;
    let mass = params.mass();
    let omega_at = |x: f64| (params.curvature(x) / mass).sqrt();
    let displacement = 0.5 * ((mirrored.0 - x_minus).abs() + (mirrored.1 - x_plus).abs());
    let a0 = (HBAR / (mass * omega_ref)).sqrt();
    WellAnalysis {
        x_minus,
        x_plus,
        barrier_x,
        distance: x_plus - x_minus,
        bias: params.value(x_plus) - params.value(x_minus),
        omega_minus: omega_at(x_minus),
        omega_plus: omega_at(x_plus),
        omega_ref,
        displacement,
        ratio: displacement / a0,
    }
}

pub(crate) fn implicit_jet(
    x: f64,
    f_x: f64,
    f_xx: f64,
    f_l: f64,
    f_xl: f64,
    f_ll: f64,
) -> Result<MinimumJet> {
    if !(f_x > 0.0) {
        return Err(Error::NotDoubleWell(format!(
            "stationary point at {x} is not a minimum"
        )));
    }
    let d1 = -f_l / f_x;
    let d2 = -(f_xx * d1 * d1 + 2.0 * f_xl * d1 + f_ll) / f_x;
    Ok(MinimumJet {
        x,
        dx_dlambda: d1,
        d2x_dlambda2: d2,
    })
}

/// Bisection on a bracketed sign change, to machine precision.
pub(crate) fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_record_is_self_consistent() {
        // (x-1)(x-2)(x+4) = x^3 + x^2 - 10x + 8
        let c = CubicIntermediates::from_coefficients(1.0, -10.0, 8.0);
        assert!(c.has_three_roots());
        let mut roots = [c.root(0.0), c.root(2.0 * std::f64::consts::PI), c.root(-2.0 * std::f64::consts::PI)];
        roots.sort_by(f64::total_cmp);
        for (r, e) in roots.iter().zip([-4.0, 1.0, 2.0]) {
            assert!((r - e).abs() < 1e-12, "{r} vs {e}");
        }
        let back = CubicIntermediates::from_qr(c.a_coef, c.q_val, c.r_val);
        assert!((back.b_coef + 10.0).abs() < 1e-12);
        assert!((back.c_coef - 8.0).abs() < 1e-12);
        assert!((0.0..=std::f64::consts::PI).contains(&c.theta));
    }
}
