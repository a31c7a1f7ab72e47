use std::f64::consts::PI;

use serde::Serialize;

use super::{
    assemble_analysis, bisect, implicit_jet, AtomLatticeParams, CubicIntermediates, MinimumJet,
    PotentialParams, WellAnalysis, WellSide,
};
use crate::error::{Error, Result};

const SCAN_POINTS: usize = 4096;

impl AtomLatticeParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0 && self.v0 > 0.0 && self.d_lattice > 0.0 && self.mass > 0.0) {
            return Err(Error::InvalidParameter(
                "omega, v0, d_lattice and mass must be positive".into(),
            ));
        }
        if !(self.delta_x.abs() < 0.5 * self.d_lattice) {
            return Err(Error::InvalidParameter(format!(
                "lattice displacement {:e} m must stay within half a lattice constant",
                self.delta_x
            )));
        }
        Ok(())
    }

    pub fn with_delta_x(&self, delta_x: f64) -> Self {
        Self { delta_x, ..*self }
    }

    fn kappa(&self) -> f64 {
        2.0 * PI / self.d_lattice
    }

    fn phase(&self, x: f64) -> f64 {
        self.kappa() * (x - self.delta_x)
    }

    pub fn value(&self, x: f64) -> f64 {
        let c = (PI * (x - self.delta_x) / self.d_lattice).cos();
        0.5 * self.mass * self.omega * self.omega * x * x + self.v0 * c * c
    }

    pub fn slope(&self, x: f64) -> f64 {
        self.mass * self.omega * self.omega * x - 0.5 * self.v0 * self.kappa() * self.phase(x).sin()
    }

    pub fn curvature(&self, x: f64) -> f64 {
        let k = self.kappa();
        self.mass * self.omega * self.omega - 0.5 * self.v0 * k * k * self.phase(x).cos()
    }

    fn third(&self, x: f64) -> f64 {
        0.5 * self.v0 * self.kappa().powi(3) * self.phase(x).sin()
    }

    /// Two cubics from the fourth-order expansion of the lattice around its
    /// minima `delta_x -/+ d_l/2`; index 0 is the left well.
    pub fn closed_form_cubics(&self) -> [CubicIntermediates; 2] {
        let (dl, v0, m, w) = (self.d_lattice, self.v0, self.mass, self.omega);
        let q = (2.0 * dl * dl * PI * PI * v0 + dl.powi(4) * m * w * w) / (4.0 * PI.powi(4) * v0);
        let stiff = 2.0 * PI * PI * v0 + dl * dl * m * w * w;
        [-1.0, 1.0].map(|sign| {
            let s = 2.0 * self.delta_x + sign * dl;
            let a = -1.5 * s;
            let cos_theta = -3.0 * dl * s * m * PI * PI * v0.sqrt() * w * w / (2.0 * stiff.powf(1.5));
            // R from cos(theta) = R / Q^{3/2}
            CubicIntermediates::from_qr(a, q, cos_theta * q.powf(1.5))
        })
    }

    /// `(x_minus, x_plus)` from the closed form `-2 sqrt(Q) cos((theta - 2 pi)/3) - A/3`.
    pub fn closed_form_minima(&self) -> (f64, f64) {
        let [l, r] = self.closed_form_cubics();
        (l.root(-2.0 * PI), r.root(-2.0 * PI))
    }

    /// Newton iteration on `dV/dx`, kept inside the lattice cell of `side`.
    fn polish(&self, guess: f64, side: WellSide) -> Result<f64> {
        let half = 0.5 * self.d_lattice;
        let (lo, hi) = match side {
            WellSide::Left => (self.delta_x - 2.0 * half, self.delta_x),
            WellSide::Right => (self.delta_x, self.delta_x + 2.0 * half),
        };
        let mut x = if guess.is_finite() && guess > lo && guess < hi {
            guess
        } else {
            0.5 * (lo + hi)
        };
        for _ in 0..50 {
            let curv = self.curvature(x);
            if !(curv > 0.0) {
                break;
            }
            let step = self.slope(x) / curv;
            let next = x - step;
            if !(next > lo && next < hi) {
                break;
            }
            x = next;
            if step.abs() <= 1e-14 * self.d_lattice {
                if self.curvature(x) > 0.0 {
                    return Ok(x);
                }
                break;
            }
        }
        // Newton failed to settle; use the robust scan.
        let (xm, _, xp) = self.stationary_points()?;
        Ok(match side {
            WellSide::Left => xm,
            WellSide::Right => xp,
        })
    }

    /// Exact `(x_minus, barrier, x_plus)` of the central double well by a
    /// bracketed scan of `dV/dx` over the two lattice cells around the origin.
    pub fn stationary_points(&self) -> Result<(f64, f64, f64)> {
        self.validate()?;
        let lo = self.delta_x - self.d_lattice;
        let hi = self.delta_x + self.d_lattice;
        let h = (hi - lo) / SCAN_POINTS as f64;
        let mut minima = Vec::new();
        let mut maxima = Vec::new();
        let mut prev = self.slope(lo);
        for i in 1..=SCAN_POINTS {
            let x = lo + i as f64 * h;
            let cur = self.slope(x);
            if prev < 0.0 && cur >= 0.0 {
                minima.push(bisect(|x| self.slope(x), x - h, x));
            } else if prev > 0.0 && cur <= 0.0 {
                maxima.push(bisect(|x| self.slope(x), x - h, x));
            }
            prev = cur;
        }
        if minima.len() != 2 {
            return Err(Error::NotDoubleWell(format!(
                "found {} minima in the central lattice cells",
                minima.len()
            )));
        }
        let (xm, xp) = (minima[0], minima[1]);
        let barrier = maxima
            .into_iter()
            .find(|&b| b > xm && b < xp)
            .ok_or_else(|| Error::NotDoubleWell("no barrier between the minima".into()))?;
        Ok((xm, barrier, xp))
    }

    pub fn minimum_jet(&self, side: WellSide) -> Result<MinimumJet> {
        self.validate()?;
        let (gl, gr) = self.closed_form_minima();
        let guess = match side {
            WellSide::Left => gl,
            WellSide::Right => gr,
        };
        let x = self.polish(guess, side)?;
        let k = self.kappa();
        let phi = self.phase(x);
        let lattice2 = 0.5 * self.v0 * k * k;
        let lattice3 = 0.5 * self.v0 * k * k * k;
        // F = dV/dx; derivatives with respect to delta_x flip the lattice phase
        implicit_jet(
            x,
            self.curvature(x),
            self.third(x),
            lattice2 * phi.cos(),
            -lattice3 * phi.sin(),
            lattice3 * phi.sin(),
        )
    }

    /// Frequency of either well at `delta_x = 0`.
    pub fn omega_ref(&self) -> Result<f64> {
        let sym = self.with_delta_x(0.0);
        let x = sym.minimum_jet(WellSide::Right)?.x;
        Ok((sym.curvature(x) / self.mass).sqrt())
    }
}

/// Exact analysis of the central double well; the closed-form cubic
/// intermediates for both wells are returned alongside for comparison.
pub fn atom_minima(
    params: &AtomLatticeParams,
) -> Result<(WellAnalysis, [CubicIntermediates; 2])> {
    let points = params.stationary_points()?;
    let (mm, _, mp) = params.with_delta_x(-params.delta_x).stationary_points()?;
    let analysis = assemble_analysis(
        &PotentialParams::Atom(*params),
        points,
        (mm, mp),
        params.omega_ref()?,
    );
    Ok((analysis, params.closed_form_cubics()))
}

/// Closed-form minima for both wells, `(x_minus, x_plus)`.
pub fn atom_closed_form(params: &AtomLatticeParams) -> (f64, f64) {
    params.closed_form_minima()
}

/// Coefficients of `x_pm ~ +-a + b dx +- c dx^2` and `omega_pm ~ f -+ g dx`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AtomExpansion {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub f: f64,
    pub g: f64,
}

impl AtomExpansion {
    pub fn x_plus(&self, dx: f64) -> f64 {
        self.a + self.b * dx + self.c * dx * dx
    }
    pub fn x_minus(&self, dx: f64) -> f64 {
        -self.a + self.b * dx - self.c * dx * dx
    }
    pub fn omega_plus(&self, dx: f64) -> f64 {
        self.f - self.g * dx
    }
    pub fn omega_minus(&self, dx: f64) -> f64 {
        self.f + self.g * dx
    }
}

/// Fits the expansion coefficients from exact minima at `dx in {0, +-h, +-2h}`.
pub fn atom_minima_expansion(params: &AtomLatticeParams) -> Result<AtomExpansion> {
    let h = 1e-2 * params.d_lattice;
    let sample = |dx: f64| -> Result<(f64, f64)> {
        let p = params.with_delta_x(dx);
        let x = p.minimum_jet(WellSide::Right)?.x;
        Ok((x, (p.curvature(x) / p.mass).sqrt()))
    };
    let (x0, w0) = sample(0.0)?;
    let (xp1, wp1) = sample(h)?;
    let (xm1, wm1) = sample(-h)?;
    let (xp2, wp2) = sample(2.0 * h)?;
    let (xm2, wm2) = sample(-2.0 * h)?;
    // five-point stencils
    let d1 = |p2: f64, p1: f64, m1: f64, m2: f64| (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h);
    let d2 = |p2: f64, p1: f64, c: f64, m1: f64, m2: f64| {
        (-p2 + 16.0 * p1 - 30.0 * c + 16.0 * m1 - m2) / (12.0 * h * h)
    };
    Ok(AtomExpansion {
        a: x0,
        b: d1(xp2, xp1, xm1, xm2),
        c: 0.5 * d2(xp2, xp1, x0, xm1, xm2),
        f: w0,
        g: -d1(wp2, wp1, wm1, wm2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{mass_rb87, PLANCK};

    fn lattice(delta_x: f64) -> AtomLatticeParams {
        AtomLatticeParams {
            omega: 2.0 * PI * 59.4,
            v0: PLANCK * 1.4e3,
            d_lattice: 5.18e-6,
            delta_x,
            mass: mass_rb87(),
        }
    }

    #[test]
    fn worked_example_values() {
        let (w, cubics) = atom_minima(&lattice(200e-9)).unwrap();
        assert!((w.distance / 5e-6 - 1.0).abs() < 0.02, "{}", w.distance);
        assert!((w.bias / 2.02e-32 - 1.0).abs() < 0.03, "{}", w.bias);
        assert!((w.omega_ref / (2.0 * PI * 350.0) - 1.0).abs() < 0.03);
        assert!(cubics.iter().all(|c| c.has_three_roots()));
        assert!(w.x_minus < w.barrier_x && w.barrier_x < w.x_plus);
    }

    #[test]
    fn symmetric_configuration() {
        let (w, _) = atom_minima(&lattice(0.0)).unwrap();
        assert!((w.x_minus + w.x_plus).abs() < 1e-12 * 5.18e-6);
        let scale = PLANCK * 1.4e3;
        assert!(w.bias.abs() < 1e-12 * scale);
        assert!(w.barrier_x.abs() < 1e-12 * 5.18e-6);
    }

    #[test]
    fn closed_form_agrees_with_exact_minima() {
        for dx in [-200e-9, 0.0, 150e-9, 200e-9] {
            let p = lattice(dx);
            let (xm, _, xp) = p.stationary_points().unwrap();
            let (cm, cp) = p.closed_form_minima();
            // quartic truncation error of the closed form
            assert!((xm - cm).abs() < 1e-3 * p.d_lattice, "{xm} {cm}");
            assert!((xp - cp).abs() < 1e-3 * p.d_lattice);
        }
    }

    #[test]
    fn newton_and_scan_agree() {
        let p = lattice(170e-9);
        let (xm, _, xp) = p.stationary_points().unwrap();
        let jl = p.minimum_jet(WellSide::Left).unwrap();
        let jr = p.minimum_jet(WellSide::Right).unwrap();
        assert!((jl.x - xm).abs() < 1e-12 * p.d_lattice);
        assert!((jr.x - xp).abs() < 1e-12 * p.d_lattice);
    }

    #[test]
    fn expansion_reproduces_minima() {
        let p = lattice(0.0);
        let e = atom_minima_expansion(&p).unwrap();
        let q = lattice(200e-9);
        let (xm, _, xp) = q.stationary_points().unwrap();
        assert!((xp - e.x_plus(200e-9)).abs() < 0.1e-9);
        assert!((xm - e.x_minus(200e-9)).abs() < 0.1e-9);
        // each minimum travels about 0.4 um over the inversion
        assert!((e.b * 400e-9 / 0.4e-6 - 1.0).abs() < 0.1);
    }

    #[test]
    fn displacement_outside_cell_rejected() {
        assert!(matches!(lattice(3e-6).validate(), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn lattice_too_shallow_is_single_well() {
        let mut p = lattice(0.0);
        p.v0 *= 1e-3;
        assert!(matches!(atom_minima(&p), Err(Error::NotDoubleWell(_))));
    }
}
