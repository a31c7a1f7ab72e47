use std::f64::consts::PI;

use super::{
    assemble_analysis, implicit_jet, CubicIntermediates, IonQuarticParams, MinimumJet,
    PotentialParams, WellAnalysis, WellSide,
};
use crate::error::{Error, Result};

impl IonQuarticParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha < 0.0) {
            return Err(Error::InvalidParameter(format!("alpha must be negative, got {}", self.alpha)));
        }
        if !(self.beta > 0.0) {
            return Err(Error::InvalidParameter(format!("beta must be positive, got {}", self.beta)));
        }
        if !(self.mass > 0.0) || !self.gamma.is_finite() {
            return Err(Error::InvalidParameter("mass must be positive and gamma finite".into()));
        }
        Ok(())
    }

    pub fn with_gamma(&self, gamma: f64) -> Self {
        Self { gamma, ..*self }
    }

    pub fn value(&self, x: f64) -> f64 {
        let x2 = x * x;
        self.beta * x2 * x2 + self.alpha * x2 + self.gamma * x
    }

    pub fn slope(&self, x: f64) -> f64 {
        4.0 * self.beta * x * x * x + 2.0 * self.alpha * x + self.gamma
    }

    pub fn curvature(&self, x: f64) -> f64 {
        12.0 * self.beta * x * x + 2.0 * self.alpha
    }

    /// `V(c + u) - V(c)` expanded in `u`.
    pub fn relative_value(&self, c: f64, u: f64) -> f64 {
        let (b, a) = (self.beta, self.alpha);
        let u2 = u * u;
        u * (4.0 * b * c * c * c + 2.0 * a * c + self.gamma)
            + u2 * (6.0 * b * c * c + a)
            + u2 * u * 4.0 * b * c
            + u2 * u2 * b
    }

    /// `(2/3)^{3/2} sqrt(-alpha^3/beta)`: above it the second minimum vanishes.
    pub fn two_minima_bound(&self) -> f64 {
        (2.0f64 / 3.0).powf(1.5) * (-self.alpha.powi(3) / self.beta).sqrt()
    }

    /// `(4 sqrt 2 / 3) sqrt(-alpha^3/beta)`: scale against which `|gamma|`
    /// must be small for the minima to move in parallel.
    pub fn parallel_bound(&self) -> f64 {
        4.0 * 2f64.sqrt() / 3.0 * (-self.alpha.powi(3) / self.beta).sqrt()
    }

    /// `2 sqrt(-alpha/m)`, the well frequency at `gamma = 0`.
    pub fn omega_ref(&self) -> f64 {
        2.0 * (-self.alpha / self.mass).sqrt()
    }

    pub fn cubic(&self) -> CubicIntermediates {
        CubicIntermediates::from_coefficients(
            0.0,
            2.0 * self.alpha / (4.0 * self.beta),
            self.gamma / (4.0 * self.beta),
        )
    }

    /// `(x_minus, barrier, x_plus)` from the trigonometric cubic solution.
    pub fn stationary_points(&self) -> Result<(f64, f64, f64)> {
        self.validate()?;
        let cubic = self.cubic();
        if !cubic.has_three_roots() {
            return Err(Error::NotDoubleWell(format!(
                "|gamma| = {:e} N is not below the two-minima bound {:e} N",
                self.gamma.abs(),
                self.two_minima_bound()
            )));
        }
        let x_minus = cubic.root(0.0);
        let x_plus = cubic.root(2.0 * PI);
        let barrier = cubic.root(-2.0 * PI);
        Ok((x_minus, barrier, x_plus))
    }

    pub fn minimum_jet(&self, side: WellSide) -> Result<MinimumJet> {
        let (xm, _, xp) = self.stationary_points()?;
        let x = match side {
            WellSide::Left => xm,
            WellSide::Right => xp,
        };
        // dV/dx = 4 beta x^3 + 2 alpha x + gamma; d/dgamma = 1
        implicit_jet(x, self.curvature(x), 24.0 * self.beta * x, 1.0, 0.0, 0.0)
    }
}

/// Exact minima, barrier, distance, bias and frequencies of the quartic
/// well. `params.gamma` is taken as the initial slope of an inversion to
/// `-gamma`, which fixes the reported displacement and ratio.
pub fn ion_minima(params: &IonQuarticParams) -> Result<(WellAnalysis, CubicIntermediates)> {
    let points = params.stationary_points()?;
    let (mm, _, mp) = params.with_gamma(-params.gamma).stationary_points()?;
    let analysis = assemble_analysis(
        &PotentialParams::Ion(*params),
        points,
        (mm, mp),
        params.omega_ref(),
    );
    Ok((analysis, params.cubic()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IonApproxMinima {
    pub x_minus: f64,
    pub x_plus: f64,
}

/// Second-order expansion of the minima in `gamma`.
pub fn ion_minima_approx(params: &IonQuarticParams) -> IonApproxMinima {
    let (a, b, g) = (params.alpha, params.beta, params.gamma);
    let half = (-a / b).sqrt() / 2f64.sqrt();
    let linear = g / (4.0 * a);
    let quad = 3.0 * g * g * (-a * b).sqrt() / (16.0 * 2f64.sqrt() * a * a * a);
    IonApproxMinima {
        x_minus: -half + linear - quad,
        x_plus: half + linear + quad,
    }
}
