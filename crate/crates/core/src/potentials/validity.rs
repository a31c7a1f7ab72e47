use serde::Serialize;

use super::{atom_minima_expansion, PotentialParams, WellSide};
use crate::error::Result;

/// Margins at or below this count as "much smaller than".
pub const MARGIN_OK: f64 = 0.1;
/// Margins above this are a failure; in between is a warning.
pub const MARGIN_WARN: f64 = 0.5;

const SWEEP_SAMPLES: usize = 201;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Validity {
    Ok,
    Warn,
    Fail,
}

impl Validity {
    pub fn classify(margin: f64) -> Self {
        if margin <= MARGIN_OK {
            Validity::Ok
        } else if margin <= MARGIN_WARN {
            Validity::Warn
        } else {
            Validity::Fail
        }
    }
}

/// How well a configuration satisfies the rigid parallel-transport regime
/// over the control range `[-lambda_max, lambda_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidityReport {
    pub lambda_max: f64,
    /// Ion only: `|gamma|` above which one minimum disappears.
    pub two_minima_bound: Option<f64>,
    /// Ion: `|gamma| / bound`. Atom: largest `|R/sqrt(Q^3)|` of the
    /// closed-form cubics at the control extremes. Values >= 1 mean a
    /// minimum is lost.
    pub two_minima_margin: f64,
    /// Ion only: the parallel-motion scale `(4 sqrt 2 / 3) sqrt(-alpha^3/beta)`.
    pub parallel_bound: Option<f64>,
    /// Quadratic over linear term of the minima trajectories.
    pub parallel_margin: f64,
    /// Linear frequency drift over the reference frequency.
    pub frequency_margin: f64,
    /// Largest max-minus-min of either well frequency over the sweep, rad/s.
    pub frequency_variation: f64,
    /// Max-minus-min of the minima separation over the sweep, m.
    pub distance_variation: f64,
    pub status: Validity,
    pub parallel_ok: bool,
}

pub fn validity_report(params: &PotentialParams, lambda_max: f64) -> Result<ValidityReport> {
    let lambda_max = lambda_max.abs();
    let (two_minima_bound, two_minima_margin, parallel_bound, parallel_margin, frequency_margin) =
        match params {
            PotentialParams::Ion(p) => {
                p.validate()?;
                let tb = p.two_minima_bound();
                let pb = p.parallel_bound();
                // the linear frequency term over Omega_0 reduces to the same ratio
                (Some(tb), lambda_max / tb, Some(pb), lambda_max / pb, lambda_max / pb)
            }
            PotentialParams::Atom(p) => {
                let e = atom_minima_expansion(&p.with_delta_x(0.0))?;
                let disc = [lambda_max, -lambda_max]
                    .iter()
                    .flat_map(|&l| p.with_delta_x(l).closed_form_cubics())
                    .map(|c| c.discriminant_ratio().abs())
                    .fold(0.0, f64::max);
                let par = if lambda_max == 0.0 {
                    0.0
                } else {
                    (e.c * lambda_max / e.b).abs()
                };
                (None, disc, None, par, (e.g * lambda_max / e.f).abs())
            }
        };

    let mut distances = Vec::with_capacity(SWEEP_SAMPLES);
    let mut omega_range = [(f64::INFINITY, f64::NEG_INFINITY); 2];
    let mass = params.mass();
    for i in 0..SWEEP_SAMPLES {
        let lambda = -lambda_max + 2.0 * lambda_max * i as f64 / (SWEEP_SAMPLES - 1) as f64;
        let cfg = params.with_control(lambda);
        let xm = params.minimum_jet(lambda, WellSide::Left)?.x;
        let xp = params.minimum_jet(lambda, WellSide::Right)?.x;
        distances.push(xp - xm);
        for (slot, x) in omega_range.iter_mut().zip([xm, xp]) {
            let w = (cfg.curvature(x) / mass).sqrt();
            slot.0 = slot.0.min(w);
            slot.1 = slot.1.max(w);
        }
    }
    let distance_variation = distances.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - distances.iter().cloned().fold(f64::INFINITY, f64::min);
    let frequency_variation = omega_range
        .iter()
        .map(|(lo, hi)| hi - lo)
        .fold(0.0, f64::max);

    let worst = parallel_margin.max(frequency_margin);
    let status = if two_minima_margin >= 1.0 {
        Validity::Fail
    } else {
        Validity::classify(worst)
    };
    Ok(ValidityReport {
        lambda_max,
        two_minima_bound,
        two_minima_margin,
        parallel_bound,
        parallel_margin,
        frequency_margin,
        frequency_variation,
        distance_variation,
        status,
        parallel_ok: worst < MARGIN_OK && two_minima_margin < 1.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{AtomLatticeParams, IonQuarticParams};
    use crate::units::{mass_be9_ion, mass_rb87, PLANCK};
    use std::f64::consts::PI;

    fn ion() -> PotentialParams {
        PotentialParams::Ion(IonQuarticParams {
            alpha: -4.7e-12,
            beta: 5.2e-3,
            gamma: 86.4e-21,
            mass: mass_be9_ion(),
        })
    }

    #[test]
    fn ion_worked_example() {
        let r = validity_report(&ion(), 86.4e-21).unwrap();
        assert!((r.frequency_variation / (2.0 * PI * 3.7e3) - 1.0).abs() < 0.15);
        assert!((r.distance_variation / 3e-12 - 1.0).abs() < 0.5);
        assert_eq!(r.status, Validity::Ok);
        assert!(r.parallel_ok);
        assert!(r.parallel_margin < 1e-3);
    }

    #[test]
    fn zero_control_has_zero_margins() {
        let r = validity_report(&ion(), 0.0).unwrap();
        assert_eq!(r.parallel_margin, 0.0);
        assert_eq!(r.two_minima_margin, 0.0);
        assert_eq!(r.frequency_margin, 0.0);
        assert_eq!(r.frequency_variation, 0.0);
        assert_eq!(r.status, Validity::Ok);
    }

    #[test]
    fn large_slope_fails() {
        let PotentialParams::Ion(p) = ion() else { unreachable!() };
        let r = validity_report(&ion(), 0.2 * p.parallel_bound()).unwrap();
        assert_eq!(r.status, Validity::Warn);
        assert!(!r.parallel_ok);
        assert!(validity_report(&ion(), 1.1 * p.two_minima_bound()).is_err());
    }

    #[test]
    fn atom_worked_example() {
        let p = PotentialParams::Atom(AtomLatticeParams {
            omega: 2.0 * PI * 59.4,
            v0: PLANCK * 1.4e3,
            d_lattice: 5.18e-6,
            delta_x: 200e-9,
            mass: mass_rb87(),
        });
        let r = validity_report(&p, 200e-9).unwrap();
        assert!((r.frequency_variation / (2.0 * PI * 0.2) - 1.0).abs() < 0.5);
        assert!(r.parallel_ok);
        assert!(r.two_minima_margin < 1.0);
    }

    #[test]
    fn classify_thresholds() {
        assert_eq!(Validity::classify(0.1), Validity::Ok);
        assert_eq!(Validity::classify(0.2), Validity::Warn);
        assert_eq!(Validity::classify(0.6), Validity::Fail);
    }
}
