//! Run configuration. Every physical key carries its SI unit in the name.
//!
//! ```toml
//! [scenario]
//! preset = "ion-be9"
//! gamma0_N = 8.64e-20
//! well = "left"
//!
//! [protocol]
//! kinds = ["compensated", "faquad"]
//! tf_min_s = 2e-8
//! tf_max_s = 5e-7
//! tf_points = 20
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::{EigenMode, Scenario};
use crate::potentials::{AtomLatticeParams, IonQuarticParams, PotentialParams, WellSide};
use crate::protocols::ProtocolKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CustomKind {
    Ion,
    Atom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
    Gnuplot,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    /// Required without a preset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<CustomKind>,
    #[serde(default, skip_serializing_if = "Option::is_none", rename = "alpha_N_per_m")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", rename = "beta_N_per_m3")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", rename = "gamma0_N")]
    pub gamma0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", rename = "omega_rad_per_s")]
    pub omega: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", rename = "v0_J")]
    pub v0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", rename = "d_lattice_m")]
    pub d_lattice: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", rename = "delta_x0_m")]
    pub delta_x0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", rename = "mass_kg")]
    pub mass: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub well: Option<WellSide>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kinds: Option<Vec<ProtocolKind>>,
    #[serde(default, skip_serializing_if = "Option::is_none", rename = "t_final_s")]
    pub t_final: Option<f64>,
    /// Ion control end points.
    #[serde(default, skip_serializing_if = "Option::is_none", rename = "gamma_start_N")]
    pub gamma_start: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", rename = "gamma_end_N")]
    pub gamma_end: Option<f64>,
    /// Atom control end points.
    #[serde(default, skip_serializing_if = "Option::is_none", rename = "delta_x_start_m")]
    pub delta_x_start: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", rename = "delta_x_end_m")]
    pub delta_x_end: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", rename = "tf_list_s")]
    pub tf_list: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none", rename = "tf_min_s")]
    pub tf_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", rename = "tf_max_s")]
    pub tf_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tf_points: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsSection {
    /// Grid span in oscillator lengths.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub span_a0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none", rename = "dt_s")]
    pub dt: Option<f64>,
    /// Density snapshot stride in time steps.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshot_stride: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eigenstates: Option<EigenMode>,
    /// Number of levels for `eig`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub states: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub formats: Option<Vec<OutputFormat>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub scenario: ScenarioSection,
    #[serde(default)]
    pub protocol: ProtocolSection,
    #[serde(default)]
    pub numerics: NumericsSection,
    #[serde(default)]
    pub output: OutputSection,
}

fn cfg_err(e: impl std::fmt::Display) -> Error {
    Error::Config(e.to_string())
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(cfg_err)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(cfg_err)
    }

    /// Reads TOML, or JSON when the file name ends in `.json`.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| cfg_err(format!("{}: {e}", path.display())))?;
        let is_json = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("json"));
        if is_json {
            Self::from_json_str(&text)
        } else {
            Self::from_toml_str(&text)
        }
    }

    /// Canonical TOML: fixed section and key order, unset keys omitted.
    pub fn canonical(&self) -> Result<String> {
        toml::to_string(self).map_err(cfg_err)
    }

    pub fn scenario(&self) -> Result<Scenario> {
        let s = &self.scenario;
        let mut scenario = match &s.preset {
            Some(name) => {
                let base = Scenario::preset(name).map_err(cfg_err)?;
                if s.kind.is_some_and(|k| k != kind_of(&base.params)) {
                    return Err(cfg_err(format!("`kind` contradicts preset `{name}`")));
                }
                let params = override_params(base.params, s)?;
                let mut sc = base.with_lambda0(params.control());
                sc.params = params;
                sc
            }
            None => {
                let kind = s
                    .kind
                    .ok_or_else(|| cfg_err("[scenario] needs `preset` or `kind`"))?;
                let params = custom_params(kind, s)?;
                Scenario::custom(params, WellSide::Left)
            }
        };
        if let Some(w) = s.well {
            scenario = scenario.with_well(w);
        }
        if let Some(span) = self.numerics.span_a0 {
            if !(span > 0.0) {
                return Err(cfg_err("span_a0 must be positive"));
            }
            scenario.grid.span_a0 = span;
        }
        if let Some(n) = self.numerics.n_points {
            if n < 16 || !n.is_power_of_two() {
                return Err(cfg_err("n_points must be a power of two >= 16"));
            }
            scenario.grid.n_points = n;
        }
        if let Some(m) = self.numerics.eigenstates {
            scenario = scenario.with_eigen_mode(m);
        }
        Ok(scenario)
    }

    /// Control end points; the inversion `lambda0 -> -lambda0` by default.
    pub fn endpoints(&self, scenario: &Scenario) -> Result<(f64, f64)> {
        let p = &self.protocol;
        let (start, end, other) = if scenario.is_atom() {
            (p.delta_x_start, p.delta_x_end, p.gamma_start.or(p.gamma_end))
        } else {
            (p.gamma_start, p.gamma_end, p.delta_x_start.or(p.delta_x_end))
        };
        if other.is_some() {
            return Err(cfg_err("protocol end points use the other scenario's control"));
        }
        let start = start.unwrap_or(scenario.lambda0);
        let end = end.unwrap_or(-start);
        Ok((start, end))
    }

    /// Explicit list, or a log-spaced range, or `None`.
    pub fn tf_grid(&self) -> Result<Option<Vec<f64>>> {
        let p = &self.protocol;
        if let Some(list) = &p.tf_list {
            if p.tf_min.is_some() || p.tf_max.is_some() {
                return Err(cfg_err("give either tf_list_s or a tf_min_s/tf_max_s range"));
            }
            return Ok(Some(list.clone()));
        }
        match (p.tf_min, p.tf_max) {
            (None, None) => Ok(None),
            (Some(lo), Some(hi)) => {
                let n = p.tf_points.unwrap_or(20);
                if !(lo > 0.0 && hi >= lo) || n == 0 {
                    return Err(cfg_err("tf range needs 0 < tf_min_s <= tf_max_s and tf_points >= 1"));
                }
                Ok(Some(crate::experiments::log_spaced(lo, hi, n)))
            }
            _ => Err(cfg_err("tf_min_s and tf_max_s go together")),
        }
    }

    pub fn has_format(&self, f: OutputFormat) -> bool {
        self.output.formats.as_ref().is_none_or(|v| v.contains(&f))
    }
}

fn kind_of(p: &PotentialParams) -> CustomKind {
    match p {
        PotentialParams::Ion(_) => CustomKind::Ion,
        PotentialParams::Atom(_) => CustomKind::Atom,
    }
}

fn reject_foreign(s: &ScenarioSection, kind: CustomKind) -> Result<()> {
    let foreign: &[(&str, Option<f64>)] = match kind {
        CustomKind::Ion => &[
            ("omega_rad_per_s", s.omega),
            ("v0_J", s.v0),
            ("d_lattice_m", s.d_lattice),
            ("delta_x0_m", s.delta_x0),
        ],
        CustomKind::Atom => &[
            ("alpha_N_per_m", s.alpha),
            ("beta_N_per_m3", s.beta),
            ("gamma0_N", s.gamma0),
        ],
    };
    match foreign.iter().find(|(_, v)| v.is_some()) {
        Some((k, _)) => Err(cfg_err(format!("`{k}` does not apply to this scenario"))),
        None => Ok(()),
    }
}

fn override_params(base: PotentialParams, s: &ScenarioSection) -> Result<PotentialParams> {
    reject_foreign(s, kind_of(&base))?;
    Ok(match base {
        PotentialParams::Ion(p) => PotentialParams::Ion(IonQuarticParams {
            alpha: s.alpha.unwrap_or(p.alpha),
            beta: s.beta.unwrap_or(p.beta),
            gamma: s.gamma0.unwrap_or(p.gamma),
            mass: s.mass.unwrap_or(p.mass),
        }),
        PotentialParams::Atom(p) => PotentialParams::Atom(AtomLatticeParams {
            omega: s.omega.unwrap_or(p.omega),
            v0: s.v0.unwrap_or(p.v0),
            d_lattice: s.d_lattice.unwrap_or(p.d_lattice),
            delta_x: s.delta_x0.unwrap_or(p.delta_x),
            mass: s.mass.unwrap_or(p.mass),
        }),
    })
}

fn need(v: Option<f64>, key: &str) -> Result<f64> {
    v.ok_or_else(|| cfg_err(format!("custom scenario is missing `{key}`")))
}

fn custom_params(kind: CustomKind, s: &ScenarioSection) -> Result<PotentialParams> {
    reject_foreign(s, kind)?;
    Ok(match kind {
        CustomKind::Ion => PotentialParams::Ion(IonQuarticParams {
            alpha: need(s.alpha, "alpha_N_per_m")?,
            beta: need(s.beta, "beta_N_per_m3")?,
            gamma: need(s.gamma0, "gamma0_N")?,
            mass: need(s.mass, "mass_kg")?,
        }),
        CustomKind::Atom => PotentialParams::Atom(AtomLatticeParams {
            omega: need(s.omega, "omega_rad_per_s")?,
            v0: need(s.v0, "v0_J")?,
            d_lattice: need(s.d_lattice, "d_lattice_m")?,
            delta_x: need(s.delta_x0, "delta_x0_m")?,
            mass: need(s.mass, "mass_kg")?,
        }),
    })
}
