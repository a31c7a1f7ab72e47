//! Physical constants and scenario-scaled units.
//!
//! All numerics run in units where `hbar = m = Omega_0 = 1`. Conversion to and
//! from SI happens at the edges (analytics, exports).

/// CODATA 2018 constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub bohr_magneton: f64,
    pub atomic_mass_unit: f64,
}

pub const CONSTANTS: PhysicalConstants = PhysicalConstants {
    hbar: 1.054_571_817e-34,
    bohr_magneton: 9.274_010_078_3e-24,
    atomic_mass_unit: 1.660_539_066_60e-27,
};

pub const HBAR: f64 = CONSTANTS.hbar;
pub const PLANCK: f64 = 2.0 * std::f64::consts::PI * HBAR;
pub const ELECTRON_MASS_U: f64 = 5.485_799_090_65e-4;

/// Mass of a singly ionised beryllium-9 atom.
pub fn mass_be9_ion() -> f64 {
    (9.012_183_1 - ELECTRON_MASS_U) * CONSTANTS.atomic_mass_unit
}

/// Mass of a neutral rubidium-87 atom.
pub fn mass_rb87() -> f64 {
    86.909_180_531 * CONSTANTS.atomic_mass_unit
}

/// Scale factors from internal units to SI.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitScale {
    pub length_unit: f64,
    pub time_unit: f64,
    pub energy_unit: f64,
    pub mass_unit: f64,
}

impl UnitScale {
    /// Oscillator units: length `sqrt(hbar/(m omega))`, time `1/omega`,
    /// energy `hbar omega`.
    pub fn oscillator(mass: f64, omega: f64) -> Self {
        let length_unit = (HBAR / (mass * omega)).sqrt();
        let time_unit = 1.0 / omega;
        Self {
            length_unit,
            time_unit,
            energy_unit: mass * length_unit * length_unit / (time_unit * time_unit),
            mass_unit: mass,
        }
    }

    pub fn omega(&self) -> f64 {
        1.0 / self.time_unit
    }

    pub fn length_to_internal(&self, x: f64) -> f64 {
        x / self.length_unit
    }
    pub fn length_to_si(&self, x: f64) -> f64 {
        x * self.length_unit
    }
    pub fn time_to_internal(&self, t: f64) -> f64 {
        t / self.time_unit
    }
    pub fn time_to_si(&self, t: f64) -> f64 {
        t * self.time_unit
    }
    pub fn energy_to_internal(&self, e: f64) -> f64 {
        e / self.energy_unit
    }
    pub fn energy_to_si(&self, e: f64) -> f64 {
        e * self.energy_unit
    }
    /// Force in internal units of `energy_unit / length_unit`.
    pub fn force_to_internal(&self, f: f64) -> f64 {
        f * self.length_unit / self.energy_unit
    }
    pub fn force_to_si(&self, f: f64) -> f64 {
        f * self.energy_unit / self.length_unit
    }
}
