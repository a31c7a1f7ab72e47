//! Uniform periodic grids, wavefunctions and the spectral kinetic operator.
//!
//! Momentum ordering follows the standard FFT layout: index `j < n/2` holds
//! `k = j dk`, index `j >= n/2` holds `k = (j - n) dk`. The Nyquist entry
//! `j = n/2` is therefore `-pi/dx`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n_points: usize,
    dx: f64,
}

impl Grid {
    /// Periodic grid on `[x_min, x_max)`; `n_points` must be a power of two.
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if n_points < 2 || !n_points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n_points must be a power of two >= 2, got {n_points}"
            )));
        }
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
            return Err(Error::InvalidGrid(format!("bad extent [{x_min}, {x_max})")));
        }
        Ok(Self {
            x_min,
            x_max,
            n_points,
            dx: (x_max - x_min) / n_points as f64,
        })
    }

    pub fn centered(center: f64, span: f64, n_points: usize) -> Result<Self> {
        Self::new(center - 0.5 * span, center + 0.5 * span, n_points)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }
    pub fn x_max(&self) -> f64 {
        self.x_max
    }
    pub fn len(&self) -> usize {
        self.n_points
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    pub fn dx(&self) -> f64 {
        self.dx
    }
    pub fn span(&self) -> f64 {
        self.x_max - self.x_min
    }
    pub fn dk(&self) -> f64 {
        2.0 * PI / (self.n_points as f64 * self.dx)
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.x(i)).collect()
    }

    pub fn k(&self, j: usize) -> f64 {
        let n = self.n_points as isize;
        let j = j as isize;
        let signed = if j < n / 2 { j } else { j - n };
        signed as f64 * self.dk()
    }

    pub fn momenta(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.k(j)).collect()
    }

    /// Same extent, twice the points.
    pub fn refined(&self) -> Self {
        Self::new(self.x_min, self.x_max, 2 * self.n_points).expect("refining a valid grid")
    }

    pub(crate) fn same_as(&self, other: &Grid) -> bool {
        self.n_points == other.n_points
            && (self.x_min - other.x_min).abs() <= 1e-12 * self.span()
            && (self.dx - other.dx).abs() <= 1e-12 * self.dx
    }
}

/// Forward/inverse FFT plans for one grid size. The inverse is normalised.
#[derive(Clone)]
pub struct FourierPair {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch_len: usize,
    n: usize,
}

impl FourierPair {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Self {
            forward,
            inverse,
            scratch_len,
            n,
        }
    }

    pub fn scratch(&self) -> Vec<Complex64> {
        vec![Complex64::new(0.0, 0.0); self.scratch_len]
    }

    pub fn forward(&self, data: &mut [Complex64], scratch: &mut [Complex64]) {
        self.forward.process_with_scratch(data, scratch);
    }

    pub fn inverse(&self, data: &mut [Complex64], scratch: &mut [Complex64]) {
        self.inverse.process_with_scratch(data, scratch);
        let inv_n = 1.0 / self.n as f64;
        data.iter_mut().for_each(|z| *z *= inv_n);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Wavefunction {
    grid: Grid,
    amplitudes: Vec<Complex64>,
}

impl Wavefunction {
    pub fn new(grid: Grid, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        Ok(Self { grid, amplitudes })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> Self {
        let amplitudes = (0..grid.len()).map(|i| f(grid.x(i))).collect();
        Self { grid, amplitudes }
    }

    pub fn from_real(grid: Grid, values: &[f64]) -> Result<Self> {
        Self::new(grid, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }
    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }
    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.dx()
    }

    pub fn density(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|z| z.norm_sqr()).collect()
    }

    /// Probability on `x < boundary`.
    pub fn probability_below(&self, boundary: f64) -> f64 {
        let dx = self.grid.dx();
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| self.grid.x(*i) < boundary)
            .map(|(_, z)| z.norm_sqr())
            .sum::<f64>()
            * dx
    }

    pub fn mean_position(&self) -> f64 {
        let dx = self.grid.dx();
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(i, z)| self.grid.x(i) * z.norm_sqr())
            .sum::<f64>()
            * dx
            / self.norm_squared()
    }

    pub fn normalized(mut self) -> Result<Self> {
        self.normalize()?;
        Ok(self)
    }

    pub fn normalize(&mut self) -> Result<()> {
        let norm2 = self.norm_squared();
        if !(norm2 >= 1e-300) {
            return Err(Error::ZeroNorm);
        }
        let scale = 1.0 / norm2.sqrt();
        self.amplitudes.iter_mut().for_each(|z| *z *= scale);
        Ok(())
    }

    pub fn inner(&self, other: &Wavefunction) -> Result<Complex64> {
        inner_product(self, other)
    }
}

/// Returns a normalised copy of `psi`.
pub fn normalize(psi: &Wavefunction) -> Result<Wavefunction> {
    psi.clone().normalized()
}

/// `sum conj(a_i) b_i dx`.
pub fn inner_product(a: &Wavefunction, b: &Wavefunction) -> Result<Complex64> {
    if !a.grid.same_as(&b.grid) {
        return Err(Error::GridMismatch);
    }
    let sum: Complex64 = a
        .amplitudes
        .iter()
        .zip(&b.amplitudes)
        .map(|(x, y)| x.conj() * y)
        .sum();
    Ok(sum * a.grid.dx())
}

/// Applies `p^2/2m` spectrally, in units with `hbar = 1`.
pub fn apply_kinetic(
    fft: &FourierPair,
    grid: &Grid,
    mass: f64,
    psi: &[Complex64],
    out: &mut [Complex64],
    scratch: &mut [Complex64],
) {
    out.copy_from_slice(psi);
    fft.forward(out, scratch);
    for (j, z) in out.iter_mut().enumerate() {
        let k = grid.k(j);
        *z *= 0.5 * k * k / mass;
    }
    fft.inverse(out, scratch);
}

/// `<psi| p^2/2m + V |psi>` with the kinetic part evaluated in Fourier space
/// (`hbar = 1`). The state is not assumed normalised; the result is divided by
/// the norm.
pub fn expectation_energy(psi: &Wavefunction, potential: &[f64], mass: f64) -> Result<f64> {
    let fft = FourierPair::new(psi.grid.len());
    let mut scratch = fft.scratch();
    energy_with(&fft, &mut scratch, psi, potential, mass)
}

pub(crate) fn energy_with(
    fft: &FourierPair,
    scratch: &mut [Complex64],
    psi: &Wavefunction,
    potential: &[f64],
    mass: f64,
) -> Result<f64> {
    let grid = psi.grid;
    if potential.len() != grid.len() {
        return Err(Error::GridMismatch);
    }
    let mut buf = psi.amplitudes.clone();
    fft.forward(&mut buf, scratch);
    // Parseval: sum |phi_k|^2 k^2/2m * dx / n
    let kinetic: f64 = buf
        .iter()
        .enumerate()
        .map(|(j, z)| {
            let k = grid.k(j);
            z.norm_sqr() * 0.5 * k * k / mass
        })
        .sum::<f64>()
        * grid.dx()
        / grid.len() as f64;
    let pot: f64 = psi
        .amplitudes
        .iter()
        .zip(potential)
        .map(|(z, v)| z.norm_sqr() * v)
        .sum::<f64>()
        * grid.dx();
    Ok((kinetic + pot) / psi.norm_squared())
}
