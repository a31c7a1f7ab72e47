//! Stationary states of `H = p^2/2m + V` on a periodic grid, in units with
//! `hbar = 1`.
//!
//! The finite-difference tridiagonal problem is solved first (Sturm bisection
//! and inverse iteration). By default its eigenvectors seed a block Davidson
//! refinement against the Fourier-grid Hamiltonian, the same operator the
//! split-step propagator uses, with the tridiagonal matrix as preconditioner.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{FourierPair, Grid, Wavefunction};
use crate::potentials::WellSide;

/// Relative residual at which a Davidson Ritz pair counts as converged.
const RESIDUAL_TOL: f64 = 1e-11;
const MAX_ITERATIONS: usize = 400;
/// Shift (relative, above the potential minimum) that triggers `GridTooCoarse`.
pub const REFINEMENT_TOL: f64 = 1e-6;
/// States with a left fraction inside this band are `Ambiguous`.
pub const AMBIGUOUS_BAND: (f64, f64) = (0.45, 0.55);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Discretization {
    /// Second-order central differences only.
    FiniteDifference,
    /// Finite differences refined against the Fourier-grid Hamiltonian.
    #[default]
    Spectral,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenSolution {
    /// Ascending, in the units of the potential samples.
    pub energies: Vec<f64>,
    pub states: Vec<Wavefunction>,
    pub grid: Grid,
    /// `|H phi_n - E_n phi_n|` with `phi_n` normalised on the grid.
    pub residuals: Vec<f64>,
    pub discretization: Discretization,
}

impl EigenSolution {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }
}

pub fn solve_stationary(potential: &[f64], grid: &Grid, mass: f64, k: usize) -> Result<EigenSolution> {
    solve_stationary_with(potential, grid, mass, k, Discretization::default())
}

pub fn solve_stationary_with(
    potential: &[f64],
    grid: &Grid,
    mass: f64,
    k: usize,
    discretization: Discretization,
) -> Result<EigenSolution> {
    let n = grid.len();
    if potential.len() != n {
        return Err(Error::GridMismatch);
    }
    if k == 0 || k > n / 4 {
        return Err(Error::InvalidParameter(format!("k = {k} must be in 1..={}", n / 4)));
    }
    if !(mass > 0.0) {
        return Err(Error::InvalidParameter("mass must be positive".into()));
    }
    if potential.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("potential must be finite on the grid".into()));
    }
    let v_min = potential.iter().cloned().fold(f64::INFINITY, f64::min);
    let shifted: Vec<f64> = potential.iter().map(|v| v - v_min).collect();
    let tri = Tridiagonal::hamiltonian(&shifted, grid.dx(), mass);

    // a few guard vectors speed up convergence of the highest requested state
    let block = (k + k.min(4) + 2).min(n / 2);
    let (mut energies, mut vectors) = tri.lowest(block)?;
    let mut op = SpectralHamiltonian::new(grid, mass, &shifted);
    if discretization == Discretization::Spectral {
        (energies, vectors) = davidson(&mut op, &tri, vectors, k)?;
    }
    energies.truncate(k);
    vectors.truncate(k);

    let scale = grid.dx().sqrt().recip();
    let mut residuals = Vec::with_capacity(k);
    let mut hv = vec![0.0; n];
    for (e, v) in energies.iter().zip(&vectors) {
        match discretization {
            Discretization::Spectral => op.apply(v, &mut hv),
            Discretization::FiniteDifference => tri.apply(v, &mut hv),
        }
        let r: f64 = hv.iter().zip(v).map(|(h, x)| (h - e * x).powi(2)).sum();
        residuals.push(r.sqrt());
    }
    let states = vectors
        .into_iter()
        .map(|mut v| {
            fix_sign(&mut v);
            let amps = v.iter().map(|x| Complex64::new(x * scale, 0.0)).collect();
            Wavefunction::new(*grid, amps)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EigenSolution {
        energies: energies.iter().map(|e| e + v_min).collect(),
        states,
        grid: *grid,
        residuals,
        discretization,
    })
}

/// Solves on `grid` and on the doubled grid over the same span; fails with
/// `GridTooCoarse` if any energy, measured from the potential minimum, moves
/// by more than [`REFINEMENT_TOL`] relative.
pub fn solve_stationary_checked(
    potential: impl Fn(f64) -> f64,
    grid: &Grid,
    mass: f64,
    k: usize,
) -> Result<EigenSolution> {
    let coarse_v: Vec<f64> = grid.points().into_iter().map(&potential).collect();
    let sol = solve_stationary(&coarse_v, grid, mass, k)?;
    let fine = grid.refined();
    let fine_v: Vec<f64> = fine.points().into_iter().map(&potential).collect();
    let fine_sol = solve_stationary(&fine_v, &fine, mass, k)?;
    let v_min = coarse_v
        .iter()
        .chain(&fine_v)
        .cloned()
        .fold(f64::INFINITY, f64::min);
    for (level, (a, b)) in sol.energies.iter().zip(&fine_sol.energies).enumerate() {
        let rel = (a - b).abs() / (b - v_min).abs().max(f64::MIN_POSITIVE);
        if rel > REFINEMENT_TOL {
            return Err(Error::GridTooCoarse {
                level,
                relative_shift: rel,
            });
        }
    }
    Ok(sol)
}

fn fix_sign(v: &mut [f64]) {
    let max = v.iter().fold(0.0, |m: f64, x| m.max(x.abs()));
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-3 * max) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// Symmetric tridiagonal matrix.
struct Tridiagonal {
    diag: Vec<f64>,
    off: f64,
}

impl Tridiagonal {
    fn hamiltonian(potential: &[f64], dx: f64, mass: f64) -> Self {
        let t = 1.0 / (2.0 * mass * dx * dx);
        Self {
            diag: potential.iter().map(|v| v + 2.0 * t).collect(),
            off: -t,
        }
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let n = x.len();
        for i in 0..n {
            let mut s = self.diag[i] * x[i];
            if i > 0 {
                s += self.off * x[i - 1];
            }
            if i + 1 < n {
                s += self.off * x[i + 1];
            }
            out[i] = s;
        }
    }

    /// Number of eigenvalues below `x`.
    fn sturm_count(&self, x: f64) -> usize {
        let e2 = self.off * self.off;
        let mut count = 0;
        let mut q = 1.0;
        for (i, d) in self.diag.iter().enumerate() {
            q = if i == 0 { d - x } else { d - x - e2 / q };
            if q == 0.0 {
                q = -f64::EPSILON * (d.abs() + self.off.abs());
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Solves `(T - shift) x = b` by Gaussian elimination without pivoting;
    /// vanishing pivots are nudged so that near-singular shifts still work.
    fn solve_shifted(&self, shift: f64, b: &[f64], x: &mut [f64]) {
        let n = b.len();
        let tiny = f64::EPSILON * (self.diag.iter().fold(0.0, |m: f64, d| m.max(d.abs())) + shift.abs());
        let mut c = vec![0.0; n];
        let mut pivot = self.diag[0] - shift;
        if pivot.abs() < tiny {
            pivot = tiny;
        }
        x[0] = b[0] / pivot;
        for i in 1..n {
            c[i - 1] = self.off / pivot;
            pivot = self.diag[i] - shift - self.off * c[i - 1];
            if pivot.abs() < tiny {
                pivot = tiny.copysign(pivot);
            }
            x[i] = (b[i] - self.off * x[i - 1]) / pivot;
        }
        for i in (0..n - 1).rev() {
            x[i] -= c[i] * x[i + 1];
        }
    }

    fn eigenvalue(&self, index: usize) -> f64 {
        let radius = 2.0 * self.off.abs();
        let mut lo = self.diag.iter().fold(f64::INFINITY, |m, d| m.min(*d)) - radius;
        let mut hi = self.diag.iter().fold(f64::NEG_INFINITY, |m, d| m.max(*d)) + radius;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.sturm_count(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Lowest `k` eigenpairs with unit-norm vectors.
    fn lowest(&self, k: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
        let n = self.diag.len();
        let mut values = Vec::with_capacity(k);
        let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(k);
        let scale = self.diag.iter().fold(0.0, |m: f64, d| m.max(d.abs())) + self.off.abs();
        let mut y = vec![0.0; n];
        for j in 0..k {
            let lambda = self.eigenvalue(j);
            let mut v: Vec<f64> = (0..n)
                .map(|i| 1.0 + 0.1 * ((i * (j + 3)) as f64 * 0.618).sin())
                .collect();
            let shift = lambda + 1e-13 * scale;
            for _ in 0..4 {
                self.solve_shifted(shift, &v, &mut y);
                std::mem::swap(&mut v, &mut y);
                orthogonalize(&mut v, &vectors);
                if !normalize_real(&mut v) {
                    return Err(Error::ConvergenceFailure(format!(
                        "inverse iteration collapsed at level {j}"
                    )));
                }
            }
            values.push(lambda);
            vectors.push(v);
        }
        Ok((values, vectors))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize_real(v: &mut [f64]) -> bool {
    let norm = dot(v, v).sqrt();
    if !(norm > 1e-300) || !norm.is_finite() {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= norm);
    true
}

/// Two passes of classical Gram-Schmidt against an orthonormal set.
fn orthogonalize(v: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for b in basis {
            let c = dot(v, b);
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
    }
}

/// `p^2/2m + V` with the kinetic term applied through the FFT.
struct SpectralHamiltonian {
    fft: FourierPair,
    kinetic: Vec<f64>,
    potential: Vec<f64>,
    buf: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl SpectralHamiltonian {
    fn new(grid: &Grid, mass: f64, potential: &[f64]) -> Self {
        let fft = FourierPair::new(grid.len());
        let scratch = fft.scratch();
        Self {
            kinetic: grid.momenta().iter().map(|k| 0.5 * k * k / mass).collect(),
            potential: potential.to_vec(),
            buf: vec![Complex64::new(0.0, 0.0); grid.len()],
            scratch,
            fft,
        }
    }

    fn apply(&mut self, x: &[f64], out: &mut [f64]) {
        for (b, v) in self.buf.iter_mut().zip(x) {
            *b = Complex64::new(*v, 0.0);
        }
        self.fft.forward(&mut self.buf, &mut self.scratch);
        for (b, t) in self.buf.iter_mut().zip(&self.kinetic) {
            *b *= t;
        }
        self.fft.inverse(&mut self.buf, &mut self.scratch);
        for ((o, b), (v, xi)) in out.iter_mut().zip(&self.buf).zip(self.potential.iter().zip(x)) {
            *o = b.re + v * xi;
        }
    }
}

/// Block Davidson with Olsen-corrected tridiagonal preconditioning. Returns
/// as many Ritz pairs as `start` has vectors; the lowest `wanted` are
/// converged.
fn davidson(
    op: &mut SpectralHamiltonian,
    precond: &Tridiagonal,
    start: Vec<Vec<f64>>,
    wanted: usize,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = start[0].len();
    let block = start.len();
    let max_basis = (6 * block).max(block + 8).min(n);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(max_basis);
    let mut images: Vec<Vec<f64>> = Vec::with_capacity(max_basis);
    for mut v in start {
        orthogonalize(&mut v, &basis);
        if normalize_real(&mut v) {
            let mut hv = vec![0.0; n];
            op.apply(&v, &mut hv);
            basis.push(v);
            images.push(hv);
        }
    }
    let mut t = vec![0.0; n];
    let mut u = vec![0.0; n];
    let mut worst = f64::INFINITY;
    for _ in 0..MAX_ITERATIONS {
        let m = basis.len();
        let g = DMatrix::from_fn(m, m, |i, j| 0.5 * (dot(&basis[i], &images[j]) + dot(&basis[j], &images[i])));
        let eig = SymmetricEigen::new(g);
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let nb = block.min(m);
        let mut ritz_vals = Vec::with_capacity(nb);
        let mut ritz_vecs = Vec::with_capacity(nb);
        let mut ritz_imgs = Vec::with_capacity(nb);
        for &c in order.iter().take(nb) {
            let coeffs = eig.eigenvectors.column(c);
            let mut y = vec![0.0; n];
            let mut hy = vec![0.0; n];
            for (a, (b, h)) in coeffs.iter().zip(basis.iter().zip(&images)) {
                y.iter_mut().zip(b).for_each(|(yi, bi)| *yi += a * bi);
                hy.iter_mut().zip(h).for_each(|(yi, hi)| *yi += a * hi);
            }
            ritz_vals.push(eig.eigenvalues[c]);
            ritz_vecs.push(y);
            ritz_imgs.push(hy);
        }

        let mut corrections = Vec::new();
        worst = 0.0;
        for i in 0..nb {
            let theta = ritz_vals[i];
            let r: Vec<f64> = ritz_imgs[i].iter().zip(&ritz_vecs[i]).map(|(h, y)| h - theta * y).collect();
            let rn = dot(&r, &r).sqrt();
            let rel = rn / theta.abs().max(1e-300);
            if i < wanted {
                worst = worst.max(rel);
            }
            if rel <= RESIDUAL_TOL {
                continue;
            }
            precond.solve_shifted(theta, &r, &mut t);
            precond.solve_shifted(theta, &ritz_vecs[i], &mut u);
            let denom = dot(&ritz_vecs[i], &u);
            if denom.abs() > 1e-300 {
                let eps = dot(&ritz_vecs[i], &t) / denom;
                t.iter_mut().zip(&u).for_each(|(a, b)| *a -= eps * b);
            }
            corrections.push(t.clone());
        }
        if worst <= RESIDUAL_TOL {
            return Ok((ritz_vals, ritz_vecs));
        }

        if basis.len() + corrections.len() > max_basis {
            basis = ritz_vecs;
            images = ritz_imgs;
        }
        let before = basis.len();
        for mut c in corrections {
            orthogonalize(&mut c, &basis);
            if normalize_real(&mut c) {
                // a second pass guards against loss of orthogonality
                orthogonalize(&mut c, &basis);
                if !normalize_real(&mut c) {
                    continue;
                }
                let mut hc = vec![0.0; n];
                op.apply(&c, &mut hc);
                basis.push(c);
                images.push(hc);
            }
        }
        if basis.len() == before {
            break;
        }
    }
    Err(Error::ConvergenceFailure(format!(
        "Davidson refinement stalled at relative residual {worst:e}"
    )))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WellLabel {
    pub side: WellSide,
    pub mass_fraction: f64,
    pub index_in_spectrum: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WellLabels(pub Vec<WellLabel>);

impl WellLabels {
    pub fn lowest(&self, side: WellSide) -> Result<&WellLabel> {
        self.0
            .iter()
            .find(|l| l.side == side)
            .ok_or(Error::NoWellState(side.name()))
    }

    pub fn lowest_left(&self) -> Result<&WellLabel> {
        self.lowest(WellSide::Left)
    }

    pub fn lowest_right(&self) -> Result<&WellLabel> {
        self.lowest(WellSide::Right)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, WellLabel> {
        self.0.iter()
    }
}

pub fn classify_state(psi: &Wavefunction, barrier_x: f64, index: usize) -> Result<WellLabel> {
    let left = psi.probability_below(barrier_x) / psi.norm_squared();
    if left >= AMBIGUOUS_BAND.0 && left <= AMBIGUOUS_BAND.1 {
        return Err(Error::Ambiguous { index, fraction: left });
    }
    let (side, mass_fraction) = if left > 0.5 {
        (WellSide::Left, left)
    } else {
        (WellSide::Right, 1.0 - left)
    };
    Ok(WellLabel {
        side,
        mass_fraction,
        index_in_spectrum: index,
    })
}

pub fn classify_wells(sol: &EigenSolution, barrier_x: f64) -> Result<WellLabels> {
    if sol.is_empty() {
        return Err(Error::InvalidParameter("empty eigen solution".into()));
    }
    sol.states
        .iter()
        .enumerate()
        .map(|(i, s)| classify_state(s, barrier_x, i))
        .collect::<Result<Vec<_>>>()
        .map(WellLabels)
}

/// Normalised harmonic-oscillator state `phi_n(x - center)` with `hbar = 1`.
pub fn harmonic_eigenstate(n: usize, omega: f64, center: f64, mass: f64, grid: &Grid) -> Result<Wavefunction> {
    if !(omega > 0.0) || !(mass > 0.0) {
        return Err(Error::InvalidParameter("omega and mass must be positive".into()));
    }
    let a0 = (mass * omega).sqrt().recip();
    let extent = ((2 * n + 1) as f64).sqrt() * a0;
    if extent >= grid.span() / 4.0 || center < grid.x_min() || center >= grid.x_max() {
        return Err(Error::GridTooSmall(format!(
            "state n = {n} with extent {extent:e} at {center:e} does not fit a grid of span {:e}",
            grid.span()
        )));
    }
    let prefactor = (mass * omega / std::f64::consts::PI).powf(0.25);
    let values: Vec<f64> = grid
        .points()
        .into_iter()
        .map(|x| {
            let xi = (x - center) / a0;
            // recurrence for the normalised Hermite functions
            let (mut prev, mut cur) = (0.0, (-0.5 * xi * xi).exp());
            for k in 0..n {
                let next = (2.0 / (k + 1) as f64).sqrt() * xi * cur - (k as f64 / (k + 1) as f64).sqrt() * prev;
                prev = cur;
                cur = next;
            }
            prefactor * cur
        })
        .collect();
    Wavefunction::from_real(*grid, &values)?.normalized()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::inner_product;

    fn harmonic(grid: &Grid, omega: f64, mass: f64, c: f64) -> Vec<f64> {
        grid.points().iter().map(|x| 0.5 * mass * omega * omega * (x - c) * (x - c)).collect()
    }

    #[test]
    fn harmonic_ladder() {
        let g = Grid::centered(0.0, 40.0, 512).unwrap();
        let sol = solve_stationary(&harmonic(&g, 1.0, 1.0, 0.0), &g, 1.0, 6).unwrap();
        for (n, e) in sol.energies.iter().enumerate() {
            assert!((e / (n as f64 + 0.5) - 1.0).abs() < 1e-6, "E_{n} = {e}");
        }
        for (e, r) in sol.energies.iter().zip(&sol.residuals) {
            assert!(*r < 1e-8 * e.abs());
        }
    }

    #[test]
    fn harmonic_ladder_in_other_units() {
        let (omega, mass) = (2.7f64, 0.3f64);
        let g = Grid::centered(1.0, 40.0 / (mass * omega).sqrt(), 512).unwrap();
        let sol = solve_stationary(&harmonic(&g, omega, mass, 1.0), &g, mass, 6).unwrap();
        for (n, e) in sol.energies.iter().enumerate() {
            assert!((e / ((n as f64 + 0.5) * omega) - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn finite_difference_converges_quadratically() {
        let coarse = Grid::centered(0.0, 20.0, 128).unwrap();
        let fine = coarse.refined();
        let err = |g: &Grid| {
            let s = solve_stationary_with(&harmonic(g, 1.0, 1.0, 0.0), g, 1.0, 3, Discretization::FiniteDifference)
                .unwrap();
            (s.energies[2] - 2.5).abs()
        };
        let ratio = err(&coarse) / err(&fine);
        assert!(ratio > 3.5 && ratio < 4.5, "{ratio}");
    }

    #[test]
    fn states_are_orthonormal() {
        let g = Grid::centered(0.0, 24.0, 256).unwrap();
        let v: Vec<f64> = g.points().iter().map(|x| 0.05 * x.powi(4) - x * x + 0.1 * x).collect();
        let sol = solve_stationary(&v, &g, 1.0, 8).unwrap();
        for i in 0..sol.len() {
            for j in 0..sol.len() {
                let o = inner_product(&sol.states[i], &sol.states[j]).unwrap();
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((o - target).norm() < 1e-8, "<{i}|{j}> = {o}");
            }
        }
        assert!(sol.energies.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn refinement_check() {
        let g = Grid::centered(0.0, 40.0, 256).unwrap();
        assert!(solve_stationary_checked(|x| 0.5 * x * x, &g, 1.0, 4).is_ok());
        let coarse = Grid::centered(0.0, 40.0, 32).unwrap();
        assert!(matches!(
            solve_stationary_checked(|x| 0.5 * x * x, &coarse, 1.0, 4),
            Err(Error::GridTooCoarse { .. })
        ));
    }

    #[test]
    fn rejects_bad_requests() {
        let g = Grid::centered(0.0, 10.0, 64).unwrap();
        let v = harmonic(&g, 1.0, 1.0, 0.0);
        assert!(solve_stationary(&v, &g, 1.0, 17).is_err());
        assert!(solve_stationary(&v, &g, 1.0, 0).is_err());
        assert!(matches!(solve_stationary(&v[..10], &g, 1.0, 2), Err(Error::GridMismatch)));
    }

    /// Even or odd shooting from the origin for `-psi''/2 + x^4 psi = E psi`;
    /// returns the sign of the solution far out.
    fn shoot(e: f64, odd: bool) -> f64 {
        let (mut x, h) = (0.0f64, 1e-4);
        let (mut y, mut dy) = if odd { (0.0, 1.0) } else { (1.0, 0.0) };
        let f = |x: f64, y: f64| 2.0 * (x.powi(4) - e) * y;
        while x < 4.0 {
            let k1 = (dy, f(x, y));
            let k2 = (dy + 0.5 * h * k1.1, f(x + 0.5 * h, y + 0.5 * h * k1.0));
            let k3 = (dy + 0.5 * h * k2.1, f(x + 0.5 * h, y + 0.5 * h * k2.0));
            let k4 = (dy + h * k3.1, f(x + h, y + h * k3.0));
            y += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
            dy += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
            x += h;
            if y.abs() > 1e8 {
                break;
            }
        }
        y.signum()
    }

    fn shooting_level(lo: f64, hi: f64, odd: bool) -> f64 {
        let (mut lo, mut hi) = (lo, hi);
        let s_lo = shoot(lo, odd);
        assert_ne!(s_lo, shoot(hi, odd));
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if shoot(mid, odd) == s_lo { lo = mid } else { hi = mid }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn pure_quartic_against_shooting() {
        let g = Grid::centered(0.0, 12.0, 512).unwrap();
        let v: Vec<f64> = g.points().iter().map(|x| x.powi(4)).collect();
        let sol = solve_stationary(&v, &g, 1.0, 4).unwrap();
        let e0 = shooting_level(0.5, 0.8, false);
        let e1 = shooting_level(2.0, 2.6, true);
        let e2 = shooting_level(4.3, 5.0, false);
        assert!((e0 - 0.667_986_259).abs() < 1e-7);
        for (e, s) in sol.energies.iter().zip([e0, e1, e2]) {
            assert!((e / s - 1.0).abs() < 1e-5, "{e} vs {s}");
        }
    }

    #[test]
    fn symmetric_double_well_splitting() {
        // V = (x^2 - a^2)^2 / (8 a^2): unit frequency at x = +-a
        let a = 4.0f64;
        let pot = |x: f64| (x * x - a * a).powi(2) / (8.0 * a * a);
        let g = Grid::centered(0.0, 24.0, 512).unwrap();
        let v: Vec<f64> = g.points().iter().map(|x| pot(*x)).collect();
        let sol = solve_stationary(&v, &g, 1.0, 4).unwrap();
        let split = sol.energies[1] - sol.energies[0];
        assert!(split > 0.0 && split < 0.05);
        // semiclassical estimate (omega/pi) exp(-S) between turning points at E = 1/2
        let e = 0.5 * (sol.energies[0] + sol.energies[1]);
        let turn = crate::potentials::bisect(|x| pot(x) - e, 0.0, a);
        let m = 20_000;
        let s: f64 = (0..m)
            .map(|i| {
                let x = -turn + 2.0 * turn * (i as f64 + 0.5) / m as f64;
                (2.0 * (pot(x) - e)).max(0.0).sqrt()
            })
            .sum::<f64>()
            * 2.0
            * turn
            / m as f64;
        let wkb = (-s).exp() / std::f64::consts::PI;
        let ratio = split / wkb;
        assert!(ratio > 0.3 && ratio < 3.0, "{split} vs {wkb}");
        assert!(matches!(classify_wells(&sol, 0.0), Err(Error::Ambiguous { .. })));
    }

    #[test]
    fn labels_follow_the_bias() {
        let a = 4.0f64;
        let g = Grid::centered(0.0, 24.0, 512).unwrap();
        for eps in [0.02, -0.02] {
            let v: Vec<f64> = g
                .points()
                .iter()
                .map(|x| (x * x - a * a).powi(2) / (8.0 * a * a) + eps * x)
                .collect();
            let sol = solve_stationary(&v, &g, 1.0, 4).unwrap();
            let labels = classify_wells(&sol, 0.0).unwrap();
            // positive slope lowers the left well
            let deeper = if eps > 0.0 { WellSide::Left } else { WellSide::Right };
            assert_eq!(labels.0[0].side, deeper);
            assert_eq!(labels.lowest(deeper.mirrored()).unwrap().index_in_spectrum, 1);
            assert!(labels.0[0].mass_fraction > 0.99);
        }
    }

    #[test]
    fn one_sided_window_has_no_other_well() {
        let g = Grid::centered(5.0, 40.0, 256).unwrap();
        let sol = solve_stationary(&harmonic(&g, 1.0, 1.0, 5.0), &g, 1.0, 2).unwrap();
        let labels = classify_wells(&sol, -100.0).unwrap();
        assert_eq!(labels.lowest_right().unwrap().index_in_spectrum, 0);
        assert!(matches!(labels.lowest_left(), Err(Error::NoWellState(_))));
    }

    #[test]
    fn harmonic_states_match_the_solver() {
        let g = Grid::centered(0.5, 30.0, 512).unwrap();
        let (omega, mass) = (1.4f64, 0.8f64);
        let sol = solve_stationary(&harmonic(&g, omega, mass, 0.5), &g, mass, 4).unwrap();
        for n in 0..4 {
            let phi = harmonic_eigenstate(n, omega, 0.5, mass, &g).unwrap();
            let o = inner_product(&phi, &sol.states[n]).unwrap().norm();
            assert!(o > 1.0 - 1e-8, "n = {n}: {o}");
        }
    }

    #[test]
    fn harmonic_state_moments() {
        let g = Grid::centered(0.0, 30.0, 1024).unwrap();
        let phi = harmonic_eigenstate(0, 2.0, 1.5, 1.0, &g).unwrap();
        assert!((phi.mean_position() - 1.5).abs() < 1e-10);
        let var: f64 = g
            .points()
            .iter()
            .zip(phi.density())
            .map(|(x, d)| (x - 1.5).powi(2) * d)
            .sum::<f64>()
            * g.dx();
        assert!((var - 0.25).abs() < g.dx() * g.dx());
        let node = g.x(563);
        let phi1 = harmonic_eigenstate(1, 2.0, node, 1.0, &g).unwrap();
        assert!((phi1.mean_position() - node).abs() < 1e-10);
        assert!(phi1.amplitudes()[563].norm() < 1e-12);
        assert!(matches!(
            harmonic_eigenstate(40, 1.0, 0.0, 1.0, &Grid::centered(0.0, 20.0, 256).unwrap()),
            Err(Error::GridTooSmall(_))
        ));
    }

    #[test]
    fn projection_onto_band_is_bounded() {
        let g = Grid::centered(0.0, 30.0, 256).unwrap();
        let sol = solve_stationary(&harmonic(&g, 1.0, 1.0, 0.0), &g, 1.0, 10).unwrap();
        let coherent = harmonic_eigenstate(0, 1.0, 0.8, 1.0, &g).unwrap();
        let total: f64 = sol
            .states
            .iter()
            .map(|s| inner_product(s, &coherent).unwrap().norm_sqr())
            .sum();
        assert!(total <= 1.0 + 1e-12);
        // |alpha|^2 = 0.32, so ten levels capture all but ~1e-13
        assert!((total - 1.0).abs() < 1e-6);
    }
}
