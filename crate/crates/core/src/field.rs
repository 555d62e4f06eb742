//! Sampled fields: wavefunctions on the x-axis, distributions on the phase
//! grid, and uniformly spaced time trajectories of either.

use crate::error::{Error, Result};
use crate::grid::PhaseGrid;
use crate::potential::{Epsilon, GaussianSpec};
use crate::Complex;

/// Relative imaginary-part tolerance under which a phase field counts as real.
pub const REALNESS_TOLERANCE: f64 = 1e-10;

/// Time direction of an evolution problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Data at `t = 0`, integrate up to `T`.
    Forward,
    /// Data at `t = T`, integrate down to `0` (adjoint problems).
    Backward,
}

/// Complex wavefunction sampled on the x-axis of a [`PhaseGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: PhaseGrid,
    values: Vec<Complex>,
}

impl ComplexField {
    pub fn new(grid: PhaseGrid, values: Vec<Complex>) -> Result<Self> {
        if values.len() != grid.n_x {
            return Err(Error::GridMismatch(format!(
                "wavefunction has {} samples, grid has n_x = {}",
                values.len(),
                grid.n_x
            )));
        }
        Ok(Self { grid, values })
    }

    pub(crate) fn from_values(grid: PhaseGrid, values: Vec<Complex>) -> Self {
        debug_assert_eq!(values.len(), grid.n_x);
        Self { grid, values }
    }

    pub fn zeros(grid: PhaseGrid) -> Self {
        Self::from_values(grid, vec![Complex::new(0.0, 0.0); grid.n_x])
    }

    pub fn from_fn(grid: PhaseGrid, f: impl Fn(f64) -> Complex) -> Self {
        Self::from_values(grid, (0..grid.n_x).map(|i| f(grid.x(i))).collect())
    }

    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex> {
        self.values
    }

    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dx).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, s: Complex) -> Self {
        Self::from_values(self.grid, self.values.iter().map(|v| v * s).collect())
    }

    /// `max(|φ(x_0)|, |φ(x_{n-1})|) / max|φ|`, zero for the zero field.
    pub fn boundary_ratio(&self) -> f64 {
        let peak = self.max_abs();
        if peak == 0.0 {
            return 0.0;
        }
        let edge = self.values[0].norm().max(self.values[self.grid.n_x - 1].norm());
        edge / peak
    }
}

/// `⟨a, b⟩ = Σ a · conj(b) dx`.
pub fn l2_inner_product(a: &ComplexField, b: &ComplexField) -> Result<Complex> {
    a.grid.ensure_same_x(&b.grid, "l2_inner_product")?;
    Ok(a.values
        .iter()
        .zip(&b.values)
        .map(|(u, v)| u * v.conj())
        .sum::<Complex>()
        * a.grid.dx)
}

/// Field sampled on the full phase grid, x-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseField {
    grid: PhaseGrid,
    values: Vec<Complex>,
    hermitian_real: bool,
}

impl PhaseField {
    /// Wraps samples and records whether they are real within
    /// [`REALNESS_TOLERANCE`].
    pub fn new(grid: PhaseGrid, values: Vec<Complex>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "phase field has {} samples, grid has {}",
                values.len(),
                grid.len()
            )));
        }
        let hermitian_real = is_real(&values);
        Ok(Self { grid, values, hermitian_real })
    }

    pub(crate) fn from_values(grid: PhaseGrid, values: Vec<Complex>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        let hermitian_real = is_real(&values);
        Self { grid, values, hermitian_real }
    }

    /// Skips the realness scan when the caller already knows the answer for
    /// real input; complex input is always rescanned.
    pub(crate) fn from_values_with_realness(
        grid: PhaseGrid,
        values: Vec<Complex>,
        input_was_real: bool,
    ) -> Self {
        if input_was_real {
            Self::from_values(grid, values)
        } else {
            Self { grid, values, hermitian_real: false }
        }
    }

    pub fn zeros(grid: PhaseGrid) -> Self {
        Self { grid, values: vec![Complex::new(0.0, 0.0); grid.len()], hermitian_real: true }
    }

    pub fn from_fn(grid: PhaseGrid, f: impl Fn(f64, f64) -> Complex) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..grid.n_x {
            let x = grid.x(i);
            for j in 0..grid.n_k {
                values.push(f(x, grid.k(j)));
            }
        }
        Self::from_values(grid, values)
    }

    pub fn from_real_fn(grid: PhaseGrid, f: impl Fn(f64, f64) -> f64) -> Self {
        Self::from_fn(grid, |x, k| Complex::new(f(x, k), 0.0))
    }

    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex> {
        self.values
    }

    pub fn hermitian_real(&self) -> bool {
        self.hermitian_real
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex {
        self.values[self.grid.index(i, j)]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    /// Discrete mass `Σ f dx dk`.
    pub fn mass(&self) -> Complex {
        self.values.iter().sum::<Complex>() * (self.grid.dx * self.grid.dk)
    }

    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dx * self.grid.dk).sqrt()
    }

    /// `⟨a, b⟩ = Σ a · conj(b) dx dk`.
    pub fn inner(&self, other: &PhaseField) -> Result<Complex> {
        self.grid.ensure_same(&other.grid, "phase-space inner product")?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .sum::<Complex>()
            * (self.grid.dx * self.grid.dk))
    }

    /// Bilinear pairing `Σ a · b dx dk` (no conjugation).
    pub fn pairing(&self, other: &PhaseField) -> Result<Complex> {
        self.grid.ensure_same(&other.grid, "phase-space pairing")?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum::<Complex>()
            * (self.grid.dx * self.grid.dk))
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v * s).collect(),
            hermitian_real: self.hermitian_real,
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v.conj()).collect(),
            hermitian_real: self.hermitian_real,
        }
    }

    /// Relative L² distance `‖self - other‖ / ‖other‖`.
    pub fn relative_l2_distance(&self, other: &PhaseField) -> Result<f64> {
        self.grid.ensure_same(&other.grid, "relative distance")?;
        let num: f64 = self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm_sqr()).sum();
        let den: f64 = other.values.iter().map(|b| b.norm_sqr()).sum();
        Ok((num / den).sqrt())
    }

    /// Largest magnitude on the x- and k-boundaries relative to the peak.
    pub fn boundary_ratios(&self) -> (f64, f64) {
        let g = self.grid;
        let peak = self.max_abs();
        if peak == 0.0 {
            return (0.0, 0.0);
        }
        let mut x_edge = 0.0f64;
        for j in 0..g.n_k {
            x_edge = x_edge.max(self.get(0, j).norm()).max(self.get(g.n_x - 1, j).norm());
        }
        let mut k_edge = 0.0f64;
        for i in 0..g.n_x {
            k_edge = k_edge.max(self.get(i, 0).norm()).max(self.get(i, g.n_k - 1).norm());
        }
        (x_edge / peak, k_edge / peak)
    }

    /// Human-readable warnings when data has not decayed to `threshold` of its
    /// peak at the truncated boundaries.
    pub fn decay_warnings(&self, what: &str, threshold: f64) -> Vec<String> {
        let (x_edge, k_edge) = self.boundary_ratios();
        let mut out = Vec::new();
        if x_edge > threshold {
            out.push(format!("{what}: x-boundary value {x_edge:.3e} of peak exceeds {threshold:.0e}"));
        }
        if k_edge > threshold {
            out.push(format!("{what}: k-boundary value {k_edge:.3e} of peak exceeds {threshold:.0e}"));
        }
        out
    }
}

fn is_real(values: &[Complex]) -> bool {
    let peak = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let imag = values.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
    imag <= REALNESS_TOLERANCE * peak
}

/// Uniformly spaced sequence of snapshots starting at `t_start`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub t_start: f64,
    pub dt: f64,
    pub snapshots: Vec<T>,
}

impl<T> Trajectory<T> {
    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn time(&self, n: usize) -> f64 {
        self.t_start + n as f64 * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|n| self.time(n)).collect()
    }

    pub fn first(&self) -> &T {
        &self.snapshots[0]
    }

    pub fn last(&self) -> &T {
        &self.snapshots[self.snapshots.len() - 1]
    }

    /// Composite trapezoid weights over the stored times.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        trapezoid_weights(self.len(), self.dt)
    }
}

pub fn trapezoid_weights(n: usize, dt: f64) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n)
            .map(|i| if i == 0 || i == n - 1 { 0.5 * dt } else { dt })
            .collect(),
    }
}

/// Number of steps `T/dt`, rejecting horizons that are not an integer
/// multiple of the step.
pub fn step_count(dt: f64, t_final: f64) -> Result<usize> {
    if !(dt > 0.0) {
        return Err(Error::NonPositive { what: "dt", value: dt });
    }
    if !(t_final >= 0.0) {
        return Err(Error::Config(format!("final time must be non-negative, got {t_final}")));
    }
    let ratio = t_final / dt;
    let n = ratio.round();
    if (ratio - n).abs() > 1e-9 * n.max(1.0) {
        return Err(Error::Config(format!(
            "T = {t_final} is not an integer multiple of dt = {dt}"
        )));
    }
    Ok(n as usize)
}

/// Samples `B exp(-(x-b_x)²/σ_x² - (k-b_k)²/σ_k²)` on the grid.
pub fn gaussian_phase_field(spec: &GaussianSpec, grid: &PhaseGrid) -> Result<PhaseField> {
    spec.validate()?;
    if spec.center_k.is_none() || spec.width_k.is_none() {
        return Err(Error::Config(
            "phase-space Gaussian needs both center_k and width_k".into(),
        ));
    }
    Ok(PhaseField::from_real_fn(*grid, |x, k| spec.eval_phase(x, k)))
}

/// Semiclassical wave packet
/// `A exp(-(x-c)²/(2w²)) exp(i k₀ x / ε)` on the x-axis of `grid`.
pub fn gaussian_packet(spec: &GaussianSpec, grid: &PhaseGrid, eps: Epsilon) -> Result<ComplexField> {
    spec.validate()?;
    let k0 = spec.center_k.unwrap_or(0.0);
    let e = eps.value();
    Ok(ComplexField::from_fn(*grid, |x| {
        let u = (x - spec.center_x) / spec.width_x;
        Complex::from_polar(spec.amplitude * (-0.5 * u * u).exp(), k0 * x / e)
    }))
}
