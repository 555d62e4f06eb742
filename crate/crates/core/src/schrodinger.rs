//! Split-step spectral solver for `iε ∂_t φ = -(ε²/2) Δφ + V φ` on the
//! periodic x-axis, with the adjoint (final-value) and sourced perturbation
//! problems built on the same propagator.

use crate::error::Result;
use crate::field::{step_count, ComplexField, Direction, Trajectory};
use crate::grid::PhaseGrid;
use crate::potential::{Epsilon, Potential};
use crate::spectral::Fft1d;
use crate::Complex;

/// Relative level above which boundary values of a wavefunction are reported.
pub const DECAY_THRESHOLD: f64 = 1e-10;

/// Precomputed Strang propagator for one `(V, ε, dt)`.
///
/// Each step is `P(dt/2) K(dt) P(dt/2)` with `P(τ) = exp(-iVτ/ε)` pointwise
/// and `K(τ) = exp(-iεξ²τ/2)` on the spatial spectrum. A negative `dt` gives
/// the exact inverse step.
#[derive(Debug, Clone)]
pub struct StrangPropagator {
    grid: PhaseGrid,
    fft: Fft1d,
    half_potential: Vec<Complex>,
    kinetic: Vec<Complex>,
}

impl StrangPropagator {
    pub fn new(grid: &PhaseGrid, potential: &Potential, eps: Epsilon, dt: f64) -> Self {
        let e = eps.value();
        let half_potential = (0..grid.n_x)
            .map(|i| Complex::from_polar(1.0, -potential.value(grid.x(i)) * dt / (2.0 * e)))
            .collect();
        let kinetic = grid
            .x_frequencies()
            .iter()
            .map(|xi| Complex::from_polar(1.0, -e * xi * xi * dt / 2.0))
            .collect();
        Self { grid: *grid, fft: Fft1d::new(grid.n_x), half_potential, kinetic }
    }

    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    pub fn apply(&self, buf: &mut [Complex]) {
        buf.iter_mut().zip(&self.half_potential).for_each(|(v, p)| *v *= p);
        self.fft.forward(buf);
        buf.iter_mut().zip(&self.kinetic).for_each(|(v, k)| *v *= k);
        self.fft.inverse(buf);
        buf.iter_mut().zip(&self.half_potential).for_each(|(v, p)| *v *= p);
    }
}

/// One Strang step of length `dt`.
pub fn step_strang(phi: &ComplexField, potential: &Potential, eps: Epsilon, dt: f64) -> ComplexField {
    let prop = StrangPropagator::new(phi.grid(), potential, eps, dt);
    let mut values = phi.values().to_vec();
    prop.apply(&mut values);
    ComplexField::new(*phi.grid(), values).expect("length preserved")
}

/// A completed Schrödinger solve. Snapshots are stored in increasing time
/// order on `[0, T]` regardless of direction.
#[derive(Debug, Clone)]
pub struct SchrodingerRun {
    pub eps: Epsilon,
    pub potential: Potential,
    pub dt: f64,
    pub t_final: f64,
    pub direction: Direction,
    pub trajectory: Trajectory<ComplexField>,
    pub warnings: Vec<String>,
}

impl SchrodingerRun {
    pub fn grid(&self) -> &PhaseGrid {
        self.trajectory.first().grid()
    }

    pub fn steps(&self) -> usize {
        self.trajectory.len() - 1
    }

    pub fn initial(&self) -> &ComplexField {
        self.trajectory.first()
    }

    pub fn final_state(&self) -> &ComplexField {
        self.trajectory.last()
    }
}

/// Integrates forward from data at `t = 0`, or backward from data at `t = T`.
pub fn solve_schrodinger(
    data: &ComplexField,
    potential: &Potential,
    eps: Epsilon,
    dt: f64,
    t_final: f64,
    direction: Direction,
) -> Result<SchrodingerRun> {
    let steps = step_count(dt, t_final)?;
    let grid = *data.grid();
    let signed_dt = match direction {
        Direction::Forward => dt,
        Direction::Backward => -dt,
    };
    let prop = StrangPropagator::new(&grid, potential, eps, signed_dt);

    let mut warnings = Vec::new();
    let start_ratio = data.boundary_ratio();
    if start_ratio > DECAY_THRESHOLD {
        warnings.push(format!(
            "wavefunction data: x-boundary value {start_ratio:.3e} of peak exceeds {DECAY_THRESHOLD:.0e}"
        ));
    }

    let mut snapshots = Vec::with_capacity(steps + 1);
    let mut current = data.values().to_vec();
    snapshots.push(data.clone());
    for _ in 0..steps {
        prop.apply(&mut current);
        snapshots.push(ComplexField::new(grid, current.clone())?);
    }
    if direction == Direction::Backward {
        snapshots.reverse();
    }
    let end = match direction {
        Direction::Forward => snapshots.last(),
        Direction::Backward => snapshots.first(),
    };
    let end_ratio = end.map(ComplexField::boundary_ratio).unwrap_or(0.0);
    if end_ratio > DECAY_THRESHOLD {
        warnings.push(format!(
            "wavefunction after evolution: x-boundary value {end_ratio:.3e} of peak exceeds {DECAY_THRESHOLD:.0e}"
        ));
    }

    Ok(SchrodingerRun {
        eps,
        potential: potential.clone(),
        dt,
        t_final,
        direction,
        trajectory: Trajectory { t_start: 0.0, dt, snapshots },
        warnings,
    })
}

/// Solves the perturbation equation
/// `iε ∂_t φ̃ = -(ε²/2)Δφ̃ + V_b φ̃ + Ṽ φ_b` from zero data and returns `φ̃(T)`.
///
/// The source is injected at the midpoint of every step:
/// `φ̃ₙ₊₁ = S(dt) φ̃ₙ + (dt / iε) S(dt/2)[Ṽ · S(dt/2) φ_b(tₙ)]`.
pub fn solve_schrodinger_perturbed(
    background: &SchrodingerRun,
    vtilde: &Potential,
    eps: Epsilon,
) -> Result<ComplexField> {
    let grid = *background.grid();
    if vtilde.is_zero() {
        return Ok(ComplexField::zeros(grid));
    }
    let dt = background.dt;
    let full = StrangPropagator::new(&grid, &background.potential, eps, dt);
    let half = StrangPropagator::new(&grid, &background.potential, eps, dt / 2.0);
    let vt: Vec<f64> = (0..grid.n_x).map(|i| vtilde.value(grid.x(i))).collect();
    let coeff = Complex::new(0.0, -dt / eps.value());

    let mut out = vec![Complex::new(0.0, 0.0); grid.n_x];
    let mut source = vec![Complex::new(0.0, 0.0); grid.n_x];
    for snapshot in &background.trajectory.snapshots[..background.steps()] {
        full.apply(&mut out);
        source.copy_from_slice(snapshot.values());
        half.apply(&mut source);
        source.iter_mut().zip(&vt).for_each(|(s, v)| *s *= v * coeff);
        half.apply(&mut source);
        out.iter_mut().zip(&source).for_each(|(o, s)| *o += s);
    }
    ComplexField::new(grid, out)
}
