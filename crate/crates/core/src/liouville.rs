//! Classical limit: `∂_t f + k ∂_x f - V'(x) ∂_k f = 0` solved by tracing
//! Hamiltonian characteristics from grid nodes back to the data.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{step_count, Direction, PhaseField, Trajectory};
use crate::grid::PhaseGrid;
use crate::potential::{GaussianSpec, Potential};
use crate::spectral::derivative_k;
use crate::Complex;

/// RK4 steps taken per stored time step when tracing characteristics.
pub const FLOW_SUBSTEPS: usize = 4;

/// A point `(x, k)` of phase space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowState {
    pub x: f64,
    pub k: f64,
}

impl FlowState {
    pub fn new(x: f64, k: f64) -> Self {
        Self { x, k }
    }

    pub fn energy(&self, potential: &Potential) -> f64 {
        0.5 * self.k * self.k + potential.value(self.x)
    }
}

#[inline]
fn rk4_step(s: FlowState, h: f64, force: &impl Fn(f64) -> f64) -> FlowState {
    let (x, k) = (s.x, s.k);
    let (x1, k1) = (k, force(x));
    let (x2, k2) = (k + 0.5 * h * k1, force(x + 0.5 * h * x1));
    let (x3, k3) = (k + 0.5 * h * k2, force(x + 0.5 * h * x2));
    let (x4, k4) = (k + h * k3, force(x + h * x3));
    FlowState {
        x: x + h / 6.0 * (x1 + 2.0 * x2 + 2.0 * x3 + x4),
        k: k + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4),
    }
}

/// Integrates `ẋ = k, k̇ = -V'(x)` over `t_span` (negative for backward
/// tracing) with RK4 steps no longer than `dt`.
pub fn hamilton_flow(start: FlowState, potential: &Potential, t_span: f64, dt: f64) -> FlowState {
    assert!(dt > 0.0, "dt must be positive");
    if t_span == 0.0 {
        return start;
    }
    let n = (t_span.abs() / dt).ceil().max(1.0) as usize;
    let h = t_span / n as f64;
    let force = |x: f64| -potential.grad(x);
    (0..n).fold(start, |s, _| rk4_step(s, h, &force))
}

/// Phase-space data that can be evaluated off the grid.
#[derive(Debug, Clone)]
pub enum PhaseData {
    /// Closed-form Gaussian, evaluated exactly at the periodically wrapped x.
    Gaussian { spec: GaussianSpec, grid: PhaseGrid },
    /// Samples interpolated bicubically, periodic in both x and k.
    Sampled(PhaseField),
}

impl PhaseData {
    pub fn gaussian(spec: GaussianSpec, grid: PhaseGrid) -> Result<Self> {
        spec.validate()?;
        if spec.center_k.is_none() || spec.width_k.is_none() {
            return Err(Error::Config("phase-space Gaussian needs both center_k and width_k".into()));
        }
        Ok(PhaseData::Gaussian { spec, grid })
    }

    pub fn grid(&self) -> &PhaseGrid {
        match self {
            PhaseData::Gaussian { grid, .. } => grid,
            PhaseData::Sampled(f) => f.grid(),
        }
    }

    pub fn eval(&self, x: f64, k: f64) -> Complex {
        match self {
            PhaseData::Gaussian { spec, grid } => Complex::new(spec.eval_phase(grid.wrap_x(x), k), 0.0),
            PhaseData::Sampled(f) => bicubic(f, x, k),
        }
    }

    pub fn sample(&self) -> PhaseField {
        match self {
            PhaseData::Gaussian { grid, .. } => PhaseField::from_fn(*grid, |x, k| self.eval(x, k)),
            PhaseData::Sampled(f) => f.clone(),
        }
    }

    fn is_real(&self) -> bool {
        match self {
            PhaseData::Gaussian { .. } => true,
            PhaseData::Sampled(f) => f.hermitian_real(),
        }
    }
}

/// Keys cubic convolution weights (`a = -1/2`) for fractional offset `t`.
#[inline]
fn keys_weights(t: f64) -> [f64; 4] {
    let t2 = t * t;
    let t3 = t2 * t;
    [
        -0.5 * t3 + t2 - 0.5 * t,
        1.5 * t3 - 2.5 * t2 + 1.0,
        -1.5 * t3 + 2.0 * t2 + 0.5 * t,
        0.5 * t3 - 0.5 * t2,
    ]
}

/// Bicubic convolution interpolation, periodic in both axes.
pub fn bicubic(f: &PhaseField, x: f64, k: f64) -> Complex {
    let g = f.grid();
    let u = (x - g.x_min) / g.dx;
    let v = (k - g.k_min) / g.dk;
    let (iu, iv) = (u.floor(), v.floor());
    let wx = keys_weights(u - iu);
    let wk = keys_weights(v - iv);
    let (nx, nk) = (g.n_x as i64, g.n_k as i64);
    let values = f.values();
    let mut acc = Complex::new(0.0, 0.0);
    for (a, wa) in wx.iter().enumerate() {
        let i = (iu as i64 + a as i64 - 1).rem_euclid(nx) as usize;
        let row = &values[i * g.n_k..(i + 1) * g.n_k];
        let mut inner = Complex::new(0.0, 0.0);
        for (b, wb) in wk.iter().enumerate() {
            let j = (iv as i64 + b as i64 - 1).rem_euclid(nk) as usize;
            inner += row[j] * wb;
        }
        acc += inner * wa;
    }
    acc
}

/// A completed Liouville solve; snapshots in increasing time order on `[0, T]`.
#[derive(Debug, Clone)]
pub struct LiouvilleRun {
    pub potential: Potential,
    pub dt: f64,
    pub t_final: f64,
    pub direction: Direction,
    pub trajectory: Trajectory<PhaseField>,
    /// Nodes whose characteristic left `[x_min, x_max)` and was wrapped.
    pub boundary_exits: usize,
    pub warnings: Vec<String>,
}

impl LiouvilleRun {
    pub fn grid(&self) -> &PhaseGrid {
        self.trajectory.first().grid()
    }

    pub fn steps(&self) -> usize {
        self.trajectory.len() - 1
    }

    pub fn initial(&self) -> &PhaseField {
        self.trajectory.first()
    }

    pub fn final_state(&self) -> &PhaseField {
        self.trajectory.last()
    }
}

/// Periodic force `-V'(wrap(x))`, matching the periodic x-convention of the
/// other solvers.
fn periodic_force<'a>(potential: &'a Potential, grid: &'a PhaseGrid) -> impl Fn(f64) -> f64 + 'a {
    move |x| -potential.grad(grid.wrap_x(x))
}

/// Visits the states `Φ_{n·τ}(node)` for `n = 0..=steps` along one
/// characteristic, `τ = ±dt`.
fn trace(
    start: FlowState,
    steps: usize,
    tau: f64,
    force: &impl Fn(f64) -> f64,
    mut visit: impl FnMut(usize, FlowState),
) {
    let h = tau / FLOW_SUBSTEPS as f64;
    let mut s = start;
    visit(0, s);
    for n in 1..=steps {
        for _ in 0..FLOW_SUBSTEPS {
            s = rk4_step(s, h, force);
        }
        visit(n, s);
    }
}

/// Solves the background (forward, data at `t = 0`) or adjoint (backward,
/// data at `t = T`) Liouville problem at every grid node and stored time.
pub fn solve_liouville(
    data: &PhaseData,
    potential: &Potential,
    dt: f64,
    t_final: f64,
    direction: Direction,
) -> Result<LiouvilleRun> {
    let steps = step_count(dt, t_final)?;
    let grid = *data.grid();
    let force = periodic_force(potential, &grid);
    // forward problem: f(t_n) = f_I(Φ_{-t_n}); adjoint: g(t_n) = g_T(Φ_{T-t_n})
    let tau = match direction {
        Direction::Forward => -dt,
        Direction::Backward => dt,
    };
    let nodes: Vec<(usize, usize)> = (0..grid.n_x).flat_map(|i| (0..grid.n_k).map(move |j| (i, j))).collect();
    let per_node: Vec<(Vec<Complex>, bool)> = nodes
        .par_iter()
        .map(|&(i, j)| {
            let mut vals = vec![Complex::new(0.0, 0.0); steps + 1];
            let mut exited = false;
            trace(FlowState::new(grid.x(i), grid.k(j)), steps, tau, &force, |n, s| {
                exited |= !grid.contains_x(s.x);
                vals[n] = data.eval(s.x, s.k);
            });
            (vals, exited)
        })
        .collect();

    let boundary_exits = per_node.iter().filter(|(_, e)| *e).count();
    let mut snapshots = Vec::with_capacity(steps + 1);
    for n in 0..=steps {
        // n counts traced steps; map to the time index of the snapshot
        let values: Vec<Complex> = per_node.iter().map(|(v, _)| v[n]).collect();
        snapshots.push(PhaseField::from_values_with_realness(grid, values, data.is_real()));
    }
    if direction == Direction::Backward {
        snapshots.reverse();
    }

    let mut warnings = data.sample().decay_warnings("phase-space data", 1e-10);
    if boundary_exits > 0 {
        warnings.push(format!(
            "{boundary_exits} characteristics left the x-domain and were wrapped periodically"
        ));
    }
    Ok(LiouvilleRun {
        potential: potential.clone(),
        dt,
        t_final,
        direction,
        trajectory: Trajectory { t_start: 0.0, dt, snapshots },
        boundary_exits,
        warnings,
    })
}

/// Duhamel solution of the perturbation equation
/// `∂_t f̃ + k ∂_x f̃ - V_b' ∂_k f̃ = Ṽ' ∂_k f_b`, `f̃(0) = 0`, at `t = T`:
/// `f̃(T, x, k) = ∫₀ᵀ Ṽ'(X(s)) ∂_k f_b(s, X(s), K(s)) ds` along the background
/// characteristic through `(x, k)` at time `T`. The time integral is the
/// trapezoid rule on the stored snapshots; `∂_k f_b` is spectral in k and
/// interpolated bicubically.
pub fn solve_liouville_perturbed(background: &LiouvilleRun, vtilde: &Potential) -> Result<PhaseField> {
    if background.direction != Direction::Forward {
        return Err(Error::Config("perturbed solve needs a forward background run".into()));
    }
    let grid = *background.grid();
    if vtilde.is_zero() {
        return Ok(PhaseField::zeros(grid));
    }
    let steps = background.steps();
    let weights = background.trajectory.trapezoid_weights();
    let dk_fb: Vec<PhaseField> = background.trajectory.snapshots.iter().map(derivative_k).collect();
    let force = periodic_force(&background.potential, &grid);
    let nodes: Vec<(usize, usize)> = (0..grid.n_x).flat_map(|i| (0..grid.n_k).map(move |j| (i, j))).collect();
    let values: Vec<Complex> = nodes
        .par_iter()
        .map(|&(i, j)| {
            let mut acc = Complex::new(0.0, 0.0);
            // traced step m sits at time t_{steps-m}
            trace(FlowState::new(grid.x(i), grid.k(j)), steps, -background.dt, &force, |m, s| {
                let n = steps - m;
                let xw = grid.wrap_x(s.x);
                acc += bicubic(&dk_fb[n], xw, s.k) * (weights[n] * vtilde.grad(xw));
            });
            acc
        })
        .collect();
    Ok(PhaseField::from_values_with_realness(grid, values, background.initial().hermitian_real()))
}
