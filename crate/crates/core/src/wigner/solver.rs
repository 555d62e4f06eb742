use crate::error::{Error, Result};
use crate::field::{step_count, Direction, PhaseField, Trajectory};
use crate::grid::PhaseGrid;
use crate::potential::{Epsilon, Potential};
use crate::Complex;

use super::collision::CollisionOperator;
use super::weno;

pub const CFL_LIMIT: f64 = 0.9;
pub const BLOWUP_FACTOR: f64 = 1e3;
/// Relative level above which boundary values of phase-space data are reported.
pub const DECAY_THRESHOLD: f64 = 1e-10;

/// Tuning knobs of [`solve_wigner_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WignerOptions {
    /// Each stored step of length `dt` is split into the fewest equal
    /// substeps with `dt_sub · max|δ^ε[V]| ≤ collision_number`. The
    /// collision error of SSP-RK3 depends on `dt_sub` only, so this bounds a
    /// time-error floor that does not shrink with `dt`.
    pub collision_number: f64,
}

impl Default for WignerOptions {
    fn default() -> Self {
        Self { collision_number: 0.05 }
    }
}

/// A completed Wigner solve; snapshots in increasing time order on `[0, T]`.
#[derive(Debug, Clone)]
pub struct WignerRun {
    pub eps: Epsilon,
    pub potential: Potential,
    pub dt: f64,
    pub t_final: f64,
    pub direction: Direction,
    pub substeps: usize,
    pub trajectory: Trajectory<PhaseField>,
    pub warnings: Vec<String>,
}

impl WignerRun {
    /// Wraps snapshots obtained elsewhere, e.g. Wigner transforms of
    /// Schrödinger solutions.
    pub fn from_trajectory(
        eps: Epsilon,
        potential: Potential,
        direction: Direction,
        trajectory: Trajectory<PhaseField>,
    ) -> Result<Self> {
        if trajectory.is_empty() {
            return Err(Error::Config("empty trajectory".into()));
        }
        let grid = *trajectory.first().grid();
        for s in &trajectory.snapshots {
            grid.ensure_same(s.grid(), "trajectory snapshot")?;
        }
        Ok(Self {
            eps,
            potential,
            dt: trajectory.dt,
            t_final: trajectory.dt * (trajectory.len() - 1) as f64,
            direction,
            substeps: 1,
            trajectory,
            warnings: Vec::new(),
        })
    }

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

/// Right-hand side `-v ∂_x f + σ 𝓛[f]` with `v = ±k`, `σ = ±1`.
struct Generator {
    grid: PhaseGrid,
    velocities: Vec<f64>,
    collision: CollisionOperator,
    collision_sign: f64,
}

impl Generator {
    fn new(grid: &PhaseGrid, potential: &Potential, eps: Epsilon, direction: Direction) -> Self {
        let sign = match direction {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        };
        Self {
            grid: *grid,
            velocities: grid.k_nodes().into_iter().map(|k| sign * k).collect(),
            collision: CollisionOperator::new(grid, potential, eps),
            collision_sign: sign,
        }
    }

    /// `out = -v ∂_x u + σ 𝓛[u]`, with WENO weights taken from `weights`.
    fn eval(&self, u: &[Complex], weights: Option<&[Complex]>, out: &mut [Complex]) {
        weno::transport(u, weights, &self.velocities, self.grid.n_x, self.grid.dx, out);
        let mut coll = u.to_vec();
        self.collision.apply_in_place(&mut coll);
        let s = self.collision_sign;
        out.iter_mut().zip(&coll).for_each(|(o, c)| *o += c * s);
    }
}

fn check_cfl(grid: &PhaseGrid, dt: f64) -> Result<()> {
    if !(dt > 0.0) {
        return Err(Error::NonPositive { what: "dt", value: dt });
    }
    let ratio = dt * grid.max_abs_k() / grid.dx;
    if ratio > CFL_LIMIT {
        return Err(Error::Cfl { ratio, limit: CFL_LIMIT });
    }
    Ok(())
}

/// `a ← α a + β b + γ c` elementwise.
fn combine(a: &mut [Complex], alpha: f64, b: &[Complex], beta: f64, c: &[Complex], gamma: f64) {
    for ((x, y), z) in a.iter_mut().zip(b).zip(c) {
        *x = *x * alpha + y * beta + z * gamma;
    }
}

/// One SSP-RK3 step of the background field `u` and, optionally, of a
/// linearized companion `v` whose transport reuses the WENO weights of the
/// background stage and which is driven by `source[u_stage]`.
fn ssp_rk3(
    gen: &Generator,
    u: &mut Vec<Complex>,
    companion: Option<(&mut Vec<Complex>, &CollisionOperator)>,
    dt: f64,
) {
    let n = u.len();
    let zero = Complex::new(0.0, 0.0);
    let mut lu = vec![zero; n];

    let stage = |state: &[Complex], v: Option<&[Complex]>, lu: &mut [Complex], lv: Option<&mut Vec<Complex>>| {
        gen.eval(state, None, lu);
        if let (Some(v), Some(lv), Some((_, src))) = (v, lv, companion.as_ref()) {
            gen.eval(v, Some(state), lv);
            let mut s = state.to_vec();
            src.apply_in_place(&mut s);
            lv.iter_mut().zip(&s).for_each(|(a, b)| *a += b);
        }
    };

    let has_v = companion.is_some();
    let v0: Vec<Complex> = companion.as_ref().map(|(v, _)| v.to_vec()).unwrap_or_default();
    let mut lv = if has_v { Some(vec![zero; n]) } else { None };

    // stage 1
    stage(u, has_v.then_some(&v0[..]), &mut lu, lv.as_mut());
    let mut u1 = u.clone();
    combine(&mut u1, 1.0, &lu, dt, &lu, 0.0);
    let mut v1 = v0.clone();
    if let Some(lv) = &lv {
        combine(&mut v1, 1.0, lv, dt, lv, 0.0);
    }

    // stage 2
    stage(&u1, has_v.then_some(&v1[..]), &mut lu, lv.as_mut());
    let mut u2 = u1.clone();
    combine(&mut u2, 0.25, u, 0.75, &lu, 0.25 * dt);
    let mut v2 = v1.clone();
    if let Some(lv) = &lv {
        combine(&mut v2, 0.25, &v0, 0.75, lv, 0.25 * dt);
    }

    // stage 3
    stage(&u2, has_v.then_some(&v2[..]), &mut lu, lv.as_mut());
    let mut next = u2;
    combine(&mut next, 2.0 / 3.0, u, 1.0 / 3.0, &lu, 2.0 / 3.0 * dt);
    *u = next;
    if let (Some((v, _)), Some(lv)) = (companion, &lv) {
        let mut vn = v2;
        combine(&mut vn, 2.0 / 3.0, &v0, 1.0 / 3.0, lv, 2.0 / 3.0 * dt);
        *v = vn;
    }
}

/// One SSP-RK3 step of `∂_t f = -k ∂_x f + 𝓛_V^ε[f]` with WENO5 transport.
pub fn step_wigner(f: &PhaseField, potential: &Potential, eps: Epsilon, dt: f64) -> Result<PhaseField> {
    let grid = *f.grid();
    check_cfl(&grid, dt)?;
    let gen = Generator::new(&grid, potential, eps, Direction::Forward);
    let mut u = f.values().to_vec();
    ssp_rk3(&gen, &mut u, None, dt);
    Ok(PhaseField::from_values_with_realness(grid, u, f.hermitian_real()))
}

fn substeps_for(gen: &Generator, dt: f64, options: &WignerOptions) -> usize {
    let z = dt * gen.collision.spectral_radius() / options.collision_number;
    (z.ceil() as usize).max(1)
}

/// Forward solve from data at `t = 0`, or adjoint solve from data at `t = T`.
pub fn solve_wigner(
    data: &PhaseField,
    potential: &Potential,
    eps: Epsilon,
    dt: f64,
    t_final: f64,
    direction: Direction,
) -> Result<WignerRun> {
    solve_wigner_with(data, potential, eps, dt, t_final, direction, &WignerOptions::default())
}

pub fn solve_wigner_with(
    data: &PhaseField,
    potential: &Potential,
    eps: Epsilon,
    dt: f64,
    t_final: f64,
    direction: Direction,
    options: &WignerOptions,
) -> Result<WignerRun> {
    let grid = *data.grid();
    check_cfl(&grid, dt)?;
    let steps = step_count(dt, t_final)?;
    let gen = Generator::new(&grid, potential, eps, direction);
    let substeps = substeps_for(&gen, dt, options);
    let h = dt / substeps as f64;
    let warnings = data.decay_warnings("phase-space data", DECAY_THRESHOLD);

    let threshold = BLOWUP_FACTOR * data.max_abs().max(f64::MIN_POSITIVE);
    let real = data.hermitian_real();
    let mut u = data.values().to_vec();
    let mut snapshots = Vec::with_capacity(steps + 1);
    snapshots.push(data.clone());
    for step in 1..=steps {
        for _ in 0..substeps {
            ssp_rk3(&gen, &mut u, None, h);
        }
        let max = u.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if !(max <= threshold) {
            return Err(Error::Blowup { step, max, threshold });
        }
        snapshots.push(PhaseField::from_values_with_realness(grid, u.clone(), real));
    }
    if direction == Direction::Backward {
        snapshots.reverse();
    }
    Ok(WignerRun {
        eps,
        potential: potential.clone(),
        dt,
        t_final,
        direction,
        substeps,
        trajectory: Trajectory { t_start: 0.0, dt, snapshots },
        warnings,
    })
}

/// Solves `∂_t f̃ + k ∂_x f̃ = 𝓛_{V_b}[f̃] + 𝓛_Ṽ[f_b]` from zero data and
/// returns `f̃(T)`.
///
/// The background is re-advanced alongside from each stored snapshot so the
/// source sees the background at every Runge–Kutta stage, and the transport
/// of `f̃` uses the WENO weights of the background stage. The result is
/// therefore exactly linear in `Ṽ`.
pub fn solve_wigner_perturbed(background: &WignerRun, vtilde: &Potential, eps: Epsilon) -> Result<PhaseField> {
    if background.direction != Direction::Forward {
        return Err(Error::Config("perturbed solve needs a forward background run".into()));
    }
    if background.eps != eps {
        return Err(Error::Config(format!(
            "epsilon {} differs from the background run's {}",
            eps.value(),
            background.eps.value()
        )));
    }
    let grid = *background.grid();
    if vtilde.is_zero() {
        return Ok(PhaseField::zeros(grid));
    }
    check_cfl(&grid, background.dt)?;
    let gen = Generator::new(&grid, &background.potential, eps, Direction::Forward);
    let source = CollisionOperator::new(&grid, vtilde, eps);
    let h = background.dt / background.substeps as f64;

    let mut v = vec![Complex::new(0.0, 0.0); grid.len()];
    for snapshot in &background.trajectory.snapshots[..background.steps()] {
        let mut u = snapshot.values().to_vec();
        for _ in 0..background.substeps {
            ssp_rk3(&gen, &mut u, Some((&mut v, &source)), h);
        }
    }
    let real = background.initial().hermitian_real();
    Ok(PhaseField::from_values_with_realness(grid, v, real))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::gaussian_phase_field;
    use crate::grid::make_phase_grid;
    use crate::potential::GaussianSpec;
    use std::f64::consts::PI;

    fn grid() -> PhaseGrid {
        make_phase_grid(0.0, 0.5, 64, -0.375, 0.625, 128).unwrap()
    }

    fn vb() -> Potential {
        Potential::Gaussian(GaussianSpec::x(1.0, 0.25, 0.125).unwrap())
    }

    fn data() -> PhaseField {
        let spec = GaussianSpec::phase(1.0, 0.25, 2f64.powi(-4), 0.125, 0.125).unwrap();
        gaussian_phase_field(&spec, &grid()).unwrap()
    }

    #[test]
    fn free_step_advects_fourier_modes() {
        let g = make_phase_grid(0.0, 1.0, 128, -1.0, 1.0, 16).unwrap();
        let xi = 2.0 * PI / g.x_len();
        let f = PhaseField::from_real_fn(g, |x, _| (xi * x).sin());
        let dt = 0.5 * g.dx;
        let out = step_wigner(&f, &Potential::zero(), Epsilon::new(0.1).unwrap(), dt).unwrap();
        let exact = PhaseField::from_real_fn(g, |x, k| (xi * (x - k * dt)).sin());
        let err = out.values().iter().zip(exact.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-6, "{err}");
    }

    #[test]
    fn zero_stays_zero_and_cfl_is_enforced() {
        let g = grid();
        let z = PhaseField::zeros(g);
        let eps = Epsilon::new(0.05).unwrap();
        assert_eq!(step_wigner(&z, &vb(), eps, 1e-3).unwrap().max_abs(), 0.0);
        let too_big = 0.95 * g.dx / g.max_abs_k();
        assert!(matches!(step_wigner(&z, &vb(), eps, too_big), Err(Error::Cfl { .. })));
    }

    #[test]
    fn step_conserves_mass_and_realness() {
        let f = data();
        let eps = Epsilon::inverse_pi_power_of_two(4);
        let out = step_wigner(&f, &vb(), eps, 2f64.powi(-8)).unwrap();
        let m0 = f.mass().re;
        assert!((out.mass().re - m0).abs() <= 1e-12 * m0);
        assert!(out.max_imag() <= 1e-10 * out.max_abs());
    }

    #[test]
    fn forward_backward_round_trip() {
        let f = data();
        let eps = Epsilon::inverse_pi_power_of_two(4);
        let (dt, t) = (2f64.powi(-8), 2f64.powi(-6));
        let fwd = solve_wigner(&f, &vb(), eps, dt, t, Direction::Forward).unwrap();
        let back = solve_wigner(fwd.final_state(), &vb(), eps, dt, t, Direction::Backward).unwrap();
        let rel = back.initial().relative_l2_distance(&f).unwrap();
        assert!(rel < 1e-4, "{rel}");
        let m0 = f.mass().re;
        for s in &fwd.trajectory.snapshots {
            assert!((s.mass().re - m0).abs() <= 1e-8 * m0);
        }
    }

    #[test]
    fn perturbation_is_linear() {
        let eps = Epsilon::inverse_pi_power_of_two(4);
        let run = solve_wigner(&data(), &vb(), eps, 2f64.powi(-8), 2f64.powi(-6), Direction::Forward).unwrap();
        assert_eq!(solve_wigner_perturbed(&run, &Potential::zero(), eps).unwrap().max_abs(), 0.0);
        let vt = Potential::Gaussian(GaussianSpec::x(0.1, 0.25, 0.06).unwrap());
        let a = solve_wigner_perturbed(&run, &vt, eps).unwrap();
        let b = solve_wigner_perturbed(&run, &vt.scaled(2.0), eps).unwrap();
        assert!(b.relative_l2_distance(&a.scaled(2.0)).unwrap() < 1e-10);
        assert!(a.max_abs() > 0.0);
    }

    #[test]
    fn perturbation_matches_difference_of_full_solves() {
        let eps = Epsilon::inverse_pi_power_of_two(4);
        let (dt, t) = (2f64.powi(-8), 2f64.powi(-6));
        let run = solve_wigner(&data(), &vb(), eps, dt, t, Direction::Forward).unwrap();
        let vt = Potential::Gaussian(GaussianSpec::x(1e-4, 0.25, 0.06).unwrap());
        let lin = solve_wigner_perturbed(&run, &vt, eps).unwrap();
        let full = Potential::Sum(vec![vb(), vt.clone()]);
        let opts = WignerOptions::default();
        // same substep count as the background so the two runs differ only by Ṽ
        let perturbed = solve_wigner_with(&data(), &full, eps, dt, t, Direction::Forward, &opts).unwrap();
        assert_eq!(perturbed.substeps, run.substeps);
        let diff: Vec<Complex> = perturbed
            .final_state()
            .values()
            .iter()
            .zip(run.final_state().values())
            .map(|(a, b)| a - b)
            .collect();
        let diff = PhaseField::new(*run.grid(), diff).unwrap();
        let rel = diff.relative_l2_distance(&lin).unwrap();
        assert!(rel < 1e-2, "{rel}");
    }
}
