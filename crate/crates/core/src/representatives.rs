//! Fredholm kernels of the three linearized inverse problems.
//!
//! For a data pair the measured pairing equals `∫ Ṽ(x) R(x) dx` with
//!
//! * `R_S = (iε)⁻¹ ∫ φ_b conj(ψ) dt`,
//! * `R_W = i (2π)⁻¹ ∫∫∫∫ e^{ip(z-x)} conj(g)(z, k) D^ε f_b(z, k, p) dp dz dk dt`,
//! * `R_L = -∂_x ∫∫ conj(g) ∂_k f_b dk dt`.
//!
//! Time integrals use the trapezoid rule on the stored snapshots.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{l2_inner_product, ComplexField, Direction, PhaseField, Trajectory};
use crate::grid::{is_nyquist, PhaseGrid};
use crate::liouville::LiouvilleRun;
use crate::potential::{Epsilon, Potential};
use crate::schrodinger::{solve_schrodinger, SchrodingerRun};
use crate::spectral::{derivative_k, derivative_periodic, Fft1d};
use crate::wigner::{apply_d_eps, wigner_transform, WignerRun};
use crate::Complex;

/// Default node cap of [`rep_wigner_oracle`].
pub const ORACLE_CAP: usize = 128 * 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RepresentativeKind {
    Schrodinger,
    Wigner,
    Liouville,
}

impl RepresentativeKind {
    pub fn name(self) -> &'static str {
        match self {
            RepresentativeKind::Schrodinger => "schrodinger",
            RepresentativeKind::Wigner => "wigner",
            RepresentativeKind::Liouville => "liouville",
        }
    }
}

/// A kernel sampled on the x-grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Representative {
    pub grid: PhaseGrid,
    pub values: Vec<Complex>,
    pub kind: RepresentativeKind,
    pub eps: Option<Epsilon>,
    pub provenance: String,
}

impl Representative {
    /// `Σ R dx`.
    pub fn integral(&self) -> Complex {
        self.values.iter().sum::<Complex>() * self.grid.dx
    }

    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dx).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn real_part(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    /// `∫ Ṽ R dx` on the grid.
    pub fn pair_with(&self, vtilde: &Potential) -> Complex {
        self.values
            .iter()
            .enumerate()
            .map(|(i, r)| r * vtilde.value(self.grid.x(i)))
            .sum::<Complex>()
            * self.grid.dx
    }

    /// `‖self - other‖₂ / ‖other‖₂`.
    pub fn relative_l2_distance(&self, other: &Representative) -> Result<f64> {
        self.grid.ensure_same_x(&other.grid, "representative distance")?;
        let num: f64 = self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm_sqr()).sum();
        let den: f64 = other.values.iter().map(|b| b.norm_sqr()).sum();
        Ok((num / den).sqrt())
    }
}

fn check_pair<T>(a: &Trajectory<T>, b: &Trajectory<T>, what: &str) -> Result<()> {
    if a.len() != b.len() || (a.dt - b.dt).abs() > 1e-15 * a.dt.abs() {
        return Err(Error::GridMismatch(format!(
            "{what}: runs differ in time grid ({} steps of {} vs {} steps of {})",
            a.len(),
            a.dt,
            b.len(),
            b.dt
        )));
    }
    Ok(())
}

fn check_directions(bg: Direction, adj: Direction, what: &str) -> Result<()> {
    if bg != Direction::Forward || adj != Direction::Backward {
        return Err(Error::Config(format!("{what}: expected a forward background and a backward adjoint run")));
    }
    Ok(())
}

/// `R_S(x) = (iε)⁻¹ Σ_n w_n φ_b(t_n, x) conj(ψ(t_n, x))`.
pub fn rep_schrodinger(
    background: &SchrodingerRun,
    adjoint: &SchrodingerRun,
    eps: Epsilon,
) -> Result<Representative> {
    check_directions(background.direction, adjoint.direction, "rep_schrodinger")?;
    check_pair(&background.trajectory, &adjoint.trajectory, "rep_schrodinger")?;
    let grid = *background.grid();
    grid.ensure_same_x(adjoint.grid(), "rep_schrodinger")?;
    let weights = background.trajectory.trapezoid_weights();
    let mut acc = vec![Complex::new(0.0, 0.0); grid.n_x];
    for ((phi, psi), w) in background.trajectory.snapshots.iter().zip(&adjoint.trajectory.snapshots).zip(&weights) {
        for ((a, p), q) in acc.iter_mut().zip(phi.values()).zip(psi.values()) {
            *a += p * q.conj() * *w;
        }
    }
    let scale = Complex::new(0.0, -1.0 / eps.value());
    Ok(Representative {
        grid,
        values: acc.into_iter().map(|v| v * scale).collect(),
        kind: RepresentativeKind::Schrodinger,
        eps: Some(eps),
        provenance: String::new(),
    })
}

fn check_wigner_runs(background: &WignerRun, adjoint: &WignerRun, eps: Epsilon) -> Result<PhaseGrid> {
    check_directions(background.direction, adjoint.direction, "rep_wigner")?;
    if background.eps != eps || adjoint.eps != eps {
        return Err(Error::Config(format!(
            "rep_wigner: epsilon mismatch (background {}, adjoint {}, requested {})",
            background.eps.value(),
            adjoint.eps.value(),
            eps.value()
        )));
    }
    check_pair(&background.trajectory, &adjoint.trajectory, "rep_wigner")?;
    let grid = *background.grid();
    grid.ensure_same(adjoint.grid(), "rep_wigner")?;
    Ok(grid)
}

/// `R_W` by the mixed-space fast path.
///
/// With `F, G` the k→y transforms of `f_b, g` on the dual lattice `y_m`,
/// Parseval turns the k-pairing into `P_m(z) = conj(G_m) F_m(z)` and the
/// p- and z-integrals collapse to half-shifts:
/// `R_W(x) = i/(ε L_k) Σ_t w_t Σ_m [P_m(x - εy_m/2) - P_m(x + εy_m/2)]`.
/// The shifts are applied in x-Fourier space as `-2i sin(ξ εy_m/2)`.
pub fn rep_wigner(background: &WignerRun, adjoint: &WignerRun, eps: Epsilon) -> Result<Representative> {
    let grid = check_wigner_runs(background, adjoint, eps)?;
    let (n_x, n_k) = (grid.n_x, grid.n_k);
    let weights = background.trajectory.trapezoid_weights();
    let fft_k = Fft1d::new(n_k);
    let dk2 = grid.dk * grid.dk;

    // A(x, m) = Σ_t w_t dk² conj(ĝ) f̂, x-major like the fields
    let mut acc = vec![Complex::new(0.0, 0.0); grid.len()];
    for ((f, g), &w) in background.trajectory.snapshots.iter().zip(&adjoint.trajectory.snapshots).zip(&weights) {
        if w == 0.0 {
            continue;
        }
        acc.par_chunks_mut(n_k).enumerate().for_each(|(i, row)| {
            let mut fr = f.values()[i * n_k..(i + 1) * n_k].to_vec();
            let mut gr = g.values()[i * n_k..(i + 1) * n_k].to_vec();
            fft_k.forward(&mut fr);
            fft_k.forward(&mut gr);
            for ((a, u), v) in row.iter_mut().zip(&fr).zip(&gr) {
                *a += v.conj() * u * (w * dk2);
            }
        });
    }

    let fft_x = Fft1d::new(n_x);
    let xi = grid.x_frequencies();
    let duals = grid.k_duals();
    let e = eps.value();
    let spectra: Vec<Vec<Complex>> = (0..n_k)
        .into_par_iter()
        .filter(|&m| !is_nyquist(m, n_k) && m != 0)
        .map(|m| {
            let mut col: Vec<Complex> = (0..n_x).map(|i| acc[i * n_k + m]).collect();
            fft_x.forward(&mut col);
            let s = 0.5 * e * duals[m];
            for (l, c) in col.iter_mut().enumerate() {
                *c *= if is_nyquist(l, n_x) { Complex::new(0.0, 0.0) } else { Complex::new(0.0, -2.0 * (xi[l] * s).sin()) };
            }
            col
        })
        .collect();
    let mut total = vec![Complex::new(0.0, 0.0); n_x];
    for col in &spectra {
        total.iter_mut().zip(col).for_each(|(t, c)| *t += c);
    }
    fft_x.inverse(&mut total);
    let scale = Complex::new(0.0, 1.0 / (e * grid.k_len()));
    Ok(Representative {
        grid,
        values: total.into_iter().map(|v| v * scale).collect(),
        kind: RepresentativeKind::Wigner,
        eps: Some(eps),
        provenance: String::new(),
    })
}

/// `R_W` by literal quadrature of its defining integral: trapezoid in t,
/// the discrete p-lattice `2πl/L_x` (`|l| < n_x/2`), grid sums in z and k,
/// and `D^ε` by spectral k-shifts. Cost `O(n_t n_x² n_k log n_k + n_t n_x³)`.
pub fn rep_wigner_oracle(
    background: &WignerRun,
    adjoint: &WignerRun,
    eps: Epsilon,
    cap: usize,
) -> Result<Representative> {
    let grid = check_wigner_runs(background, adjoint, eps)?;
    let (n_x, n_k) = (grid.n_x, grid.n_k);
    if n_x * n_k > cap {
        return Err(Error::OracleCap { n_x, n_k, cap });
    }
    let weights = background.trajectory.trapezoid_weights();
    let half = (n_x / 2) as i64;
    let ps: Vec<f64> = (-half + 1..half).map(|l| 2.0 * std::f64::consts::PI * l as f64 / grid.x_len()).collect();
    let dp = 2.0 * std::f64::consts::PI / grid.x_len();

    let mut r = vec![Complex::new(0.0, 0.0); n_x];
    for ((f, g), &w) in background.trajectory.snapshots.iter().zip(&adjoint.trajectory.snapshots).zip(&weights) {
        if w == 0.0 {
            continue;
        }
        // C[l][z] = Σ_k conj(g)(z, k) D^ε f(z, k, p_l) dk
        let c: Vec<Vec<Complex>> = ps
            .par_iter()
            .map(|&p| {
                let d = apply_d_eps(f, p, eps);
                (0..n_x)
                    .map(|z| (0..n_k).map(|j| g.get(z, j).conj() * d.get(z, j)).sum::<Complex>() * grid.dk)
                    .collect()
            })
            .collect();
        for (xi, out) in r.iter_mut().enumerate() {
            let x = grid.x(xi);
            let mut acc = Complex::new(0.0, 0.0);
            for (l, &p) in ps.iter().enumerate() {
                for z in 0..n_x {
                    acc += Complex::from_polar(1.0, p * (grid.x(z) - x)) * c[l][z];
                }
            }
            *out += acc * (w * dp * grid.dx);
        }
    }
    let scale = Complex::new(0.0, 1.0 / (2.0 * std::f64::consts::PI));
    Ok(Representative {
        grid,
        values: r.into_iter().map(|v| v * scale).collect(),
        kind: RepresentativeKind::Wigner,
        eps: Some(eps),
        provenance: "oracle".into(),
    })
}

/// `R_L(x) = -∂_x [Σ_t w_t Σ_k conj(g) ∂_k f_b dk]` with spectral derivatives.
pub fn rep_liouville(background: &LiouvilleRun, adjoint: &LiouvilleRun) -> Result<Representative> {
    check_directions(background.direction, adjoint.direction, "rep_liouville")?;
    check_pair(&background.trajectory, &adjoint.trajectory, "rep_liouville")?;
    let grid = *background.grid();
    grid.ensure_same(adjoint.grid(), "rep_liouville")?;
    let weights = background.trajectory.trapezoid_weights();
    let mut h = vec![Complex::new(0.0, 0.0); grid.n_x];
    for ((f, g), &w) in background.trajectory.snapshots.iter().zip(&adjoint.trajectory.snapshots).zip(&weights) {
        if w == 0.0 {
            continue;
        }
        let df = derivative_k(f);
        for (i, hi) in h.iter_mut().enumerate() {
            let s: Complex = (0..grid.n_k).map(|j| g.get(i, j).conj() * df.get(i, j)).sum();
            *hi += s * (w * grid.dk);
        }
    }
    let d = derivative_periodic(&h, grid.x_len());
    Ok(Representative {
        grid,
        values: d.into_iter().map(|v| -v).collect(),
        kind: RepresentativeKind::Liouville,
        eps: None,
        provenance: String::new(),
    })
}

/// Wigner transforms `W[a(t), b(t)]` of two co-stored Schrödinger runs.
fn wigner_trajectory(
    a: &SchrodingerRun,
    b: &SchrodingerRun,
    eps: Epsilon,
    grid: &PhaseGrid,
) -> Result<Trajectory<PhaseField>> {
    let snapshots = a
        .trajectory
        .snapshots
        .iter()
        .zip(&b.trajectory.snapshots)
        .map(|(u, v)| wigner_transform(u, v, eps, grid))
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory { t_start: 0.0, dt: a.dt, snapshots })
}

/// Both sides of the Schrödinger–Wigner representative identity.
#[derive(Debug, Clone)]
pub struct IdentityCheck {
    /// `2πε R_W[f_I, g_T]`.
    pub lhs: Vec<Complex>,
    /// `⟨φ_I', ψ'(0)⟩ R_S[φ_I, ψ_T] - ⟨φ_I, ψ(0)⟩ R_S[φ_I', ψ_T']`.
    pub rhs: Vec<Complex>,
    /// `‖lhs - rhs‖₂ / ‖rhs‖₂`, or 0 when both final data vanish.
    pub residual: f64,
}

/// Checks `2πε R_W[f_I, g_T] = ⟨φ_I', ψ'(0)⟩ R_S[φ_I, ψ_T] - ⟨φ_I, ψ(0)⟩ R_S[φ_I', ψ_T']`
/// with `f_I = W[φ_I, ψ'(0)]`, `g_T = W[ψ_T, φ_b'(T)]`.
///
/// The Wigner trajectories are the transforms of the Schrödinger solutions,
/// so the check isolates the kernel algebra from the Wigner solver. The two
/// sides agree to quadrature accuracy when the half-shift lattice
/// `ε y_m` spans exactly one x-period, i.e. `2πε n_k / (k_max - k_min) = x_max - x_min`.
#[allow(clippy::too_many_arguments)]
pub fn check_wigner_schrodinger_identity(
    phi_i: &ComplexField,
    phi_i_prime: &ComplexField,
    psi_t: &ComplexField,
    psi_t_prime: &ComplexField,
    v_b: &Potential,
    eps: Epsilon,
    dt: f64,
    t_final: f64,
    grid: &PhaseGrid,
) -> Result<IdentityCheck> {
    let n_x = grid.n_x;
    if psi_t.max_abs() == 0.0 && psi_t_prime.max_abs() == 0.0 {
        let zero = vec![Complex::new(0.0, 0.0); n_x];
        return Ok(IdentityCheck { lhs: zero.clone(), rhs: zero, residual: 0.0 });
    }
    let phi_b = solve_schrodinger(phi_i, v_b, eps, dt, t_final, Direction::Forward)?;
    let phi_b_prime = solve_schrodinger(phi_i_prime, v_b, eps, dt, t_final, Direction::Forward)?;
    let psi = solve_schrodinger(psi_t, v_b, eps, dt, t_final, Direction::Backward)?;
    let psi_prime = solve_schrodinger(psi_t_prime, v_b, eps, dt, t_final, Direction::Backward)?;

    let f_b = WignerRun::from_trajectory(eps, v_b.clone(), Direction::Forward, wigner_trajectory(&phi_b, &psi_prime, eps, grid)?)?;
    let g = WignerRun::from_trajectory(eps, v_b.clone(), Direction::Backward, wigner_trajectory(&psi, &phi_b_prime, eps, grid)?)?;
    let r_w = rep_wigner(&f_b, &g, eps)?;
    let lhs: Vec<Complex> = r_w.values.iter().map(|v| v * (2.0 * std::f64::consts::PI * eps.value())).collect();

    let c1 = l2_inner_product(phi_i_prime, psi_prime.initial())?;
    let c2 = l2_inner_product(phi_i, psi.initial())?;
    let r1 = rep_schrodinger(&phi_b, &psi, eps)?;
    let r2 = rep_schrodinger(&phi_b_prime, &psi_prime, eps)?;
    let rhs: Vec<Complex> = r1.values.iter().zip(&r2.values).map(|(a, b)| c1 * a - c2 * b).collect();

    let norm = |v: &[Complex]| (v.iter().map(|c| c.norm_sqr()).sum::<f64>() * grid.dx).sqrt();
    let rhs_norm = norm(&rhs);
    if rhs_norm < 1e-14 {
        return Err(Error::Indeterminate(format!("right-hand side norm {rhs_norm:.3e} is below 1e-14")));
    }
    let diff: Vec<Complex> = lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect();
    let residual = norm(&diff) / rhs_norm;
    Ok(IdentityCheck { lhs, rhs, residual })
}
