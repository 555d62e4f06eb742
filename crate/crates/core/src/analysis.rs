//! Kernel matrices over translated data, their singular structure, and
//! convergence fits.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{gaussian_packet, gaussian_phase_field, Direction};
use crate::grid::PhaseGrid;
use crate::liouville::{solve_liouville, LiouvilleRun, PhaseData};
use crate::potential::{Epsilon, GaussianSpec, Potential};
use crate::representatives::{rep_liouville, rep_schrodinger, rep_wigner, Representative, RepresentativeKind};
use crate::schrodinger::{solve_schrodinger, SchrodingerRun};
use crate::wigner::{solve_wigner_with, WignerOptions, WignerRun};
use crate::Complex;

/// Singular values below this fraction of the largest count as zero.
pub const RANK_TOLERANCE: f64 = 1e-12;

/// `n` equally spaced centers on `[lo, hi]`.
pub fn centers(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.5 * (lo + hi)],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Desk-scale default: 9 centers spaced 2⁻⁶ over `[0.1875, 0.3125]`.
pub fn desk_centers() -> Vec<f64> {
    centers(0.1875, 0.3125, 9)
}

/// Everything but the data centers needed to build a kernel matrix.
#[derive(Debug, Clone)]
pub struct AssemblySetup {
    pub grid: PhaseGrid,
    pub potential: Potential,
    /// Template for the initial data; its x-center is replaced per row.
    pub initial: GaussianSpec,
    /// Template for the final data; its x-center is replaced per column.
    pub final_data: GaussianSpec,
    pub dt: f64,
    pub t_final: f64,
    pub wigner: WignerOptions,
}

/// Kernels `R_ij` for data centered at `(centers_i[i], centers_j[j])`,
/// stored row-major in `(i, j)`.
#[derive(Debug, Clone)]
pub struct RepresentativeMatrix {
    pub centers_i: Vec<f64>,
    pub centers_j: Vec<f64>,
    pub grid: PhaseGrid,
    pub entries: Vec<Representative>,
    pub kind: RepresentativeKind,
    pub eps: Option<Epsilon>,
}

impl RepresentativeMatrix {
    pub fn from_entries(
        centers_i: Vec<f64>,
        centers_j: Vec<f64>,
        entries: Vec<Representative>,
        kind: RepresentativeKind,
        eps: Option<Epsilon>,
    ) -> Result<Self> {
        if entries.len() != centers_i.len() * centers_j.len() || entries.is_empty() {
            return Err(Error::Config(format!(
                "matrix needs {}x{} entries, got {}",
                centers_i.len(),
                centers_j.len(),
                entries.len()
            )));
        }
        let grid = entries[0].grid;
        for e in &entries {
            grid.ensure_same_x(&e.grid, "representative matrix")?;
        }
        Ok(RepresentativeMatrix { centers_i, centers_j, grid, entries, kind, eps })
    }

    pub fn entry(&self, i: usize, j: usize) -> &Representative {
        &self.entries[i * self.centers_j.len() + j]
    }

    pub fn pair_count(&self) -> usize {
        self.entries.len()
    }

    /// `n_x × N_pairs` array whose columns are the kernels weighted by `√dx`,
    /// so the Euclidean structure matches `L²(x)`.
    pub fn weighted_columns(&self) -> DMatrix<Complex> {
        let w = self.grid.dx.sqrt();
        DMatrix::from_fn(self.grid.n_x, self.entries.len(), |r, c| self.entries[c].values[r] * w)
    }

    /// Same array scaled by a constant.
    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        for e in &mut out.entries {
            e.values.iter_mut().for_each(|v| *v *= s);
        }
        out
    }
}

enum Runs {
    Schrodinger(Vec<SchrodingerRun>),
    Wigner(Vec<WignerRun>),
    Liouville(Vec<LiouvilleRun>),
}

fn solve_side(
    setup: &AssemblySetup,
    template: &GaussianSpec,
    centers: &[f64],
    kind: RepresentativeKind,
    eps: Option<Epsilon>,
    direction: Direction,
) -> std::result::Result<Runs, (usize, Error)> {
    let need_eps = || eps.ok_or_else(|| Error::Config(format!("{} kernels need an epsilon", kind.name())));
    let tag = |n: usize| move |e: Error| (n, e);
    Ok(match kind {
        RepresentativeKind::Schrodinger => Runs::Schrodinger(
            centers
                .par_iter()
                .enumerate()
                .map(|(n, &c)| {
                    let eps = need_eps().map_err(tag(n))?;
                    let data = gaussian_packet(&template.with_center_x(c), &setup.grid, eps).map_err(tag(n))?;
                    solve_schrodinger(&data, &setup.potential, eps, setup.dt, setup.t_final, direction).map_err(tag(n))
                })
                .collect::<std::result::Result<_, _>>()?,
        ),
        RepresentativeKind::Wigner => Runs::Wigner(
            centers
                .par_iter()
                .enumerate()
                .map(|(n, &c)| {
                    let eps = need_eps().map_err(tag(n))?;
                    let data = gaussian_phase_field(&template.with_center_x(c), &setup.grid).map_err(tag(n))?;
                    solve_wigner_with(&data, &setup.potential, eps, setup.dt, setup.t_final, direction, &setup.wigner)
                        .map_err(tag(n))
                })
                .collect::<std::result::Result<_, _>>()?,
        ),
        RepresentativeKind::Liouville => Runs::Liouville(
            centers
                .par_iter()
                .enumerate()
                .map(|(n, &c)| {
                    let data = PhaseData::gaussian(template.with_center_x(c), setup.grid).map_err(tag(n))?;
                    solve_liouville(&data, &setup.potential, setup.dt, setup.t_final, direction).map_err(tag(n))
                })
                .collect::<std::result::Result<_, _>>()?,
        ),
    })
}

fn pair_kernel(bg: &Runs, adj: &Runs, i: usize, j: usize, eps: Option<Epsilon>) -> Result<Representative> {
    match (bg, adj) {
        (Runs::Schrodinger(b), Runs::Schrodinger(a)) => rep_schrodinger(&b[i], &a[j], eps.expect("checked at solve")),
        (Runs::Wigner(b), Runs::Wigner(a)) => rep_wigner(&b[i], &a[j], eps.expect("checked at solve")),
        (Runs::Liouville(b), Runs::Liouville(a)) => rep_liouville(&b[i], &a[j]),
        _ => unreachable!("both sides are solved with one kind"),
    }
}

/// Builds the kernel matrix with `N_i + N_j` solver calls: backgrounds
/// per row and adjoints per column are solved once, then every pair is
/// combined. Both phases run in parallel.
pub fn assemble_rep_matrix(
    centers_i: &[f64],
    centers_j: &[f64],
    setup: &AssemblySetup,
    kind: RepresentativeKind,
    eps: Option<Epsilon>,
) -> Result<RepresentativeMatrix> {
    if centers_i.is_empty() || centers_j.is_empty() {
        return Err(Error::Config("matrix assembly needs at least one center on each side".into()));
    }
    for &c in centers_i.iter().chain(centers_j) {
        if !setup.grid.contains_x(c) {
            return Err(Error::Config(format!("center {c} lies outside the x-domain")));
        }
    }
    let eps = if kind == RepresentativeKind::Liouville { None } else { eps };
    let bg = solve_side(setup, &setup.initial, centers_i, kind, eps, Direction::Forward)
        .map_err(|(i, e)| Error::Assembly { i, j: usize::MAX, source: Box::new(e) })?;
    let adj = solve_side(setup, &setup.final_data, centers_j, kind, eps, Direction::Backward)
        .map_err(|(j, e)| Error::Assembly { i: usize::MAX, j, source: Box::new(e) })?;
    let n_j = centers_j.len();
    let entries = (0..centers_i.len() * n_j)
        .into_par_iter()
        .map(|n| {
            let (i, j) = (n / n_j, n % n_j);
            pair_kernel(&bg, &adj, i, j, eps).map_err(|e| Error::Assembly { i, j, source: Box::new(e) })
        })
        .collect::<Result<Vec<_>>>()?;
    RepresentativeMatrix::from_entries(centers_i.to_vec(), centers_j.to_vec(), entries, kind, eps)
}

/// Singular triplets of the weighted column array, sorted descending.
struct Decomposition {
    u: DMatrix<Complex>,
    sigma: Vec<f64>,
}

fn decompose(m: &DMatrix<Complex>) -> Result<Decomposition> {
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sigma: Vec<f64> = order.iter().map(|&n| svd.singular_values[n]).collect();
    if sigma.first().copied().unwrap_or(0.0) == 0.0 {
        return Err(Error::DegenerateMatrix("all singular values vanish".into()));
    }
    let u = DMatrix::from_fn(u.nrows(), order.len(), |r, c| u[(r, order[c])]);
    Ok(Decomposition { u, sigma })
}

/// Singular values of a general complex array, divided by the largest.
pub fn relative_singular_values_of(m: &DMatrix<Complex>) -> Result<Vec<f64>> {
    let d = decompose(m)?;
    let top = d.sigma[0];
    Ok(d.sigma.iter().map(|s| s / top).collect())
}

/// `s_i / s_1` of the `√dx`-weighted kernel array, descending.
pub fn relative_singular_values(m: &RepresentativeMatrix) -> Result<Vec<f64>> {
    relative_singular_values_of(&m.weighted_columns())
}

/// `Err_{s,i}(ε)` for each requested 1-based index.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularValueErrors {
    /// `(i, errors over the sweep)`.
    pub curves: Vec<(usize, Vec<f64>)>,
    pub warnings: Vec<String>,
}

/// `Err_{s,i}(ε) = |s_i^ε - s_i| / |s_i|` against the limit matrix.
/// Indices whose limit value vanishes are skipped with a warning.
pub fn singular_value_errors(
    sweep: &[&RepresentativeMatrix],
    limit: &RepresentativeMatrix,
    indices: &[usize],
) -> Result<SingularValueErrors> {
    let reference = relative_singular_values(limit)?;
    let approx = sweep
        .iter()
        .map(|m| {
            if m.pair_count() != limit.pair_count() || m.grid.n_x != limit.grid.n_x {
                return Err(Error::GridMismatch("sweep matrix shape differs from the limit".into()));
            }
            relative_singular_values(m)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = SingularValueErrors { curves: Vec::new(), warnings: Vec::new() };
    for &i in indices {
        if i == 0 || i > reference.len() {
            out.warnings.push(format!("singular value index {i} is out of range; skipped"));
            continue;
        }
        let s = reference[i - 1];
        if s == 0.0 {
            out.warnings.push(format!("limit singular value {i} vanishes; skipped"));
            continue;
        }
        out.curves.push((i, approx.iter().map(|a| (a[i - 1] - s).abs() / s).collect()));
    }
    Ok(out)
}

fn leading_subspace(m: &DMatrix<Complex>, k: usize) -> Result<DMatrix<Complex>> {
    let d = decompose(m)?;
    let rank = d.sigma.iter().take_while(|&&s| s >= RANK_TOLERANCE * d.sigma[0]).count();
    if k == 0 || k > rank {
        return Err(Error::RankDeficient { requested: k, rank });
    }
    Ok(d.u.columns(0, k).into_owned())
}

/// `‖Q_k - Q_k^ε (Q_k^ε)* Q_k‖₂` for general complex column arrays.
pub fn subspace_angle_of(limit: &DMatrix<Complex>, approx: &DMatrix<Complex>, k: usize) -> Result<f64> {
    if limit.nrows() != approx.nrows() {
        return Err(Error::GridMismatch(format!("{} vs {} rows", limit.nrows(), approx.nrows())));
    }
    let q = leading_subspace(limit, k)?;
    let qe = leading_subspace(approx, k)?;
    let defect = &q - &qe * (qe.adjoint() * &q);
    Ok(defect.singular_values().iter().cloned().fold(0.0, f64::max))
}

/// `Err_{R,k}` between the leading `k` x-space singular subspaces.
pub fn subspace_angle(limit: &RepresentativeMatrix, approx: &RepresentativeMatrix, k: usize) -> Result<f64> {
    subspace_angle_of(&limit.weighted_columns(), &approx.weighted_columns(), k)
}

/// `Err_R(ε)` curve with its fitted log-log slope and, when available,
/// the matrix-level curves.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub eps_values: Vec<f64>,
    pub err_values: Vec<f64>,
    pub fitted_slope: f64,
    pub singular_value_errors: Vec<(usize, Vec<f64>)>,
    pub subspace_angles: Vec<(usize, Vec<f64>)>,
}

impl ConvergenceReport {
    pub fn strictly_decreasing(&self) -> bool {
        self.err_values.windows(2).all(|w| w[1] < w[0])
    }
}

/// Least-squares slope of `log₂ err` against `log₂ ε`.
pub fn err_curve_and_slope(eps_values: &[f64], errs: &[f64]) -> Result<ConvergenceReport> {
    if eps_values.len() != errs.len() || eps_values.len() < 3 {
        return Err(Error::Config(format!(
            "slope fit needs at least 3 matching points, got {} eps and {} errors",
            eps_values.len(),
            errs.len()
        )));
    }
    if eps_values.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Config("eps values must be strictly decreasing".into()));
    }
    for (&e, &r) in eps_values.iter().zip(errs) {
        if !(e > 0.0) {
            return Err(Error::NonPositive { what: "eps", value: e });
        }
        if !(r > 0.0) {
            return Err(Error::NonPositive { what: "error value", value: r });
        }
    }
    let xs: Vec<f64> = eps_values.iter().map(|e| e.log2()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.log2()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(ConvergenceReport {
        eps_values: eps_values.to_vec(),
        err_values: errs.to_vec(),
        fitted_slope: sxy / sxx,
        singular_value_errors: Vec::new(),
        subspace_angles: Vec::new(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    /// The minimizer sampled on the x-grid.
    pub values: Vec<f64>,
    /// `‖A Ṽ - data‖₂` over the pairs.
    pub residual: f64,
    pub rank: usize,
    /// Set when `λ = 0` met rank-deficient normal equations (rank below
    /// `n_x`) and the minimal-norm pseudo-inverse solution was returned.
    pub pseudo_inverse: bool,
}

/// Real `Ṽ` minimizing `Σ_ij |Σ_x Ṽ R_ij dx - d_ij|² + λ ‖Ṽ‖²_{L²}`.
///
/// With `u = √dx Ṽ` the problem is ordinary ridge regression for the
/// stacked real and imaginary parts of `R √dx`, solved through its SVD.
pub fn tikhonov_reconstruct(m: &RepresentativeMatrix, data: &[Complex], lambda: f64) -> Result<Reconstruction> {
    if !(lambda >= 0.0) {
        return Err(Error::Config(format!("lambda must be non-negative, got {lambda}")));
    }
    if data.len() != m.pair_count() {
        return Err(Error::Config(format!("expected {} data values, got {}", m.pair_count(), data.len())));
    }
    let (n_p, n_x) = (m.pair_count(), m.grid.n_x);
    let w = m.grid.dx.sqrt();
    let a = DMatrix::from_fn(2 * n_p, n_x, |r, c| {
        let v = m.entries[r % n_p].values[c] * w;
        if r < n_p { v.re } else { v.im }
    });
    let b = DVector::from_fn(2 * n_p, |r, _| if r < n_p { data[r].re } else { data[r - n_p].im });
    let svd = a.clone().svd(true, true);
    let (u, vt) = (svd.u.as_ref().expect("requested"), svd.v_t.as_ref().expect("requested"));
    let top = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return Err(Error::DegenerateMatrix("kernel matrix is identically zero".into()));
    }
    let rank = svd.singular_values.iter().filter(|&&s| s >= RANK_TOLERANCE * top).count();
    let mut uvec = DVector::<f64>::zeros(n_x);
    for (n, &s) in svd.singular_values.iter().enumerate() {
        let filter = if lambda > 0.0 {
            s / (s * s + lambda)
        } else if s >= RANK_TOLERANCE * top {
            1.0 / s
        } else {
            0.0
        };
        if filter == 0.0 {
            continue;
        }
        let coef = u.column(n).dot(&b) * filter;
        uvec += vt.row(n).transpose() * coef;
    }
    let residual = (&a * &uvec - &b).norm();
    Ok(Reconstruction {
        values: uvec.iter().map(|v| v / w).collect(),
        residual,
        rank,
        pseudo_inverse: lambda == 0.0 && rank < n_x,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_phase_grid;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn complex_matrix(rows: usize, cols: usize, seed: u64) -> DMatrix<Complex> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DMatrix::from_fn(rows, cols, |_, _| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    #[test]
    fn identity_has_flat_spectrum() {
        let s = relative_singular_values_of(&DMatrix::identity(3, 3)).unwrap();
        assert!(s.iter().all(|v| (v - 1.0).abs() < 1e-14));
    }

    #[test]
    fn rank_one_outer_product() {
        let a = complex_matrix(6, 1, 1);
        let b = complex_matrix(1, 4, 2);
        let s = relative_singular_values_of(&(a * b)).unwrap();
        assert!((s[0] - 1.0).abs() < 1e-14);
        assert!(s[1..].iter().all(|v| *v < 1e-12));
    }

    #[test]
    fn singular_values_match_gram_eigenvalues() {
        let m = complex_matrix(10, 10, 3);
        let s = relative_singular_values_of(&m).unwrap();
        let gram = m.adjoint() * &m;
        // Hermitian Gram matrix as a real symmetric 20x20 block matrix
        let real = DMatrix::from_fn(20, 20, |r, c| {
            let g = gram[(r % 10, c % 10)];
            match (r < 10, c < 10) {
                (true, true) | (false, false) => g.re,
                (true, false) => -g.im,
                (false, true) => g.im,
            }
        });
        let mut eig: Vec<f64> = real.symmetric_eigenvalues().iter().cloned().collect();
        eig.sort_by(|a, b| b.total_cmp(a));
        // every eigenvalue appears twice in the real embedding
        let top = eig[0].sqrt();
        for (n, v) in s.iter().enumerate() {
            assert!((v - eig[2 * n].sqrt() / top).abs() < 1e-8);
        }
    }

    #[test]
    fn zero_matrix_is_degenerate() {
        let z = DMatrix::<Complex>::zeros(4, 4);
        assert!(matches!(relative_singular_values_of(&z), Err(Error::DegenerateMatrix(_))));
    }

    #[test]
    fn subspace_angle_basics() {
        let m = complex_matrix(8, 5, 4);
        assert!(subspace_angle_of(&m, &m, 3).unwrap() < 1e-12);
        let e = |n: usize| DMatrix::from_fn(4, 1, |r, _| Complex::new(if r == n { 1.0 } else { 0.0 }, 0.0));
        assert!((subspace_angle_of(&e(0), &e(1), 1).unwrap() - 1.0).abs() < 1e-14);
        assert!(matches!(subspace_angle_of(&e(0), &e(1), 2), Err(Error::RankDeficient { rank: 1, .. })));
    }

    #[test]
    fn subspace_angle_ignores_basis_rotation() {
        // columns with distinct singular values, then mixed by a unitary
        let q = complex_matrix(12, 3, 5).qr().q();
        let diag = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 2.0, 1.0]).map(|v| Complex::new(v, 0.0)));
        let a = &q * &diag;
        let rot = complex_matrix(3, 3, 6).qr().q();
        let b = &a * rot;
        assert!(subspace_angle_of(&a, &b, 3).unwrap() < 1e-10);
    }

    #[test]
    fn subspace_angle_is_symmetric() {
        let a = complex_matrix(10, 4, 7);
        let b = &a + complex_matrix(10, 4, 8) * Complex::new(0.1, 0.0);
        let (ab, ba) = (subspace_angle_of(&a, &b, 2).unwrap(), subspace_angle_of(&b, &a, 2).unwrap());
        assert!((ab - ba).abs() < 1e-10);
    }

    #[test]
    fn slopes_of_power_laws() {
        let eps = [0.1, 0.05, 0.025, 0.0125];
        let quad: Vec<f64> = eps.iter().map(|e| 3.0 * e * e).collect();
        assert!((err_curve_and_slope(&eps, &quad).unwrap().fitted_slope - 2.0).abs() < 1e-9);
        let lin: Vec<f64> = eps.iter().map(|e| 0.5 * e).collect();
        assert!((err_curve_and_slope(&eps, &lin).unwrap().fitted_slope - 1.0).abs() < 1e-9);
        assert!(err_curve_and_slope(&eps, &[1.0, 0.0, 1.0, 1.0]).is_err());
        assert!(err_curve_and_slope(&eps[..2], &quad[..2]).is_err());
    }

    fn synthetic(n_pairs: usize) -> RepresentativeMatrix {
        let grid = make_phase_grid(0.0, 1.0, 64, -1.0, 1.0, 8).unwrap();
        let cs = centers(0.3, 0.7, n_pairs);
        let entries = cs
            .iter()
            .map(|&c| Representative {
                grid,
                values: (0..64).map(|i| Complex::new((-((grid.x(i) - c) / 0.05).powi(2)).exp(), 0.0)).collect(),
                kind: RepresentativeKind::Liouville,
                eps: None,
                provenance: String::new(),
            })
            .collect();
        RepresentativeMatrix::from_entries(cs, vec![0.5], entries, RepresentativeKind::Liouville, None).unwrap()
    }

    #[test]
    fn singular_value_errors_vanish_for_scaled_copies() {
        let m = synthetic(6);
        let doubled = m.scaled(2.0);
        let errs = singular_value_errors(&[&m, &doubled], &m, &[2, 3, 4, 5]).unwrap();
        assert_eq!(errs.curves.len(), 4);
        assert!(errs.curves.iter().all(|(_, c)| c.iter().all(|v| *v < 1e-12)));
    }

    #[test]
    fn tikhonov_limits() {
        let m = synthetic(9);
        let zero = tikhonov_reconstruct(&m, &vec![Complex::new(0.0, 0.0); 9], 1e-3).unwrap();
        assert!(zero.values.iter().all(|v| *v == 0.0));
        let data: Vec<Complex> = (0..9).map(|n| Complex::new(1.0 + n as f64, 0.0)).collect();
        let big = tikhonov_reconstruct(&m, &data, 1e12).unwrap();
        assert!(big.values.iter().map(|v| v.abs()).fold(0.0, f64::max) < 1e-6);
        let mut last = 0.0;
        for lambda in [0.0, 1e-8, 1e-6, 1e-4, 1e-2, 1.0] {
            let r = tikhonov_reconstruct(&m, &data, lambda).unwrap();
            assert!(r.residual >= last - 1e-12);
            last = r.residual;
        }
    }

    #[test]
    fn tikhonov_flags_pseudo_inverse() {
        let mut m = synthetic(3);
        m.entries[2] = m.entries[1].clone();
        let data = vec![Complex::new(1.0, 0.0); 3];
        let r = tikhonov_reconstruct(&m, &data, 0.0).unwrap();
        assert!(r.pseudo_inverse);
        assert_eq!(r.rank, 2);
        // minimal norm: the solution lies in the span of the kernels
        let x: Vec<f64> = r.values.clone();
        let k0: Vec<f64> = m.entries[0].real_part();
        let k1: Vec<f64> = m.entries[1].real_part();
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
        let gram = nalgebra::Matrix2::new(dot(&k0, &k0), dot(&k0, &k1), dot(&k1, &k0), dot(&k1, &k1));
        let c = gram.try_inverse().unwrap() * nalgebra::Vector2::new(dot(&k0, &x), dot(&k1, &x));
        let off: f64 = (0..x.len()).map(|n| (x[n] - c[0] * k0[n] - c[1] * k1[n]).powi(2)).sum();
        assert!(off.sqrt() < 1e-8 * dot(&x, &x).sqrt());
    }
}
