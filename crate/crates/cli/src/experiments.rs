//! One pipeline per experiment kind.

use std::io;

use semiclassical::analysis::{
    assemble_rep_matrix, err_curve_and_slope, relative_singular_values, singular_value_errors, subspace_angle,
    tikhonov_reconstruct,
};
use semiclassical::field::{gaussian_packet, gaussian_phase_field};
use semiclassical::liouville::{solve_liouville, PhaseData};
use semiclassical::representatives::{
    check_wigner_schrodinger_identity, rep_liouville, rep_schrodinger, rep_wigner, rep_wigner_oracle, Representative,
    RepresentativeKind, ORACLE_CAP,
};
use semiclassical::schrodinger::solve_schrodinger;
use semiclassical::wigner::{moments, solve_wigner_with};
use semiclassical::{Complex, Direction, Epsilon, Error};

use crate::config::{ConfigErrors, ExperimentConfig, ExperimentKind};
use crate::output::{write_matrix, OutputDir};

/// Threshold for boundary-decay warnings on sampled data.
const DECAY_THRESHOLD: f64 = 1e-10;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigErrors),
    #[error(transparent)]
    Solver(#[from] Error),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
}

fn solver_code(e: &Error) -> (u8, &'static str) {
    match e {
        Error::Config(_) => (2, "config"),
        Error::GridMismatch(_) => (3, "grid-mismatch"),
        Error::Cfl { .. } => (4, "cfl"),
        Error::Blowup { .. } => (5, "blowup"),
        Error::OracleCap { .. } => (6, "oracle-cap"),
        Error::DegenerateMatrix(_) => (7, "degenerate-matrix"),
        Error::RankDeficient { .. } => (8, "rank-deficient"),
        Error::Indeterminate(_) => (9, "indeterminate"),
        Error::NonPositive { .. } => (10, "non-positive"),
        Error::Assembly { source, .. } => solver_code(source),
    }
}

impl RunError {
    /// Process exit code and category name written to `error.txt`.
    pub fn code(&self) -> (u8, &'static str) {
        match self {
            RunError::Config(_) => (2, "config"),
            RunError::Solver(e) => solver_code(e),
            RunError::Io(_) => (11, "io"),
        }
    }
}

fn eps_of(cfg: &ExperimentConfig) -> Result<Epsilon, RunError> {
    cfg.eps().ok_or_else(|| RunError::Config(ConfigErrors(vec!["missing key 'eps.value'".into()])))
}

fn common_decisions(out: &mut OutputDir, cfg: &ExperimentConfig) {
    out.decision("boundary.x", "periodic");
    out.decision("boundary.k", "periodic");
    out.decision("time.quadrature", "trapezoid over every stored step");
    out.decision("wigner.scheme", "SSP-RK3 with WENO5 upwind transport");
    out.decision("wigner.collision_number", format!("{:?}", cfg.wigner_options().collision_number));
    out.decision("liouville.scheme", "backward characteristics, RK4, 4 substeps per step");
    out.decision("schrodinger.scheme", "Strang splitting");
}

fn decay(out: &mut OutputDir, f: &semiclassical::PhaseField, what: &str) {
    let w = f.decay_warnings(what, DECAY_THRESHOLD);
    out.warn_all(&w);
}

fn forward_wigner(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<(), RunError> {
    let grid = cfg.grid();
    let eps = eps_of(cfg)?;
    let f0 = gaussian_phase_field(&cfg.data("initial")?, &grid)?;
    decay(out, &f0, "initial data");
    let run = solve_wigner_with(&f0, &cfg.potential()?, eps, cfg.dt(), cfg.t_final(), Direction::Forward, &cfg.wigner_options())?;
    out.warn_all(&run.warnings);
    out.write_phase_field("initial.csv", run.initial())?;
    out.write_phase_field("final.csv", run.final_state())?;
    let (rho, current) = moments(run.final_state());
    let rows: Vec<Vec<f64>> = grid.x_nodes().into_iter().zip(rho.iter().zip(&current)).map(|(x, (r, j))| vec![x, *r, *j]).collect();
    out.write_table("moments.csv", &["x", "density", "current"], &rows, &[])?;
    out.decision("wigner.substeps_per_step", run.substeps);
    out.record("steps", run.steps());
    out.record_f64("mass_initial", run.initial().mass().re);
    out.record_f64("mass_final", run.final_state().mass().re);
    out.record_f64("max_imag_final", run.final_state().max_imag());
    Ok(())
}

fn forward_liouville(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<(), RunError> {
    let grid = cfg.grid();
    let data = PhaseData::gaussian(cfg.data("initial")?, grid)?;
    let run = solve_liouville(&data, &cfg.potential()?, cfg.dt(), cfg.t_final(), Direction::Forward)?;
    out.warn_all(&run.warnings);
    decay(out, run.initial(), "initial data");
    out.write_phase_field("initial.csv", run.initial())?;
    out.write_phase_field("final.csv", run.final_state())?;
    out.record("steps", run.steps());
    out.record("boundary_exits", run.boundary_exits);
    out.record_f64("mass_initial", run.initial().mass().re);
    out.record_f64("mass_final", run.final_state().mass().re);
    Ok(())
}

fn forward_schrodinger(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<(), RunError> {
    let grid = cfg.grid();
    let eps = eps_of(cfg)?;
    let phi = gaussian_packet(&cfg.data("initial")?, &grid, eps)?;
    let run = solve_schrodinger(&phi, &cfg.potential()?, eps, cfg.dt(), cfg.t_final(), Direction::Forward)?;
    out.warn_all(&run.warnings);
    out.write_wavefunction("initial.csv", run.initial())?;
    out.write_wavefunction("final.csv", run.final_state())?;
    out.record("steps", run.steps());
    out.record_f64("norm_initial", run.initial().l2_norm());
    out.record_f64("norm_final", run.final_state().l2_norm());
    Ok(())
}

/// Solves background and adjoint of one kind and combines them.
fn single_kernel(
    cfg: &ExperimentConfig,
    kind: RepresentativeKind,
    eps: Option<Epsilon>,
    oracle: bool,
    out: &mut OutputDir,
) -> Result<(Representative, Option<Representative>), RunError> {
    let grid = cfg.grid();
    let (vb, dt, t) = (cfg.potential()?, cfg.dt(), cfg.t_final());
    let (f, g) = (cfg.data("initial")?, cfg.data("final")?);
    match kind {
        RepresentativeKind::Liouville => {
            let b = solve_liouville(&PhaseData::gaussian(f, grid)?, &vb, dt, t, Direction::Forward)?;
            let a = solve_liouville(&PhaseData::gaussian(g, grid)?, &vb, dt, t, Direction::Backward)?;
            out.warn_all(&b.warnings);
            out.warn_all(&a.warnings);
            Ok((rep_liouville(&b, &a)?, None))
        }
        RepresentativeKind::Wigner => {
            let eps = eps.expect("checked by validate_for");
            let (fi, gt) = (gaussian_phase_field(&f, &grid)?, gaussian_phase_field(&g, &grid)?);
            decay(out, &fi, "initial data");
            decay(out, &gt, "final data");
            let opts = cfg.wigner_options();
            let b = solve_wigner_with(&fi, &vb, eps, dt, t, Direction::Forward, &opts)?;
            let a = solve_wigner_with(&gt, &vb, eps, dt, t, Direction::Backward, &opts)?;
            out.warn_all(&b.warnings);
            out.warn_all(&a.warnings);
            let fast = rep_wigner(&b, &a, eps)?;
            let slow = if oracle { Some(rep_wigner_oracle(&b, &a, eps, ORACLE_CAP)?) } else { None };
            Ok((fast, slow))
        }
        RepresentativeKind::Schrodinger => {
            let eps = eps.expect("checked by validate_for");
            let b = solve_schrodinger(&gaussian_packet(&f, &grid, eps)?, &vb, eps, dt, t, Direction::Forward)?;
            let a = solve_schrodinger(&gaussian_packet(&g, &grid, eps)?, &vb, eps, dt, t, Direction::Backward)?;
            out.warn_all(&b.warnings);
            out.warn_all(&a.warnings);
            Ok((rep_schrodinger(&b, &a, eps)?, None))
        }
    }
}

fn representative(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<(), RunError> {
    let kind = cfg.representative_kind();
    let eps = cfg.eps();
    let oracle = cfg.oracle() && kind == RepresentativeKind::Wigner;
    if cfg.oracle() && !oracle {
        out.warn(format!("representative.oracle ignored for kind {}", kind.name()));
    }
    let (r, slow) = single_kernel(cfg, kind, eps, oracle, out)?;
    out.write_line_field("representative.csv", &r.grid.x_nodes(), &r.values)?;
    out.decision("representative.kind", kind.name());
    out.record_f64("l2_norm", r.l2_norm());
    out.record_f64("max_abs", r.max_abs());
    out.record_f64("integral_re", r.integral().re);
    out.record_f64("integral_im", r.integral().im);
    if let Some(s) = slow {
        out.write_line_field("representative_oracle.csv", &s.grid.x_nodes(), &s.values)?;
        out.record_f64("oracle_relative_difference", r.relative_l2_distance(&s)?);
    }
    Ok(())
}

fn sweep_epsilon(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<(), RunError> {
    let (r_l, _) = single_kernel(cfg, RepresentativeKind::Liouville, None, false, out)?;
    out.write_line_field("representative_liouville.csv", &r_l.grid.x_nodes(), &r_l.values)?;
    let sweep = cfg.sweep();
    let mut errs = Vec::with_capacity(sweep.len());
    for (n, &e) in sweep.iter().enumerate() {
        let (r_w, _) = single_kernel(cfg, RepresentativeKind::Wigner, Some(e), false, out)?;
        out.write_line_field(&format!("representative_wigner_{n}.csv"), &r_w.grid.x_nodes(), &r_w.values)?;
        errs.push(r_w.relative_l2_distance(&r_l)?);
    }
    let eps: Vec<f64> = sweep.iter().map(|e| e.value()).collect();
    let report = err_curve_and_slope(&eps, &errs)?;
    let rows: Vec<Vec<f64>> = eps.iter().zip(&errs).map(|(e, r)| vec![*e, *r]).collect();
    let footer = vec![format!("slope = {:.16e}", report.fitted_slope), format!("eps_labels = {}", cfg.sweep_labels().join(" "))];
    out.write_table("err_curve.csv", &["eps", "err"], &rows, &footer)?;
    out.record_f64("slope", report.fitted_slope);
    out.record("strictly_decreasing", report.strictly_decreasing());
    Ok(())
}

fn svd_study(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<(), RunError> {
    let setup = cfg.assembly_setup()?;
    let c = cfg.svd_centers();
    let limit = assemble_rep_matrix(&c, &c, &setup, RepresentativeKind::Liouville, None)?;
    write_matrix(out, "matrix_liouville", &limit)?;
    let sweep = cfg.sweep();
    let mats = sweep
        .iter()
        .map(|&e| assemble_rep_matrix(&c, &c, &setup, RepresentativeKind::Wigner, Some(e)))
        .collect::<Result<Vec<_>, _>>()?;
    for (n, m) in mats.iter().enumerate() {
        write_matrix(out, &format!("matrix_wigner_{n}"), m)?;
    }
    out.decision("svd.matricization", "n_x rows by N_pairs columns, sqrt(dx) weighted; singular vectors in x");

    let mut spectra = vec![relative_singular_values(&limit)?];
    for m in &mats {
        spectra.push(relative_singular_values(m)?);
    }
    let rows: Vec<Vec<f64>> = (0..spectra[0].len())
        .map(|i| std::iter::once((i + 1) as f64).chain(spectra.iter().map(|s| s[i])).collect())
        .collect();
    let mut header = vec!["index".to_string(), "liouville".to_string()];
    header.extend((0..mats.len()).map(|n| format!("wigner_{n}")));
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    out.write_table("singular_values.csv", &header_refs, &rows, &[])?;

    let refs: Vec<_> = mats.iter().collect();
    let sv = singular_value_errors(&refs, &limit, &cfg.singular_indices())?;
    out.warn_all(&sv.warnings);
    let eps: Vec<f64> = sweep.iter().map(|e| e.value()).collect();
    let mut header = vec!["eps".to_string()];
    header.extend(sv.curves.iter().map(|(i, _)| format!("err_s{i}")));
    let rows: Vec<Vec<f64>> =
        eps.iter().enumerate().map(|(n, e)| std::iter::once(*e).chain(sv.curves.iter().map(|(_, c)| c[n])).collect()).collect();
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    out.write_table("singular_value_errors.csv", &header_refs, &rows, &[])?;

    let mut angles = Vec::new();
    for &k in &cfg.angle_ranks() {
        let curve = mats.iter().map(|m| subspace_angle(&limit, m, k)).collect::<Result<Vec<_>, _>>()?;
        angles.push((k, curve));
    }
    let mut header = vec!["eps".to_string()];
    header.extend(angles.iter().map(|(k, _)| format!("err_r{k}")));
    let rows: Vec<Vec<f64>> =
        eps.iter().enumerate().map(|(n, e)| std::iter::once(*e).chain(angles.iter().map(|(_, c)| c[n])).collect()).collect();
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    out.write_table("subspace_angles.csv", &header_refs, &rows, &[])?;
    out.record("pairs", limit.pair_count());
    Ok(())
}

fn identity_check(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<(), RunError> {
    let grid = cfg.grid();
    let eps = eps_of(cfg)?;
    let packet = |block: &str| -> Result<_, RunError> { Ok(gaussian_packet(&cfg.data(block)?, &grid, eps)?) };
    let lattice = 2.0 * std::f64::consts::PI * eps.value() * grid.n_k as f64 / (grid.k_max - grid.k_min);
    let period = grid.x_max - grid.x_min;
    if ((lattice - period) / period).abs() > 1e-12 {
        out.warn(format!(
            "half-shift lattice spans {lattice:.6} but the x-period is {period:.6}; the identity holds only approximately"
        ));
    }
    let check = check_wigner_schrodinger_identity(
        &packet("initial")?,
        &packet("initial_prime")?,
        &packet("final")?,
        &packet("final_prime")?,
        &cfg.potential()?,
        eps,
        cfg.dt(),
        cfg.t_final(),
        &grid,
    )?;
    let rows: Vec<Vec<f64>> = grid
        .x_nodes()
        .into_iter()
        .zip(check.lhs.iter().zip(&check.rhs))
        .map(|(x, (l, r))| vec![x, l.re, l.im, r.re, r.im])
        .collect();
    out.write_table("identity.csv", &["x", "lhs_re", "lhs_im", "rhs_re", "rhs_im"], &rows, &[])?;
    out.record_f64("residual", check.residual);
    println!("residual = {:.16e}", check.residual);
    Ok(())
}

fn reconstruct(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<(), RunError> {
    let setup = cfg.assembly_setup()?;
    let kind = cfg.representative_kind();
    let c = cfg.svd_centers();
    let m = assemble_rep_matrix(&c, &c, &setup, kind, cfg.eps())?;
    write_matrix(out, "matrix", &m)?;
    let truth = cfg.perturbation()?;
    let data: Vec<Complex> = m.entries.iter().map(|r| r.pair_with(&truth)).collect();
    out.decision("reconstruct.data", "noiseless pairings of the kernels with the configured perturbation");
    let rec = tikhonov_reconstruct(&m, &data, cfg.lambda())?;
    if rec.pseudo_inverse {
        out.warn("lambda = 0 with rank-deficient normal equations; minimal-norm solution returned");
    }
    let xs = m.grid.x_nodes();
    let exact: Vec<f64> = xs.iter().map(|&x| truth.value(x)).collect();
    let rows: Vec<Vec<f64>> = xs.iter().zip(rec.values.iter().zip(&exact)).map(|(x, (v, t))| vec![*x, *v, *t]).collect();
    out.write_table("reconstruction.csv", &["x", "reconstructed", "perturbation"], &rows, &[])?;
    out.decision("representative.kind", kind.name());
    out.record("rank", rec.rank);
    out.record_f64("residual", rec.residual);
    out.record("pseudo_inverse", rec.pseudo_inverse);
    Ok(())
}

/// Runs `kind` and fills `out`; the caller writes the manifest.
pub fn run_experiment(kind: ExperimentKind, cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<(), RunError> {
    cfg.validate_for(kind)?;
    common_decisions(out, cfg);
    match kind {
        ExperimentKind::ForwardWigner => forward_wigner(cfg, out),
        ExperimentKind::ForwardLiouville => forward_liouville(cfg, out),
        ExperimentKind::ForwardSchrodinger => forward_schrodinger(cfg, out),
        ExperimentKind::Representative => representative(cfg, out),
        ExperimentKind::SweepEpsilon => sweep_epsilon(cfg, out),
        ExperimentKind::SvdStudy => svd_study(cfg, out),
        ExperimentKind::IdentityCheck => identity_check(cfg, out),
        ExperimentKind::Reconstruct => reconstruct(cfg, out),
    }
}
