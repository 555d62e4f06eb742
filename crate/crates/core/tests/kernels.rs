mod common;

use common::*;
use proptest::prelude::*;
use semiclassical::analysis::*;
use semiclassical::field::{gaussian_packet, gaussian_phase_field, l2_inner_product};
use semiclassical::liouville::{solve_liouville, PhaseData};
use semiclassical::representatives::*;
use semiclassical::schrodinger::{solve_schrodinger, solve_schrodinger_perturbed};
use semiclassical::wigner::{solve_wigner, solve_wigner_perturbed};
use semiclassical::*;

fn liouville_setup() -> AssemblySetup {
    AssemblySetup { grid: preset_grid(64, 128), ..desk_setup() }
}

#[test]
fn one_by_one_matrix_equals_standalone_kernel() {
    let setup = liouville_setup();
    let m = assemble_rep_matrix(&[0.24], &[0.26], &setup, RepresentativeKind::Liouville, None).unwrap();
    let g = setup.grid;
    let lb = solve_liouville(&PhaseData::gaussian(initial_at(0.24), g).unwrap(), &setup.potential, setup.dt, T_FINAL, Direction::Forward)
        .unwrap();
    let la = solve_liouville(&PhaseData::gaussian(final_at(0.26), g).unwrap(), &setup.potential, setup.dt, T_FINAL, Direction::Backward)
        .unwrap();
    assert_eq!(m.entry(0, 0).values, rep_liouville(&lb, &la).unwrap().values);
}

#[test]
fn cached_assembly_matches_pairwise_recomputation() {
    let setup = liouville_setup();
    let c = centers(0.2, 0.3, 5);
    let m = assemble_rep_matrix(&c, &c, &setup, RepresentativeKind::Liouville, None).unwrap();
    for (i, &bx) in c.iter().enumerate() {
        for (j, &cx) in c.iter().enumerate() {
            let single = assemble_rep_matrix(&[bx], &[cx], &setup, RepresentativeKind::Liouville, None).unwrap();
            assert_eq!(m.entry(i, j).values, single.entries[0].values);
        }
    }
}

#[test]
fn assembly_reports_failing_side() {
    let mut setup = liouville_setup();
    setup.dt = 0.1;
    let err = assemble_rep_matrix(&[0.25], &[0.25], &setup, RepresentativeKind::Wigner, Some(Epsilon::inverse_pi_power_of_two(4)))
        .unwrap_err();
    assert!(matches!(err, Error::Assembly { i: 0, .. }), "{err}");
    assert!(assemble_rep_matrix(&[0.7], &[0.25], &setup, RepresentativeKind::Liouville, None).is_err());
}

#[test]
fn noiseless_inversion_recovers_the_sensed_part() {
    let setup = liouville_setup();
    let c = desk_centers();
    let m = assemble_rep_matrix(&c, &c, &setup, RepresentativeKind::Liouville, None).unwrap();
    let truth = Potential::Gaussian(GaussianSpec::x(0.1, 0.25, 1.0 / 16.0).unwrap());
    let data: Vec<Complex> = m.entries.iter().map(|r| r.pair_with(&truth)).collect();
    let rec = tikhonov_reconstruct(&m, &data, 1e-12).unwrap();

    // orthogonal projection of the truth onto the span of the kernels
    let g = m.grid;
    let w = g.dx.sqrt();
    let a = nalgebra::DMatrix::from_fn(m.pair_count(), g.n_x, |r, c| m.entries[r].values[c].re * w);
    let u_true = nalgebra::DVector::from_fn(g.n_x, |i, _| truth.value(g.x(i)) * w);
    let svd = a.svd(false, true);
    let vt = svd.v_t.unwrap();
    let top = svd.singular_values.max();
    let mut proj = nalgebra::DVector::zeros(g.n_x);
    for (n, s) in svd.singular_values.iter().enumerate() {
        if *s > 1e-6 * top {
            proj += vt.row(n).transpose() * vt.row(n).dot(&u_true.transpose());
        }
    }
    let rec_u = nalgebra::DVector::from_fn(g.n_x, |i, _| rec.values[i] * w);
    let corr = rec_u.dot(&proj) / (rec_u.norm() * proj.norm());
    assert!(corr > 0.9, "correlation {corr}");
}

#[test]
fn schrodinger_fredholm_residual_converges_under_dt_halving() {
    let grid = preset_grid(128, 8);
    let eps = Epsilon::inverse_pi_power_of_two(5);
    let vt = &perturbations()[0];
    let residual = |dt: f64| {
        let phi = gaussian_packet(&initial_at(0.24), &grid, eps).unwrap();
        let psi = gaussian_packet(&final_at(0.26), &grid, eps).unwrap();
        let sb = solve_schrodinger(&phi, &background(), eps, dt, T_FINAL, Direction::Forward).unwrap();
        let sa = solve_schrodinger(&psi, &background(), eps, dt, T_FINAL, Direction::Backward).unwrap();
        let lhs = l2_inner_product(&solve_schrodinger_perturbed(&sb, vt, eps).unwrap(), &psi).unwrap();
        (lhs - rep_schrodinger(&sb, &sa, eps).unwrap().pair_with(vt)).norm() / lhs.norm()
    };
    let (a, b) = (residual(1.0 / 256.0), residual(1.0 / 512.0));
    assert!(a < 1e-3 && b < a / 3.0, "{a} {b}");
}

#[test]
fn identity_with_repeated_pairs_is_indeterminate() {
    // φ_I' = φ_I and ψ_T' = ψ_T make both sides vanish identically
    let grid = make_phase_grid(0.0, 1.0, 64, -4.0, 4.0, 64).unwrap();
    let eps = Epsilon::inverse_pi_power_of_two(4);
    let vb = Potential::Gaussian(GaussianSpec::x(1.0, 0.5, 0.125).unwrap());
    let phi = gaussian_packet(&GaussianSpec::phase(1.0, 0.45, 0.08, 0.25, 0.1).unwrap(), &grid, eps).unwrap();
    let psi = gaussian_packet(&GaussianSpec::phase(1.0, 0.55, 0.08, 0.25, 0.1).unwrap(), &grid, eps).unwrap();
    let err = check_wigner_schrodinger_identity(&phi, &phi, &psi, &psi, &vb, eps, 1.0 / 256.0, T_FINAL, &grid).unwrap_err();
    assert!(matches!(err, Error::Indeterminate(_)));
}

#[test]
fn wigner_fredholm_pairing_closes_at_desk_resolution() {
    let grid = preset_grid(128, 256);
    let eps = Epsilon::inverse_pi_power_of_two(5);
    let dt = 1.0 / 256.0;
    let wb = solve_wigner(&gaussian_phase_field(&initial_at(0.24), &grid).unwrap(), &background(), eps, dt, T_FINAL, Direction::Forward)
        .unwrap();
    let wa = solve_wigner(&gaussian_phase_field(&final_at(0.26), &grid).unwrap(), &background(), eps, dt, T_FINAL, Direction::Backward)
        .unwrap();
    let r = rep_wigner(&wb, &wa, eps).unwrap();
    for vt in perturbations() {
        let lhs = solve_wigner_perturbed(&wb, &vt, eps).unwrap().inner(wa.final_state()).unwrap();
        let rel = (lhs - r.pair_with(&vt)).norm() / lhs.norm();
        assert!(rel < 1e-3, "{rel}");
    }
}

fn small_matrix(seed: u64) -> RepresentativeMatrix {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let grid = preset_grid(32, 8);
    let c = centers(0.2, 0.3, 3);
    let entries = (0..9)
        .map(|_| {
            let (a, x0) = (rng.gen_range(-1.0..1.0), rng.gen_range(0.15..0.35));
            Representative {
                grid,
                values: (0..32).map(|i| Complex::new(a * (-((grid.x(i) - x0) / 0.05).powi(2)).exp(), 0.0)).collect(),
                kind: RepresentativeKind::Liouville,
                eps: None,
                provenance: String::new(),
            }
        })
        .collect();
    RepresentativeMatrix::from_entries(c.clone(), c, entries, RepresentativeKind::Liouville, None).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn relative_singular_values_are_scale_invariant(seed in any::<u64>(), s in prop_oneof![-1e3..-1e-3, 1e-3..1e3f64]) {
        let m = small_matrix(seed);
        let a = relative_singular_values(&m).unwrap();
        let b = relative_singular_values(&m.scaled(s)).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn subspace_angle_is_symmetric(seed in any::<u64>(), k in 1usize..3) {
        let (a, b) = (small_matrix(seed), small_matrix(seed.wrapping_add(1)));
        let ab = subspace_angle(&a, &b, k).unwrap();
        let ba = subspace_angle(&b, &a, k).unwrap();
        prop_assert!((ab - ba).abs() < 1e-10);
    }

    #[test]
    fn tikhonov_residual_grows_with_lambda(seed in any::<u64>(), l1 in 1e-10..1e-2f64, f in 1.0..1e3f64) {
        let m = small_matrix(seed);
        let data: Vec<Complex> = (0..9).map(|n| Complex::new((n as f64).sin(), 0.0)).collect();
        let a = tikhonov_reconstruct(&m, &data, l1).unwrap();
        let b = tikhonov_reconstruct(&m, &data, l1 * f).unwrap();
        prop_assert!(b.residual >= a.residual - 1e-12);
    }
}
