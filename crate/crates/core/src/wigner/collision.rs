use crate::field::PhaseField;
use crate::grid::{is_nyquist, PhaseGrid};
use crate::potential::{delta_eps_potential, Epsilon, Potential};
use crate::spectral::{for_each_k_row, spectral_shift_k, Fft1d};
use crate::Complex;

/// Pseudo-spectral `𝓛_V^ε`, precomputed for one grid, potential and ε.
///
/// `𝓛_V^ε[f] = i (2π)⁻¹ ∫∫ δ^ε[V](x, y) f(x, p) e^{iy(k-p)} dy dp` is a
/// Fourier multiplier in k: every k-row is transformed to the dual lattice
/// `y_m`, multiplied by `i δ^ε[V](x, y_m)` and transformed back. The Nyquist
/// coefficient is dropped, which keeps the operator exactly anti-self-adjoint
/// and real on real input.
#[derive(Debug, Clone)]
pub struct CollisionOperator {
    grid: PhaseGrid,
    fft: Fft1d,
    multipliers: Vec<Complex>,
}

impl CollisionOperator {
    pub fn new(grid: &PhaseGrid, potential: &Potential, eps: Epsilon) -> Self {
        let duals = grid.k_duals();
        let n_k = grid.n_k;
        let mut multipliers = Vec::with_capacity(grid.len());
        for i in 0..grid.n_x {
            let x = grid.x(i);
            for (m, &y) in duals.iter().enumerate() {
                let d = if is_nyquist(m, n_k) { 0.0 } else { delta_eps_potential(potential, x, y, eps) };
                multipliers.push(Complex::new(0.0, d));
            }
        }
        Self { grid: *grid, fft: Fft1d::new(n_k), multipliers }
    }

    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    /// Largest `|δ^ε[V]|` over the grid and the dual lattice; bounds the
    /// spectral radius of the operator.
    pub fn spectral_radius(&self) -> f64 {
        self.multipliers.iter().map(|m| m.im.abs()).fold(0.0, f64::max)
    }

    /// Replaces `values` by `𝓛[values]`.
    pub fn apply_in_place(&self, values: &mut [Complex]) {
        let n_k = self.grid.n_k;
        for_each_k_row(values, n_k, |i, row| {
            self.fft.forward(row);
            row.iter_mut()
                .zip(&self.multipliers[i * n_k..(i + 1) * n_k])
                .for_each(|(v, m)| *v *= m);
            self.fft.inverse(row);
        });
    }

    pub fn apply(&self, f: &PhaseField) -> PhaseField {
        let mut values = f.values().to_vec();
        self.apply_in_place(&mut values);
        PhaseField::from_values_with_realness(self.grid, values, f.hermitian_real())
    }
}

/// `𝓛_V^ε[f]` on the grid of `f`.
pub fn apply_collision(potential: &Potential, f: &PhaseField, eps: Epsilon) -> PhaseField {
    CollisionOperator::new(f.grid(), potential, eps).apply(f)
}

/// `D^ε f(x, k, p) = (f(x, k + εp/2) - f(x, k - εp/2)) / ε` by spectral shifts.
pub fn apply_d_eps(f: &PhaseField, p: f64, eps: Epsilon) -> PhaseField {
    let e = eps.value();
    let plus = spectral_shift_k(f, -0.5 * e * p);
    let minus = spectral_shift_k(f, 0.5 * e * p);
    let values = plus
        .values()
        .iter()
        .zip(minus.values())
        .map(|(a, b)| (a - b) / e)
        .collect();
    PhaseField::from_values_with_realness(*f.grid(), values, f.hermitian_real())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::gaussian_phase_field;
    use crate::grid::make_phase_grid;
    use crate::potential::GaussianSpec;
    use crate::spectral::derivative_k;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
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

    /// Smooth periodic field built from a few random low Fourier modes.
    fn random_smooth(rng: &mut ChaCha8Rng, g: &PhaseGrid) -> PhaseField {
        let modes: Vec<(f64, f64, f64, f64)> = (0..6)
            .map(|_| {
                (
                    rng.gen_range(-3..=3) as f64,
                    rng.gen_range(-5..=5) as f64,
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(0.0..2.0 * PI),
                )
            })
            .collect();
        let (lx, lk) = (g.x_len(), g.k_len());
        PhaseField::from_real_fn(*g, |x, k| {
            modes
                .iter()
                .map(|&(a, b, c, ph)| c * (2.0 * PI * (a * x / lx + b * k / lk) + ph).cos())
                .sum()
        })
    }

    fn rel_max(a: &PhaseField, b: &PhaseField) -> f64 {
        let d = a.values().iter().zip(b.values()).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max);
        d / b.max_abs().max(1e-300)
    }

    #[test]
    fn constant_potential_gives_zero() {
        let out = apply_collision(&Potential::constant(3.0), &data(), Epsilon::new(0.02).unwrap());
        assert!(out.max_abs() < 1e-12);
    }

    #[test]
    fn linear_potential_is_a_k_derivative() {
        let c = 0.8;
        let lin = Potential::Polynomial(vec![0.0, c]);
        let f = data();
        let expect = derivative_k(&f).scaled(c);
        for &e in &[0.1, 0.01, 0.001] {
            let out = apply_collision(&lin, &f, Epsilon::new(e).unwrap());
            assert!(rel_max(&out, &expect) < 1e-10);
        }
    }

    #[test]
    fn anti_self_adjoint_on_random_fields() {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let eps = Epsilon::inverse_pi_power_of_two(4);
        for pot in [vb(), Potential::Polynomial(vec![0.1, -0.5, 2.0, 1.0])] {
            let op = CollisionOperator::new(&g, &pot, eps);
            for _ in 0..5 {
                let f1 = random_smooth(&mut rng, &g);
                let f2 = random_smooth(&mut rng, &g);
                let a = op.apply(&f1).inner(&f2).unwrap();
                let b = f1.inner(&op.apply(&f2)).unwrap();
                let scale = op.apply(&f1).l2_norm() * f2.l2_norm();
                assert!((a + b).norm() <= 1e-10 * scale);
            }
        }
    }

    #[test]
    fn zero_mean_real_output_and_gauge_invariance() {
        let g = grid();
        let eps = Epsilon::inverse_pi_power_of_two(5);
        let f = data();
        let out = apply_collision(&vb(), &f, eps);
        assert!(out.hermitian_real());
        for i in 0..g.n_x {
            let s: Complex = (0..g.n_k).map(|j| out.get(i, j)).sum::<Complex>() * g.dk;
            assert!(s.norm() <= 1e-12 * f.l2_norm());
        }
        let shifted = apply_collision(&vb().with_offset(5.0), &f, eps);
        assert!(rel_max(&shifted, &out) < 1e-12);
    }

    #[test]
    fn quadratic_potential_is_eps_independent() {
        let quad = Potential::harmonic();
        let f = data();
        let a = apply_collision(&quad, &f, Epsilon::new(0.1).unwrap());
        let b = apply_collision(&quad, &f, Epsilon::new(0.003).unwrap());
        assert!(rel_max(&a, &b) < 1e-12);
    }

    #[test]
    fn d_eps_of_tapered_polynomials_matches_exact_difference() {
        let g = make_phase_grid(0.0, 1.0, 8, -4.0, 4.0, 256).unwrap();
        let taper = |k: f64| (-(k / 1.5).powi(4)).exp();
        let eps = Epsilon::new(0.05).unwrap();
        let p = 1.5;
        let s = 0.5 * eps.value() * p;
        for prof in [|k: f64| k, |k: f64| k * k] {
            let f = |k: f64| prof(k) * taper(k);
            let d = apply_d_eps(&PhaseField::from_real_fn(g, |_, k| f(k)), p, eps);
            for j in 0..g.n_k {
                let k = g.k(j);
                let expect = (f(k + s) - f(k - s)) / eps.value();
                assert!((d.get(3, j).re - expect).abs() < 1e-8, "k {k}");
            }
        }
    }

    #[test]
    fn d_eps_converges_to_p_dk_at_second_order() {
        let f = data();
        let p = 4.0;
        let limit = derivative_k(&f).scaled(p);
        let err = |e: f64| {
            let d = apply_d_eps(&f, p, Epsilon::new(e).unwrap());
            d.values().iter().zip(limit.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
        };
        let ratio = err(0.02) / err(0.01);
        assert!((ratio - 4.0).abs() < 0.2, "ratio {ratio}");
    }
}
