//! Fourier utilities on the periodic axes: shifts, derivatives and the
//! per-row/per-column plumbing used by the phase-space operators.
//!
//! Nyquist convention: shifts multiply the Nyquist coefficient by the real
//! factor `cos(ξ_N s)` and derivatives drop it, so real input stays real.

use std::sync::Arc;

use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::field::{ComplexField, PhaseField};
use crate::grid::{angular_frequencies, is_nyquist};
use crate::Complex;

/// Forward and normalized inverse transforms of one length.
#[derive(Clone)]
pub struct Fft1d {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fft1d {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft1d").field("n", &self.n).finish()
    }
}

impl Fft1d {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Unnormalized `Σ_j u_j e^{-2πi jm/n}`.
    pub fn forward(&self, buf: &mut [Complex]) {
        self.forward.process(buf);
    }

    /// Normalized inverse, so `inverse(forward(u)) == u`.
    pub fn inverse(&self, buf: &mut [Complex]) {
        self.inverse.process(buf);
        let scale = 1.0 / self.n as f64;
        buf.iter_mut().for_each(|v| *v *= scale);
    }
}

/// Spectral multipliers of a periodic translation `u(x) -> u(x - shift)`.
pub fn shift_multipliers(freqs: &[f64], shift: f64) -> Vec<Complex> {
    let n = freqs.len();
    freqs
        .iter()
        .enumerate()
        .map(|(m, &xi)| {
            if is_nyquist(m, n) {
                Complex::new((xi * shift).cos(), 0.0)
            } else {
                Complex::from_polar(1.0, -xi * shift)
            }
        })
        .collect()
}

/// Spectral multipliers of `d/dx`.
pub fn derivative_multipliers(freqs: &[f64]) -> Vec<Complex> {
    let n = freqs.len();
    freqs
        .iter()
        .enumerate()
        .map(|(m, &xi)| {
            if is_nyquist(m, n) {
                Complex::new(0.0, 0.0)
            } else {
                Complex::new(0.0, xi)
            }
        })
        .collect()
}

/// Applies a Fourier multiplier to `buf` in place.
pub fn apply_multiplier(fft: &Fft1d, buf: &mut [Complex], multiplier: &[Complex]) {
    fft.forward(buf);
    buf.iter_mut().zip(multiplier).for_each(|(v, m)| *v *= m);
    fft.inverse(buf);
}

/// Applies `op` to every k-row (fixed x) of a phase-space array, in parallel.
pub fn for_each_k_row<F>(values: &mut [Complex], n_k: usize, op: F)
where
    F: Fn(usize, &mut [Complex]) + Sync + Send,
{
    values
        .par_chunks_mut(n_k)
        .enumerate()
        .for_each(|(i, row)| op(i, row));
}

/// Applies `op` to every x-column (fixed k) of a phase-space array. Columns
/// are gathered into contiguous buffers, processed in parallel and scattered
/// back.
pub fn for_each_x_column<F>(values: &mut [Complex], n_x: usize, n_k: usize, op: F)
where
    F: Fn(usize, &mut [Complex]) + Sync + Send,
{
    let columns: Vec<Vec<Complex>> = (0..n_k)
        .into_par_iter()
        .map(|j| {
            let mut col: Vec<Complex> = (0..n_x).map(|i| values[i * n_k + j]).collect();
            op(j, &mut col);
            col
        })
        .collect();
    for (j, col) in columns.into_iter().enumerate() {
        for (i, v) in col.into_iter().enumerate() {
            values[i * n_k + j] = v;
        }
    }
}

/// Returns `f(x, k - shift)` with periodic wraparound in k.
pub fn spectral_shift_k(f: &PhaseField, shift: f64) -> PhaseField {
    let grid = *f.grid();
    let fft = Fft1d::new(grid.n_k);
    let mult = shift_multipliers(&grid.k_duals(), shift);
    let mut values = f.values().to_vec();
    for_each_k_row(&mut values, grid.n_k, |_, row| apply_multiplier(&fft, row, &mult));
    PhaseField::from_values_with_realness(grid, values, f.hermitian_real())
}

/// Returns `∂_k f` by spectral differentiation in k.
pub fn derivative_k(f: &PhaseField) -> PhaseField {
    let grid = *f.grid();
    let fft = Fft1d::new(grid.n_k);
    let mult = derivative_multipliers(&grid.k_duals());
    let mut values = f.values().to_vec();
    for_each_k_row(&mut values, grid.n_k, |_, row| apply_multiplier(&fft, row, &mult));
    PhaseField::from_values_with_realness(grid, values, f.hermitian_real())
}

/// Returns `∂_x f` by spectral differentiation in x.
pub fn derivative_x(f: &PhaseField) -> PhaseField {
    let grid = *f.grid();
    let fft = Fft1d::new(grid.n_x);
    let mult = derivative_multipliers(&grid.x_frequencies());
    let mut values = f.values().to_vec();
    for_each_x_column(&mut values, grid.n_x, grid.n_k, |_, col| {
        apply_multiplier(&fft, col, &mult)
    });
    PhaseField::from_values_with_realness(grid, values, f.hermitian_real())
}

/// Spectral derivative of samples on a periodic axis of the given length.
pub fn derivative_periodic(values: &[Complex], length: f64) -> Vec<Complex> {
    let fft = Fft1d::new(values.len());
    let mult = derivative_multipliers(&angular_frequencies(values.len(), length));
    let mut buf = values.to_vec();
    apply_multiplier(&fft, &mut buf, &mult);
    buf
}

/// Returns `φ(x - shift)` by trigonometric interpolation on the periodic x-axis.
pub fn shift_x(phi: &ComplexField, shift: f64) -> ComplexField {
    let grid = *phi.grid();
    let fft = Fft1d::new(grid.n_x);
    let mult = shift_multipliers(&grid.x_frequencies(), shift);
    let mut buf = phi.values().to_vec();
    apply_multiplier(&fft, &mut buf, &mult);
    ComplexField::from_values(grid, buf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_phase_grid;
    use crate::potential::GaussianSpec;
    use crate::field::gaussian_phase_field;

    fn gaussian_field() -> PhaseField {
        let grid = make_phase_grid(0.0, 1.0, 32, -2.0, 2.0, 128).unwrap();
        let spec = GaussianSpec::phase(1.0, 0.5, 0.15, 0.2, 0.3).unwrap();
        gaussian_phase_field(&spec, &grid).unwrap()
    }

    #[test]
    fn zero_shift_is_identity() {
        let f = gaussian_field();
        let g = spectral_shift_k(&f, 0.0);
        let err = f.values().iter().zip(g.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-13, "{err}");
    }

    #[test]
    fn whole_cell_shift_is_a_roll() {
        let f = gaussian_field();
        let grid = *f.grid();
        let g = spectral_shift_k(&f, grid.dk);
        for i in 0..grid.n_x {
            for j in 0..grid.n_k {
                let rolled = f.get(i, (j + grid.n_k - 1) % grid.n_k);
                assert!((g.get(i, j) - rolled).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn fractional_shift_matches_analytic_gaussian() {
        let f = gaussian_field();
        let grid = *f.grid();
        let s = 0.3 * grid.dk;
        let g = spectral_shift_k(&f, s);
        let spec = GaussianSpec::phase(1.0, 0.5, 0.15, 0.2 + s, 0.3).unwrap();
        let exact = gaussian_phase_field(&spec, &grid).unwrap();
        let peak = exact.max_abs();
        let err = g.values().iter().zip(exact.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err / peak < 1e-6, "{}", err / peak);
    }

    #[test]
    fn shift_and_inverse_shift_round_trip() {
        let f = gaussian_field();
        let g = spectral_shift_k(&spectral_shift_k(&f, 0.137), -0.137);
        let err = f.values().iter().zip(g.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err / f.max_abs() < 1e-10);
    }

    #[test]
    fn derivative_of_sine_is_cosine() {
        let n = 64;
        let len = 2.0;
        let w = 2.0 * std::f64::consts::PI * 3.0 / len;
        let vals: Vec<Complex> = (0..n)
            .map(|i| Complex::new((w * i as f64 * len / n as f64).sin(), 0.0))
            .collect();
        let d = derivative_periodic(&vals, len);
        for (i, v) in d.iter().enumerate() {
            let x = i as f64 * len / n as f64;
            assert!((v.re - w * (w * x).cos()).abs() < 1e-10);
            assert!(v.im.abs() < 1e-12);
        }
    }
}
