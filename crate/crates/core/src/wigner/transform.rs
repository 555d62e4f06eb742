use rayon::prelude::*;

use crate::error::Result;
use crate::field::{ComplexField, PhaseField};
use crate::grid::{is_nyquist, PhaseGrid};
use crate::potential::Epsilon;
use crate::spectral::{shift_multipliers, Fft1d};
use crate::Complex;

/// `W^ε[φ₁, φ₂](x, k) = (2π)⁻¹ ∫ e^{iky} φ₁(x - εy/2) conj(φ₂)(x + εy/2) dy`.
///
/// The y-integral runs over the lattice dual to the k-grid,
/// `y_m = 2πm / (k_max - k_min)`, without its Nyquist point; the half-shifts
/// are trigonometric interpolation on the periodic x-axis. With that lattice
/// the k-marginal `Σ_k W dk` equals `φ₁ conj(φ₂)` exactly.
pub fn wigner_transform(
    phi1: &ComplexField,
    phi2: &ComplexField,
    eps: Epsilon,
    grid: &PhaseGrid,
) -> Result<PhaseField> {
    grid.ensure_same_x(phi1.grid(), "wigner_transform (first argument)")?;
    grid.ensure_same_x(phi2.grid(), "wigner_transform (second argument)")?;
    let (n_x, n_k) = (grid.n_x, grid.n_k);
    let duals = grid.k_duals();
    let x_freqs = grid.x_frequencies();
    let fft_x = Fft1d::new(n_x);
    let mut spec1 = phi1.values().to_vec();
    let mut spec2 = phi2.values().to_vec();
    fft_x.forward(&mut spec1);
    fft_x.forward(&mut spec2);

    // h[m][i] = φ₁(x_i - s_m) conj φ₂(x_i + s_m) e^{i k_min y_m},  s_m = ε y_m / 2
    let columns: Vec<Vec<Complex>> = (0..n_k)
        .into_par_iter()
        .map(|m| {
            if is_nyquist(m, n_k) {
                return vec![Complex::new(0.0, 0.0); n_x];
            }
            let s = 0.5 * eps.value() * duals[m];
            let shifted = |spec: &[Complex], shift: f64| {
                let mult = shift_multipliers(&x_freqs, shift);
                let mut buf: Vec<Complex> = spec.iter().zip(&mult).map(|(a, b)| a * b).collect();
                fft_x.inverse(&mut buf);
                buf
            };
            let a = shifted(&spec1, s);
            let b = shifted(&spec2, -s);
            let phase = Complex::from_polar(1.0, grid.k_min * duals[m]);
            a.iter().zip(&b).map(|(u, v)| u * v.conj() * phase).collect()
        })
        .collect();

    let fft_k = Fft1d::new(n_k);
    let scale = 1.0 / grid.dk;
    let mut values = vec![Complex::new(0.0, 0.0); grid.len()];
    values.par_chunks_mut(n_k).enumerate().for_each(|(i, row)| {
        for (m, col) in columns.iter().enumerate() {
            row[m] = col[i];
        }
        fft_k.inverse(row);
        row.iter_mut().for_each(|v| *v *= scale);
    });
    Ok(PhaseField::from_values(*grid, values))
}

/// Zeroth and first k-moments `ρ = Σ_k f dk`, `J = Σ_k k f dk` (real parts).
pub fn moments(f: &PhaseField) -> (Vec<f64>, Vec<f64>) {
    let g = *f.grid();
    let mut rho = vec![0.0; g.n_x];
    let mut current = vec![0.0; g.n_x];
    for i in 0..g.n_x {
        for j in 0..g.n_k {
            let v = f.get(i, j).re;
            rho[i] += v * g.dk;
            current[i] += g.k(j) * v * g.dk;
        }
    }
    (rho, current)
}
