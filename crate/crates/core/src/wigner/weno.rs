//! Fifth-order WENO (Jiang–Shu) reconstruction for constant-velocity
//! transport `∂_t f + v ∂_x f = 0` on a periodic row.
//!
//! With a constant velocity per row the Lax–Friedrichs splitting with
//! `α = |v|` keeps only the upwind half of the flux, so each interface value
//! is one biased WENO reconstruction.

use rayon::prelude::*;

use crate::Complex;

pub const WENO_EPSILON: f64 = 1e-6;

const LINEAR_WEIGHTS: [f64; 3] = [0.1, 0.6, 0.3];

#[inline]
fn nonlinear_weights(s: [f64; 5]) -> [f64; 3] {
    let [a, b, c, d, e] = s;
    let b0 = 13.0 / 12.0 * (a - 2.0 * b + c).powi(2) + 0.25 * (a - 4.0 * b + 3.0 * c).powi(2);
    let b1 = 13.0 / 12.0 * (b - 2.0 * c + d).powi(2) + 0.25 * (b - d).powi(2);
    let b2 = 13.0 / 12.0 * (c - 2.0 * d + e).powi(2) + 0.25 * (3.0 * c - 4.0 * d + e).powi(2);
    let a0 = LINEAR_WEIGHTS[0] / (WENO_EPSILON + b0).powi(2);
    let a1 = LINEAR_WEIGHTS[1] / (WENO_EPSILON + b1).powi(2);
    let a2 = LINEAR_WEIGHTS[2] / (WENO_EPSILON + b2).powi(2);
    let sum = a0 + a1 + a2;
    [a0 / sum, a1 / sum, a2 / sum]
}

#[inline]
fn candidates(s: [f64; 5]) -> [f64; 3] {
    let [a, b, c, d, e] = s;
    [
        (2.0 * a - 7.0 * b + 11.0 * c) / 6.0,
        (-b + 5.0 * c + 2.0 * d) / 6.0,
        (2.0 * c + 5.0 * d - e) / 6.0,
    ]
}

/// Upwind stencil for the interface `i + 1/2`, ordered from far upwind to
/// downwind so that the centre entry is the upwind cell.
#[inline]
fn stencil(row: &[f64], i: usize, forward: bool) -> [f64; 5] {
    let n = row.len();
    let at = |o: isize| row[(i as isize + o).rem_euclid(n as isize) as usize];
    if forward {
        [at(-2), at(-1), at(0), at(1), at(2)]
    } else {
        [at(3), at(2), at(1), at(0), at(-1)]
    }
}

/// Writes `-v ∂_x u` into `out` for one periodic row.
///
/// Weights come from `weight_source`; passing the row itself gives the usual
/// WENO5, passing a different row gives the linear map with those weights
/// frozen.
pub fn transport_row(u: &[f64], weight_source: &[f64], velocity: f64, dx: f64, out: &mut [f64]) {
    let n = u.len();
    if velocity == 0.0 {
        out.iter_mut().for_each(|o| *o = 0.0);
        return;
    }
    let forward = velocity > 0.0;
    let mut faces = vec![0.0; n];
    for (i, face) in faces.iter_mut().enumerate() {
        let w = nonlinear_weights(stencil(weight_source, i, forward));
        let c = candidates(stencil(u, i, forward));
        *face = w[0] * c[0] + w[1] * c[1] + w[2] * c[2];
    }
    let scale = -velocity / dx;
    for i in 0..n {
        let left = faces[(i + n - 1) % n];
        out[i] = scale * (faces[i] - left);
    }
}

/// `-v_j ∂_x f` for every k-row of an x-major phase-space array; real and
/// imaginary parts are reconstructed separately.
pub fn transport(
    values: &[Complex],
    weight_source: Option<&[Complex]>,
    velocities: &[f64],
    n_x: usize,
    dx: f64,
    out: &mut [Complex],
) {
    let n_k = velocities.len();
    let src = weight_source.unwrap_or(values);
    let columns: Vec<Vec<Complex>> = (0..n_k)
        .into_par_iter()
        .map(|j| {
            let gather = |a: &[Complex], part: fn(&Complex) -> f64| -> Vec<f64> {
                (0..n_x).map(|i| part(&a[i * n_k + j])).collect()
            };
            let mut re = vec![0.0; n_x];
            let mut im = vec![0.0; n_x];
            transport_row(&gather(values, |c| c.re), &gather(src, |c| c.re), velocities[j], dx, &mut re);
            transport_row(&gather(values, |c| c.im), &gather(src, |c| c.im), velocities[j], dx, &mut im);
            re.into_iter().zip(im).map(|(a, b)| Complex::new(a, b)).collect()
        })
        .collect();
    for (j, col) in columns.into_iter().enumerate() {
        for (i, v) in col.into_iter().enumerate() {
            out[i * n_k + j] = v;
        }
    }
}
