//! Periodic phase-space grid shared by every solver.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Uniform grid on `[x_min, x_max) × [k_min, k_max)`.
///
/// Both axes are sampled with the right endpoint excluded, so the x-axis is
/// periodic with period `x_max - x_min`. The k-axis is treated as periodic by
/// the spectral operations (shifts, derivatives, the collision operator).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub k_min: f64,
    pub k_max: f64,
    pub n_x: usize,
    pub n_k: usize,
    pub dx: f64,
    pub dk: f64,
}

/// Builds a [`PhaseGrid`]; counts must be powers of two no smaller than 8.
pub fn make_phase_grid(
    x_min: f64,
    x_max: f64,
    n_x: usize,
    k_min: f64,
    k_max: f64,
    n_k: usize,
) -> Result<PhaseGrid> {
    PhaseGrid::new(x_min, x_max, n_x, k_min, k_max, n_k)
}

impl PhaseGrid {
    pub fn new(
        x_min: f64,
        x_max: f64,
        n_x: usize,
        k_min: f64,
        k_max: f64,
        n_k: usize,
    ) -> Result<Self> {
        let mut problems = Vec::new();
        if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
            problems.push(format!("x bounds must satisfy x_min < x_max, got [{x_min}, {x_max}]"));
        }
        if !(k_min.is_finite() && k_max.is_finite() && k_min < k_max) {
            problems.push(format!("k bounds must satisfy k_min < k_max, got [{k_min}, {k_max}]"));
        }
        for (name, n) in [("n_x", n_x), ("n_k", n_k)] {
            if n < 8 || !n.is_power_of_two() {
                problems.push(format!("{name} must be a power of two >= 8, got {n}"));
            }
        }
        if !problems.is_empty() {
            return Err(Error::Config(problems.join("; ")));
        }
        Ok(Self {
            x_min,
            x_max,
            k_min,
            k_max,
            n_x,
            n_k,
            dx: (x_max - x_min) / n_x as f64,
            dk: (k_max - k_min) / n_k as f64,
        })
    }

    pub fn x_len(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn k_len(&self) -> f64 {
        self.k_max - self.k_min
    }

    pub fn periodic_x(&self) -> bool {
        true
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    #[inline]
    pub fn k(&self, j: usize) -> f64 {
        self.k_min + j as f64 * self.dk
    }

    pub fn x_nodes(&self) -> Vec<f64> {
        (0..self.n_x).map(|i| self.x(i)).collect()
    }

    pub fn k_nodes(&self) -> Vec<f64> {
        (0..self.n_k).map(|j| self.k(j)).collect()
    }

    /// Number of phase-space nodes.
    pub fn len(&self) -> usize {
        self.n_x * self.n_k
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major (x-major) flat index.
    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n_k + j
    }

    /// Largest momentum magnitude on the grid.
    pub fn max_abs_k(&self) -> f64 {
        (0..self.n_k).map(|j| self.k(j).abs()).fold(0.0, f64::max)
    }

    /// Maps `x` into `[x_min, x_max)` by periodicity.
    #[inline]
    pub fn wrap_x(&self, x: f64) -> f64 {
        self.x_min + (x - self.x_min).rem_euclid(self.x_len())
    }

    pub fn contains_x(&self, x: f64) -> bool {
        x >= self.x_min && x < self.x_max
    }

    /// Angular frequencies conjugate to x, in FFT order.
    pub fn x_frequencies(&self) -> Vec<f64> {
        angular_frequencies(self.n_x, self.x_len())
    }

    /// The dual variable `y` conjugate to k, in FFT order.
    pub fn k_duals(&self) -> Vec<f64> {
        angular_frequencies(self.n_k, self.k_len())
    }

    /// True when both grids sample the same x-axis.
    pub fn same_x_axis(&self, other: &PhaseGrid) -> bool {
        self.n_x == other.n_x && self.x_min == other.x_min && self.x_max == other.x_max
    }

    pub fn ensure_same(&self, other: &PhaseGrid, what: &str) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{what}: {self:?} vs {other:?}")))
        }
    }

    pub fn ensure_same_x(&self, other: &PhaseGrid, what: &str) -> Result<()> {
        if self.same_x_axis(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "{what}: x-axis [{}, {})/{} vs [{}, {})/{}",
                self.x_min, self.x_max, self.n_x, other.x_min, other.x_max, other.n_x
            )))
        }
    }
}

/// `2π m / length` for `m` in FFT order; the Nyquist entry carries `+π n / length`.
pub fn angular_frequencies(n: usize, length: f64) -> Vec<f64> {
    (0..n)
        .map(|m| {
            let signed = if m <= n / 2 { m as f64 } else { m as f64 - n as f64 };
            2.0 * PI * signed / length
        })
        .collect()
}

#[inline]
pub fn is_nyquist(m: usize, n: usize) -> bool {
    n % 2 == 0 && m == n / 2
}
