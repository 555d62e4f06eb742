//! Gaussian data specifications, potentials and the symmetric difference
//! quotient `δ^ε[V]` that drives the Wigner collision operator.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Rescaled Planck constant, strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Epsilon(f64);

impl Epsilon {
    pub fn new(value: f64) -> Result<Self> {
        if value > 0.0 && value.is_finite() {
            Ok(Self(value))
        } else {
            Err(Error::NonPositive { what: "epsilon", value })
        }
    }

    /// `π⁻¹ 2⁻ⁿ`, the family used in the semiclassical sweeps.
    pub fn inverse_pi_power_of_two(n: i32) -> Self {
        Self(2f64.powi(-n) / PI)
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

/// Gaussian bump in x, optionally also in k.
///
/// Potentials and phase-space data use `exp(-(x-c)²/w²)`; wave packets use
/// `exp(-(x-c)²/(2w²))` (see [`crate::field::gaussian_packet`]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianSpec {
    pub amplitude: f64,
    pub center_x: f64,
    pub width_x: f64,
    pub center_k: Option<f64>,
    pub width_k: Option<f64>,
}

impl GaussianSpec {
    /// Pure-x Gaussian.
    pub fn x(amplitude: f64, center_x: f64, width_x: f64) -> Result<Self> {
        let spec = Self { amplitude, center_x, width_x, center_k: None, width_k: None };
        spec.validate()?;
        Ok(spec)
    }

    /// Anisotropic phase-space Gaussian.
    pub fn phase(
        amplitude: f64,
        center_x: f64,
        width_x: f64,
        center_k: f64,
        width_k: f64,
    ) -> Result<Self> {
        let spec = Self {
            amplitude,
            center_x,
            width_x,
            center_k: Some(center_k),
            width_k: Some(width_k),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width_x > 0.0) {
            return Err(Error::NonPositive { what: "width_x", value: self.width_x });
        }
        if let Some(wk) = self.width_k {
            if !(wk > 0.0) {
                return Err(Error::NonPositive { what: "width_k", value: wk });
            }
        }
        Ok(())
    }

    pub fn with_center_x(mut self, center_x: f64) -> Self {
        self.center_x = center_x;
        self
    }

    pub fn with_amplitude(mut self, amplitude: f64) -> Self {
        self.amplitude = amplitude;
        self
    }

    /// `A exp(-(x-a)²/w²)`.
    #[inline]
    pub fn eval_x(&self, x: f64) -> f64 {
        let u = (x - self.center_x) / self.width_x;
        self.amplitude * (-u * u).exp()
    }

    /// `B exp(-(x-b_x)²/σ_x² - (k-b_k)²/σ_k²)`; a pure-x spec ignores k.
    #[inline]
    pub fn eval_phase(&self, x: f64, k: f64) -> f64 {
        let u = (x - self.center_x) / self.width_x;
        let v = match (self.center_k, self.width_k) {
            (Some(c), Some(w)) => (k - c) / w,
            _ => 0.0,
        };
        self.amplitude * (-u * u - v * v).exp()
    }

    /// Gradient `(∂_x, ∂_k)` of [`Self::eval_phase`].
    #[inline]
    pub fn grad_phase(&self, x: f64, k: f64) -> (f64, f64) {
        let value = self.eval_phase(x, k);
        let dx = -2.0 * (x - self.center_x) / (self.width_x * self.width_x) * value;
        let dk = match (self.center_k, self.width_k) {
            (Some(c), Some(w)) => -2.0 * (k - c) / (w * w) * value,
            _ => 0.0,
        };
        (dx, dk)
    }
}

/// `V(x) = A exp(-(x-a)²/w²)`.
pub fn eval_potential(spec: &GaussianSpec, x: f64) -> f64 {
    spec.eval_x(x)
}

/// Exact derivative `-2A(x-a)/w² exp(-(x-a)²/w²)`.
pub fn grad_potential(spec: &GaussianSpec, x: f64) -> f64 {
    -2.0 * (x - spec.center_x) / (spec.width_x * spec.width_x) * spec.eval_x(x)
}

/// A real potential in one space dimension.
#[derive(Debug, Clone, PartialEq)]
pub enum Potential {
    Gaussian(GaussianSpec),
    /// `Σ c_n xⁿ`, coefficients in increasing degree.
    Polynomial(Vec<f64>),
    Sum(Vec<Potential>),
}

impl Potential {
    pub fn zero() -> Self {
        Potential::Polynomial(Vec::new())
    }

    pub fn constant(c: f64) -> Self {
        Potential::Polynomial(vec![c])
    }

    /// `x²/2`.
    pub fn harmonic() -> Self {
        Potential::Polynomial(vec![0.0, 0.0, 0.5])
    }

    pub fn value(&self, x: f64) -> f64 {
        match self {
            Potential::Gaussian(spec) => spec.eval_x(x),
            Potential::Polynomial(c) => c.iter().rev().fold(0.0, |acc, &a| acc * x + a),
            Potential::Sum(parts) => parts.iter().map(|p| p.value(x)).sum(),
        }
    }

    pub fn grad(&self, x: f64) -> f64 {
        match self {
            Potential::Gaussian(spec) => grad_potential(spec, x),
            Potential::Polynomial(c) => c
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (n, &a)| acc * x + n as f64 * a),
            Potential::Sum(parts) => parts.iter().map(|p| p.grad(x)).sum(),
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        match self {
            Potential::Gaussian(spec) => Potential::Gaussian(spec.with_amplitude(spec.amplitude * s)),
            Potential::Polynomial(c) => Potential::Polynomial(c.iter().map(|a| a * s).collect()),
            Potential::Sum(parts) => Potential::Sum(parts.iter().map(|p| p.scaled(s)).collect()),
        }
    }

    pub fn with_offset(&self, c: f64) -> Self {
        Potential::Sum(vec![self.clone(), Potential::constant(c)])
    }

    /// True when the potential vanishes identically.
    pub fn is_zero(&self) -> bool {
        match self {
            Potential::Gaussian(spec) => spec.amplitude == 0.0,
            Potential::Polynomial(c) => c.iter().all(|&a| a == 0.0),
            Potential::Sum(parts) => parts.iter().all(Potential::is_zero),
        }
    }
}

/// `δ^ε[V](x, y) = (V(x + εy/2) - V(x - εy/2)) / ε`.
pub fn delta_eps_potential(potential: &Potential, x: f64, y: f64, eps: Epsilon) -> f64 {
    let e = eps.value();
    let h = 0.5 * e * y;
    (potential.value(x + h) - potential.value(x - h)) / e
}
