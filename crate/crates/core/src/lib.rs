//! Numerical laboratory for the linearized inverse problems of the
//! Schrödinger, Wigner and Liouville equations in one space dimension.
//!
//! The crate is organised bottom-up:
//!
//! * [`grid`], [`field`], [`potential`] and [`spectral`] hold the shared
//!   phase-space discretization, Gaussian data and Fourier utilities.
//! * [`schrodinger`], [`wigner`] and [`liouville`] solve the background,
//!   adjoint and perturbed equations of each model.
//! * [`representatives`] turns pairs of stored runs into the Fredholm kernels
//!   `R_S`, `R_W` and `R_L`.
//! * [`analysis`] assembles kernel matrices over translated data and measures
//!   how the Wigner kernels approach the Liouville ones as `ε → 0`.

pub mod analysis;
pub mod error;
pub mod field;
pub mod grid;
pub mod liouville;
pub mod potential;
pub mod representatives;
pub mod schrodinger;
pub mod spectral;
pub mod wigner;

pub use error::{Error, Result};
pub use field::{l2_inner_product, ComplexField, Direction, PhaseField, Trajectory};
pub use grid::{make_phase_grid, PhaseGrid};
pub use potential::{
    delta_eps_potential, eval_potential, grad_potential, Epsilon, GaussianSpec, Potential,
};

/// Complex scalar used for every field in the crate.
pub type Complex = num_complex::Complex64;
