//! Wigner transform, the collision operator `𝓛_V^ε`, and the Wigner
//! equation solver for background, adjoint and perturbed problems.

mod collision;
mod solver;
mod transform;
pub mod weno;

pub use collision::{apply_collision, apply_d_eps, CollisionOperator};
pub use solver::{
    solve_wigner, solve_wigner_perturbed, solve_wigner_with, step_wigner, WignerOptions, WignerRun,
    BLOWUP_FACTOR, CFL_LIMIT,
};
pub use transform::{moments, wigner_transform};
