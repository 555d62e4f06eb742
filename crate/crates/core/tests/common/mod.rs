#![allow(dead_code)]

use semiclassical::analysis::AssemblySetup;
use semiclassical::wigner::WignerOptions;
use semiclassical::{make_phase_grid, Epsilon, GaussianSpec, PhaseGrid, Potential};

pub const T_FINAL: f64 = 1.0 / 64.0;

/// The reference domain at `n_x × n_k`.
pub fn preset_grid(n_x: usize, n_k: usize) -> PhaseGrid {
    make_phase_grid(0.0, 0.5, n_x, -0.375, 0.625, n_k).unwrap()
}

pub fn background() -> Potential {
    Potential::Gaussian(GaussianSpec::x(1.0, 0.25, 0.125).unwrap())
}

pub fn initial_at(bx: f64) -> GaussianSpec {
    GaussianSpec::phase(1.0, bx, 0.0625, 0.125, 0.125).unwrap()
}

pub fn final_at(cx: f64) -> GaussianSpec {
    GaussianSpec::phase(1.0, cx, 0.0625, 0.125, 0.125).unwrap()
}

pub fn sweep_eps() -> Vec<Epsilon> {
    (3..=6).map(Epsilon::inverse_pi_power_of_two).collect()
}

pub fn perturbations() -> Vec<Potential> {
    [(0.1, 0.25, 1.0 / 16.0), (0.05, 0.22, 1.0 / 32.0), (-0.08, 0.28, 1.0 / 12.0)]
        .iter()
        .map(|&(a, c, w)| Potential::Gaussian(GaussianSpec::x(a, c, w).unwrap()))
        .collect()
}

pub fn desk_setup() -> AssemblySetup {
    AssemblySetup {
        grid: preset_grid(128, 256),
        potential: background(),
        initial: initial_at(0.25),
        final_data: final_at(0.25),
        dt: 1.0 / 256.0,
        t_final: T_FINAL,
        wigner: WignerOptions::default(),
    }
}
