//! Synthetic dataset generation: Gaussian-random-field input samplers and
//! reference solvers for KdV, Burgers, the Euler-Bernoulli beams and Darcy
//! flow, with strided subsampling to the target resolution.

pub mod beam;
pub mod darcy;
pub mod dataset;
pub mod grf;
pub mod spectral;

pub use beam::{fd_weights, solve_beam, BeamOrder, BeamSolver};
pub use darcy::solve_darcy;
pub use dataset::{
    generate, subsample_1d, subsample_2d, Equation, FieldData, GenConfig, InputRule, PdeDataset,
};
pub use grf::{
    sample_grf_1d, sample_grf_2d, sample_smooth_random, sample_sqexp_periodic, GrfSpec,
};
pub use spectral::{
    solve_burgers, solve_burgers_dt, solve_kdv, solve_kdv_dt, BURGERS_INTERNAL_RESOLUTION,
    KDV_INTERNAL_RESOLUTION,
};
