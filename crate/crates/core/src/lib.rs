//! Multiwavelet filter banks, multiscale transforms, non-standard kernel
//! compression and a multiwavelet neural operator, together with the
//! synthetic PDE datasets (KdV, Burgers, Euler-Bernoulli beams, Darcy flow)
//! used to train and evaluate it.

pub mod error;
pub(crate) mod fft;
pub mod filterbank;
pub mod model;
pub mod pdedata;
pub mod specfun;
pub mod transform;

pub use error::{Error, Result};
pub use filterbank::{
    build_filters, derive_psi, random_filters, validate_filters, FilterBank, PiecewiseBasis,
};
pub use model::{
    relative_l2, train, Activation, ConvSpec, EpochMetrics, ModelConfig, OperatorModel,
    TrainConfig,
};
pub use specfun::{eval_basis, make_basis, make_quadrature, BasisKind, OrthoBasis, QuadratureRule};
pub use transform::{
    decompose, decompose_2d, kron_bank, project_kernel, reconstruct, reconstruct_2d,
    KernelProjection, KronBank, MultiresCoeffs, MultiresCoeffs2d, NamedKernel,
};
