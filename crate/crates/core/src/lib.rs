//! Numerical workbench for multilinear Fourier multipliers on group von
//! Neumann algebras, their Schur multiplier liftings, and the Schatten
//! norm estimates that compare them.
//!
//! The linear algebra layer is generic over the real scalar (`f32` or
//! `f64`); quadrature models and experiments run in `f64`.

pub mod error;
pub mod experiments;
pub mod fourier;
pub mod group_model;
pub mod ncalgebra;
pub mod norms;
pub mod scalar;
pub mod schur;
pub mod symbol;

pub use error::{Error, Result};
pub use ncalgebra::SchattenExponent;
pub use norms::{EstimatorOptions, HolderTuple, NormEstimate};

pub type KernelOperator64 = ncalgebra::KernelOperator<f64>;
pub type KernelOperator32 = ncalgebra::KernelOperator<f32>;
pub type FiniteElement64 = fourier::FiniteAlgebraElement<f64>;
pub type FiniteElement32 = fourier::FiniteAlgebraElement<f32>;
pub type DenseSymbol64 = schur::DenseSymbol<f64>;
pub type DenseSymbol32 = schur::DenseSymbol<f32>;
