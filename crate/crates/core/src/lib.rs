//! tenkit: dense tensor algebra, low-rank tensor decompositions, tensor
//! completion from partial observations, and three tensor-structured
//! application engines (stochastic-collocation uncertainty quantification,
//! projected nonlinear model order reduction, and rank-factored Volterra
//! response simulation).
//!
//! All numerical code is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix `f64`, which is what the file formats and the `tenkit`
//! CLI use.

pub mod completion;
pub mod decomp;
pub mod error;
pub mod linalg;
pub mod opcount;
pub mod rng;
pub mod scalar;
pub mod tensor;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Dense `f64` tensor, the default working type.
pub type Tensor = tensor::DenseTensor<f64>;
/// Dense `f64` matrix.
pub type Matrix64 = linalg::Matrix<f64>;
/// Weighted `f64` rank-1 tensor.
pub type Rank1 = tensor::Rank1Tensor<f64>;
