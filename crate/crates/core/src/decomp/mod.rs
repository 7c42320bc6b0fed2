//! Tensor decompositions: canonical polyadic (ALS, incremental-rank,
//! symmetric), Tucker/HOSVD, tensor train, and the orthogonal rank-1
//! expansion from successive reshapings and SVDs, plus storage accounting
//! and factored inner products that never densify.

mod cp;
mod tt;
mod ttr1;
mod tucker;

pub use cp::{
    cpd_als, cpd_fit_incremental, cpd_symmetric, CpConfig, CpFitReport, CpModel, SymmetricCpModel,
};
pub use tt::{
    tt_add, tt_constant, tt_from_rank1, tt_hadamard, tt_inner, tt_inner_rank1, tt_round, tt_scale,
    tt_svd, TtCore, TtModel,
};
pub use ttr1::{ttr1_svd, Ttr1Model};
pub use tucker::{
    hosvd, slice_inner, slice_norms, tucker_inner_rank1, tucker_truncate, TuckerModel,
};

use crate::scalar::Scalar;
use crate::tensor::Rank1Tensor;

/// Stored-element counts for the factored formats: per-mode sums that reduce
/// to `ndr` (CP), `r^d + ndr` (Tucker) and `n(d-2)r^2 + 2nr` (TT) in the
/// cubical uniform-rank case. CP weights are absorbed into the factors and
/// not counted.
pub fn parameter_count_cp(dims: &[usize], rank: usize) -> usize {
    dims.iter().map(|&n| n * rank).sum()
}

pub fn parameter_count_tucker(dims: &[usize], ranks: &[usize]) -> usize {
    let core: usize = ranks.iter().product();
    core + dims.iter().zip(ranks).map(|(&n, &r)| n * r).sum::<usize>()
}

pub fn parameter_count_tt(dims: &[usize], ranks: &[usize]) -> usize {
    // ranks = (r_0, ..., r_d) with r_0 = r_d = 1
    dims.iter()
        .enumerate()
        .map(|(k, &n)| ranks[k] * n * ranks[k + 1])
        .sum()
}

/// Factored inner product `<model, w>` against a rank-1 tensor, dispatching
/// on the model kind. Never densifies either side.
pub fn factored_inner_rank1<T: Scalar>(
    model: &Model<T>,
    w: &Rank1Tensor<T>,
) -> crate::Result<T> {
    match model {
        Model::Cp(m) => m.inner_rank1(w),
        Model::Tucker(m) => tucker_inner_rank1(m, w),
        Model::Tt(m) => tt_inner_rank1(m, w),
    }
}

/// A factored tensor of any of the three storable kinds.
pub enum Model<T> {
    Cp(CpModel<T>),
    Tucker(TuckerModel<T>),
    Tt(TtModel<T>),
}

impl<T: Scalar> Model<T> {
    pub fn parameter_count(&self) -> usize {
        match self {
            Model::Cp(m) => m.parameter_count(),
            Model::Tucker(m) => m.parameter_count(),
            Model::Tt(m) => m.parameter_count(),
        }
    }
}
