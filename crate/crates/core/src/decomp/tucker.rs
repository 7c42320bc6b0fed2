//! Tucker decomposition via higher-order SVD, exact and rank-truncated.

use crate::error::{Error, Result};
use crate::linalg::{svd_thin, Matrix};
use crate::opcount;
use crate::scalar::{fl, Scalar};
use crate::tensor::{matricize, multi_mode_product, DenseTensor, MultiIndex, Rank1Tensor, Shape};

/// Core tensor plus per-mode orthonormal factors.
#[derive(Clone, Debug)]
pub struct TuckerModel<T> {
    shape: Shape,
    core: DenseTensor<T>,
    factors: Vec<Matrix<T>>,
    /// Set by [`hosvd`]: core slices are mutually orthogonal within each
    /// mode and ordered by non-increasing Frobenius norm.
    from_hosvd: bool,
    /// Numerical multilinear rank of the input unfoldings.
    multilinear_rank: Vec<usize>,
}

impl<T: Scalar> TuckerModel<T> {
    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn core(&self) -> &DenseTensor<T> {
        &self.core
    }

    pub fn factors(&self) -> &[Matrix<T>] {
        &self.factors
    }

    pub fn core_ranks(&self) -> Vec<usize> {
        self.core.shape().dims().to_vec()
    }

    /// Numerical ranks of the input's mode unfoldings.
    pub fn multilinear_rank(&self) -> &[usize] {
        &self.multilinear_rank
    }

    pub fn is_hosvd(&self) -> bool {
        self.from_hosvd
    }

    pub fn densify(&self) -> DenseTensor<T> {
        let mats: Vec<&Matrix<T>> = self.factors.iter().collect();
        multi_mode_product(&self.core, &mats).expect("consistent dimensions")
    }

    pub fn entry(&self, idx: &MultiIndex) -> Result<T> {
        if idx.order() != self.shape.order() {
            return Err(Error::shape("index order mismatch".to_string()));
        }
        // contract the core with the selected factor rows
        let mut cur = self.core.clone();
        for (mode, &i) in idx.indices().iter().enumerate().rev() {
            let row: Vec<T> = (0..self.factors[mode].cols())
                .map(|c| self.factors[mode][(i - 1, c)])
                .collect();
            cur = crate::tensor::contract_mode_vec(&cur, cur.order(), &row)?;
        }
        Ok(cur.data()[0])
    }

    pub fn parameter_count(&self) -> usize {
        super::parameter_count_tucker(self.shape.dims(), &self.core_ranks())
    }
}

/// `<model, w>` for rank-1 `w`: project the rank-1 vectors through the
/// factors, then contract the core.
pub fn tucker_inner_rank1<T: Scalar>(model: &TuckerModel<T>, w: &Rank1Tensor<T>) -> Result<T> {
    if w.shape() != *model.shape() {
        return Err(Error::shape("rank-1 shape mismatch".to_string()));
    }
    let mut cur = model.core.clone();
    for mode in (1..=model.core.order()).rev() {
        let f = &model.factors[mode - 1];
        let projected = f.tr_matvec(w.vector(mode));
        opcount::add((f.rows() * f.cols()) as u64);
        cur = crate::tensor::contract_mode_vec(&cur, mode, &projected)?;
        opcount::add(cur.len() as u64 * projected.len() as u64);
    }
    Ok(cur.data()[0] * w.weight())
}

/// Exact higher-order SVD at full multilinear rank.
pub fn hosvd<T: Scalar>(a: &DenseTensor<T>) -> Result<TuckerModel<T>> {
    let full: Vec<usize> = a
        .shape()
        .dims()
        .iter()
        .map(|&n| n.min(a.len() / n))
        .collect();
    hosvd_with_ranks(a, &full, true)
}

/// Truncated HOSVD at the requested per-mode ranks.
pub fn tucker_truncate<T: Scalar>(
    a: &DenseTensor<T>,
    ranks: &[usize],
) -> Result<(TuckerModel<T>, f64)> {
    if ranks.len() != a.order() {
        return Err(Error::shape(format!(
            "{} ranks for an order-{} tensor",
            ranks.len(),
            a.order()
        )));
    }
    for (k, (&r, &n)) in ranks.iter().zip(a.shape().dims()).enumerate() {
        if r == 0 || r > n {
            return Err(Error::invalid(format!(
                "rank {r} at mode {} must lie in 1..={n}",
                k + 1
            )));
        }
    }
    let model = hosvd_with_ranks(a, ranks, false)?;
    let err = model.densify().relative_distance(a)?.to_f64_lossy();
    let abs_err = err * a.frobenius_norm().to_f64_lossy();
    Ok((model, abs_err))
}

fn hosvd_with_ranks<T: Scalar>(
    a: &DenseTensor<T>,
    ranks: &[usize],
    full: bool,
) -> Result<TuckerModel<T>> {
    let mut factors = Vec::with_capacity(a.order());
    let mut mrank = Vec::with_capacity(a.order());
    for mode in 1..=a.order() {
        let unf = matricize(a, mode)?;
        let svd = svd_thin(&unf);
        let smax = svd.s.first().copied().unwrap_or_else(T::zero);
        let tol = smax
            * T::epsilon()
            * fl::<T>((unf.rows().max(unf.cols())) as f64)
            * fl::<T>(32.0);
        mrank.push(svd.s.iter().filter(|&&s| s > tol).count().max(1));
        let keep = ranks[mode - 1].min(svd.u.cols());
        factors.push(svd.u.take_cols(keep));
    }
    let transposed: Vec<Matrix<T>> = factors.iter().map(|f| f.transpose()).collect();
    let refs: Vec<&Matrix<T>> = transposed.iter().collect();
    let core = multi_mode_product(a, &refs)?;
    Ok(TuckerModel {
        shape: a.shape().clone(),
        core,
        factors,
        from_hosvd: full,
        multilinear_rank: mrank,
    })
}

/// Frobenius norms of the mode-`mode` slices of a tensor, in index order.
pub fn slice_norms<T: Scalar>(a: &DenseTensor<T>, mode: usize) -> Result<Vec<T>> {
    let unf = matricize(a, mode)?;
    Ok((0..unf.rows())
        .map(|i| {
            let mut s = T::zero();
            for j in 0..unf.cols() {
                s += unf[(i, j)] * unf[(i, j)];
            }
            s.sqrt()
        })
        .collect())
}

/// `<slice_p, slice_q>` for the mode-`mode` slices of a tensor.
pub fn slice_inner<T: Scalar>(a: &DenseTensor<T>, mode: usize, p: usize, q: usize) -> Result<T> {
    let unf = matricize(a, mode)?;
    let mut s = T::zero();
    for j in 0..unf.cols() {
        s += unf[(p, j)] * unf[(q, j)];
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn random_tensor(dims: &[usize], seed: u64) -> DenseTensor<f64> {
        let mut rng = rng::seeded(seed);
        DenseTensor::from_fn(Shape::new(dims.to_vec()).unwrap(), |_| {
            rng::normal(&mut rng)
        })
    }

    #[test]
    fn hosvd_reconstructs_exactly() {
        let a = random_tensor(&[4, 5, 3], 2);
        let model = hosvd(&a).unwrap();
        assert!(model.densify().relative_distance(&a).unwrap() < 1e-12);
        // factor orthonormality
        for f in model.factors() {
            let g = f.tr_matmul(f);
            for j in 0..g.cols() {
                for i in 0..g.rows() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((g[(i, j)] - want).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn hosvd_core_slices_orthogonal_and_ordered() {
        let a = random_tensor(&[5, 4, 3], 9);
        let model = hosvd(&a).unwrap();
        for mode in 1..=3 {
            let norms = slice_norms(model.core(), mode).unwrap();
            for w in norms.windows(2) {
                assert!(w[0] >= w[1] - 1e-8, "slice norms not ordered: {w:?}");
            }
            let n = norms.len();
            for p in 0..n {
                for q in (p + 1)..n {
                    let ip = slice_inner(model.core(), mode, p, q).unwrap();
                    assert!(ip.abs() < 1e-8, "slices {p},{q} of mode {mode}: {ip}");
                }
            }
        }
    }

    #[test]
    fn hosvd_diagonal_core_norms() {
        // diagonal 3-way tensor with diagonal (3, 2, 1)
        let mut a = DenseTensor::<f64>::zeros(Shape::new(vec![3, 3, 3]).unwrap());
        for (i, v) in [3.0, 2.0, 1.0].iter().enumerate() {
            a.set(&vec![i + 1, i + 1, i + 1].into(), *v).unwrap();
        }
        let model = hosvd(&a).unwrap();
        for mode in 1..=3 {
            let norms = slice_norms(model.core(), mode).unwrap();
            assert!((norms[0] - 3.0).abs() < 1e-10);
            assert!((norms[1] - 2.0).abs() < 1e-10);
            assert!((norms[2] - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn worked_example_has_multilinear_rank_222() {
        let shape = Shape::new(vec![3, 4, 2]).unwrap();
        let a = DenseTensor::from_data(shape, (1..=24).map(|v| v as f64).collect()).unwrap();
        let model = hosvd(&a).unwrap();
        assert_eq!(model.multilinear_rank(), &[2, 2, 2]);
    }

    #[test]
    fn truncation_at_multilinear_rank_is_exact() {
        let shape = Shape::new(vec![3, 4, 2]).unwrap();
        let a = DenseTensor::from_data(shape, (1..=24).map(|v| v as f64).collect()).unwrap();
        let (model, err) = tucker_truncate(&a, &[2, 2, 2]).unwrap();
        assert!(model.densify().relative_distance(&a).unwrap() < 1e-10);
        assert!(err < 1e-9 * a.frobenius_norm());
    }

    #[test]
    fn rank1_truncation_of_rank1_tensor_is_exact() {
        let r1 = Rank1Tensor::new(vec![vec![1.0, 2.0], vec![3.0, -1.0, 0.5], vec![2.0, 2.0]])
            .unwrap()
            .densify();
        let (model, _) = tucker_truncate(&r1, &[1, 1, 1]).unwrap();
        assert!(model.densify().relative_distance(&r1).unwrap() < 1e-12);
    }

    #[test]
    fn rejects_invalid_ranks() {
        let a = random_tensor(&[3, 3, 3], 1);
        assert!(tucker_truncate(&a, &[0, 1, 1]).is_err());
        assert!(tucker_truncate(&a, &[4, 1, 1]).is_err());
        assert!(tucker_truncate(&a, &[1, 1]).is_err());
    }
}
