//! Orthogonal rank-1 expansion by consecutive reshapings and SVDs.
//!
//! The expansion is unique for a fixed index order, its terms are mutually
//! orthogonal tensors, and truncation error is read off the term weights:
//! dropping terms past `k` costs exactly `sqrt(sum of dropped sigma^2)`.

use crate::error::Result;

use crate::linalg::svd_thin;
use crate::scalar::{fl, Scalar};
use crate::tensor::{DenseTensor, Rank1Tensor, Shape};

#[derive(Clone, Debug)]
pub struct Ttr1Model<T> {
    shape: Shape,
    /// Weighted rank-1 terms sorted by descending weight; all weights are
    /// non-negative and the factor vectors have unit norm.
    terms: Vec<Rank1Tensor<T>>,
}

impl<T: Scalar> Ttr1Model<T> {
    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn terms(&self) -> &[Rank1Tensor<T>] {
        &self.terms
    }

    pub fn weights(&self) -> Vec<T> {
        self.terms.iter().map(|t| t.weight()).collect()
    }

    pub fn densify(&self) -> DenseTensor<T> {
        self.densify_top(self.terms.len())
    }

    /// Sum of the `k` largest-weight terms.
    pub fn densify_top(&self, k: usize) -> DenseTensor<T> {
        let mut out = DenseTensor::zeros(self.shape.clone());
        for term in self.terms.iter().take(k) {
            out.add_scaled(&term.densify(), T::one()).expect("same shape");
        }
        out
    }

    /// Exact truncation error of keeping only the top `k` terms.
    pub fn truncation_error(&self, k: usize) -> T {
        self.terms
            .iter()
            .skip(k)
            .map(|t| t.weight() * t.weight())
            .sum::<T>()
            .sqrt()
    }
}

/// Expand `a` into orthogonal weighted rank-1 terms.
pub fn ttr1_svd<T: Scalar>(a: &DenseTensor<T>) -> Result<Ttr1Model<T>> {
    let mut terms = Vec::new();
    let norm = a.frobenius_norm();
    let drop_below = norm * T::epsilon() * fl::<T>(64.0);
    expand(
        a.data(),
        a.shape().dims(),
        T::one(),
        &mut Vec::new(),
        drop_below,
        &mut terms,
    )?;
    terms.sort_by(|x, y| {
        y.weight()
            .partial_cmp(&x.weight())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(Ttr1Model {
        shape: a.shape().clone(),
        terms,
    })
}

/// Recursive step: split off mode 1 of the remaining data by an SVD and
/// recurse into each right singular vector.
fn expand<T: Scalar>(
    data: &[T],
    dims: &[usize],
    sigma_prefix: T,
    prefix: &mut Vec<Vec<T>>,
    drop_below: T,
    terms: &mut Vec<Rank1Tensor<T>>,
) -> Result<()> {
    if dims.len() == 1 {
        let nrm = crate::linalg::norm2(data);
        let weight = sigma_prefix * nrm;
        if weight > drop_below {
            let mut vectors = prefix.clone();
            let inv = T::one() / nrm;
            vectors.push(data.iter().map(|&x| x * inv).collect());
            terms.push(Rank1Tensor::weighted(weight, vectors)?);
        }
        return Ok(());
    }
    let n1 = dims[0];
    let rest: usize = dims[1..].iter().product();
    let m = crate::linalg::Matrix::from_col_major(n1, rest, data.to_vec())?;
    let svd = svd_thin(&m);
    for j in 0..svd.s.len() {
        let sigma = sigma_prefix * svd.s[j];
        if sigma <= drop_below {
            continue;
        }
        prefix.push(svd.u.col(j).to_vec());
        let vj: Vec<T> = (0..rest).map(|c| svd.vt[(j, c)]).collect();
        expand(&vj, &dims[1..], sigma, prefix, drop_below, terms)?;
        prefix.pop();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use crate::tensor::inner_product;

    fn random_tensor(dims: &[usize], seed: u64) -> DenseTensor<f64> {
        let mut rng = rng::seeded(seed);
        DenseTensor::from_fn(Shape::new(dims.to_vec()).unwrap(), |_| {
            rng::normal(&mut rng)
        })
    }

    #[test]
    fn rank1_input_yields_single_term() {
        let w = Rank1Tensor::new(vec![vec![1.0f64, 2.0], vec![0.5, 1.0, -1.0], vec![2.0, 1.0]])
            .unwrap();
        let dense = w.densify();
        let model = ttr1_svd(&dense).unwrap();
        assert_eq!(model.terms().len(), 1);
        assert!((model.weights()[0] - dense.frobenius_norm()).abs() < 1e-12);
    }

    #[test]
    fn expansion_reconstructs_and_parseval_holds() {
        let a = random_tensor(&[4, 3, 3], 77);
        let model = ttr1_svd(&a).unwrap();
        assert!(model.densify().relative_distance(&a).unwrap() < 1e-10);
        let sum_sq: f64 = model.weights().iter().map(|w| w * w).sum();
        let norm_sq = a.frobenius_norm().powi(2);
        assert!((sum_sq - norm_sq).abs() < 1e-10 * norm_sq);
    }

    #[test]
    fn terms_are_mutually_orthogonal() {
        let a = random_tensor(&[3, 3, 4], 13);
        let model = ttr1_svd(&a).unwrap();
        let dense: Vec<DenseTensor<f64>> = model.terms().iter().map(|t| t.densify()).collect();
        for p in 0..dense.len() {
            for q in (p + 1)..dense.len() {
                let ip = inner_product(&dense[p], &dense[q]).unwrap();
                let scale = dense[p].frobenius_norm() * dense[q].frobenius_norm();
                assert!(ip.abs() <= 1e-8 * scale.max(1.0), "terms {p},{q}: {ip}");
            }
        }
    }

    #[test]
    fn truncation_error_matches_weight_tail() {
        let a = random_tensor(&[4, 4, 2], 29);
        let model = ttr1_svd(&a).unwrap();
        for k in 0..=model.terms().len() {
            let mut diff = model.densify_top(k);
            diff.add_scaled(&a, -1.0).unwrap();
            let err = diff.frobenius_norm();
            let predicted = model.truncation_error(k);
            assert!(
                (err - predicted).abs() < 1e-8 * a.frobenius_norm().max(1.0),
                "k={k}: measured {err}, predicted {predicted}"
            );
        }
    }

    #[test]
    fn deterministic_for_fixed_index_order() {
        let a = random_tensor(&[3, 4, 3], 55);
        let m1 = ttr1_svd(&a).unwrap();
        let m2 = ttr1_svd(&a).unwrap();
        assert_eq!(m1.weights(), m2.weights());
        for (t1, t2) in m1.terms().iter().zip(m2.terms()) {
            assert_eq!(t1.vectors(), t2.vectors());
        }
    }
}
