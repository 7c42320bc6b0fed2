//! Dense d-way tensors with a fixed linearization convention.
//!
//! Entries are stored first-index-fastest: with 1-based indices, entry
//! `(i_1, ..., i_d)` lives at linear offset
//! `(i_1 - 1) + n_1 (i_2 - 1) + n_1 n_2 (i_3 - 1) + ...`. Vectorization is
//! the identity on this layout, and the mode-n unfolding groups the
//! remaining modes in ascending order with earlier modes varying fastest.
//! Every other module in the crate relies on these conventions.

mod io;

pub use io::{read_ten, read_ten_json, write_ten, write_ten_json};

use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};
use crate::scalar::Scalar;

/// Dimensions `(n_1, ..., n_d)` of a d-way tensor.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Shape {
    dims: Vec<usize>,
}

impl Shape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::invalid("tensor order must be at least 1"));
        }
        let mut count: usize = 1;
        for &n in &dims {
            if n == 0 {
                return Err(Error::invalid("every dimension must be positive"));
            }
            count = count
                .checked_mul(n)
                .ok_or_else(|| Error::UnsupportedScale("element count overflows usize".into()))?;
        }
        Ok(Shape { dims })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Tensor order `d`.
    pub fn order(&self) -> usize {
        self.dims.len()
    }

    /// Total element count.
    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self, mode: usize) -> Result<usize> {
        self.check_mode(mode)?;
        Ok(self.dims[mode - 1])
    }

    /// Validate a 1-based mode index.
    pub fn check_mode(&self, mode: usize) -> Result<()> {
        if mode == 0 || mode > self.order() {
            return Err(Error::ModeOutOfRange {
                mode,
                order: self.order(),
            });
        }
        Ok(())
    }

    /// Linear offset of a 1-based multi-index.
    pub fn linear_index(&self, idx: &MultiIndex) -> Result<usize> {
        if idx.order() != self.order() {
            return Err(Error::shape(format!(
                "index order {} does not match tensor order {}",
                idx.order(),
                self.order()
            )));
        }
        let mut off = 0;
        let mut stride = 1;
        for (k, (&i, &n)) in idx.indices().iter().zip(&self.dims).enumerate() {
            if i == 0 || i > n {
                return Err(Error::IndexOutOfBounds(format!(
                    "index {} at mode {} out of 1..={}",
                    i,
                    k + 1,
                    n
                )));
            }
            off += (i - 1) * stride;
            stride *= n;
        }
        Ok(off)
    }

    /// 1-based multi-index of a linear offset.
    pub fn multi_index(&self, mut offset: usize) -> MultiIndex {
        debug_assert!(offset < self.len());
        let mut idx = Vec::with_capacity(self.order());
        for &n in &self.dims {
            idx.push(offset % n + 1);
            offset /= n;
        }
        MultiIndex::new(idx)
    }

    /// Iterate all 1-based multi-indices in linearization order (first index
    /// fastest), so the k-th yielded index addresses `data[k]`.
    pub fn multi_indices(&self) -> MultiIndexIter<'_> {
        MultiIndexIter {
            shape: self,
            next: Some(vec![1; self.order()]),
        }
    }
}

pub struct MultiIndexIter<'a> {
    shape: &'a Shape,
    next: Option<Vec<usize>>,
}

impl Iterator for MultiIndexIter<'_> {
    type Item = MultiIndex;

    fn next(&mut self) -> Option<MultiIndex> {
        let current = self.next.take()?;
        let mut advanced = current.clone();
        let mut k = 0;
        loop {
            if k == advanced.len() {
                break; // exhausted
            }
            if advanced[k] < self.shape.dims[k] {
                advanced[k] += 1;
                self.next = Some(advanced);
                break;
            }
            advanced[k] = 1;
            k += 1;
        }
        Some(MultiIndex::new(current))
    }
}

/// 1-based multi-index `(i_1, ..., i_d)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    indices: Vec<usize>,
}

impl MultiIndex {
    pub fn new(indices: Vec<usize>) -> Self {
        MultiIndex { indices }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn order(&self) -> usize {
        self.indices.len()
    }
}

impl From<Vec<usize>> for MultiIndex {
    fn from(indices: Vec<usize>) -> Self {
        MultiIndex::new(indices)
    }
}

impl From<&[usize]> for MultiIndex {
    fn from(indices: &[usize]) -> Self {
        MultiIndex::new(indices.to_vec())
    }
}

/// Dense d-way tensor in first-index-fastest order.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseTensor<T> {
    shape: Shape,
    data: Vec<T>,
}

impl<T: Scalar> DenseTensor<T> {
    pub fn zeros(shape: Shape) -> Self {
        let len = shape.len();
        DenseTensor {
            shape,
            data: vec![T::zero(); len],
        }
    }

    /// Build from flat data already in linearization order.
    pub fn from_data(shape: Shape, data: Vec<T>) -> Result<Self> {
        if data.len() != shape.len() {
            return Err(Error::shape(format!(
                "data length {} does not match shape {:?} ({} entries)",
                data.len(),
                shape.dims(),
                shape.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("tensor entries must be finite"));
        }
        Ok(DenseTensor { shape, data })
    }

    pub fn from_fn(shape: Shape, mut f: impl FnMut(&MultiIndex) -> T) -> Self {
        let data = shape.multi_indices().map(|idx| f(&idx)).collect();
        DenseTensor { shape, data }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn order(&self) -> usize {
        self.shape.order()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn get(&self, idx: &MultiIndex) -> Result<T> {
        Ok(self.data[self.shape.linear_index(idx)?])
    }

    pub fn set(&mut self, idx: &MultiIndex, value: T) -> Result<()> {
        let off = self.shape.linear_index(idx)?;
        self.data[off] = value;
        Ok(())
    }

    /// Flat view of the entries; identical to the Appendix-style
    /// vectorization by the layout invariant.
    pub fn vectorize(&self) -> &[T] {
        &self.data
    }

    /// Rebuild a tensor from a vector laid out in linearization order.
    pub fn reshape(shape: Shape, data: Vec<T>) -> Result<Self> {
        DenseTensor::from_data(shape, data)
    }

    pub fn frobenius_norm(&self) -> T {
        dot(&self.data, &self.data).sqrt()
    }

    pub fn scale(&mut self, s: T) {
        for v in &mut self.data {
            *v *= s;
        }
    }

    pub fn add_scaled(&mut self, other: &DenseTensor<T>, s: T) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::shape("tensor shapes differ in add_scaled".to_string()));
        }
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
        Ok(())
    }

    /// Relative Frobenius distance `||self - other||_F / ||self||_F`
    /// (absolute distance when `self` is zero).
    pub fn relative_distance(&self, other: &DenseTensor<T>) -> Result<T> {
        if self.shape != other.shape {
            return Err(Error::shape("tensor shapes differ".to_string()));
        }
        let mut diff = T::zero();
        for (&a, &b) in self.data.iter().zip(&other.data) {
            diff += (a - b) * (a - b);
        }
        let nrm = self.frobenius_norm();
        if nrm == T::zero() {
            Ok(diff.sqrt())
        } else {
            Ok(diff.sqrt() / nrm)
        }
    }
}

/// `<a, b> = sum of elementwise products`.
pub fn inner_product<T: Scalar>(a: &DenseTensor<T>, b: &DenseTensor<T>) -> Result<T> {
    if a.shape() != b.shape() {
        return Err(Error::shape(format!(
            "inner product of shapes {:?} and {:?}",
            a.shape().dims(),
            b.shape().dims()
        )));
    }
    Ok(dot(a.data(), b.data()))
}

/// k-mode product `a x_k u` with `u` of size `p_k x n_k`; the result has the
/// same shape with `n_k` replaced by `p_k`.
pub fn mode_k_product<T: Scalar>(
    a: &DenseTensor<T>,
    mode: usize,
    u: &Matrix<T>,
) -> Result<DenseTensor<T>> {
    a.shape().check_mode(mode)?;
    let k = mode - 1;
    let dims = a.shape().dims();
    let nk = dims[k];
    if u.cols() != nk {
        return Err(Error::shape(format!(
            "mode-{mode} product: matrix has {} columns, dimension is {nk}",
            u.cols()
        )));
    }
    let pk = u.rows();
    let inner: usize = dims[..k].iter().product();
    let outer: usize = dims[k + 1..].iter().product();
    let mut out_dims = dims.to_vec();
    out_dims[k] = pk;
    let out_shape = Shape::new(out_dims)?;
    let mut out = vec![T::zero(); out_shape.len()];
    // For each (inner, outer) fiber, contract over i_k.
    for o in 0..outer {
        let src_base = o * inner * nk;
        let dst_base = o * inner * pk;
        for ik in 0..nk {
            let src = &a.data()[src_base + ik * inner..src_base + (ik + 1) * inner];
            for j in 0..pk {
                let w = u[(j, ik)];
                if w == T::zero() {
                    continue;
                }
                let dst = &mut out[dst_base + j * inner..dst_base + (j + 1) * inner];
                for (d, &s) in dst.iter_mut().zip(src) {
                    *d += w * s;
                }
            }
        }
    }
    DenseTensor::from_data(out_shape, out)
}

/// `[[a; U_1, ..., U_d]]`: k-mode products along every mode in turn.
pub fn multi_mode_product<T: Scalar>(
    a: &DenseTensor<T>,
    matrices: &[&Matrix<T>],
) -> Result<DenseTensor<T>> {
    if matrices.len() != a.order() {
        return Err(Error::shape(format!(
            "{} matrices for an order-{} tensor",
            matrices.len(),
            a.order()
        )));
    }
    let mut cur = a.clone();
    for (k, m) in matrices.iter().enumerate() {
        cur = mode_k_product(&cur, k + 1, m)?;
    }
    Ok(cur)
}

/// Contract mode `k` with a vector (a 1 x n_k mode product followed by
/// dropping the singleton mode). Reduces the order by one; for order-1
/// input the result is a scalar wrapped in a 1-element tensor of order 1.
pub fn contract_mode_vec<T: Scalar>(
    a: &DenseTensor<T>,
    mode: usize,
    v: &[T],
) -> Result<DenseTensor<T>> {
    a.shape().check_mode(mode)?;
    let dims = a.shape().dims();
    if v.len() != dims[mode - 1] {
        return Err(Error::shape(format!(
            "contraction vector length {} vs dimension {}",
            v.len(),
            dims[mode - 1]
        )));
    }
    let row = Matrix::from_col_major(1, v.len(), v.to_vec())?;
    let reduced = mode_k_product(a, mode, &row)?;
    if a.order() == 1 {
        return Ok(reduced);
    }
    let mut new_dims: Vec<usize> = dims.to_vec();
    new_dims.remove(mode - 1);
    DenseTensor::from_data(Shape::new(new_dims)?, reduced.data().to_vec())
}

/// Mode-n unfolding: rows indexed by `i_n`, columns by the remaining modes in
/// ascending order with earlier modes varying fastest.
pub fn matricize<T: Scalar>(a: &DenseTensor<T>, mode: usize) -> Result<Matrix<T>> {
    a.shape().check_mode(mode)?;
    let k = mode - 1;
    let dims = a.shape().dims();
    let nk = dims[k];
    let inner: usize = dims[..k].iter().product();
    let outer: usize = dims[k + 1..].iter().product();
    let cols = inner * outer;
    let mut m = Matrix::zeros(nk, cols);
    for o in 0..outer {
        for ik in 0..nk {
            let src_base = (o * nk + ik) * inner;
            for i in 0..inner {
                m[(ik, o * inner + i)] = a.data()[src_base + i];
            }
        }
    }
    Ok(m)
}

/// Inverse of [`matricize`]: rebuild the tensor of shape `shape` from its
/// mode-n unfolding.
pub fn from_mode_matrix<T: Scalar>(m: &Matrix<T>, shape: &Shape, mode: usize) -> Result<DenseTensor<T>> {
    shape.check_mode(mode)?;
    let k = mode - 1;
    let dims = shape.dims();
    let nk = dims[k];
    let inner: usize = dims[..k].iter().product();
    let outer: usize = dims[k + 1..].iter().product();
    if m.rows() != nk || m.cols() != inner * outer {
        return Err(Error::shape(format!(
            "unfolding is {}x{}, expected {}x{}",
            m.rows(),
            m.cols(),
            nk,
            inner * outer
        )));
    }
    let mut data = vec![T::zero(); shape.len()];
    for o in 0..outer {
        for ik in 0..nk {
            let dst_base = (o * nk + ik) * inner;
            for i in 0..inner {
                data[dst_base + i] = m[(ik, o * inner + i)];
            }
        }
    }
    DenseTensor::from_data(shape.clone(), data)
}

/// Kronecker product of two vectors: `x (x) y` has `x` slowest, `y` fastest.
pub fn kronecker_vec<T: Scalar>(x: &[T], y: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(x.len() * y.len());
    for &xi in x {
        for &yj in y {
            out.push(xi * yj);
        }
    }
    out
}

/// d-times repeated Kronecker product of a vector with itself.
pub fn kronecker_power<T: Scalar>(x: &[T], d: usize) -> Result<Vec<T>> {
    if d == 0 {
        return Err(Error::invalid("kronecker power requires d >= 1"));
    }
    let mut len: usize = 1;
    for _ in 0..d {
        len = len
            .checked_mul(x.len())
            .ok_or_else(|| Error::UnsupportedScale(format!("{}^{} overflows usize", x.len(), d)))?;
    }
    let mut out = x.to_vec();
    for _ in 1..d {
        out = kronecker_vec(&out, x);
    }
    debug_assert_eq!(out.len(), len);
    Ok(out)
}

/// Weighted rank-1 tensor `sigma * u^(1) o ... o u^(d)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Rank1Tensor<T> {
    weight: T,
    vectors: Vec<Vec<T>>,
}

impl<T: Scalar> Rank1Tensor<T> {
    pub fn new(vectors: Vec<Vec<T>>) -> Result<Self> {
        Self::weighted(T::one(), vectors)
    }

    pub fn weighted(weight: T, vectors: Vec<Vec<T>>) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::invalid("rank-1 tensor needs at least one vector"));
        }
        if vectors.iter().any(|v| v.is_empty()) {
            return Err(Error::invalid("rank-1 factor vectors must be non-empty"));
        }
        Ok(Rank1Tensor { weight, vectors })
    }

    pub fn weight(&self) -> T {
        self.weight
    }

    pub fn vectors(&self) -> &[Vec<T>] {
        &self.vectors
    }

    pub fn vector(&self, mode: usize) -> &[T] {
        &self.vectors[mode - 1]
    }

    pub fn order(&self) -> usize {
        self.vectors.len()
    }

    pub fn shape(&self) -> Shape {
        Shape::new(self.vectors.iter().map(|v| v.len()).collect()).expect("valid by construction")
    }

    pub fn entry(&self, idx: &MultiIndex) -> Result<T> {
        if idx.order() != self.order() {
            return Err(Error::shape("index order mismatch".to_string()));
        }
        let mut p = self.weight;
        for (v, &i) in self.vectors.iter().zip(idx.indices()) {
            if i == 0 || i > v.len() {
                return Err(Error::IndexOutOfBounds(format!("index {i} out of bounds")));
            }
            p *= v[i - 1];
        }
        Ok(p)
    }

    pub fn densify(&self) -> DenseTensor<T> {
        let shape = self.shape();
        DenseTensor::from_fn(shape, |idx| self.entry(idx).expect("valid index"))
    }
}

/// `<a, w>` for dense `a` and rank-1 `w`, via successive mode contractions
/// (never materializes `w`).
pub fn inner_rank1<T: Scalar>(a: &DenseTensor<T>, w: &Rank1Tensor<T>) -> Result<T> {
    if a.shape() != &w.shape() {
        return Err(Error::shape(format!(
            "inner product of shapes {:?} and {:?}",
            a.shape().dims(),
            w.shape().dims()
        )));
    }
    // contract the last mode first so the shrinking tensor keeps its layout
    let mut cur = a.clone();
    for mode in (1..=a.order()).rev() {
        cur = contract_mode_vec(&cur, mode, w.vector(mode))?;
    }
    Ok(cur.data()[0] * w.weight())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::fl;

    /// The worked 3x4x2 example with entries 1..24 that pins all layout
    /// conventions.
    pub(crate) fn example_342() -> DenseTensor<f64> {
        let shape = Shape::new(vec![3, 4, 2]).unwrap();
        DenseTensor::from_data(shape, (1..=24).map(|v| v as f64).collect()).unwrap()
    }

    #[test]
    fn layout_matches_worked_example() {
        let a = example_342();
        // a_{1,1,1} = 1, a_{3,4,2} = 24, a_{2,3,1} = 8
        assert_eq!(a.get(&vec![1, 1, 1].into()).unwrap(), 1.0);
        assert_eq!(a.get(&vec![3, 4, 2].into()).unwrap(), 24.0);
        assert_eq!(a.get(&vec![2, 3, 1].into()).unwrap(), 8.0);
        // vectorization is the identity on the layout
        assert_eq!(a.vectorize()[7], 8.0);
    }

    #[test]
    fn mode1_and_mode3_unfoldings_match_worked_example() {
        let a = example_342();
        let m1 = matricize(&a, 1).unwrap();
        assert_eq!(m1.rows(), 3);
        assert_eq!(m1.cols(), 8);
        let expect_row0 = [1.0, 4.0, 7.0, 10.0, 13.0, 16.0, 19.0, 22.0];
        for (j, &e) in expect_row0.iter().enumerate() {
            assert_eq!(m1[(0, j)], e);
        }
        assert_eq!(m1[(2, 7)], 24.0);
        let m3 = matricize(&a, 3).unwrap();
        assert_eq!(m3.rows(), 2);
        assert_eq!(m3.cols(), 12);
        for j in 0..12 {
            assert_eq!(m3[(0, j)], (j + 1) as f64);
            assert_eq!(m3[(1, j)], (j + 13) as f64);
        }
    }

    #[test]
    fn matricize_round_trips() {
        let a = example_342();
        for mode in 1..=3 {
            let m = matricize(&a, mode).unwrap();
            let back = from_mode_matrix(&m, a.shape(), mode).unwrap();
            assert_eq!(back.data(), a.data());
        }
    }

    #[test]
    fn inner_product_of_worked_example() {
        let a = example_342();
        // sum of squares 1..24 = 4900
        assert_eq!(inner_product(&a, &a).unwrap(), 4900.0);
        let z = DenseTensor::zeros(a.shape().clone());
        assert_eq!(inner_product(&a, &z).unwrap(), 0.0);
    }

    #[test]
    fn mode_product_collapses_first_mode() {
        let a = example_342();
        let ones = Matrix::from_rows(&[&[1.0, 1.0, 1.0]]);
        let b = mode_k_product(&a, 1, &ones).unwrap();
        assert_eq!(b.shape().dims(), &[1, 4, 2]);
        let expect = [6.0, 15.0, 24.0, 33.0, 42.0, 51.0, 60.0, 69.0];
        for (got, want) in b.data().iter().zip(expect) {
            assert_eq!(*got, want);
        }
    }

    #[test]
    fn mode_product_identity_is_noop() {
        let a = example_342();
        for mode in 1..=3 {
            let n = a.shape().dims()[mode - 1];
            let b = mode_k_product(&a, mode, &Matrix::identity(n)).unwrap();
            assert_eq!(b.data(), a.data());
        }
    }

    #[test]
    fn mode_product_rejects_bad_mode_and_size() {
        let a = example_342();
        assert!(matches!(
            mode_k_product(&a, 4, &Matrix::identity(2)),
            Err(Error::ModeOutOfRange { .. })
        ));
        assert!(mode_k_product(&a, 1, &Matrix::identity(2)).is_err());
    }

    #[test]
    fn kronecker_examples() {
        let x = [1.0, 2.0];
        assert_eq!(kronecker_power(&x, 2).unwrap(), vec![1.0, 2.0, 2.0, 4.0]);
        assert_eq!(kronecker_power(&x, 1).unwrap(), vec![1.0, 2.0]);
        assert!(kronecker_power(&[0.0; 1000], 99).is_err());
    }

    #[test]
    fn rank1_vectorization_is_reversed_kronecker() {
        // vec(u o v) = v (x) u under first-index-fastest layout
        let u = vec![1.0, 2.0, 3.0];
        let v = vec![4.0, 5.0];
        let r = Rank1Tensor::new(vec![u.clone(), v.clone()]).unwrap();
        let dense = r.densify();
        assert_eq!(dense.vectorize(), kronecker_vec(&v, &u).as_slice());
    }

    #[test]
    fn rank1_inner_product_factorizes() {
        let u = vec![1.0f64, -2.0, 0.5];
        let v = vec![2.0f64, 1.0];
        let w = vec![1.0f64, 3.0, 0.0, -1.0];
        let p = vec![0.3f64, 0.7, 1.1];
        let q = vec![-1.0f64, 2.0];
        let r = vec![0.5f64, 0.5, 2.0, 1.5];
        let a = Rank1Tensor::new(vec![u.clone(), v.clone(), w.clone()]).unwrap();
        let b = Rank1Tensor::new(vec![p.clone(), q.clone(), r.clone()]).unwrap();
        let lhs = inner_product(&a.densify(), &b.densify()).unwrap();
        let rhs = dot(&u, &p) * dot(&v, &q) * dot(&w, &r);
        assert!((lhs - rhs).abs() < 1e-12);
        // factored contraction path agrees with densified inner product
        let via_contract = inner_rank1(&a.densify(), &b).unwrap();
        assert!((via_contract - rhs).abs() < 1e-12);
    }

    #[test]
    fn mode_products_compose() {
        let a = example_342();
        let u = Matrix::from_fn(2, 4, |i, j| (i + 2 * j) as f64 * 0.5 - 1.0);
        let v = Matrix::from_fn(3, 2, |i, j| 1.0 / (1.0 + i as f64 + j as f64));
        let lhs = mode_k_product(&mode_k_product(&a, 2, &u).unwrap(), 2, &v).unwrap();
        let rhs = mode_k_product(&a, 2, &v.matmul(&u)).unwrap();
        assert!(lhs.relative_distance(&rhs).unwrap() < fl(1e-13));
    }

    #[test]
    fn one_way_tensor_degenerate_cases() {
        let shape = Shape::new(vec![4]).unwrap();
        let a = DenseTensor::from_data(shape, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let m = matricize(&a, 1).unwrap();
        assert_eq!(m.rows(), 4);
        assert_eq!(m.cols(), 1);
        assert_eq!(m.col(0), a.data());
    }

    #[test]
    fn diagonal_multi_mode_product_matches_cp_sum() {
        // [[D; U, V, W]] with diagonal D of sigmas equals sum sigma_i u_i o v_i o w_i
        let r = 2;
        let sig = [2.0, -0.5];
        let u = Matrix::from_rows(&[&[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]]);
        let v = Matrix::from_rows(&[&[1.0, 2.0], &[0.5, -1.0]]);
        let w = Matrix::from_rows(&[&[1.0, 1.0], &[2.0, 0.0], &[0.0, 3.0]]);
        let mut d = DenseTensor::zeros(Shape::new(vec![r, r, r]).unwrap());
        for i in 1..=r {
            d.set(&vec![i, i, i].into(), sig[i - 1]).unwrap();
        }
        let lhs = multi_mode_product(&d, &[&u, &v, &w]).unwrap();
        let mut rhs = DenseTensor::zeros(lhs.shape().clone());
        for i in 0..r {
            let term = Rank1Tensor::weighted(
                sig[i],
                vec![u.col(i).to_vec(), v.col(i).to_vec(), w.col(i).to_vec()],
            )
            .unwrap();
            rhs.add_scaled(&term.densify(), 1.0).unwrap();
        }
        assert!(lhs.relative_distance(&rhs).unwrap() < 1e-13);
    }
}
