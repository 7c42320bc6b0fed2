//! Tensor-train decomposition and TT arithmetic (inner products, Hadamard
//! products, sums, rounding). Cores are stored as order-3 tensors of shape
//! `(r_{k-1}, n_k, r_k)` in the crate's first-index-fastest layout.

use crate::error::{Error, Result};
use crate::linalg::{svd_thin, Matrix};
use crate::opcount;
use crate::scalar::{fl, Scalar};
use crate::tensor::{DenseTensor, MultiIndex, Rank1Tensor, Shape};

#[derive(Clone, Debug)]
pub struct TtModel<T> {
    shape: Shape,
    /// Core k flattened as (r_{k-1}, n_k, r_k), alpha fastest.
    cores: Vec<TtCore<T>>,
}

#[derive(Clone, Debug)]
pub struct TtCore<T> {
    pub left: usize,
    pub n: usize,
    pub right: usize,
    /// Layout: `data[alpha + left*(i + n*beta)]`.
    pub data: Vec<T>,
}

impl<T: Scalar> TtCore<T> {
    pub fn zeros(left: usize, n: usize, right: usize) -> Self {
        TtCore {
            left,
            n,
            right,
            data: vec![T::zero(); left * n * right],
        }
    }

    #[inline]
    pub fn at(&self, alpha: usize, i: usize, beta: usize) -> T {
        self.data[alpha + self.left * (i + self.n * beta)]
    }

    #[inline]
    pub fn at_mut(&mut self, alpha: usize, i: usize, beta: usize) -> &mut T {
        &mut self.data[alpha + self.left * (i + self.n * beta)]
    }

    /// The `(r_{k-1} x r_k)` slice at mode index `i` (0-based).
    pub fn slice(&self, i: usize) -> Matrix<T> {
        Matrix::from_fn(self.left, self.right, |a, b| self.at(a, i, b))
    }
}

impl<T: Scalar> TtModel<T> {
    pub fn new(shape: Shape, cores: Vec<TtCore<T>>) -> Result<Self> {
        if cores.len() != shape.order() {
            return Err(Error::shape("core count differs from tensor order"));
        }
        if cores[0].left != 1 || cores.last().unwrap().right != 1 {
            return Err(Error::shape("boundary TT ranks must be 1"));
        }
        for (k, c) in cores.iter().enumerate() {
            if c.n != shape.dims()[k] {
                return Err(Error::shape(format!("core {k} mode size mismatch")));
            }
            if k + 1 < cores.len() && c.right != cores[k + 1].left {
                return Err(Error::shape(format!("rank mismatch between cores {k} and {}", k + 1)));
            }
        }
        Ok(TtModel { shape, cores })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn order(&self) -> usize {
        self.cores.len()
    }

    pub fn cores(&self) -> &[TtCore<T>] {
        &self.cores
    }

    /// The full rank vector `(r_0, ..., r_d)` with `r_0 = r_d = 1`.
    pub fn ranks(&self) -> Vec<usize> {
        let mut r = Vec::with_capacity(self.order() + 1);
        r.push(1);
        for c in &self.cores {
            r.push(c.right);
        }
        r
    }

    pub fn max_rank(&self) -> usize {
        self.cores.iter().map(|c| c.right.max(c.left)).max().unwrap_or(1)
    }

    pub fn parameter_count(&self) -> usize {
        super::parameter_count_tt(self.shape.dims(), &self.ranks())
    }

    /// Entry by the chain of index-sliced core products.
    pub fn entry(&self, idx: &MultiIndex) -> Result<T> {
        if idx.order() != self.order() {
            return Err(Error::shape("index order mismatch".to_string()));
        }
        let mut row = vec![T::one()];
        for (k, &i) in idx.indices().iter().enumerate() {
            let c = &self.cores[k];
            if i == 0 || i > c.n {
                return Err(Error::IndexOutOfBounds(format!("index {i} at mode {}", k + 1)));
            }
            let mut next = vec![T::zero(); c.right];
            for (beta, nb) in next.iter_mut().enumerate() {
                let mut s = T::zero();
                for (alpha, &ra) in row.iter().enumerate() {
                    s += ra * c.at(alpha, i - 1, beta);
                }
                *nb = s;
            }
            row = next;
        }
        Ok(row[0])
    }

    pub fn densify(&self) -> DenseTensor<T> {
        // left-to-right contraction keeping (prefix, r_k) column-major
        let mut acc = Matrix::from_fn(1, 1, |_, _| T::one());
        for c in &self.cores {
            // acc: (p, left) -> out: (p * n, right)
            let p = acc.rows();
            let mut out = Matrix::zeros(p * c.n, c.right);
            for beta in 0..c.right {
                for i in 0..c.n {
                    for alpha in 0..c.left {
                        let w = c.at(alpha, i, beta);
                        if w == T::zero() {
                            continue;
                        }
                        for row in 0..p {
                            out[(i * p + row, beta)] += acc[(row, alpha)] * w;
                        }
                    }
                }
            }
            acc = out;
        }
        debug_assert_eq!(acc.cols(), 1);
        DenseTensor::from_data(self.shape.clone(), acc.into_data()).expect("consistent size")
    }
}

/// TT-SVD with relative Frobenius error budget `eps >= 0`; the per-step
/// truncation threshold is `eps * ||A||_F / sqrt(d - 1)`.
pub fn tt_svd<T: Scalar>(a: &DenseTensor<T>, eps: f64) -> Result<TtModel<T>> {
    if eps < 0.0 {
        return Err(Error::invalid("eps must be non-negative"));
    }
    let d = a.order();
    let dims = a.shape().dims().to_vec();
    if d == 1 {
        let mut core = TtCore::zeros(1, dims[0], 1);
        core.data.copy_from_slice(a.data());
        return Ok(TtModel::new(a.shape().clone(), vec![core])?);
    }
    let norm_a = a.frobenius_norm();
    let delta = fl::<T>(eps) * norm_a / fl::<T>(((d - 1) as f64).sqrt());
    let mut cores = Vec::with_capacity(d);
    let mut r_left = 1usize;
    // carry: (r_left * n_k) x (rest) matrix, column-major
    let mut carry = a.data().to_vec();
    let mut rest: usize = a.len();
    for k in 0..d - 1 {
        let rows = r_left * dims[k];
        rest /= dims[k];
        let m = Matrix::from_col_major(rows, rest, carry)?;
        let svd = svd_thin(&m);
        let rank = truncation_rank(&svd.s, delta);
        let mut core = TtCore::zeros(r_left, dims[k], rank);
        for beta in 0..rank {
            let col = svd.u.col(beta);
            for i in 0..dims[k] {
                for alpha in 0..r_left {
                    *core.at_mut(alpha, i, beta) = col[alpha + r_left * i];
                }
            }
        }
        cores.push(core);
        // carry = diag(s) * Vt restricted to kept rows, shaped (rank x rest)
        let mut next = vec![T::zero(); rank * rest];
        for j in 0..rest {
            for b in 0..rank {
                next[b + rank * j] = svd.s[b] * svd.vt[(b, j)];
            }
        }
        carry = next;
        r_left = rank;
    }
    let mut last = TtCore::zeros(r_left, dims[d - 1], 1);
    last.data.copy_from_slice(&carry);
    cores.push(last);
    TtModel::new(a.shape().clone(), cores)
}

/// Keep the smallest rank whose discarded tail energy stays within
/// `delta^2`; singular values at roundoff level are always discarded.
fn truncation_rank<T: Scalar>(s: &[T], delta: T) -> usize {
    let smax = s.first().copied().unwrap_or_else(T::zero);
    let floor = smax * T::epsilon() * fl::<T>(64.0 * (s.len() as f64).sqrt());
    let budget = delta * delta;
    let mut tail = T::zero();
    let mut rank = s.len();
    for j in (0..s.len()).rev() {
        let next_tail = tail + s[j] * s[j];
        if s[j] <= floor || next_tail <= budget {
            tail = next_tail;
            rank = j;
        } else {
            break;
        }
    }
    rank.max(1)
}

/// `<t1, t2>` by sweeping the joint core contraction left to right.
pub fn tt_inner<T: Scalar>(t1: &TtModel<T>, t2: &TtModel<T>) -> Result<T> {
    if t1.shape() != t2.shape() {
        return Err(Error::shape("TT inner product shape mismatch"));
    }
    // m: (r1_k x r2_k) joint boundary matrix
    let mut m = Matrix::from_fn(1, 1, |_, _| T::one());
    for (c1, c2) in t1.cores.iter().zip(&t2.cores) {
        let mut next = Matrix::zeros(c1.right, c2.right);
        for i in 0..c1.n {
            // tmp = c1_i^T * m  (r1_right x r2_left)
            let mut tmp = Matrix::zeros(c1.right, c2.left);
            for b in 0..c2.left {
                for a2 in 0..c1.right {
                    let mut s = T::zero();
                    for a1 in 0..c1.left {
                        s += c1.at(a1, i, a2) * m[(a1, b)];
                    }
                    tmp[(a2, b)] = s;
                }
            }
            opcount::add((c1.right * c2.left * c1.left) as u64);
            // next += tmp * c2_i
            for b2 in 0..c2.right {
                for a2 in 0..c1.right {
                    let mut s = T::zero();
                    for b in 0..c2.left {
                        s += tmp[(a2, b)] * c2.at(b, i, b2);
                    }
                    next[(a2, b2)] += s;
                }
            }
            opcount::add((c2.right * c1.right * c2.left) as u64);
        }
        m = next;
    }
    Ok(m[(0, 0)])
}

/// `<tt, w>` for rank-1 `w` in O(sum_k n_k r^2) multiply-adds.
pub fn tt_inner_rank1<T: Scalar>(tt: &TtModel<T>, w: &Rank1Tensor<T>) -> Result<T> {
    if w.shape() != *tt.shape() {
        return Err(Error::shape("rank-1 shape mismatch"));
    }
    let mut row = vec![T::one()];
    for (k, c) in tt.cores.iter().enumerate() {
        let v = w.vector(k + 1);
        // fold the mode vector into the core: (left x right) matrix
        let mut folded = Matrix::zeros(c.left, c.right);
        for (i, &vi) in v.iter().enumerate() {
            if vi == T::zero() {
                continue;
            }
            for beta in 0..c.right {
                for alpha in 0..c.left {
                    folded[(alpha, beta)] += vi * c.at(alpha, i, beta);
                }
            }
        }
        opcount::add((c.left * c.n * c.right) as u64);
        let mut next = vec![T::zero(); c.right];
        for (beta, nb) in next.iter_mut().enumerate() {
            let mut s = T::zero();
            for (alpha, &ra) in row.iter().enumerate() {
                s += ra * folded[(alpha, beta)];
            }
            *nb = s;
        }
        opcount::add((c.left * c.right) as u64);
        row = next;
    }
    Ok(row[0] * w.weight())
}

/// Elementwise sum; TT ranks add.
pub fn tt_add<T: Scalar>(t1: &TtModel<T>, t2: &TtModel<T>) -> Result<TtModel<T>> {
    if t1.shape() != t2.shape() {
        return Err(Error::shape("TT sum shape mismatch"));
    }
    let d = t1.order();
    if d == 1 {
        let mut core = t1.cores[0].clone();
        for (x, &y) in core.data.iter_mut().zip(&t2.cores[0].data) {
            *x += y;
        }
        return TtModel::new(t1.shape.clone(), vec![core]);
    }
    let mut cores = Vec::with_capacity(d);
    for k in 0..d {
        let (c1, c2) = (&t1.cores[k], &t2.cores[k]);
        let left = if k == 0 { 1 } else { c1.left + c2.left };
        let right = if k == d - 1 { 1 } else { c1.right + c2.right };
        let mut core = TtCore::zeros(left, c1.n, right);
        for i in 0..c1.n {
            for a in 0..c1.left {
                for b in 0..c1.right {
                    *core.at_mut(a, i, b) = c1.at(a, i, b);
                }
            }
            let (oa, ob) = (
                if k == 0 { 0 } else { c1.left },
                if k == d - 1 { 0 } else { c1.right },
            );
            for a in 0..c2.left {
                for b in 0..c2.right {
                    let dst = core.at_mut(a + oa, i, b + ob);
                    *dst = *dst + c2.at(a, i, b);
                }
            }
        }
        cores.push(core);
    }
    TtModel::new(t1.shape.clone(), cores)
}

/// Elementwise (Hadamard) product; TT ranks multiply. Follow with
/// [`tt_round`] to compress.
pub fn tt_hadamard<T: Scalar>(t1: &TtModel<T>, t2: &TtModel<T>) -> Result<TtModel<T>> {
    if t1.shape() != t2.shape() {
        return Err(Error::shape("TT Hadamard shape mismatch"));
    }
    let mut cores = Vec::with_capacity(t1.order());
    for (c1, c2) in t1.cores.iter().zip(&t2.cores) {
        let mut core = TtCore::zeros(c1.left * c2.left, c1.n, c1.right * c2.right);
        for i in 0..c1.n {
            for b1 in 0..c1.right {
                for b2 in 0..c2.right {
                    let beta = b1 * c2.right + b2;
                    for a1 in 0..c1.left {
                        let v1 = c1.at(a1, i, b1);
                        if v1 == T::zero() {
                            continue;
                        }
                        for a2 in 0..c2.left {
                            *core.at_mut(a1 * c2.left + a2, i, beta) = v1 * c2.at(a2, i, b2);
                        }
                    }
                }
            }
        }
        cores.push(core);
    }
    TtModel::new(t1.shape.clone(), cores)
}

/// Scale all entries by `s` (absorbed into the first core).
pub fn tt_scale<T: Scalar>(tt: &TtModel<T>, s: T) -> TtModel<T> {
    let mut out = tt.clone();
    for x in &mut out.cores[0].data {
        *x *= s;
    }
    out
}

/// TT rounding: right-to-left orthogonalization followed by left-to-right
/// SVD truncation with relative error budget `eps`.
pub fn tt_round<T: Scalar>(tt: &TtModel<T>, eps: f64) -> Result<TtModel<T>> {
    let d = tt.order();
    if d == 1 {
        return Ok(tt.clone());
    }
    let mut cores = tt.cores.clone();
    // right-to-left: make every core but the first right-orthogonal
    for k in (1..d).rev() {
        let c = &cores[k];
        // rows: left, cols: n * right
        let m = Matrix::from_fn(c.left, c.n * c.right, |a, j| {
            let i = j % c.n;
            let b = j / c.n;
            c.at(a, i, b)
        });
        // thin LQ via SVD of m: m = U S Vt; right factor Vt is row-orthonormal
        let svd = svd_thin(&m);
        let rank = svd.s.len();
        let mut newc = TtCore::zeros(rank, c.n, c.right);
        for j in 0..c.n * c.right {
            let i = j % c.n;
            let b = j / c.n;
            for a in 0..rank {
                *newc.at_mut(a, i, b) = svd.vt[(a, j)];
            }
        }
        // absorb U S into the previous core
        let prev = &cores[k - 1];
        let mut us = Matrix::zeros(c.left, rank);
        for b in 0..rank {
            for a in 0..c.left {
                us[(a, b)] = svd.u[(a, b)] * svd.s[b];
            }
        }
        let mut newprev = TtCore::zeros(prev.left, prev.n, rank);
        for b in 0..rank {
            for i in 0..prev.n {
                for a in 0..prev.left {
                    let mut s = T::zero();
                    for t in 0..prev.right {
                        s += prev.at(a, i, t) * us[(t, b)];
                    }
                    *newprev.at_mut(a, i, b) = s;
                }
            }
        }
        cores[k] = newc;
        cores[k - 1] = newprev;
    }
    // norm now lives in core 0
    let norm: T = cores[0].data.iter().map(|&x| x * x).sum::<T>().sqrt();
    let delta = fl::<T>(eps) * norm / fl::<T>(((d - 1) as f64).sqrt());
    // left-to-right truncation
    for k in 0..d - 1 {
        let c = &cores[k];
        let m = Matrix::from_fn(c.left * c.n, c.right, |row, b| {
            let a = row % c.left;
            let i = row / c.left;
            c.at(a, i, b)
        });
        let svd = svd_thin(&m);
        let rank = truncation_rank(&svd.s, delta);
        let mut newc = TtCore::zeros(c.left, c.n, rank);
        for b in 0..rank {
            let col = svd.u.col(b);
            for i in 0..c.n {
                for a in 0..c.left {
                    *newc.at_mut(a, i, b) = col[a + c.left * i];
                }
            }
        }
        // carry diag(s) Vt into the next core
        let next = &cores[k + 1];
        let mut carry = Matrix::zeros(rank, next.left);
        for j in 0..next.left {
            for b in 0..rank {
                carry[(b, j)] = svd.s[b] * svd.vt[(b, j)];
            }
        }
        let mut newnext = TtCore::zeros(rank, next.n, next.right);
        for b2 in 0..next.right {
            for i in 0..next.n {
                for a in 0..rank {
                    let mut s = T::zero();
                    for t in 0..next.left {
                        s += carry[(a, t)] * next.at(t, i, b2);
                    }
                    *newnext.at_mut(a, i, b2) = s;
                }
            }
        }
        cores[k] = newc;
        cores[k + 1] = newnext;
    }
    TtModel::new(tt.shape.clone(), cores)
}

/// TT representation of a rank-1 tensor (all TT ranks 1).
pub fn tt_from_rank1<T: Scalar>(w: &Rank1Tensor<T>) -> TtModel<T> {
    let shape = w.shape();
    let mut cores = Vec::with_capacity(w.order());
    for (k, v) in w.vectors().iter().enumerate() {
        let mut core = TtCore::zeros(1, v.len(), 1);
        for (i, &x) in v.iter().enumerate() {
            let scale = if k == 0 { w.weight() } else { T::one() };
            *core.at_mut(0, i, 0) = x * scale;
        }
        cores.push(core);
    }
    TtModel::new(shape, cores).expect("rank-1 cores are consistent")
}

/// TT tensor with every entry equal to `value`.
pub fn tt_constant<T: Scalar>(shape: &Shape, value: T) -> TtModel<T> {
    let vectors: Vec<Vec<T>> = shape.dims().iter().map(|&n| vec![T::one(); n]).collect();
    let w = Rank1Tensor::weighted(value, vectors).expect("constant rank-1");
    tt_from_rank1(&w)
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
    fn lossless_tt_svd_reconstructs() {
        let a = random_tensor(&[4, 3, 5, 2], 17);
        let tt = tt_svd(&a, 0.0).unwrap();
        assert!(tt.densify().relative_distance(&a).unwrap() < 1e-10);
    }

    #[test]
    fn rank1_input_gives_unit_ranks() {
        let w = Rank1Tensor::new(vec![vec![1.0, 2.0], vec![1.0, -1.0, 2.0], vec![3.0, 1.0]])
            .unwrap();
        let tt = tt_svd(&w.densify(), 0.0).unwrap();
        assert_eq!(tt.ranks(), vec![1, 1, 1, 1]);
    }

    #[test]
    fn two_term_tensor_has_rank_two_train() {
        let mut rng = rng::seeded(3);
        let mk = |rng: &mut rng::SeededRng| {
            Rank1Tensor::new(vec![
                rng::normal_vec::<f64>(rng, 8),
                rng::normal_vec::<f64>(rng, 8),
                rng::normal_vec::<f64>(rng, 8),
            ])
            .unwrap()
            .densify()
        };
        let mut a = mk(&mut rng);
        a.add_scaled(&mk(&mut rng), 1.0).unwrap();
        let tt = tt_svd(&a, 1e-10).unwrap();
        assert_eq!(tt.ranks(), vec![1, 2, 2, 1]);
    }

    #[test]
    fn error_budget_is_respected() {
        let a = random_tensor(&[6, 6, 6], 23);
        let norm = a.frobenius_norm();
        for eps in [1e-2, 1e-4, 1e-8] {
            let tt = tt_svd(&a, eps).unwrap();
            let err = tt.densify().relative_distance(&a).unwrap() * norm;
            assert!(
                err <= eps * norm + 1e-13,
                "eps {eps}: error {err} above budget {}",
                eps * norm
            );
        }
    }

    #[test]
    fn entry_formula_matches_densify() {
        let a = random_tensor(&[3, 4, 2, 3], 31);
        let tt = tt_svd(&a, 0.0).unwrap();
        let dense = tt.densify();
        for idx in a.shape().multi_indices().step_by(7) {
            let e = tt.entry(&idx).unwrap();
            assert!((e - dense.get(&idx).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn tt_inner_matches_dense_inner() {
        let a = random_tensor(&[4, 4, 4], 5);
        let b = random_tensor(&[4, 4, 4], 6);
        let ta = tt_svd(&a, 0.0).unwrap();
        let tb = tt_svd(&b, 0.0).unwrap();
        let fast = tt_inner(&ta, &tb).unwrap();
        let slow = inner_product(&a, &b).unwrap();
        assert!((fast - slow).abs() < 1e-9 * slow.abs().max(1.0));
    }

    #[test]
    fn tt_inner_rank1_matches_dense_on_6way() {
        let dims = [4usize; 6];
        let a = random_tensor(&dims, 41);
        let tt = tt_svd(&a, 0.0).unwrap();
        let mut rng = rng::seeded(42);
        let w = Rank1Tensor::new(
            dims.iter()
                .map(|&n| rng::normal_vec::<f64>(&mut rng, n))
                .collect(),
        )
        .unwrap();
        let fast = tt_inner_rank1(&tt, &w).unwrap();
        let slow = inner_product(&a, &w.densify()).unwrap();
        assert!(
            (fast - slow).abs() < 1e-10 * slow.abs().max(1.0),
            "fast {fast} slow {slow}"
        );
    }

    #[test]
    fn hadamard_add_round_algebra() {
        let a = random_tensor(&[3, 4, 3], 8);
        let b = random_tensor(&[3, 4, 3], 9);
        let (ta, tb) = (tt_svd(&a, 0.0).unwrap(), tt_svd(&b, 0.0).unwrap());
        let sum = tt_add(&ta, &tb).unwrap();
        let had = tt_hadamard(&ta, &tb).unwrap();
        let sum_dense = sum.densify();
        let had_dense = had.densify();
        for (k, idx) in a.shape().multi_indices().enumerate() {
            let (x, y) = (a.data()[k], b.data()[k]);
            assert!((sum_dense.get(&idx).unwrap() - (x + y)).abs() < 1e-10);
            assert!((had_dense.get(&idx).unwrap() - x * y).abs() < 1e-10);
        }
        // rounding a padded representation recovers small ranks
        let rounded = tt_round(&sum, 1e-12).unwrap();
        assert!(rounded.densify().relative_distance(&sum_dense).unwrap() < 1e-9);
        assert!(rounded.max_rank() <= sum.max_rank());
    }
}
