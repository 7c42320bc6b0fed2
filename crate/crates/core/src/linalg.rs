//! Small dense linear algebra kernels: column-major matrices, one-sided
//! Jacobi SVD, symmetric Jacobi eigendecomposition, Cholesky/LU solves, and
//! the symmetric tridiagonal QL eigensolver used by the quadrature builder.
//!
//! Column-major storage is deliberate: the mode-1 unfolding of a tensor in
//! first-index-fastest order is exactly its data vector reinterpreted as a
//! column-major matrix.

use crate::error::{Error, Result};
use crate::scalar::{fl, Scalar};

/// Dense column-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    /// Build from a flat column-major buffer.
    pub fn from_col_major(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::shape(format!(
                "matrix buffer length {} does not match {}x{}",
                data.len(),
                rows,
                cols
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Build from rows given as slices (convenience for tests and literals).
    pub fn from_rows(rows: &[&[T]]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut m = Matrix::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Matrix::zeros(rows, cols);
        for j in 0..cols {
            for i in 0..rows {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    pub fn col(&self, j: usize) -> &[T] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [T] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn transpose(&self) -> Matrix<T> {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for j in 0..self.cols {
            for i in 0..self.rows {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// `self * other`.
    pub fn matmul(&self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, other.rows, "matmul inner dimension");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for j in 0..other.cols {
            let bcol = other.col(j);
            let ocol = out.col_mut(j);
            for (k, &bkj) in bcol.iter().enumerate() {
                if bkj == T::zero() {
                    continue;
                }
                let acol = self.col(k);
                for i in 0..acol.len() {
                    ocol[i] += acol[i] * bkj;
                }
            }
        }
        out
    }

    /// `self^T * other` without forming the transpose.
    pub fn tr_matmul(&self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.rows, other.rows, "tr_matmul inner dimension");
        let mut out = Matrix::zeros(self.cols, other.cols);
        for j in 0..other.cols {
            for i in 0..self.cols {
                out[(i, j)] = dot(self.col(i), other.col(j));
            }
        }
        out
    }

    /// Matrix-vector product `self * x`.
    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(self.cols, x.len(), "matvec inner dimension");
        let mut y = vec![T::zero(); self.rows];
        for (k, &xk) in x.iter().enumerate() {
            if xk == T::zero() {
                continue;
            }
            for (i, &a) in self.col(k).iter().enumerate() {
                y[i] += a * xk;
            }
        }
        y
    }

    /// `self^T * x`.
    pub fn tr_matvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(self.rows, x.len(), "tr_matvec inner dimension");
        (0..self.cols).map(|j| dot(self.col(j), x)).collect()
    }

    pub fn scale(&mut self, s: T) {
        for v in &mut self.data {
            *v *= s;
        }
    }

    pub fn frobenius_norm(&self) -> T {
        dot(&self.data, &self.data).sqrt()
    }

    /// Keep the first `k` columns.
    pub fn take_cols(&self, k: usize) -> Matrix<T> {
        assert!(k <= self.cols);
        Matrix {
            rows: self.rows,
            cols: k,
            data: self.data[..self.rows * k].to_vec(),
        }
    }

    /// Kronecker product `self ⊗ other` (blocks `a_ij * other`).
    pub fn kronecker(&self, other: &Matrix<T>) -> Matrix<T> {
        let mut out = Matrix::zeros(self.rows * other.rows, self.cols * other.cols);
        for ja in 0..self.cols {
            for ia in 0..self.rows {
                let a = self[(ia, ja)];
                if a == T::zero() {
                    continue;
                }
                for jb in 0..other.cols {
                    for ib in 0..other.rows {
                        out[(ia * other.rows + ib, ja * other.cols + jb)] = a * other[(ib, jb)];
                    }
                }
            }
        }
        out
    }
}

impl<T: Scalar> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[j * self.rows + i]
    }
}

impl<T: Scalar> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[j * self.rows + i]
    }
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let mut s = T::zero();
    for i in 0..a.len() {
        s += a[i] * b[i];
    }
    s
}

pub fn norm2<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// Thin singular value decomposition `A = U diag(s) V^T`.
///
/// `u` is `m x k`, `vt` is `k x n`, `k = min(m, n)`, singular values sorted
/// descending. Columns of `u` are orthonormal even for rank-deficient input,
/// and the sign of each singular pair is canonicalized so the
/// largest-magnitude entry of each left singular vector is positive.
pub struct Svd<T> {
    pub u: Matrix<T>,
    pub s: Vec<T>,
    pub vt: Matrix<T>,
}

/// One-sided Jacobi SVD, run on whichever orientation has fewer columns.
///
/// Jacobi rotations orthogonalize columns in place; singular values are the
/// final column norms. This resolves small singular values to high relative
/// accuracy, which the truncation logic in the tensor-train path depends on.
pub fn svd_thin<T: Scalar>(a: &Matrix<T>) -> Svd<T> {
    if a.rows >= a.cols {
        let (u, s, v) = one_sided_jacobi(a.clone());
        let (u, s, v) = finalize_svd(u, s, v);
        Svd {
            u,
            s,
            vt: v.transpose(),
        }
    } else {
        // A^T = U' S V'^T  =>  A = V' S U'^T
        let (up, s, vp) = one_sided_jacobi(a.transpose());
        let (up, s, vp) = finalize_svd(up, s, vp);
        Svd {
            u: vp,
            s,
            vt: up.transpose(),
        }
    }
}

/// Orthogonalize the columns of `w` (m x n, m >= n) by Jacobi rotations,
/// accumulating them in `v`. Returns (normalized columns, norms, v).
fn one_sided_jacobi<T: Scalar>(mut w: Matrix<T>) -> (Matrix<T>, Vec<T>, Matrix<T>) {
    let n = w.cols();
    let mut v = Matrix::identity(n);
    if n == 0 {
        return (w, Vec::new(), v);
    }
    let tol = T::epsilon() * fl::<T>(8.0);
    let max_sweeps = 64;
    for _ in 0..max_sweeps {
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let (alpha, beta, gamma) = {
                    let (cp, cq) = (w.col(p), w.col(q));
                    (dot(cp, cp), dot(cq, cq), dot(cp, cq))
                };
                if alpha == T::zero() || beta == T::zero() {
                    continue;
                }
                if gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (fl::<T>(2.0) * gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                rotate_cols(&mut w, p, q, c, s);
                rotate_cols(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }
    let mut s: Vec<T> = (0..n).map(|j| norm2(w.col(j))).collect();
    for j in 0..n {
        let sj = s[j];
        if sj > T::zero() {
            let inv = T::one() / sj;
            for x in w.col_mut(j) {
                *x *= inv;
            }
        } else {
            s[j] = T::zero();
        }
    }
    (w, s, v)
}

fn rotate_cols<T: Scalar>(m: &mut Matrix<T>, p: usize, q: usize, c: T, s: T) {
    let rows = m.rows();
    let (lo, hi) = if p < q { (p, q) } else { (q, p) };
    let (head, tail) = m.data_mut().split_at_mut(hi * rows);
    let colp = &mut head[lo * rows..lo * rows + rows];
    let colq = &mut tail[..rows];
    // (p, q) rotation regardless of storage order of the split
    if lo == p {
        for i in 0..rows {
            let (a, b) = (colp[i], colq[i]);
            colp[i] = c * a - s * b;
            colq[i] = s * a + c * b;
        }
    } else {
        for i in 0..rows {
            let (b, a) = (colp[i], colq[i]);
            colq[i] = c * a - s * b;
            colp[i] = s * a + c * b;
        }
    }
}

/// Sort singular triples descending, re-orthonormalize null columns, and
/// canonicalize signs.
fn finalize_svd<T: Scalar>(
    u: Matrix<T>,
    s: Vec<T>,
    v: Matrix<T>,
) -> (Matrix<T>, Vec<T>, Matrix<T>) {
    let n = s.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| s[j].partial_cmp(&s[i]).unwrap_or(std::cmp::Ordering::Equal));
    let mut us = Matrix::zeros(u.rows(), n);
    let mut vs = Matrix::zeros(v.rows(), n);
    let mut ss = vec![T::zero(); n];
    for (k, &idx) in order.iter().enumerate() {
        ss[k] = s[idx];
        us.col_mut(k).copy_from_slice(u.col(idx));
        vs.col_mut(k).copy_from_slice(v.col(idx));
    }
    // Replace exactly-zero left singular vectors by an orthonormal completion
    // so U always has orthonormal columns.
    let smax = ss.first().copied().unwrap_or_else(T::zero);
    for k in 0..n {
        if ss[k] > T::zero() && smax > T::zero() {
            continue;
        }
        complete_column(&mut us, k);
        ss[k] = T::zero();
    }
    // Sign convention: largest-magnitude entry of each left vector positive.
    for k in 0..n {
        let col = us.col(k);
        let mut best = 0usize;
        for i in 1..col.len() {
            if col[i].abs() > col[best].abs() {
                best = i;
            }
        }
        if col[best] < T::zero() {
            for x in us.col_mut(k) {
                *x = -*x;
            }
            for x in vs.col_mut(k) {
                *x = -*x;
            }
        }
    }
    (us, ss, vs)
}

/// Overwrite column `k` of `m` by a unit vector orthogonal to all other
/// columns (Gram-Schmidt against the full column set from the best basis
/// vector candidate).
fn complete_column<T: Scalar>(m: &mut Matrix<T>, k: usize) {
    let rows = m.rows();
    let cols = m.cols();
    let mut best: Option<(T, Vec<T>)> = None;
    for cand in 0..rows {
        let mut v = vec![T::zero(); rows];
        v[cand] = T::one();
        for j in 0..cols {
            if j == k {
                continue;
            }
            let proj = dot(&v, m.col(j));
            if proj != T::zero() {
                for (vi, &cj) in v.iter_mut().zip(m.col(j)) {
                    *vi = *vi - proj * cj;
                }
            }
        }
        let nrm = norm2(&v);
        if best.as_ref().map_or(true, |(bn, _)| nrm > *bn) {
            best = Some((nrm, v));
        }
        if nrm > fl::<T>(0.7) {
            break;
        }
    }
    let (nrm, mut v) = best.expect("at least one candidate");
    if nrm > T::zero() {
        let inv = T::one() / nrm;
        for x in &mut v {
            *x *= inv;
        }
    }
    m.col_mut(k).copy_from_slice(&v);
}

/// Symmetric eigendecomposition by the cyclic Jacobi method.
///
/// Returns eigenvalues descending and the matching orthonormal eigenvectors
/// as matrix columns.
pub fn eigh<T: Scalar>(a: &Matrix<T>) -> (Vec<T>, Matrix<T>) {
    assert_eq!(a.rows(), a.cols(), "eigh requires a square matrix");
    let n = a.rows();
    let mut m = a.clone();
    let mut v = Matrix::identity(n);
    let tol = T::epsilon() * fl::<T>(4.0);
    for _ in 0..100 {
        let mut off = T::zero();
        for j in 0..n {
            for i in 0..j {
                off += m[(i, j)] * m[(i, j)];
            }
        }
        let diag_scale: T = (0..n).map(|i| m[(i, i)] * m[(i, i)]).sum();
        if off.sqrt() <= tol * (diag_scale.sqrt() + off.sqrt()) {
            break;
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                if apq.abs() <= tol * (app.abs() + aqq.abs()) * fl::<T>(0.5) {
                    m[(p, q)] = T::zero();
                    m[(q, p)] = T::zero();
                    continue;
                }
                let theta = (aqq - app) / (fl::<T>(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (T::one() + theta * theta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                for i in 0..n {
                    let (mip, miq) = (m[(i, p)], m[(i, q)]);
                    m[(i, p)] = c * mip - s * miq;
                    m[(i, q)] = s * mip + c * miq;
                }
                for i in 0..n {
                    let (mpi, mqi) = (m[(p, i)], m[(q, i)]);
                    m[(p, i)] = c * mpi - s * mqi;
                    m[(q, i)] = s * mpi + c * mqi;
                }
                rotate_cols(&mut v, p, q, c, s);
            }
        }
    }
    let mut vals: Vec<T> = (0..n).map(|i| m[(i, i)]).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        vals[j]
            .partial_cmp(&vals[i])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut vecs = Matrix::zeros(n, n);
    let mut sorted = vec![T::zero(); n];
    for (k, &idx) in order.iter().enumerate() {
        sorted[k] = vals[idx];
        vecs.col_mut(k).copy_from_slice(v.col(idx));
    }
    vals = sorted;
    (vals, vecs)
}

/// Solve `A x = b` for symmetric positive definite `A` by Cholesky.
pub fn solve_spd<T: Scalar>(a: &Matrix<T>, b: &[T]) -> Result<Vec<T>> {
    let n = a.rows();
    assert_eq!(a.cols(), n);
    assert_eq!(b.len(), n);
    let mut l = Matrix::<T>::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if d <= T::zero() || !d.is_finite() {
            return Err(Error::numerical(format!(
                "cholesky breakdown at pivot {j}: {d}"
            )));
        }
        let dj = d.sqrt();
        l[(j, j)] = dj;
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / dj;
        }
    }
    // forward then backward substitution
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            let lik = l[(i, k)];
            y[i] = y[i] - lik * y[k];
        }
        y[i] = y[i] / l[(i, i)];
    }
    for i in (0..n).rev() {
        for k in (i + 1)..n {
            let lki = l[(k, i)];
            y[i] = y[i] - lki * y[k];
        }
        y[i] = y[i] / l[(i, i)];
    }
    Ok(y)
}

/// Solve `A x = b` by LU with partial pivoting.
pub fn solve_lu<T: Scalar>(a: &Matrix<T>, b: &[T]) -> Result<Vec<T>> {
    let n = a.rows();
    assert_eq!(a.cols(), n);
    assert_eq!(b.len(), n);
    let mut lu = a.clone();
    let mut x = b.to_vec();
    for k in 0..n {
        let mut piv = k;
        for i in (k + 1)..n {
            if lu[(i, k)].abs() > lu[(piv, k)].abs() {
                piv = i;
            }
        }
        if lu[(piv, k)].abs() < T::epsilon() * fl::<T>(1e-8) && lu[(piv, k)] == T::zero() {
            return Err(Error::numerical("singular matrix in LU solve".to_string()));
        }
        if piv != k {
            for j in 0..n {
                let tmp = lu[(k, j)];
                lu[(k, j)] = lu[(piv, j)];
                lu[(piv, j)] = tmp;
            }
            x.swap(k, piv);
        }
        let pivot = lu[(k, k)];
        if pivot == T::zero() {
            return Err(Error::numerical("zero pivot in LU solve".to_string()));
        }
        for i in (k + 1)..n {
            let f = lu[(i, k)] / pivot;
            lu[(i, k)] = f;
            for j in (k + 1)..n {
                let lkj = lu[(k, j)];
                lu[(i, j)] = lu[(i, j)] - f * lkj;
            }
            x[i] = x[i] - f * x[k];
        }
    }
    for i in (0..n).rev() {
        for j in (i + 1)..n {
            let lij = lu[(i, j)];
            x[i] = x[i] - lij * x[j];
        }
        x[i] = x[i] / lu[(i, i)];
    }
    Ok(x)
}

/// Eigenvalues and eigenvectors of a symmetric tridiagonal matrix by QL with
/// implicit shifts.
///
/// `diag` has length `n`, `offdiag` length `n - 1`. Returns eigenvalues
/// ascending and the orthonormal eigenvector matrix (column `k` pairs with
/// eigenvalue `k`).
pub fn tridiag_ql<T: Scalar>(diag: &[T], offdiag: &[T]) -> Result<(Vec<T>, Matrix<T>)> {
    let n = diag.len();
    assert_eq!(offdiag.len(), n.saturating_sub(1));
    let mut d = diag.to_vec();
    let mut e = vec![T::zero(); n];
    e[..n - 1].copy_from_slice(offdiag);
    let mut z = Matrix::<T>::identity(n);
    if n == 1 {
        return Ok((d, z));
    }
    for l in 0..n {
        let mut iter = 0;
        loop {
            // find a negligible off-diagonal element
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= T::epsilon() * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 50 {
                return Err(Error::numerical(format!(
                    "tridiagonal QL failed to converge at eigenvalue {l}"
                )));
            }
            let mut g = (d[l + 1] - d[l]) / (fl::<T>(2.0) * e[l]);
            let mut r = (g * g + T::one()).sqrt();
            let sign_r = if g >= T::zero() { r } else { -r };
            g = d[m] - d[l] + e[l] / (g + sign_r);
            let mut s = T::one();
            let mut c = T::one();
            let mut p = T::zero();
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = (f * f + g * g).sqrt();
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] = d[i + 1] - p;
                    e[m] = T::zero();
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + fl::<T>(2.0) * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    f = z[(k, i + 1)];
                    z[(k, i + 1)] = s * z[(k, i)] + c * f;
                    z[(k, i)] = c * z[(k, i)] - s * f;
                }
            }
            if r == T::zero() && m > l {
                continue;
            }
            d[l] = d[l] - p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    // sort ascending
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap_or(std::cmp::Ordering::Equal));
    let mut ds = vec![T::zero(); n];
    let mut zs = Matrix::zeros(n, n);
    for (k, &idx) in order.iter().enumerate() {
        ds[k] = d[idx];
        zs.col_mut(k).copy_from_slice(z.col(idx));
    }
    Ok((ds, zs))
}
