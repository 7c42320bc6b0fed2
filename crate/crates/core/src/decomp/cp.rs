//! Canonical polyadic decomposition by alternating least squares, plus the
//! incremental-rank driver and the shared-factor symmetric variant.

use crate::error::{Error, Result};
use crate::linalg::{dot, norm2, solve_spd, svd_thin, Matrix};
use crate::opcount;
use crate::rng::{self, SeededRng};
use crate::scalar::{fl, Scalar};
use crate::tensor::{
    contract_mode_vec, matricize, from_mode_matrix, DenseTensor, MultiIndex, Rank1Tensor, Shape,
};

/// Weighted sum of rank-1 terms with unit-norm factor columns.
#[derive(Clone, Debug)]
pub struct CpModel<T> {
    shape: Shape,
    weights: Vec<T>,
    factors: Vec<Matrix<T>>,
}

impl<T: Scalar> CpModel<T> {
    /// Build a model from raw weights and factors; columns are normalized and
    /// terms canonicalized (non-negative weights, descending order).
    pub fn new(weights: Vec<T>, factors: Vec<Matrix<T>>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::invalid("CP model needs at least one mode"));
        }
        let rank = weights.len();
        for f in &factors {
            if f.cols() != rank {
                return Err(Error::shape(format!(
                    "factor has {} columns, expected rank {}",
                    f.cols(),
                    rank
                )));
            }
        }
        let shape = Shape::new(factors.iter().map(|f| f.rows()).collect())?;
        let mut model = CpModel {
            shape,
            weights,
            factors,
        };
        model.canonicalize();
        Ok(model)
    }

    /// Rank-`r` zero model over `shape` (unit basis columns, zero weights).
    pub fn zero(shape: &Shape, rank: usize) -> Self {
        let factors = shape
            .dims()
            .iter()
            .map(|&n| {
                Matrix::from_fn(n, rank, |i, j| if i == j % n { T::one() } else { T::zero() })
            })
            .collect();
        CpModel {
            shape: shape.clone(),
            weights: vec![T::zero(); rank],
            factors,
        }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn rank(&self) -> usize {
        self.weights.len()
    }

    pub fn order(&self) -> usize {
        self.factors.len()
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn factors(&self) -> &[Matrix<T>] {
        &self.factors
    }

    pub fn factor(&self, mode: usize) -> &Matrix<T> {
        &self.factors[mode - 1]
    }

    /// Normalize columns, push signs into the weights, flip negative weights
    /// into the first factor, and sort terms by descending weight.
    fn canonicalize(&mut self) {
        let r = self.rank();
        for i in 0..r {
            for f in &mut self.factors {
                let nrm = norm2(f.col(i));
                if nrm > T::zero() {
                    let inv = T::one() / nrm;
                    for x in f.col_mut(i) {
                        *x *= inv;
                    }
                    self.weights[i] *= nrm;
                } else {
                    // dead column: reset to e_1, weight to zero
                    let col = f.col_mut(i);
                    for x in col.iter_mut() {
                        *x = T::zero();
                    }
                    col[0] = T::one();
                    self.weights[i] = T::zero();
                }
            }
            if self.weights[i] < T::zero() {
                self.weights[i] = -self.weights[i];
                for x in self.factors[0].col_mut(i) {
                    *x = -*x;
                }
            }
        }
        let mut order: Vec<usize> = (0..r).collect();
        order.sort_by(|&a, &b| {
            self.weights[b]
                .partial_cmp(&self.weights[a])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        if order.iter().enumerate().any(|(k, &i)| k != i) {
            let weights = order.iter().map(|&i| self.weights[i]).collect();
            let factors = self
                .factors
                .iter()
                .map(|f| {
                    let mut g = Matrix::zeros(f.rows(), r);
                    for (k, &i) in order.iter().enumerate() {
                        g.col_mut(k).copy_from_slice(f.col(i));
                    }
                    g
                })
                .collect();
            self.weights = weights;
            self.factors = factors;
        }
    }

    pub fn entry(&self, idx: &MultiIndex) -> Result<T> {
        if idx.order() != self.order() {
            return Err(Error::shape("index order mismatch".to_string()));
        }
        let mut acc = T::zero();
        for i in 0..self.rank() {
            let mut p = self.weights[i];
            for (k, &ik) in idx.indices().iter().enumerate() {
                p *= self.factors[k][(ik - 1, i)];
            }
            acc += p;
        }
        Ok(acc)
    }

    pub fn densify(&self) -> DenseTensor<T> {
        // mode-1 unfolding of the model is U_1 diag(w) H^T with H the
        // Khatri-Rao product of the remaining factors
        let r = self.rank();
        let mut u1 = self.factors[0].clone();
        for i in 0..r {
            let w = self.weights[i];
            for x in u1.col_mut(i) {
                *x *= w;
            }
        }
        let h = khatri_rao_skip(&self.factors, 0);
        let m1 = u1.matmul(&h.transpose());
        from_mode_matrix(&m1, &self.shape, 1).expect("consistent dimensions")
    }

    /// Frobenius norm from the factor Gram matrices, without densifying.
    pub fn frobenius_norm(&self) -> T {
        let r = self.rank();
        let mut gram = Matrix::from_fn(r, r, |_, _| T::one());
        for f in &self.factors {
            let g = f.tr_matmul(f);
            for j in 0..r {
                for i in 0..r {
                    gram[(i, j)] *= g[(i, j)];
                }
            }
        }
        let mut s = T::zero();
        for j in 0..r {
            for i in 0..r {
                s += self.weights[i] * self.weights[j] * gram[(i, j)];
            }
        }
        s.max(T::zero()).sqrt()
    }

    /// `<model, w>` for rank-1 `w` in O(sum_k n_k r) multiply-adds.
    pub fn inner_rank1(&self, w: &Rank1Tensor<T>) -> Result<T> {
        if w.shape() != self.shape {
            return Err(Error::shape("rank-1 shape mismatch".to_string()));
        }
        let r = self.rank();
        let mut prod = vec![T::one(); r];
        for (k, f) in self.factors.iter().enumerate() {
            let v = w.vector(k + 1);
            for i in 0..r {
                prod[i] *= dot(f.col(i), v);
            }
            opcount::add((f.rows() * r) as u64);
        }
        let mut acc = T::zero();
        for i in 0..r {
            acc += self.weights[i] * prod[i];
        }
        opcount::add(r as u64);
        Ok(acc * w.weight())
    }

    pub fn parameter_count(&self) -> usize {
        super::parameter_count_cp(self.shape.dims(), self.rank())
    }
}

/// Khatri-Rao product of all factors except `skip` (0-based), with columns
/// ordered to match the mode-(skip+1) unfolding: ascending remaining modes,
/// earlier modes fastest.
pub(crate) fn khatri_rao_skip<T: Scalar>(factors: &[Matrix<T>], skip: usize) -> Matrix<T> {
    let r = factors[0].cols();
    let cols: usize = factors
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != skip)
        .map(|(_, f)| f.rows())
        .product();
    let mut h = Matrix::zeros(cols, r);
    for i in 0..r {
        let mut col: Vec<T> = vec![T::one()];
        for (k, f) in factors.iter().enumerate() {
            if k == skip {
                continue;
            }
            col = crate::tensor::kronecker_vec(f.col(i), &col);
        }
        h.col_mut(i).copy_from_slice(&col);
    }
    h
}

/// Configuration for the alternating least squares solvers.
#[derive(Clone, Debug)]
pub struct CpConfig {
    pub max_iters: usize,
    /// Stop when the relative residual changes by less than this between
    /// sweeps.
    pub tol: f64,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for CpConfig {
    fn default() -> Self {
        CpConfig {
            max_iters: 200,
            tol: 1e-12,
            restarts: 1,
            seed: 0,
        }
    }
}

/// Outcome report for a CP fit.
#[derive(Clone, Debug)]
pub struct CpFitReport {
    /// `||A - densify|| / ||A||` of the returned model.
    pub rel_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// A least-squares system was near-singular and Tikhonov-regularized.
    pub regularized: bool,
    /// Relative residual after each sweep of the winning restart.
    pub trajectory: Vec<f64>,
    /// True when the trajectory never increased (beyond roundoff slack).
    pub monotone: bool,
    /// Restart index that produced the returned model.
    pub restart: usize,
}

/// Rank-`r` CP fit by alternating least squares, best of `cfg.restarts`
/// initializations (leading HOSVD vectors first when the rank permits,
/// seeded Gaussian otherwise).
pub fn cpd_als<T: Scalar>(
    a: &DenseTensor<T>,
    rank: usize,
    cfg: &CpConfig,
) -> Result<(CpModel<T>, CpFitReport)> {
    if rank == 0 {
        return Err(Error::invalid("CP rank must be at least 1"));
    }
    let norm_a = a.frobenius_norm();
    if norm_a == T::zero() {
        let model = CpModel::zero(a.shape(), rank);
        return Ok((
            model,
            CpFitReport {
                rel_residual: 0.0,
                iterations: 0,
                converged: true,
                regularized: false,
                trajectory: vec![0.0],
                monotone: true,
                restart: 0,
            },
        ));
    }
    let d = a.order();
    let unfoldings: Vec<Matrix<T>> = (1..=d).map(|m| matricize(a, m).expect("valid mode")).collect();
    let hosvd_init = hosvd_init_factors(a, &unfoldings, rank);
    let restarts = cfg.restarts.max(1);
    let mut best: Option<(CpModel<T>, CpFitReport)> = None;
    for restart in 0..restarts {
        let factors = match (&hosvd_init, restart) {
            (Some(init), 0) => init.clone(),
            _ => random_factors(a.shape(), rank, rng::child(cfg.seed, restart as u64)),
        };
        let (model, report) = als_run(&unfoldings, norm_a, factors, cfg, restart)?;
        let better = best
            .as_ref()
            .map_or(true, |(_, b)| report.rel_residual < b.rel_residual);
        if better {
            best = Some((model, report));
        }
        if best.as_ref().unwrap().1.rel_residual < cfg.tol {
            break;
        }
    }
    Ok(best.expect("at least one restart"))
}

fn hosvd_init_factors<T: Scalar>(
    a: &DenseTensor<T>,
    unfoldings: &[Matrix<T>],
    rank: usize,
) -> Option<Vec<Matrix<T>>> {
    let ok = a
        .shape()
        .dims()
        .iter()
        .all(|&n| rank <= n.min(a.len() / n));
    if !ok {
        return None;
    }
    Some(
        unfoldings
            .iter()
            .map(|m| svd_thin(m).u.take_cols(rank))
            .collect(),
    )
}

fn random_factors<T: Scalar>(shape: &Shape, rank: usize, mut rng: SeededRng) -> Vec<Matrix<T>> {
    shape
        .dims()
        .iter()
        .map(|&n| {
            let mut f = Matrix::from_fn(n, rank, |_, _| rng::normal(&mut rng));
            for i in 0..rank {
                let nrm = norm2(f.col(i));
                if nrm > T::zero() {
                    let inv = T::one() / nrm;
                    for x in f.col_mut(i) {
                        *x *= inv;
                    }
                }
            }
            f
        })
        .collect()
}

fn als_run<T: Scalar>(
    unfoldings: &[Matrix<T>],
    norm_a: T,
    mut factors: Vec<Matrix<T>>,
    cfg: &CpConfig,
    restart: usize,
) -> Result<(CpModel<T>, CpFitReport)> {
    let d = factors.len();
    let r = factors[0].cols();
    let mut weights = vec![T::one(); r];
    let mut regularized = false;
    let mut trajectory = Vec::new();
    let mut prev_res = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;
    for sweep in 0..cfg.max_iters {
        iterations = sweep + 1;
        for k in 0..d {
            let h = khatri_rao_skip(&factors, k);
            let mttkrp = unfoldings[k].matmul(&h);
            // Gram of the Khatri-Rao product: Hadamard of factor Grams
            let mut gram = Matrix::from_fn(r, r, |_, _| T::one());
            for (j, f) in factors.iter().enumerate() {
                if j == k {
                    continue;
                }
                let g = f.tr_matmul(f);
                for c in 0..r {
                    for ro in 0..r {
                        gram[(ro, c)] *= g[(ro, c)];
                    }
                }
            }
            let solved = solve_rows(&gram, &mttkrp);
            let new_factor = match solved {
                Ok(f) => f,
                Err(_) => {
                    regularized = true;
                    let mut reg = gram.clone();
                    let est = gram_norm_estimate(&gram);
                    let mu = est * fl::<T>(1e-12) + fl::<T>(1e-300);
                    for i in 0..r {
                        reg[(i, i)] += mu;
                    }
                    solve_rows(&reg, &mttkrp)?
                }
            };
            factors[k] = new_factor;
            // renormalize columns, absorbing norms into the weights
            for i in 0..r {
                let nrm = norm2(factors[k].col(i));
                if nrm > T::zero() {
                    let inv = T::one() / nrm;
                    for x in factors[k].col_mut(i) {
                        *x *= inv;
                    }
                    weights[i] = nrm;
                } else {
                    weights[i] = T::zero();
                    let col = factors[k].col_mut(i);
                    col[0] = T::one();
                }
            }
        }
        // residual computed entrywise: the Gram identity cancels
        // catastrophically near exact fits
        let rel = {
            let mut u1w = factors[0].clone();
            for i in 0..r {
                let w = weights[i];
                for x in u1w.col_mut(i) {
                    *x *= w;
                }
            }
            let h = khatri_rao_skip(&factors, 0);
            let x1 = u1w.matmul(&h.transpose());
            let mut res_sq = T::zero();
            for (got, want) in x1.data().iter().zip(unfoldings[0].data()) {
                let dlt = *got - *want;
                res_sq += dlt * dlt;
            }
            (res_sq.sqrt() / norm_a).to_f64_lossy()
        };
        trajectory.push(rel);
        if !rel.is_finite() {
            return Err(Error::numerical("ALS diverged to non-finite residual"));
        }
        if (prev_res - rel).abs() < cfg.tol {
            converged = true;
            break;
        }
        prev_res = rel;
    }
    let monotone = trajectory
        .windows(2)
        .all(|w| w[1] <= w[0] * (1.0 + 1e-12) + 1e-14);
    let model = CpModel::new(
        weights,
        factors,
    )?;
    let rel_residual = *trajectory.last().unwrap_or(&f64::NAN);
    Ok((
        model,
        CpFitReport {
            rel_residual,
            iterations,
            converged,
            regularized,
            trajectory,
            monotone,
            restart,
        },
    ))
}

/// Solve `G x_i = m_i` for every row `m_i` of `mttkrp`, giving the updated
/// factor with rows `x_i`.
fn solve_rows<T: Scalar>(gram: &Matrix<T>, mttkrp: &Matrix<T>) -> Result<Matrix<T>> {
    let r = gram.rows();
    let n = mttkrp.rows();
    let mut out = Matrix::zeros(n, r);
    let mut rhs = vec![T::zero(); r];
    for row in 0..n {
        for (j, v) in rhs.iter_mut().enumerate() {
            *v = mttkrp[(row, j)];
        }
        let x = solve_spd(gram, &rhs)?;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::numerical("non-finite least-squares solution"));
        }
        for (j, &v) in x.iter().enumerate() {
            out[(row, j)] = v;
        }
    }
    Ok(out)
}

/// Infinity-norm bound on the Gram matrix, an upper estimate of its largest
/// eigenvalue.
fn gram_norm_estimate<T: Scalar>(g: &Matrix<T>) -> T {
    let r = g.rows();
    let mut best = T::zero();
    for i in 0..r {
        let mut s = T::zero();
        for j in 0..r {
            s += g[(i, j)].abs();
        }
        best = best.max(s);
    }
    best
}

/// Smallest rank `<= r_max` whose ALS fit meets `target_rel_err`; the best
/// model found with a `met` flag otherwise.
pub fn cpd_fit_incremental<T: Scalar>(
    a: &DenseTensor<T>,
    target_rel_err: f64,
    r_max: usize,
    cfg: &CpConfig,
) -> Result<(CpModel<T>, CpFitReport, bool)> {
    if !(0.0..1.0).contains(&target_rel_err) {
        return Err(Error::invalid("target relative error must lie in (0, 1)"));
    }
    if r_max == 0 {
        return Err(Error::invalid("r_max must be at least 1"));
    }
    let mut best: Option<(CpModel<T>, CpFitReport)> = None;
    for r in 1..=r_max {
        let (model, report) = cpd_als(a, r, cfg)?;
        let met = report.rel_residual <= target_rel_err;
        let better = best
            .as_ref()
            .map_or(true, |(_, b)| report.rel_residual < b.rel_residual);
        if better {
            best = Some((model, report));
        }
        if met {
            let (m, rep) = best.unwrap();
            return Ok((m, rep, true));
        }
    }
    let (m, rep) = best.expect("at least one rank tried");
    Ok((m, rep, false))
}

/// Symmetric CP model: shared factor across all modes with signed weights.
#[derive(Clone, Debug)]
pub struct SymmetricCpModel<T> {
    order: usize,
    lambdas: Vec<T>,
    factor: Matrix<T>,
}

impl<T: Scalar> SymmetricCpModel<T> {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn rank(&self) -> usize {
        self.lambdas.len()
    }

    pub fn lambdas(&self) -> &[T] {
        &self.lambdas
    }

    pub fn factor(&self) -> &Matrix<T> {
        &self.factor
    }

    pub fn densify(&self) -> DenseTensor<T> {
        let n = self.factor.rows();
        let shape = Shape::new(vec![n; self.order]).expect("cubical shape");
        let mut out = DenseTensor::zeros(shape);
        for i in 0..self.rank() {
            let v = self.factor.col(i).to_vec();
            let term = Rank1Tensor::weighted(self.lambdas[i], vec![v; self.order])
                .expect("valid rank-1");
            out.add_scaled(&term.densify(), T::one()).expect("same shape");
        }
        out
    }
}

/// Largest absolute entry difference between `a` and any permutation of its
/// indices; zero for exactly symmetric tensors.
pub fn symmetry_defect<T: Scalar>(a: &DenseTensor<T>) -> Result<T> {
    let dims = a.shape().dims();
    if dims.iter().any(|&n| n != dims[0]) {
        return Err(Error::invalid("symmetry check requires a cubical tensor"));
    }
    let d = a.order();
    let perms = permutations(d);
    let mut worst = T::zero();
    for idx in a.shape().multi_indices() {
        let base = a.get(&idx)?;
        for perm in &perms {
            let permuted: Vec<usize> = perm.iter().map(|&p| idx.indices()[p]).collect();
            let v = a.get(&MultiIndex::new(permuted))?;
            worst = worst.max((v - base).abs());
        }
    }
    Ok(worst)
}

fn permutations(d: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut items: Vec<usize> = (0..d).collect();
    heap_permute(&mut items, d, &mut out);
    out
}

fn heap_permute(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == 1 {
        out.push(items.clone());
        return;
    }
    for i in 0..k {
        heap_permute(items, k - 1, out);
        if k % 2 == 0 {
            items.swap(i, k - 1);
        } else {
            items.swap(0, k - 1);
        }
    }
}

/// Symmetric CP decomposition `A = sum_i lambda_i v_i^{od}` by power
/// iteration with deflation followed by shared-factor alternating polish.
///
/// Rejects inputs whose [`symmetry_defect`] exceeds 1e-10.
pub fn cpd_symmetric<T: Scalar>(
    a: &DenseTensor<T>,
    rank: usize,
    cfg: &CpConfig,
) -> Result<(SymmetricCpModel<T>, CpFitReport)> {
    if rank == 0 {
        return Err(Error::invalid("rank must be at least 1"));
    }
    let defect = symmetry_defect(a)?;
    if defect > fl::<T>(1e-10) {
        return Err(Error::invalid(format!(
            "input is not symmetric: max permuted-entry difference {defect}"
        )));
    }
    let d = a.order();
    let n = a.shape().dims()[0];
    let norm_a = a.frobenius_norm();
    if norm_a == T::zero() {
        let model = SymmetricCpModel {
            order: d,
            lambdas: vec![T::zero(); rank],
            factor: Matrix::from_fn(n, rank, |i, j| if i == j % n { T::one() } else { T::zero() }),
        };
        return Ok((
            model,
            CpFitReport {
                rel_residual: 0.0,
                iterations: 0,
                converged: true,
                regularized: false,
                trajectory: vec![0.0],
                monotone: true,
                restart: 0,
            },
        ));
    }

    // deflation: peel off dominant symmetric rank-1 terms
    let mut residual = a.clone();
    let mut lambdas = Vec::with_capacity(rank);
    let mut factor = Matrix::zeros(n, rank);
    for term in 0..rank {
        let (lambda, v) = dominant_symmetric_term(&residual, cfg, term as u64)?;
        lambdas.push(lambda);
        factor.col_mut(term).copy_from_slice(&v);
        let r1 = Rank1Tensor::weighted(lambda, vec![v; d])?;
        residual.add_scaled(&r1.densify(), -T::one())?;
    }

    // polish: alternate one unconstrained mode solve with re-symmetrization
    let mut trajectory = Vec::new();
    let mut prev = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    let mut regularized = false;
    for sweep in 0..cfg.max_iters {
        iterations = sweep + 1;
        let factors: Vec<Matrix<T>> = vec![factor.clone(); d];
        let h = khatri_rao_skip(&factors, 0);
        let m1 = matricize(a, 1)?;
        let mttkrp = m1.matmul(&h);
        let mut gram = Matrix::from_fn(rank, rank, |_, _| T::one());
        let g = factor.tr_matmul(&factor);
        for _ in 0..(d - 1) {
            for c in 0..rank {
                for ro in 0..rank {
                    gram[(ro, c)] *= g[(ro, c)];
                }
            }
        }
        let w = match solve_rows(&gram, &mttkrp) {
            Ok(w) => w,
            Err(_) => {
                regularized = true;
                let mut reg = gram.clone();
                let mu = gram_norm_estimate(&gram) * fl::<T>(1e-12) + fl::<T>(1e-300);
                for i in 0..rank {
                    reg[(i, i)] += mu;
                }
                solve_rows(&reg, &mttkrp)?
            }
        };
        // align the unconstrained solution with the shared factor, keeping
        // the sign on lambda
        for i in 0..rank {
            let wi = w.col(i);
            let proj = dot(wi, factor.col(i));
            let nrm = norm2(wi);
            if nrm == T::zero() {
                lambdas[i] = T::zero();
                continue;
            }
            let sign = if proj >= T::zero() { T::one() } else { -T::one() };
            lambdas[i] = sign * nrm;
            let inv = sign / nrm;
            let dst = factor.col_mut(i);
            for (x, &wv) in dst.iter_mut().zip(wi) {
                *x = wv * inv;
            }
        }
        let model = SymmetricCpModel {
            order: d,
            lambdas: lambdas.clone(),
            factor: factor.clone(),
        };
        let diff = {
            let dense = model.densify();
            let mut s = T::zero();
            for (&x, &y) in dense.data().iter().zip(a.data()) {
                s += (x - y) * (x - y);
            }
            (s.sqrt() / norm_a).to_f64_lossy()
        };
        trajectory.push(diff);
        if (prev - diff).abs() < cfg.tol {
            converged = true;
            break;
        }
        prev = diff;
    }
    let monotone = trajectory
        .windows(2)
        .all(|w| w[1] <= w[0] * (1.0 + 1e-12) + 1e-14);
    let rel_residual = *trajectory.last().unwrap_or(&f64::NAN);
    // canonical order: descending |lambda|
    let mut order: Vec<usize> = (0..rank).collect();
    order.sort_by(|&i, &j| {
        lambdas[j]
            .abs()
            .partial_cmp(&lambdas[i].abs())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let sorted_lambdas: Vec<T> = order.iter().map(|&i| lambdas[i]).collect();
    let mut sorted_factor = Matrix::zeros(n, rank);
    for (k, &i) in order.iter().enumerate() {
        sorted_factor.col_mut(k).copy_from_slice(factor.col(i));
    }
    Ok((
        SymmetricCpModel {
            order: d,
            lambdas: sorted_lambdas,
            factor: sorted_factor,
        },
        CpFitReport {
            rel_residual,
            iterations,
            converged,
            regularized,
            trajectory,
            monotone,
            restart: 0,
        },
    ))
}

/// One symmetric rank-1 term by higher-order power iteration.
fn dominant_symmetric_term<T: Scalar>(
    a: &DenseTensor<T>,
    cfg: &CpConfig,
    stream: u64,
) -> Result<(T, Vec<T>)> {
    let d = a.order();
    let n = a.shape().dims()[0];
    // init from the leading left singular vector of the mode-1 unfolding
    let m1 = matricize(a, 1)?;
    let svd = svd_thin(&m1);
    let mut v: Vec<T> = svd.u.col(0).to_vec();
    if norm2(&v) == T::zero() {
        let mut rng = rng::child(cfg.seed, 1000 + stream);
        v = rng::normal_vec(&mut rng, n);
        let nrm = norm2(&v);
        for x in &mut v {
            *x /= nrm;
        }
    }
    let mut lambda = T::zero();
    for _ in 0..cfg.max_iters.max(50) {
        // w_i = <A, e_i o v o ... o v>
        let mut cur = a.clone();
        for _ in 0..(d - 1) {
            cur = contract_mode_vec(&cur, cur.order(), &v)?;
        }
        let w = cur.data().to_vec();
        let nrm = norm2(&w);
        if nrm == T::zero() {
            return Ok((T::zero(), v));
        }
        let mut v_new: Vec<T> = w.iter().map(|&x| x / nrm).collect();
        // deterministic orientation
        let mut besti = 0;
        for i in 1..n {
            if v_new[i].abs() > v_new[besti].abs() {
                besti = i;
            }
        }
        if v_new[besti] < T::zero() {
            for x in &mut v_new {
                *x = -*x;
            }
        }
        let delta: T = v_new
            .iter()
            .zip(&v)
            .map(|(&a, &b)| (a - b) * (a - b))
            .sum::<T>()
            .sqrt();
        v = v_new;
        // lambda = <A, v^{od}>
        let mut cur = a.clone();
        for _ in 0..d {
            cur = contract_mode_vec(&cur, cur.order(), &v)?;
        }
        lambda = cur.data()[0];
        if delta < fl::<T>(1e-14) {
            break;
        }
    }
    Ok((lambda, v))
}
