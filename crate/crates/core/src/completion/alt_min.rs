//! Alternating minimization over CP factors restricted to observed entries,
//! with an optional l1 penalty on rank-1 linear functionals handled by an
//! inner splitting loop (auxiliary variables plus soft-thresholding).

use crate::completion::SampleSet;
use crate::decomp::CpModel;
use crate::error::{Error, Result};
use crate::linalg::{dot, norm2, solve_spd, Matrix};
use crate::rng;
use crate::scalar::{fl, Scalar};
use crate::tensor::Rank1Tensor;

/// Shared configuration for the completion solvers.
#[derive(Clone, Debug)]
pub struct CompletionConfig {
    /// Outer sweep cap.
    pub max_outer: usize,
    /// Stop when the relative objective change between sweeps drops below
    /// this.
    pub tol: f64,
    pub seed: u64,
    pub restarts: usize,
    /// Inner splitting iterations per factor update (l1 path only).
    pub inner_max: usize,
    pub inner_tol: f64,
    /// Splitting penalty weight; balanced against the data term when absent.
    pub rho: Option<f64>,
}

impl Default for CompletionConfig {
    fn default() -> Self {
        CompletionConfig {
            max_outer: 500,
            tol: 1e-8,
            seed: 0,
            restarts: 1,
            inner_max: 300,
            inner_tol: 1e-12,
            rho: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CompletionReport {
    /// Objective after each outer sweep (observed residual term plus the l1
    /// term when active).
    pub objective: Vec<f64>,
    /// Relative factor change per sweep.
    pub factor_change: Vec<f64>,
    /// Final `||P_Omega(X - A)||_F`.
    pub observed_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Fewer samples than the identifiability heuristic `r * sum(n_k)`.
    pub underdetermined: bool,
    /// Objective never increased across sweeps (up to roundoff slack).
    pub monotone: bool,
    /// Mode updates rejected by the monotonicity safeguard.
    pub stalled_blocks: usize,
    pub restart: usize,
}

/// The low-rank-plus-sparse recovery problem: observed samples, rank-1
/// transform tensors whose coefficients should be sparse, the l1 weight,
/// and the CP rank of the recovered tensor.
#[derive(Clone, Debug)]
pub struct LrSparseProblem<T> {
    samples: SampleSet<T>,
    transforms: Vec<Rank1Tensor<T>>,
    lambda: f64,
    rank: usize,
}

impl<T: Scalar> LrSparseProblem<T> {
    pub fn new(
        samples: SampleSet<T>,
        transforms: Vec<Rank1Tensor<T>>,
        lambda: f64,
        rank: usize,
    ) -> Result<Self> {
        if lambda < 0.0 {
            return Err(Error::invalid("lambda must be non-negative"));
        }
        if rank == 0 {
            return Err(Error::invalid("rank must be at least 1"));
        }
        for (j, w) in transforms.iter().enumerate() {
            if w.shape() != *samples.shape() {
                return Err(Error::shape(format!(
                    "transform {j} has shape {:?}, samples have {:?}",
                    w.shape().dims(),
                    samples.shape().dims()
                )));
            }
        }
        Ok(LrSparseProblem {
            samples,
            transforms,
            lambda,
            rank,
        })
    }

    pub fn samples(&self) -> &SampleSet<T> {
        &self.samples
    }

    pub fn transforms(&self) -> &[Rank1Tensor<T>] {
        &self.transforms
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn rank(&self) -> usize {
        self.rank
    }
}

#[derive(Clone, Debug)]
pub struct LrSparseReport {
    pub base: CompletionReport,
    /// Threshold used for the sparsity count: `1e-6 * max(|z|, data scale)`.
    pub z_tol: f64,
    /// Number of coefficients above `z_tol`.
    pub sparsity: usize,
}

/// Fixed-rank completion: minimize the observed residual over CP factors.
pub fn complete_fixed_rank<T: Scalar>(
    samples: &SampleSet<T>,
    rank: usize,
    cfg: &CompletionConfig,
) -> Result<(CpModel<T>, CompletionReport)> {
    let (factors, report) = alternating_engine(samples, rank, &[], 0.0, cfg)?;
    let model = CpModel::new(vec![T::one(); rank], factors)?;
    Ok((model, report))
}

/// Low-rank-plus-sparse completion; returns the recovered model, the
/// transform coefficients `z_j = <X, W_j>` (factored, never densified), and
/// diagnostics.
pub fn complete_lr_sparse<T: Scalar>(
    problem: &LrSparseProblem<T>,
    cfg: &CompletionConfig,
) -> Result<(CpModel<T>, Vec<T>, LrSparseReport)> {
    let (factors, base) = alternating_engine(
        problem.samples(),
        problem.rank(),
        problem.transforms(),
        problem.lambda(),
        cfg,
    )?;
    let z: Vec<T> = problem
        .transforms()
        .iter()
        .map(|w| transforms_inner(&factors, w))
        .collect();
    let zmax = z.iter().fold(T::zero(), |m, &v| m.max(v.abs()));
    let data_scale = problem
        .samples()
        .values()
        .iter()
        .fold(T::zero(), |m, &v| m.max(v.abs()));
    let z_tol = 1e-6 * zmax.max(data_scale).to_f64_lossy();
    let sparsity = z
        .iter()
        .filter(|v| v.abs().to_f64_lossy() > z_tol)
        .count();
    let model = CpModel::new(vec![T::one(); problem.rank()], factors)?;
    Ok((
        model,
        z,
        LrSparseReport {
            base,
            z_tol,
            sparsity,
        },
    ))
}

/// Score a logarithmic grid of lambda values by held-out sample error.
/// Returns `(lambda, holdout rmse)` pairs in input order.
pub fn lambda_grid<T: Scalar>(
    samples: &SampleSet<T>,
    transforms: &[Rank1Tensor<T>],
    rank: usize,
    lambdas: &[f64],
    holdout_fraction: f64,
    cfg: &CompletionConfig,
) -> Result<Vec<(f64, f64)>> {
    if lambdas.is_empty() {
        return Err(Error::invalid("lambda grid must be non-empty"));
    }
    let (train, hold) = samples.split_holdout(holdout_fraction, cfg.seed ^ 0x9e3779b9)?;
    let mut out = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let problem = LrSparseProblem::new(train.clone(), transforms.to_vec(), lambda, rank)?;
        let (model, _, _) = complete_lr_sparse(&problem, cfg)?;
        let res = crate::completion::residual_omega(&model, &hold)?;
        let rmse = res.to_f64_lossy() / (hold.len() as f64).sqrt();
        out.push((lambda, rmse));
    }
    Ok(out)
}

/// Product of factor-row dots: `<X, w>` for unnormalized factors.
fn transforms_inner<T: Scalar>(factors: &[Matrix<T>], w: &Rank1Tensor<T>) -> T {
    let r = factors[0].cols();
    let mut acc = T::zero();
    for c in 0..r {
        let mut p = T::one();
        for (l, f) in factors.iter().enumerate() {
            p *= dot(f.col(c), w.vector(l + 1));
        }
        acc += p;
    }
    acc * w.weight()
}

struct ModeData {
    /// Per row of this mode: the sample positions that touch it.
    rows: Vec<Vec<usize>>,
}

fn alternating_engine<T: Scalar>(
    samples: &SampleSet<T>,
    rank: usize,
    transforms: &[Rank1Tensor<T>],
    lambda: f64,
    cfg: &CompletionConfig,
) -> Result<(Vec<Matrix<T>>, CompletionReport)> {
    let shape = samples.shape().clone();
    let d = shape.order();
    let dims = shape.dims().to_vec();
    // group samples by row for every mode
    let mode_data: Vec<ModeData> = (0..d)
        .map(|k| {
            let mut rows = vec![Vec::new(); dims[k]];
            for (s, idx) in samples.indices().iter().enumerate() {
                rows[idx.indices()[k] - 1].push(s);
            }
            ModeData { rows }
        })
        .collect();

    let mut best: Option<(Vec<Matrix<T>>, CompletionReport)> = None;
    for restart in 0..cfg.restarts.max(1) {
        let result = engine_run(
            samples,
            rank,
            transforms,
            lambda,
            cfg,
            &mode_data,
            restart,
        )?;
        let better = best.as_ref().map_or(true, |(_, b)| {
            result.1.objective.last().unwrap_or(&f64::INFINITY)
                < b.objective.last().unwrap_or(&f64::INFINITY)
        });
        if better {
            best = Some(result);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn engine_run<T: Scalar>(
    samples: &SampleSet<T>,
    rank: usize,
    transforms: &[Rank1Tensor<T>],
    lambda: f64,
    cfg: &CompletionConfig,
    mode_data: &[ModeData],
    restart: usize,
) -> Result<(Vec<Matrix<T>>, CompletionReport)> {
    let shape = samples.shape();
    let d = shape.order();
    let dims = shape.dims();
    let underdetermined = samples.len() < rank * dims.iter().sum::<usize>();

    // init: seeded Gaussian factors scaled so model entries match the sample
    // scale
    let mut rng = rng::child(cfg.seed, restart as u64);
    let rms = {
        let n = samples.len() as f64;
        let s: f64 = samples
            .values()
            .iter()
            .map(|v| v.to_f64_lossy().powi(2))
            .sum();
        (s / n).sqrt().max(1e-12)
    };
    let entry_std = (rms * rms / rank as f64).powf(1.0 / (2.0 * d as f64));
    let mut factors: Vec<Matrix<T>> = dims
        .iter()
        .map(|&n| Matrix::from_fn(n, rank, |_, _| rng::normal::<T>(&mut rng) * fl(entry_std)))
        .collect();

    let lam = fl::<T>(lambda);
    let active_l1 = lambda > 0.0 && !transforms.is_empty();
    let mut objective_traj = Vec::new();
    let mut factor_change = Vec::new();
    let mut stalled = 0usize;
    let mut converged = false;
    let mut iterations = 0;
    let mut prev_obj = objective(samples, &factors, transforms, lam)?;
    for sweep in 0..cfg.max_outer {
        iterations = sweep + 1;
        let before: Vec<Matrix<T>> = factors.clone();
        for k in 0..d {
            let old_factor = factors[k].clone();
            let old_obj = objective(samples, &factors, transforms, lam)?;
            if active_l1 {
                update_mode_l1(samples, &mut factors, k, transforms, lam, cfg, &mode_data[k])?;
            } else {
                update_mode_ls(samples, &mut factors, k, &mode_data[k])?;
            }
            let new_obj = objective(samples, &factors, transforms, lam)?;
            if !new_obj.is_finite() {
                return Err(Error::numerical(format!(
                    "completion diverged at sweep {sweep}, mode {}",
                    k + 1
                )));
            }
            // block updates must not increase the objective; an inexact
            // inner solve that would is rejected
            if new_obj > old_obj * (T::one() + fl(1e-13)) + fl(1e-300) {
                factors[k] = old_factor;
                stalled += 1;
            }
        }
        let obj = objective(samples, &factors, transforms, lam)?;
        objective_traj.push(obj.to_f64_lossy());
        let mut num = T::zero();
        let mut den = T::zero();
        for (f, b) in factors.iter().zip(&before) {
            for (x, y) in f.data().iter().zip(b.data()) {
                num += (*x - *y) * (*x - *y);
                den += *y * *y;
            }
        }
        factor_change.push((num.sqrt() / den.sqrt().max(T::epsilon())).to_f64_lossy());
        let rel_change = (prev_obj - obj).abs().to_f64_lossy() / prev_obj.to_f64_lossy().max(1e-300);
        prev_obj = obj;
        if rel_change < cfg.tol {
            converged = true;
            break;
        }
    }
    let monotone = objective_traj
        .windows(2)
        .all(|w| w[1] <= w[0] * (1.0 + 1e-12) + 1e-14);
    let observed_residual =
        data_residual(samples, &factors)?.to_f64_lossy();
    Ok((
        factors,
        CompletionReport {
            objective: objective_traj,
            factor_change,
            observed_residual,
            iterations,
            converged,
            underdetermined,
            monotone,
            stalled_blocks: stalled,
            restart,
        },
    ))
}

fn model_entry<T: Scalar>(factors: &[Matrix<T>], idx: &[usize]) -> T {
    let r = factors[0].cols();
    let mut acc = T::zero();
    for c in 0..r {
        let mut p = T::one();
        for (k, f) in factors.iter().enumerate() {
            p *= f[(idx[k] - 1, c)];
        }
        acc += p;
    }
    acc
}

fn data_residual<T: Scalar>(samples: &SampleSet<T>, factors: &[Matrix<T>]) -> Result<T> {
    let mut s = T::zero();
    for (idx, val) in samples.iter() {
        let e = model_entry(factors, idx.indices()) - val;
        s += e * e;
    }
    Ok(s.sqrt())
}

/// `0.5 ||P_Omega(X - A)||^2 + lambda sum_j |<X, W_j>|`.
fn objective<T: Scalar>(
    samples: &SampleSet<T>,
    factors: &[Matrix<T>],
    transforms: &[Rank1Tensor<T>],
    lambda: T,
) -> Result<T> {
    let res = data_residual(samples, factors)?;
    let mut obj = fl::<T>(0.5) * res * res;
    if lambda > T::zero() {
        for w in transforms {
            obj += lambda * transforms_inner(factors, w).abs();
        }
    }
    Ok(obj)
}

/// Per-sample coefficient vector for mode `k`: the Hadamard product of the
/// other factors' rows at the sample index.
fn sample_coeff<T: Scalar>(factors: &[Matrix<T>], k: usize, idx: &[usize]) -> Vec<T> {
    let r = factors[0].cols();
    let mut g = vec![T::one(); r];
    for (l, f) in factors.iter().enumerate() {
        if l == k {
            continue;
        }
        let row = idx[l] - 1;
        for (c, gc) in g.iter_mut().enumerate() {
            *gc *= f[(row, c)];
        }
    }
    g
}

/// Plain least-squares update of mode `k`: each row solved independently
/// from the samples that touch it.
fn update_mode_ls<T: Scalar>(
    samples: &SampleSet<T>,
    factors: &mut [Matrix<T>],
    k: usize,
    mode_data: &ModeData,
) -> Result<()> {
    let r = factors[0].cols();
    let idxs = samples.indices();
    let vals = samples.values();
    for (row, touching) in mode_data.rows.iter().enumerate() {
        if touching.is_empty() {
            continue;
        }
        let mut gram = Matrix::<T>::zeros(r, r);
        let mut rhs = vec![T::zero(); r];
        for &s in touching {
            let g = sample_coeff(factors, k, idxs[s].indices());
            for c in 0..r {
                for ro in 0..r {
                    gram[(ro, c)] += g[ro] * g[c];
                }
                rhs[c] += vals[s] * g[c];
            }
        }
        let sol = match solve_spd(&gram, &rhs) {
            Ok(x) => x,
            Err(_) => {
                let mut reg = gram.clone();
                let mut trace = T::zero();
                for i in 0..r {
                    trace += gram[(i, i)];
                }
                let mu = trace * fl::<T>(1e-10) + fl::<T>(1e-30);
                for i in 0..r {
                    reg[(i, i)] += mu;
                }
                solve_spd(&reg, &rhs)?
            }
        };
        for (c, &x) in sol.iter().enumerate() {
            factors[k][(row, c)] = x;
        }
    }
    Ok(())
}

/// l1-regularized update of mode `k`: the convex subproblem
/// `0.5||Su - a||^2 + lambda ||Tu||_1` in the stacked factor entries is
/// solved by an alternating-direction loop with soft-thresholding on the
/// auxiliary coefficients.
fn update_mode_l1<T: Scalar>(
    samples: &SampleSet<T>,
    factors: &mut [Matrix<T>],
    k: usize,
    transforms: &[Rank1Tensor<T>],
    lambda: T,
    cfg: &CompletionConfig,
    mode_data: &ModeData,
) -> Result<()> {
    let r = factors[0].cols();
    let n = factors[k].rows();
    let nr = n * r;
    let m = transforms.len();
    let idxs = samples.indices();
    let vals = samples.values();

    // data normal equations (block diagonal by row)
    let mut sts = Matrix::<T>::zeros(nr, nr);
    let mut sta = vec![T::zero(); nr];
    for (row, touching) in mode_data.rows.iter().enumerate() {
        for &s in touching {
            let g = sample_coeff(factors, k, idxs[s].indices());
            for c in 0..r {
                let uc = row + c * n;
                for ro in 0..r {
                    sts[(row + ro * n, uc)] += g[ro] * g[c];
                }
                sta[uc] += vals[s] * g[c];
            }
        }
    }
    // transform design: row j over (i, c) entries is w_j^k[i] * pi_{j,c}
    let mut tmat = Matrix::<T>::zeros(m, nr);
    for (j, w) in transforms.iter().enumerate() {
        let mut pi = vec![w.weight(); r];
        for (l, f) in factors.iter().enumerate() {
            if l == k {
                continue;
            }
            for (c, p) in pi.iter_mut().enumerate() {
                *p *= dot(f.col(c), w.vector(l + 1));
            }
        }
        let wk = w.vector(k + 1);
        for c in 0..r {
            for i in 0..n {
                tmat[(j, i + c * n)] = wk[i] * pi[c];
            }
        }
    }
    let ttt = tmat.tr_matmul(&tmat);
    // penalty weight balancing the two quadratic terms
    let rho = match cfg.rho {
        Some(x) => fl::<T>(x),
        None => {
            let mut tr_s = T::zero();
            let mut tr_t = T::zero();
            for i in 0..nr {
                tr_s += sts[(i, i)];
                tr_t += ttt[(i, i)];
            }
            if tr_t > T::zero() {
                (tr_s / tr_t).max(fl(1e-8))
            } else {
                T::one()
            }
        }
    };
    let mut normal = Matrix::<T>::zeros(nr, nr);
    for c in 0..nr {
        for ro in 0..nr {
            normal[(ro, c)] = sts[(ro, c)] + rho * ttt[(ro, c)];
        }
    }
    let mut trace = T::zero();
    for i in 0..nr {
        trace += normal[(i, i)];
    }
    let mu = trace * fl::<T>(1e-13) / fl(nr as f64) + fl::<T>(1e-30);
    for i in 0..nr {
        normal[(i, i)] += mu;
    }

    // warm start from the current factor
    let mut u = vec![T::zero(); nr];
    for c in 0..r {
        for i in 0..n {
            u[i + c * n] = factors[k][(i, c)];
        }
    }
    let thresh = lambda / rho;
    let mut t = tmat.matvec(&u);
    let mut z: Vec<T> = t.iter().map(|&v| soft(v, thresh)).collect();
    let mut y = vec![T::zero(); m];
    let scale = norm2(&sta).max(T::one());
    for _ in 0..cfg.inner_max {
        // u-step
        let mut rhs = sta.clone();
        let adj: Vec<T> = z.iter().zip(&y).map(|(&zj, &yj)| zj - yj).collect();
        let tadj = tmat.tr_matvec(&adj);
        for (ri, &ti) in rhs.iter_mut().zip(&tadj) {
            *ri += rho * ti;
        }
        u = solve_spd(&normal, &rhs)?;
        t = tmat.matvec(&u);
        // z-step
        let z_prev = z.clone();
        for (zj, (&tj, &yj)) in z.iter_mut().zip(t.iter().zip(&y)) {
            *zj = soft(tj + yj, thresh);
        }
        // dual update
        let mut primal = T::zero();
        let mut dual = T::zero();
        for j in 0..m {
            let rj = t[j] - z[j];
            y[j] += rj;
            primal += rj * rj;
            let dj = z[j] - z_prev[j];
            dual += dj * dj;
        }
        if primal.sqrt() <= fl::<T>(cfg.inner_tol) * scale
            && rho * dual.sqrt() <= fl::<T>(cfg.inner_tol) * scale
        {
            break;
        }
    }
    for c in 0..r {
        for i in 0..n {
            factors[k][(i, c)] = u[i + c * n];
        }
    }
    Ok(())
}

fn soft<T: Scalar>(x: T, thresh: T) -> T {
    if x > thresh {
        x - thresh
    } else if x < -thresh {
        x + thresh
    } else {
        T::zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::completion::project_omega;
    use crate::tensor::{DenseTensor, MultiIndex, Shape};

    fn planted_cp(dims: &[usize], rank: usize, seed: u64) -> DenseTensor<f64> {
        let mut rng = rng::seeded(seed);
        let factors: Vec<Matrix<f64>> = dims
            .iter()
            .map(|&n| Matrix::from_fn(n, rank, |_, _| rng::normal(&mut rng)))
            .collect();
        CpModel::new(vec![1.0; rank], factors).unwrap().densify()
    }

    fn sampled(
        a: &DenseTensor<f64>,
        fraction: f64,
        seed: u64,
    ) -> crate::completion::SampleSet<f64> {
        let all: Vec<MultiIndex> = a.shape().multi_indices().collect();
        let count = ((all.len() as f64) * fraction) as usize;
        let mut rng = rng::seeded(seed);
        let picks = rng::sample_distinct(&mut rng, all.len(), count);
        let omega: Vec<MultiIndex> = picks.into_iter().map(|i| all[i].clone()).collect();
        project_omega(a, &omega).unwrap()
    }

    #[test]
    fn fully_observed_rank2_recovers() {
        let a = planted_cp(&[5, 4, 3], 2, 1);
        let all: Vec<MultiIndex> = a.shape().multi_indices().collect();
        let samples = project_omega(&a, &all).unwrap();
        let (model, report) = complete_fixed_rank(&samples, 2, &CompletionConfig::default()).unwrap();
        assert!(report.observed_residual < 1e-8, "{}", report.observed_residual);
        assert!(model.densify().relative_distance(&a).unwrap() < 1e-8);
        assert!(report.monotone);
    }

    #[test]
    fn rank1_positive_tensor_fills_missing_entry() {
        // 2x2x2 rank-1 with positive entries: 7 of 8 observed pins the last
        let u = [1.0f64, 2.0];
        let v = [3.0, 0.5];
        let w = [1.5, 1.0];
        let shape = Shape::new(vec![2, 2, 2]).unwrap();
        let a = DenseTensor::from_fn(shape, |idx| {
            let i = idx.indices();
            u[i[0] - 1] * v[i[1] - 1] * w[i[2] - 1]
        });
        let omega: Vec<MultiIndex> = a
            .shape()
            .multi_indices()
            .filter(|idx| idx.indices() != [2, 2, 2])
            .collect();
        assert_eq!(omega.len(), 7);
        let samples = project_omega(&a, &omega).unwrap();
        let cfg = CompletionConfig {
            restarts: 4,
            ..CompletionConfig::default()
        };
        let (model, _) = complete_fixed_rank(&samples, 1, &cfg).unwrap();
        let want = a.get(&vec![2, 2, 2].into()).unwrap();
        let got = model.entry(&vec![2, 2, 2].into()).unwrap();
        assert!(
            (got - want).abs() / want.abs() < 1e-6,
            "missing entry {got}, expected {want}"
        );
    }

    #[test]
    fn twenty_percent_samples_recover_rank3() {
        let a = planted_cp(&[20, 20, 20], 3, 7);
        let samples = sampled(&a, 0.2, 99);
        let cfg = CompletionConfig {
            restarts: 3,
            ..CompletionConfig::default()
        };
        let (model, report) = complete_fixed_rank(&samples, 3, &cfg).unwrap();
        let err = model.densify().relative_distance(&a).unwrap();
        assert!(err < 1e-4, "recovery error {err}");
        assert!(report.monotone);
        assert!(!report.underdetermined);
    }

    #[test]
    fn sample_order_does_not_change_solution() {
        let a = planted_cp(&[6, 6, 6], 2, 3);
        let samples = sampled(&a, 0.5, 11);
        let mut entries: Vec<(MultiIndex, f64)> =
            samples.iter().map(|(i, v)| (i.clone(), v)).collect();
        entries.reverse();
        let reversed =
            crate::completion::SampleSet::new(a.shape().clone(), entries).unwrap();
        let cfg = CompletionConfig::default();
        let (m1, _) = complete_fixed_rank(&samples, 2, &cfg).unwrap();
        let (m2, _) = complete_fixed_rank(&reversed, 2, &cfg).unwrap();
        assert!(m1.densify().relative_distance(&m2.densify()).unwrap() < 1e-8);
    }

    #[test]
    fn lr_sparse_with_zero_lambda_matches_fixed_rank() {
        let a = planted_cp(&[6, 5, 4], 2, 13);
        let samples = sampled(&a, 0.6, 17);
        let transforms: Vec<Rank1Tensor<f64>> = (0..4)
            .map(|j| {
                let mut rng = rng::seeded(100 + j);
                Rank1Tensor::new(vec![
                    rng::normal_vec(&mut rng, 6),
                    rng::normal_vec(&mut rng, 5),
                    rng::normal_vec(&mut rng, 4),
                ])
                .unwrap()
            })
            .collect();
        let cfg = CompletionConfig::default();
        let (m1, r1) = complete_fixed_rank(&samples, 2, &cfg).unwrap();
        let problem = LrSparseProblem::new(samples, transforms, 0.0, 2).unwrap();
        let (m2, _, r2) = complete_lr_sparse(&problem, &cfg).unwrap();
        assert_eq!(r1.objective, r2.base.objective);
        assert!(m1.densify().relative_distance(&m2.densify()).unwrap() < 1e-12);
    }

    #[test]
    fn full_observation_orthonormal_transforms_soft_threshold() {
        // 2x2 tensor, all entries observed, transforms = unit basis rank-1
        // tensors: the optimum is entrywise soft-thresholding
        let shape = Shape::new(vec![2, 2]).unwrap();
        let a = DenseTensor::from_data(shape.clone(), vec![3.0, -0.4, 0.7, -2.0]).unwrap();
        let all: Vec<MultiIndex> = a.shape().multi_indices().collect();
        let samples = project_omega(&a, &all).unwrap();
        let mut transforms = Vec::new();
        for j in 0..2 {
            for i in 0..2 {
                let mut e1 = vec![0.0; 2];
                e1[i] = 1.0;
                let mut e2 = vec![0.0; 2];
                e2[j] = 1.0;
                transforms.push(Rank1Tensor::new(vec![e1, e2]).unwrap());
            }
        }
        let lambda = 0.5;
        let cfg = CompletionConfig {
            max_outer: 2000,
            tol: 1e-14,
            inner_max: 2000,
            inner_tol: 1e-14,
            ..CompletionConfig::default()
        };
        let problem = LrSparseProblem::new(samples, transforms.clone(), lambda, 2).unwrap();
        let (_, z, report) = complete_lr_sparse(&problem, &cfg).unwrap();
        for (w, zj) in transforms.iter().zip(&z) {
            let aj = crate::tensor::inner_product(&a, &w.densify()).unwrap();
            let want = soft(aj, lambda);
            assert!(
                (zj - want).abs() < 1e-6,
                "coefficient {zj}, expected {want} (a = {aj})"
            );
        }
        assert!(report.base.monotone);
    }

    #[test]
    fn huge_lambda_kills_all_coefficients() {
        let a = planted_cp(&[4, 4, 4], 2, 21);
        let samples = sampled(&a, 0.8, 23);
        let scale = samples.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let transforms: Vec<Rank1Tensor<f64>> = (0..6)
            .map(|j| {
                let mut rng = rng::seeded(300 + j);
                Rank1Tensor::new(vec![
                    rng::normal_vec(&mut rng, 4),
                    rng::normal_vec(&mut rng, 4),
                    rng::normal_vec(&mut rng, 4),
                ])
                .unwrap()
            })
            .collect();
        let problem =
            LrSparseProblem::new(samples, transforms, 1e6 * scale, 2).unwrap();
        let (_, _, report) = complete_lr_sparse(&problem, &CompletionConfig::default()).unwrap();
        assert_eq!(report.sparsity, 0, "all coefficients should shrink away");
    }

    #[test]
    fn factored_coefficients_match_dense_inner_products() {
        let a = planted_cp(&[5, 4, 3], 2, 31);
        let samples = sampled(&a, 0.9, 37);
        let mut rng = rng::seeded(400);
        let transforms: Vec<Rank1Tensor<f64>> = (0..5)
            .map(|_| {
                Rank1Tensor::new(vec![
                    rng::normal_vec(&mut rng, 5),
                    rng::normal_vec(&mut rng, 4),
                    rng::normal_vec(&mut rng, 3),
                ])
                .unwrap()
            })
            .collect();
        let problem = LrSparseProblem::new(samples, transforms.clone(), 1e-3, 3).unwrap();
        let (model, z, _) = complete_lr_sparse(&problem, &CompletionConfig::default()).unwrap();
        let dense = model.densify();
        for (w, &zj) in transforms.iter().zip(&z) {
            let direct = crate::tensor::inner_product(&dense, &w.densify()).unwrap();
            assert!((zj - direct).abs() < 1e-10 * direct.abs().max(1.0));
        }
    }

    #[test]
    fn negative_lambda_rejected() {
        let a = planted_cp(&[3, 3, 3], 1, 41);
        let samples = sampled(&a, 0.5, 43);
        assert!(LrSparseProblem::new(samples, vec![], -1.0, 1).is_err());
    }

    #[test]
    fn objective_monotone_on_every_solver_run() {
        let a = planted_cp(&[8, 8, 8], 2, 51);
        let samples = sampled(&a, 0.4, 53);
        let (_, report) = complete_fixed_rank(&samples, 2, &CompletionConfig::default()).unwrap();
        assert!(report.monotone);
        for w in report.objective.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-12) + 1e-14);
        }
    }
}
