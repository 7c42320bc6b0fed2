use tenkit::completion::*;
use tenkit::linalg::Matrix;
use tenkit::rng;
use tenkit::tensor::{DenseTensor, MultiIndex, Rank1Tensor, Shape};

fn planted_cp(dims: &[usize], rank: usize, seed: u64) -> DenseTensor<f64> {
    let mut r = rng::seeded(seed);
    let factors: Vec<Matrix<f64>> = dims
        .iter()
        .map(|&n| Matrix::from_fn(n, rank, |_, _| rng::normal(&mut r)))
        .collect();
    tenkit::decomp::CpModel::new(vec![1.0; rank], factors)
        .unwrap()
        .densify()
}

fn sampled(a: &DenseTensor<f64>, fraction: f64, seed: u64) -> SampleSet<f64> {
    let all: Vec<MultiIndex> = a.shape().multi_indices().collect();
    let count = ((all.len() as f64) * fraction) as usize;
    let mut r = rng::seeded(seed);
    let picks = rng::sample_distinct(&mut r, all.len(), count);
    let omega: Vec<MultiIndex> = picks.into_iter().map(|i| all[i].clone()).collect();
    project_omega(a, &omega).unwrap()
}

#[test]
#[ignore]
fn debug_huge_lambda() {
    let a = planted_cp(&[4, 4, 4], 2, 21);
    let samples = sampled(&a, 0.8, 23);
    let scale = samples.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let transforms: Vec<Rank1Tensor<f64>> = (0..6)
        .map(|j| {
            let mut r = rng::seeded(300 + j);
            Rank1Tensor::new(vec![
                rng::normal_vec(&mut r, 4),
                rng::normal_vec(&mut r, 4),
                rng::normal_vec(&mut r, 4),
            ])
            .unwrap()
        })
        .collect();
    let problem = LrSparseProblem::new(samples, transforms, 1e6 * scale, 2).unwrap();
    let (_, z, report) = complete_lr_sparse(&problem, &CompletionConfig::default()).unwrap();
    println!("scale {scale}");
    println!("z = {z:?}");
    println!("z_tol = {}", report.z_tol);
    println!("sparsity = {}", report.sparsity);
    println!("objective trajectory = {:?}", &report.base.objective);
    println!("stalled = {}", report.base.stalled_blocks);
}

#[test]
#[ignore]
fn debug_nuclear() {
    let shape = Shape::new(vec![10, 10, 10]).unwrap();
    let mut r = rng::seeded(5);
    let core = DenseTensor::from_fn(Shape::new(vec![2, 2, 2]).unwrap(), |_| {
        rng::normal::<f64>(&mut r)
    });
    let mats: Vec<Matrix<f64>> = (0..3)
        .map(|_| Matrix::from_fn(10, 2, |_, _| rng::normal(&mut r)))
        .collect();
    let refs: Vec<&Matrix<f64>> = mats.iter().collect();
    let a = tenkit::tensor::multi_mode_product(&core, &refs).unwrap();
    let _ = shape;
    let samples = sampled(&a, 0.4, 7);
    for tau_scale in [0.2, 0.05, 0.01, 0.003, 0.001] {
        let cfg = NuclearConfig {
            tau_scale,
            max_outer: 2000,
            tol: 1e-10,
            ..NuclearConfig::default()
        };
        let t0 = std::time::Instant::now();
        let (x, report) = complete_nuclear(&samples, &cfg).unwrap();
        let mut diff = x.clone();
        diff.add_scaled(&a, -1.0).unwrap();
        let rel = diff.frobenius_norm() / a.frobenius_norm();
        println!(
            "tau_scale {tau_scale:>7}: rel err {rel:.3e}, iters {}, converged {}, {:?}",
            report.iterations,
            report.converged,
            t0.elapsed()
        );
    }
}
