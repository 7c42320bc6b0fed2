//! Tensor completion from partial observations: fixed-rank alternating
//! minimization, low-rank-plus-sparse recovery with an l1 penalty on linear
//! functionals, and sum-of-nuclear-norms completion for low-order tensors.

mod alt_min;
mod nuclear;

pub use alt_min::{
    complete_fixed_rank, complete_lr_sparse, lambda_grid, CompletionConfig, CompletionReport,
    LrSparseProblem, LrSparseReport,
};
pub use nuclear::{complete_nuclear, NuclearConfig, NuclearInit, NuclearReport};

use std::collections::HashSet;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::{DenseTensor, MultiIndex, Shape};

/// The observation set: distinct indexed entries of a partially known
/// tensor.
#[derive(Clone, Debug)]
pub struct SampleSet<T> {
    shape: Shape,
    indices: Vec<MultiIndex>,
    values: Vec<T>,
}

impl<T: Scalar> SampleSet<T> {
    pub fn new(shape: Shape, entries: Vec<(MultiIndex, T)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::invalid("sample set must contain at least one entry"));
        }
        let mut seen = HashSet::with_capacity(entries.len());
        let mut indices = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        for (idx, val) in entries {
            let lin = shape.linear_index(&idx)?;
            if !seen.insert(lin) {
                return Err(Error::invalid(format!(
                    "duplicate sample index {:?}",
                    idx.indices()
                )));
            }
            if !val.is_finite() {
                return Err(Error::invalid("sample values must be finite"));
            }
            indices.push(idx);
            values.push(val);
        }
        Ok(SampleSet {
            shape,
            indices,
            values,
        })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, T)> + '_ {
        self.indices.iter().zip(self.values.iter().copied())
    }

    /// Root sum of squared sample values; the observed residual of the zero
    /// model.
    pub fn norm(&self) -> T {
        self.values.iter().map(|&v| v * v).sum::<T>().sqrt()
    }

    /// Split into (train, holdout) subsets by a seeded shuffle. Both parts
    /// stay non-empty.
    pub fn split_holdout(&self, fraction: f64, seed: u64) -> Result<(SampleSet<T>, SampleSet<T>)> {
        if !(0.0..1.0).contains(&fraction) {
            return Err(Error::invalid("holdout fraction must lie in [0, 1)"));
        }
        let n = self.len();
        let n_hold = ((n as f64 * fraction) as usize).clamp(1, n - 1);
        let mut rng = crate::rng::seeded(seed);
        let picks: Vec<usize> = crate::rng::sample_distinct(&mut rng, n, n_hold);
        let hold: HashSet<usize> = picks.into_iter().collect();
        let mut train = Vec::new();
        let mut heldout = Vec::new();
        for (i, (idx, val)) in self.iter().enumerate() {
            if hold.contains(&i) {
                heldout.push((idx.clone(), val));
            } else {
                train.push((idx.clone(), val));
            }
        }
        Ok((
            SampleSet::new(self.shape.clone(), train)?,
            SampleSet::new(self.shape.clone(), heldout)?,
        ))
    }

    /// Zero-filled dense tensor carrying the observed values.
    pub fn zero_filled(&self) -> DenseTensor<T> {
        let mut t = DenseTensor::zeros(self.shape.clone());
        for (idx, val) in self.iter() {
            t.set(idx, val).expect("validated index");
        }
        t
    }

    /// CSV with d 1-based index columns and one value column per line.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        for (idx, val) in self.iter() {
            for i in idx.indices() {
                write!(w, "{i},")?;
            }
            writeln!(w, "{:.17e}", val.to_f64_lossy())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv(path: &Path, shape: Shape) -> Result<SampleSet<T>> {
        let r = BufReader::new(std::fs::File::open(path)?);
        let d = shape.order();
        let mut entries = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != d + 1 {
                return Err(Error::Parse(format!(
                    "line {}: expected {} fields, found {}",
                    lineno + 1,
                    d + 1,
                    fields.len()
                )));
            }
            let mut idx = Vec::with_capacity(d);
            for f in &fields[..d] {
                idx.push(
                    f.trim()
                        .parse::<usize>()
                        .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?,
                );
            }
            let val: f64 = fields[d]
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            entries.push((MultiIndex::new(idx), T::of(val)));
        }
        SampleSet::new(shape, entries)
    }
}

/// Anything that can be evaluated entrywise: dense tensors and all factored
/// models. Lets the observed-residual work without densifying.
pub trait EntryEval<T> {
    fn entry_at(&self, idx: &MultiIndex) -> Result<T>;
}

impl<T: Scalar> EntryEval<T> for DenseTensor<T> {
    fn entry_at(&self, idx: &MultiIndex) -> Result<T> {
        self.get(idx)
    }
}

impl<T: Scalar> EntryEval<T> for crate::decomp::CpModel<T> {
    fn entry_at(&self, idx: &MultiIndex) -> Result<T> {
        self.entry(idx)
    }
}

impl<T: Scalar> EntryEval<T> for crate::decomp::TuckerModel<T> {
    fn entry_at(&self, idx: &MultiIndex) -> Result<T> {
        self.entry(idx)
    }
}

impl<T: Scalar> EntryEval<T> for crate::decomp::TtModel<T> {
    fn entry_at(&self, idx: &MultiIndex) -> Result<T> {
        self.entry(idx)
    }
}

/// Extract the entries of `a` at `omega`.
pub fn project_omega<T: Scalar>(a: &DenseTensor<T>, omega: &[MultiIndex]) -> Result<SampleSet<T>> {
    let entries = omega
        .iter()
        .map(|idx| Ok((idx.clone(), a.get(idx)?)))
        .collect::<Result<Vec<_>>>()?;
    SampleSet::new(a.shape().clone(), entries)
}

/// `||P_Omega(x - A)||_F` over the observed entries only.
pub fn residual_omega<T: Scalar, E: EntryEval<T>>(x: &E, samples: &SampleSet<T>) -> Result<T> {
    let mut s = T::zero();
    for (idx, val) in samples.iter() {
        let d = x.entry_at(idx)? - val;
        s += d * d;
    }
    Ok(s.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn worked_example() -> DenseTensor<f64> {
        let shape = Shape::new(vec![3, 4, 2]).unwrap();
        DenseTensor::from_data(shape, (1..=24).map(|v| v as f64).collect()).unwrap()
    }

    #[test]
    fn full_omega_reproduces_tensor() {
        let a = worked_example();
        let omega: Vec<MultiIndex> = a.shape().multi_indices().collect();
        let s = project_omega(&a, &omega).unwrap();
        assert_eq!(s.len(), 24);
        assert_eq!(residual_omega(&a, &s).unwrap(), 0.0);
        assert_eq!(s.zero_filled().data(), a.data());
    }

    #[test]
    fn empty_omega_rejected() {
        let a = worked_example();
        assert!(project_omega(&a, &[]).is_err());
    }

    #[test]
    fn duplicate_indices_rejected() {
        let a = worked_example();
        let idx: MultiIndex = vec![1, 1, 1].into();
        assert!(project_omega(&a, &[idx.clone(), idx]).is_err());
    }

    #[test]
    fn zero_model_residual_is_sample_norm() {
        let a = worked_example();
        let mut rng = rng::seeded(4);
        let all: Vec<MultiIndex> = a.shape().multi_indices().collect();
        let picks = rng::sample_distinct(&mut rng, all.len(), 12);
        let omega: Vec<MultiIndex> = picks.iter().map(|&i| all[i].clone()).collect();
        let s = project_omega(&a, &omega).unwrap();
        let zero = DenseTensor::<f64>::zeros(a.shape().clone());
        let res = residual_omega(&zero, &s).unwrap();
        let direct: f64 = s.values().iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((res - direct).abs() < 1e-12);
        assert!((s.norm() - direct).abs() < 1e-12);
    }

    #[test]
    fn csv_round_trip() {
        let a = worked_example();
        let omega: Vec<MultiIndex> = a.shape().multi_indices().take(5).collect();
        let s = project_omega(&a, &omega).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("samples.csv");
        s.write_csv(&p).unwrap();
        let back: SampleSet<f64> = SampleSet::read_csv(&p, a.shape().clone()).unwrap();
        assert_eq!(back.len(), s.len());
        for ((i1, v1), (i2, v2)) in back.iter().zip(s.iter()) {
            assert_eq!(i1, i2);
            assert_eq!(v1, v2);
        }
    }
}
