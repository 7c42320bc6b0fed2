//! On-disk tensor formats.
//!
//! Binary ".ten": 8-byte magic `TENKIT01`, u32 little-endian order `d`,
//! `d` u64 little-endian dimensions, then all entries as IEEE-754 f64
//! little-endian in linearization order. The JSON sidecar variant stores
//! `{"shape": [...], "data": [...]}` with the same ordering and is meant
//! for small tensors.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::{DenseTensor, Shape};

const MAGIC: &[u8; 8] = b"TENKIT01";

pub fn write_ten<T: Scalar>(path: &Path, tensor: &DenseTensor<T>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&(tensor.order() as u32).to_le_bytes())?;
    for &n in tensor.shape().dims() {
        w.write_all(&(n as u64).to_le_bytes())?;
    }
    for &v in tensor.data() {
        w.write_all(&v.to_f64_lossy().to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_ten<T: Scalar>(path: &Path) -> Result<DenseTensor<T>> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Parse(format!(
            "{}: bad magic, not a .ten file",
            path.display()
        )));
    }
    let mut b4 = [0u8; 4];
    r.read_exact(&mut b4)?;
    let order = u32::from_le_bytes(b4) as usize;
    let mut dims = Vec::with_capacity(order);
    let mut b8 = [0u8; 8];
    for _ in 0..order {
        r.read_exact(&mut b8)?;
        dims.push(u64::from_le_bytes(b8) as usize);
    }
    let shape = Shape::new(dims)?;
    let mut data = Vec::with_capacity(shape.len());
    for _ in 0..shape.len() {
        r.read_exact(&mut b8)?;
        data.push(T::of(f64::from_le_bytes(b8)));
    }
    DenseTensor::from_data(shape, data)
}

#[derive(Serialize, Deserialize)]
struct TenJson {
    shape: Vec<usize>,
    data: Vec<f64>,
}

pub fn write_ten_json<T: Scalar>(path: &Path, tensor: &DenseTensor<T>) -> Result<()> {
    let doc = TenJson {
        shape: tensor.shape().dims().to_vec(),
        data: tensor.data().iter().map(|v| v.to_f64_lossy()).collect(),
    };
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer(&mut w, &doc).map_err(|e| Error::Parse(e.to_string()))?;
    w.flush()?;
    Ok(())
}

pub fn read_ten_json<T: Scalar>(path: &Path) -> Result<DenseTensor<T>> {
    let r = BufReader::new(File::open(path)?);
    let doc: TenJson = serde_json::from_reader(r).map_err(|e| Error::Parse(e.to_string()))?;
    let shape = Shape::new(doc.shape)?;
    DenseTensor::from_data(shape, doc.data.into_iter().map(T::of).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let shape = Shape::new(vec![3, 4, 2]).unwrap();
        let t =
            DenseTensor::from_data(shape, (1..=24).map(|v| v as f64 * 0.5).collect()).unwrap();
        let p = dir.path().join("a.ten");
        write_ten(&p, &t).unwrap();
        let back: DenseTensor<f64> = read_ten(&p).unwrap();
        assert_eq!(back, t);
        let pj = dir.path().join("a.json");
        write_ten_json(&pj, &t).unwrap();
        let backj: DenseTensor<f64> = read_ten_json(&pj).unwrap();
        assert_eq!(backj, t);
    }

    #[test]
    fn rejects_bad_magic() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.ten");
        std::fs::write(&p, b"NOTATENXrest").unwrap();
        assert!(matches!(read_ten::<f64>(&p), Err(Error::Parse(_))));
    }
}
