//! Binary tensor container: magic `PFT1`, u32 LE rank, u64 LE dims,
//! f32 LE row-major payload. Round-trips are bit-exact.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub const TENSOR_MAGIC: &[u8; 4] = b"PFT1";

/// A dense f32 tensor with explicit shape, row-major (last dim contiguous).
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    pub dims: Vec<u64>,
    pub data: Vec<f32>,
}

impl Tensor {
    pub fn new(dims: Vec<u64>, data: Vec<f32>) -> Result<Self> {
        let expect: u64 = dims.iter().product();
        if expect != data.len() as u64 {
            return Err(Error::Validation(format!(
                "tensor shape {dims:?} implies {expect} elements, got {}",
                data.len()
            )));
        }
        Ok(Tensor { dims, data })
    }
}

pub fn write_tensor_to(mut w: impl Write, tensor: &Tensor) -> std::io::Result<()> {
    w.write_all(TENSOR_MAGIC)?;
    w.write_all(&(tensor.dims.len() as u32).to_le_bytes())?;
    for d in &tensor.dims {
        w.write_all(&d.to_le_bytes())?;
    }
    for v in &tensor.data {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_tensor_from(mut r: impl Read, context: &str) -> Result<Tensor> {
    let fmt = |msg: String| Error::Format(format!("{context}: {msg}"));
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)
        .map_err(|_| fmt("truncated before magic".into()))?;
    if &magic != TENSOR_MAGIC {
        return Err(fmt(format!(
            "bad magic {:?} (expected {:?})",
            String::from_utf8_lossy(&magic),
            String::from_utf8_lossy(TENSOR_MAGIC)
        )));
    }
    let mut u32buf = [0u8; 4];
    r.read_exact(&mut u32buf)
        .map_err(|_| fmt("truncated in rank".into()))?;
    let rank = u32::from_le_bytes(u32buf);
    if rank == 0 || rank > 8 {
        return Err(fmt(format!("rank {rank} out of range 1..=8")));
    }
    let mut dims = Vec::with_capacity(rank as usize);
    let mut u64buf = [0u8; 8];
    for _ in 0..rank {
        r.read_exact(&mut u64buf)
            .map_err(|_| fmt("truncated in dims".into()))?;
        dims.push(u64::from_le_bytes(u64buf));
    }
    let count: u64 = dims.iter().product();
    if count > (1 << 31) {
        return Err(fmt(format!("element count {count} implausibly large")));
    }
    let mut data = Vec::with_capacity(count as usize);
    for _ in 0..count {
        r.read_exact(&mut u32buf)
            .map_err(|_| fmt("truncated in payload".into()))?;
        data.push(f32::from_le_bytes(u32buf));
    }
    Tensor::new(dims, data)
}

/// Like [`read_tensor_from`] but insists the stream ends with the record;
/// trailing bytes mean the writer and reader disagree about the shape.
pub fn read_single_tensor_from(mut r: impl Read, context: &str) -> Result<Tensor> {
    let tensor = read_tensor_from(&mut r, context)?;
    let mut probe = [0u8; 1];
    match r.read(&mut probe) {
        Ok(0) => {}
        Ok(_) => {
            return Err(Error::Format(format!(
                "{context}: trailing bytes after payload"
            )))
        }
        Err(_) => {}
    }
    Ok(tensor)
}

pub fn write_tensor(path: impl AsRef<Path>, tensor: &Tensor) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    write_tensor_to(&mut w, tensor).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_tensor(path: impl AsRef<Path>) -> Result<Tensor> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_single_tensor_from(std::io::BufReader::new(file), &path.display().to_string())
}
