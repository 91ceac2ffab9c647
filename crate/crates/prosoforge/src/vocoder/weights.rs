use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::signal::{read_tensor_from, write_tensor_to, Tensor};

/// Named weight tensors plus the seed they were initialized from. Names are
/// kept sorted so flattening and file layout are deterministic. The seed is
/// in-memory bookkeeping only; the file format stores just the tensors, so a
/// loaded store reports seed 0.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightStore {
    pub seed: u64,
    tensors: BTreeMap<String, Tensor>,
}

const WEIGHTS_MAGIC: &[u8; 4] = b"PFW1";
const MAX_ENTRIES: u32 = 1 << 20;

impl WeightStore {
    pub fn new(seed: u64) -> Self {
        WeightStore {
            seed,
            tensors: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, name: &str, tensor: Tensor) {
        self.tensors.insert(name.to_string(), tensor);
    }

    pub fn get(&self, name: &str) -> Result<&Tensor> {
        self.tensors
            .get(name)
            .ok_or_else(|| Error::Validation(format!("missing weight tensor {name:?}")))
    }

    pub fn len(&self) -> usize {
        self.tensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensors.is_empty()
    }

    /// Total scalar parameter count across all tensors.
    pub fn parameter_count(&self) -> usize {
        self.tensors.values().map(|t| t.data.len()).sum()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.tensors.keys().map(|s| s.as_str())
    }

    /// Concatenates every tensor in name order into one parameter vector.
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.parameter_count());
        for t in self.tensors.values() {
            out.extend(t.data.iter().map(|&v| v as f64));
        }
        out
    }

    /// Rebuilds a store with the same names/shapes from a flat vector
    /// produced by [`flatten`](Self::flatten).
    pub fn unflatten(&self, params: &[f64]) -> Result<WeightStore> {
        if params.len() != self.parameter_count() {
            return Err(Error::Validation(format!(
                "parameter vector has {} values, store holds {}",
                params.len(),
                self.parameter_count()
            )));
        }
        let mut out = WeightStore::new(self.seed);
        let mut at = 0;
        for (name, t) in &self.tensors {
            let n = t.data.len();
            let data: Vec<f32> = params[at..at + n].iter().map(|&v| v as f32).collect();
            out.insert(name, Tensor::new(t.dims.clone(), data)?);
            at += n;
        }
        Ok(out)
    }

    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        let io = |e: std::io::Error| Error::Format(format!("weight store write: {e}"));
        w.write_all(WEIGHTS_MAGIC).map_err(io)?;
        w.write_all(&(self.tensors.len() as u32).to_le_bytes())
            .map_err(io)?;
        for (name, t) in &self.tensors {
            let bytes = name.as_bytes();
            if bytes.len() > u16::MAX as usize {
                return Err(Error::Validation(format!("weight name too long: {name:?}")));
            }
            w.write_all(&(bytes.len() as u16).to_le_bytes()).map_err(io)?;
            w.write_all(bytes).map_err(io)?;
            write_tensor_to(&mut *w, t).map_err(io)?;
        }
        Ok(())
    }

    pub fn read_from(r: &mut impl Read) -> Result<WeightStore> {
        let bad = |what: &str| Error::Format(format!("weight store: {what}"));
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)
            .map_err(|_| bad("truncated magic"))?;
        if &magic != WEIGHTS_MAGIC {
            return Err(bad("bad magic"));
        }
        let mut u32buf = [0u8; 4];
        r.read_exact(&mut u32buf)
            .map_err(|_| bad("truncated count"))?;
        let count = u32::from_le_bytes(u32buf);
        if count > MAX_ENTRIES {
            return Err(bad("entry count out of range"));
        }
        let mut store = WeightStore::new(0);
        for _ in 0..count {
            let mut u16buf = [0u8; 2];
            r.read_exact(&mut u16buf)
                .map_err(|_| bad("truncated name length"))?;
            let name_len = u16::from_le_bytes(u16buf) as usize;
            let mut name_bytes = vec![0u8; name_len];
            r.read_exact(&mut name_bytes)
                .map_err(|_| bad("truncated name"))?;
            let name = String::from_utf8(name_bytes)
                .map_err(|_| bad("weight name is not UTF-8"))?;
            if store.tensors.contains_key(&name) {
                return Err(bad("duplicate weight name"));
            }
            let tensor = read_tensor_from(&mut *r, "weight store entry")?;
            store.insert(&name, tensor);
        }
        let mut extra = [0u8; 1];
        if r.read(&mut extra).map_err(|_| bad("read failed"))? != 0 {
            return Err(bad("trailing bytes after last tensor"));
        }
        Ok(store)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        self.write_to(&mut w)?;
        w.flush().map_err(|e| Error::io(path, e))?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<WeightStore> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        WeightStore::read_from(&mut BufReader::new(file))
    }
}
