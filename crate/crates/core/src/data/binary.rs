//! Binary similarity container.
//!
//! Layout, all integers and floats little-endian:
//!
//! ```text
//! "UPSM"  u8 version  u64 m  u64 n  f64[m*n] row-major  f64 beta  u8 metric
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::similarity::{Metric, SimilarityMatrix};

pub const UPSM_MAGIC: &[u8; 4] = b"UPSM";
pub const UPSM_VERSION: u8 = 1;

pub fn write_similarity(path: impl AsRef<Path>, s: &SimilarityMatrix) -> Result<()> {
    let path = path.as_ref();
    let wrap = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut w = BufWriter::new(File::create(path).map_err(wrap)?);
    let mut put = |bytes: &[u8]| w.write_all(bytes).map_err(wrap);
    put(UPSM_MAGIC)?;
    put(&[UPSM_VERSION])?;
    put(&(s.rows() as u64).to_le_bytes())?;
    put(&(s.cols() as u64).to_le_bytes())?;
    for v in s.data() {
        put(&v.to_le_bytes())?;
    }
    put(&s.beta().to_le_bytes())?;
    put(&[s.metric().to_u8()])?;
    w.flush().map_err(wrap)
}

pub fn read_similarity(path: impl AsRef<Path>) -> Result<SimilarityMatrix> {
    let path = path.as_ref();
    let format = |message: String| Error::Format {
        path: path.to_path_buf(),
        message,
    };
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut r = BufReader::new(file);
    let mut take = |buf: &mut [u8]| {
        r.read_exact(buf)
            .map_err(|e| format(format!("truncated file: {e}")))
    };

    let mut magic = [0u8; 4];
    take(&mut magic)?;
    if &magic != UPSM_MAGIC {
        return Err(format("bad magic bytes".into()));
    }
    let mut byte = [0u8; 1];
    take(&mut byte)?;
    if byte[0] != UPSM_VERSION {
        return Err(format(format!("unsupported version {}", byte[0])));
    }
    let mut word = [0u8; 8];
    take(&mut word)?;
    let m = u64::from_le_bytes(word) as usize;
    take(&mut word)?;
    let n = u64::from_le_bytes(word) as usize;
    let len = m
        .checked_mul(n)
        .filter(|&len| len.checked_mul(8).is_some())
        .ok_or_else(|| format(format!("implausible shape {m}x{n}")))?;
    let mut raw = vec![0u8; len * 8];
    take(&mut raw)?;
    let data = raw
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    take(&mut word)?;
    let beta = f64::from_le_bytes(word);
    take(&mut byte)?;
    let metric = Metric::from_u8(byte[0]).ok_or_else(|| format(format!("unknown metric tag {}", byte[0])))?;
    let mut rest = [0u8; 1];
    if r.read(&mut rest).map_err(|e| format(e.to_string()))? != 0 {
        return Err(format("trailing bytes after metric tag".into()));
    }
    SimilarityMatrix::with_provenance(m, n, data, beta, metric)
}
