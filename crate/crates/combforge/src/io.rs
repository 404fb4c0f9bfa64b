//! Operator and comb files.
//!
//! JSON: `{"labels":[{"id":0,"dim":2},…],"matrix":[[[re,im],…],…]}`, with an
//! optional `"teeth":[[in,out],…]` for combs (consecutive pairs of the sorted
//! ids when absent).
//!
//! Binary (`.lop`): magic `LOP1`, `u32` label count, `u32` id and `u32` dim per
//! label, then the matrix row-major as interleaved little-endian `f64` pairs.

use std::path::Path;

use combforge_core::comb::Comb;
use combforge_core::linalg::{CMat, C64};
use combforge_core::operator::{LabeledOperator, SystemLabel};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const LOP_MAGIC: &[u8; 4] = b"LOP1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileFormat {
    Json,
    Lop,
}

impl FileFormat {
    /// `.json` is JSON, anything else binary.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => FileFormat::Json,
            _ => FileFormat::Lop,
        }
    }

    /// Sniffs the magic bytes.
    pub fn detect(bytes: &[u8]) -> Self {
        if bytes.starts_with(LOP_MAGIC) {
            FileFormat::Lop
        } else {
            FileFormat::Json
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct OperatorFile {
    labels: Vec<SystemLabel>,
    matrix: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    teeth: Option<Vec<[u32; 2]>>,
}

impl OperatorFile {
    fn from_op(op: &LabeledOperator, teeth: Option<&[(u32, u32)]>) -> Self {
        let m = op.matrix();
        let matrix = (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect();
        OperatorFile {
            labels: op.labels().to_vec(),
            matrix,
            teeth: teeth.map(|t| t.iter().map(|&(a, b)| [a, b]).collect()),
        }
    }

    fn to_op(&self) -> Result<LabeledOperator> {
        let dim: usize = self.labels.iter().map(|l| l.dim).product();
        if self.matrix.len() != dim || self.matrix.iter().any(|r| r.len() != dim) {
            return Err(Error::Format(format!("matrix must be {dim}x{dim} for the given labels")));
        }
        let m = CMat::from_fn(dim, dim, |i, j| {
            let [re, im] = self.matrix[i][j];
            C64::new(re, im)
        });
        Ok(LabeledOperator::new(self.labels.clone(), m)?)
    }
}

pub fn operator_to_json(op: &LabeledOperator) -> Result<String> {
    Ok(serde_json::to_string(&OperatorFile::from_op(op, None))?)
}

pub fn operator_from_json(s: &str) -> Result<LabeledOperator> {
    serde_json::from_str::<OperatorFile>(s)?.to_op()
}

pub fn comb_to_json(comb: &Comb) -> Result<String> {
    Ok(serde_json::to_string(&OperatorFile::from_op(comb.op(), Some(comb.teeth())))?)
}

pub fn comb_from_json(s: &str) -> Result<Comb> {
    let file: OperatorFile = serde_json::from_str(s)?;
    let op = file.to_op()?;
    Ok(match file.teeth {
        Some(t) => Comb::new(op, t.into_iter().map(|[a, b]| (a, b)).collect())?,
        None => Comb::with_consecutive_teeth(op)?,
    })
}

pub fn encode_lop(op: &LabeledOperator) -> Vec<u8> {
    let m = op.matrix();
    let mut out = Vec::with_capacity(8 + 8 * op.labels().len() + 16 * m.len());
    out.extend_from_slice(LOP_MAGIC);
    out.extend_from_slice(&(op.labels().len() as u32).to_le_bytes());
    for l in op.labels() {
        out.extend_from_slice(&l.id.to_le_bytes());
        out.extend_from_slice(&(l.dim as u32).to_le_bytes());
    }
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.extend_from_slice(&m[(i, j)].re.to_le_bytes());
            out.extend_from_slice(&m[(i, j)].im.to_le_bytes());
        }
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        let end = self.pos + N;
        let chunk = self.bytes.get(self.pos..end).ok_or_else(|| Error::Format("truncated LOP1 data".into()))?;
        self.pos = end;
        Ok(chunk.try_into().expect("length checked"))
    }

    fn u32(&mut self) -> Result<u32> {
        self.take::<4>().map(u32::from_le_bytes)
    }

    fn f64(&mut self) -> Result<f64> {
        self.take::<8>().map(f64::from_le_bytes)
    }
}

pub fn decode_lop(bytes: &[u8]) -> Result<LabeledOperator> {
    let mut r = Reader { bytes, pos: 0 };
    if &r.take::<4>()? != LOP_MAGIC {
        return Err(Error::Format("missing LOP1 magic".into()));
    }
    let count = r.u32()? as usize;
    let mut labels = Vec::with_capacity(count.min(64));
    for _ in 0..count {
        let id = r.u32()?;
        let dim = r.u32()? as usize;
        labels.push(SystemLabel::new(id, dim));
    }
    let dim = labels
        .iter()
        .try_fold(1usize, |acc, l| acc.checked_mul(l.dim))
        .ok_or_else(|| Error::Format("dimension overflow".into()))?;
    let expected = dim.checked_mul(dim).and_then(|x| x.checked_mul(16));
    if expected != Some(bytes.len() - r.pos) {
        return Err(Error::Format(format!("payload does not match a {dim}x{dim} matrix")));
    }
    let mut m = CMat::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let re = r.f64()?;
            let im = r.f64()?;
            m[(i, j)] = C64::new(re, im);
        }
    }
    Ok(LabeledOperator::new(labels, m)?)
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

fn utf8(bytes: &[u8]) -> Result<&str> {
    std::str::from_utf8(bytes).map_err(|_| Error::Format("JSON file is not UTF-8".into()))
}

pub fn read_operator(path: &Path) -> Result<LabeledOperator> {
    let bytes = read_bytes(path)?;
    match FileFormat::detect(&bytes) {
        FileFormat::Lop => decode_lop(&bytes),
        FileFormat::Json => operator_from_json(utf8(&bytes)?),
    }
}

pub fn write_operator(path: &Path, op: &LabeledOperator, format: FileFormat) -> Result<()> {
    let bytes = match format {
        FileFormat::Lop => encode_lop(op),
        FileFormat::Json => operator_to_json(op)?.into_bytes(),
    };
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// The comb and the raw file bytes (for hashing).
pub fn read_comb(path: &Path) -> Result<(Comb, Vec<u8>)> {
    let bytes = read_bytes(path)?;
    let comb = match FileFormat::detect(&bytes) {
        FileFormat::Lop => Comb::with_consecutive_teeth(decode_lop(&bytes)?)?,
        FileFormat::Json => comb_from_json(utf8(&bytes)?)?,
    };
    Ok((comb, bytes))
}

/// Binary files cannot carry teeth; they are re-inferred on reading.
pub fn write_comb(path: &Path, comb: &Comb, format: FileFormat) -> Result<()> {
    let bytes = match format {
        FileFormat::Lop => encode_lop(comb.op()),
        FileFormat::Json => comb_to_json(comb)?.into_bytes(),
    };
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}
