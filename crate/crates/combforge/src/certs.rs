//! Certificates for comb files and seeded random combs.

use std::path::Path;
use std::time::Instant;

use combforge_core::certify::{certify, protocol_moment, Certificate};
use combforge_core::comb::{random_comb, Comb};
use combforge_core::operator::LabeledOperator;
use combforge_core::rng::derive_seed;
use combforge_core::Budget;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{encode_lop, read_comb, sha256_hex};

/// A certificate together with its provenance, as written to disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateRecord {
    #[serde(flatten)]
    pub certificate: Certificate,
    pub runtime_ms: u64,
    /// SHA-256 of the comb file, or of the binary encoding for generated combs.
    pub input_sha256: String,
}

/// `(d, n)` of a protocol comb on `H_0 … H_{2n+1}`.
pub fn infer_dn(comb: &Comb) -> Result<(usize, usize)> {
    let labels = comb.op().labels();
    if labels.is_empty() || !labels.len().is_multiple_of(2) {
        return Err(Error::Format(format!("a protocol comb needs an even number of systems, got {}", labels.len())));
    }
    Ok((labels[0].dim, labels.len() / 2 - 1))
}

fn certify_one(r: &Comb, moment: &LabeledOperator, d: usize, n: usize, tol: f64, sha: String) -> Result<CertificateRecord> {
    let start = Instant::now();
    let certificate = certify(r, moment, d, n, tol)?;
    Ok(CertificateRecord { certificate, runtime_ms: start.elapsed().as_millis() as u64, input_sha256: sha })
}

/// Certifies the comb stored at `path`. Missing `d`, `n` are read off the file.
pub fn certify_file(
    path: &Path,
    d: Option<usize>,
    n: Option<usize>,
    tol: f64,
    budget: Budget,
) -> Result<CertificateRecord> {
    let (comb, bytes) = read_comb(path)?;
    let (fd, fn_) = infer_dn(&comb)?;
    let (d, n) = (d.unwrap_or(fd), n.unwrap_or(fn_));
    if (d, n) != (fd, fn_) {
        return Err(Error::Config(format!("file holds a d = {fd}, n = {fn_} comb, flags ask for d = {d}, n = {n}")));
    }
    let moment = protocol_moment(d, n, budget)?;
    certify_one(&comb, &moment, d, n, tol, sha256_hex(&bytes))
}

/// Certifies `count` seeded random combs; comb `i` uses `derive_seed(seed, i)`
/// and an ancilla of dimension `ancilla` (or `1 + i mod 3` when `None`).
pub fn certify_random(
    d: usize,
    n: usize,
    count: usize,
    seed: u64,
    ancilla: Option<usize>,
    tol: f64,
    budget: Budget,
) -> Result<Vec<CertificateRecord>> {
    if ancilla == Some(0) {
        return Err(Error::Config("ancilla dimension must be at least 1".into()));
    }
    let moment = protocol_moment(d, n, budget)?;
    let records: Vec<Result<CertificateRecord>> = (0..count)
        .into_par_iter()
        .map(|i| {
            let comb = random_comb(d, n + 1, ancilla.unwrap_or(1 + i % 3), derive_seed(seed, i as u64))?;
            let sha = sha256_hex(&encode_lop(comb.op()));
            certify_one(&comb, &moment, d, n, tol, sha)
        })
        .collect();
    records.into_iter().collect()
}
