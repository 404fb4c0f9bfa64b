//! Dense operators on a tensor product of labeled subsystems.
//!
//! The first label is the most significant tensor factor, so for labels
//! `[a, b]` the basis state `|i⟩_a|j⟩_b` has index `i·dim(b) + j`.
//! Binary operations whose output label order is not dictated by the inputs
//! ([`LabeledOperator::link_product`], [`LabeledOperator::tensor`]) return
//! labels sorted ascending by id.

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{kron, CMat, C64, ZERO};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OperatorError {
    #[error("label id {0} appears more than once")]
    DuplicateLabel(u32),
    #[error("label id {0} is not present")]
    MissingLabel(u32),
    #[error("label {id} has dimension {left} on one side and {right} on the other")]
    DimMismatch { id: u32, left: usize, right: usize },
    #[error("matrix is {rows}x{cols} but the labels need {expected}x{expected}")]
    ShapeMismatch { rows: usize, cols: usize, expected: usize },
    #[error("label dimensions must be positive")]
    ZeroDimension,
    #[error("operators carry different label lists")]
    LabelsDiffer,
    #[error("{0}")]
    Invalid(&'static str),
}

type OpResult<T> = core::result::Result<T, OperatorError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SystemLabel {
    pub id: u32,
    pub dim: usize,
}

impl SystemLabel {
    pub fn new(id: u32, dim: usize) -> Self {
        SystemLabel { id, dim }
    }
}

/// Labels `ids` all with dimension `dim`.
pub fn uniform_labels(ids: impl IntoIterator<Item = u32>, dim: usize) -> Vec<SystemLabel> {
    ids.into_iter().map(|id| SystemLabel::new(id, dim)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledOperator {
    labels: Vec<SystemLabel>,
    matrix: CMat,
}

fn total_dim(labels: &[SystemLabel]) -> usize {
    labels.iter().map(|l| l.dim).product()
}

fn validate(labels: &[SystemLabel]) -> OpResult<()> {
    for (i, l) in labels.iter().enumerate() {
        if l.dim == 0 {
            return Err(OperatorError::ZeroDimension);
        }
        if labels[..i].iter().any(|m| m.id == l.id) {
            return Err(OperatorError::DuplicateLabel(l.id));
        }
    }
    Ok(())
}

/// `map[new] = old` for basis indices when the factors `labels` are
/// rearranged so that new factor `p` is old factor `order[p]`.
fn factor_permutation(labels: &[SystemLabel], order: &[usize]) -> Vec<usize> {
    let k = labels.len();
    let mut old_stride = alloc::vec![1usize; k];
    for p in (0..k.saturating_sub(1)).rev() {
        old_stride[p] = old_stride[p + 1] * labels[p + 1].dim;
    }
    let new_dims: Vec<usize> = order.iter().map(|&o| labels[o].dim).collect();
    let strides: Vec<usize> = order.iter().map(|&o| old_stride[o]).collect();
    let n = total_dim(labels);
    let mut map = Vec::with_capacity(n);
    let mut digits = alloc::vec![0usize; k];
    let mut old = 0usize;
    for _ in 0..n {
        map.push(old);
        // increment mixed-radix counter, least significant last
        for p in (0..k).rev() {
            digits[p] += 1;
            old += strides[p];
            if digits[p] < new_dims[p] {
                break;
            }
            old -= strides[p] * digits[p];
            digits[p] = 0;
        }
    }
    map
}

impl LabeledOperator {
    pub fn new(labels: Vec<SystemLabel>, matrix: CMat) -> OpResult<Self> {
        validate(&labels)?;
        let expected = total_dim(&labels);
        if matrix.nrows() != expected || matrix.ncols() != expected {
            return Err(OperatorError::ShapeMismatch { rows: matrix.nrows(), cols: matrix.ncols(), expected });
        }
        Ok(LabeledOperator { labels, matrix })
    }

    /// Scalar operator with no labels.
    pub fn scalar(z: C64) -> Self {
        LabeledOperator { labels: Vec::new(), matrix: CMat::from_element(1, 1, z) }
    }

    pub fn identity(labels: Vec<SystemLabel>) -> OpResult<Self> {
        validate(&labels)?;
        let n = total_dim(&labels);
        Ok(LabeledOperator { labels, matrix: CMat::identity(n, n) })
    }

    pub fn labels(&self) -> &[SystemLabel] {
        &self.labels
    }

    pub fn ids(&self) -> Vec<u32> {
        self.labels.iter().map(|l| l.id).collect()
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn matrix_mut(&mut self) -> &mut CMat {
        &mut self.matrix
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn position(&self, id: u32) -> Option<usize> {
        self.labels.iter().position(|l| l.id == id)
    }

    pub fn has(&self, id: u32) -> bool {
        self.position(id).is_some()
    }

    pub fn label_dim(&self, id: u32) -> Option<usize> {
        self.position(id).map(|p| self.labels[p].dim)
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn map_matrix(&self, f: impl FnOnce(&CMat) -> CMat) -> Self {
        LabeledOperator { labels: self.labels.clone(), matrix: f(&self.matrix) }
    }

    pub fn scale(&self, z: C64) -> Self {
        self.map_matrix(|m| m * z)
    }

    /// `self − other` after bringing `other` to this label order.
    pub fn sub(&self, other: &Self) -> OpResult<Self> {
        let o = other.aligned_to(self)?;
        Ok(self.map_matrix(|m| m - o.matrix))
    }

    pub fn add(&self, other: &Self) -> OpResult<Self> {
        let o = other.aligned_to(self)?;
        Ok(self.map_matrix(|m| m + o.matrix))
    }

    /// `other` reordered to the label order of `self`; the label sets must agree.
    pub fn aligned_to(&self, target: &Self) -> OpResult<Self> {
        let mut mine = self.labels.clone();
        let mut theirs = target.labels.clone();
        mine.sort();
        theirs.sort();
        if mine != theirs {
            return Err(OperatorError::LabelsDiffer);
        }
        self.reorder(&target.ids())
    }

    /// Plain Kronecker product, labels concatenated (self first).
    pub fn kron(&self, other: &Self) -> OpResult<Self> {
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        validate(&labels)?;
        Ok(LabeledOperator { labels, matrix: kron(&self.matrix, &other.matrix) })
    }

    /// Kronecker product with canonical (ascending) label order.
    pub fn tensor(&self, other: &Self) -> OpResult<Self> {
        Ok(self.kron(other)?.canonicalize())
    }

    /// Factors rearranged into the order `ids`, which must list every label once.
    pub fn reorder(&self, ids: &[u32]) -> OpResult<Self> {
        if ids.len() != self.labels.len() {
            return Err(OperatorError::LabelsDiffer);
        }
        let mut order = Vec::with_capacity(ids.len());
        for (i, &id) in ids.iter().enumerate() {
            if ids[..i].contains(&id) {
                return Err(OperatorError::DuplicateLabel(id));
            }
            order.push(self.position(id).ok_or(OperatorError::MissingLabel(id))?);
        }
        if order.iter().enumerate().all(|(i, &o)| i == o) {
            return Ok(self.clone());
        }
        let map = factor_permutation(&self.labels, &order);
        let n = map.len();
        let matrix = CMat::from_fn(n, n, |i, j| self.matrix[(map[i], map[j])]);
        let labels = order.iter().map(|&o| self.labels[o]).collect();
        Ok(LabeledOperator { labels, matrix })
    }

    pub fn canonicalize(&self) -> Self {
        let mut ids = self.ids();
        ids.sort_unstable();
        self.reorder(&ids).expect("ids taken from the operator")
    }

    pub fn is_canonical(&self) -> bool {
        self.labels.windows(2).all(|w| w[0].id < w[1].id)
    }

    fn check_present(&self, ids: &[u32]) -> OpResult<()> {
        for (i, &id) in ids.iter().enumerate() {
            if ids[..i].contains(&id) {
                return Err(OperatorError::DuplicateLabel(id));
            }
            if !self.has(id) {
                return Err(OperatorError::MissingLabel(id));
            }
        }
        Ok(())
    }

    /// Traces out `ids`; the remaining labels keep their relative order.
    pub fn partial_trace(&self, ids: &[u32]) -> OpResult<Self> {
        self.check_present(ids)?;
        if ids.is_empty() {
            return Ok(self.clone());
        }
        let kept: Vec<u32> = self.ids().into_iter().filter(|id| !ids.contains(id)).collect();
        let mut order = kept.clone();
        order.extend_from_slice(ids);
        let moved = self.reorder(&order)?;
        let t: usize = ids.iter().map(|&id| self.label_dim(id).expect("present")).product();
        let k = moved.dim() / t;
        let m = &moved.matrix;
        let mut out = CMat::zeros(k, k);
        for b in 0..k {
            for a in 0..k {
                let mut acc = ZERO;
                for s in 0..t {
                    acc += m[(a * t + s, b * t + s)];
                }
                out[(a, b)] = acc;
            }
        }
        let labels = kept.iter().map(|&id| self.labels[self.position(id).expect("present")]).collect();
        Ok(LabeledOperator { labels, matrix: out })
    }

    /// Transposes the factors `ids` in place.
    pub fn partial_transpose(&self, ids: &[u32]) -> OpResult<Self> {
        self.check_present(ids)?;
        let k = self.labels.len();
        let mut stride = alloc::vec![1usize; k];
        for p in (0..k.saturating_sub(1)).rev() {
            stride[p] = stride[p + 1] * self.labels[p + 1].dim;
        }
        let n = self.dim();
        // part[i]: contribution of the transposed factors to index i
        let part: Vec<usize> = (0..n)
            .map(|i| {
                ids.iter()
                    .map(|&id| {
                        let p = self.position(id).expect("present");
                        (i / stride[p]) % self.labels[p].dim * stride[p]
                    })
                    .sum()
            })
            .collect();
        let mut out = CMat::zeros(n, n);
        for j in 0..n {
            for i in 0..n {
                let ni = i - part[i] + part[j];
                let nj = j - part[j] + part[i];
                out[(ni, nj)] = self.matrix[(i, j)];
            }
        }
        Ok(LabeledOperator { labels: self.labels.clone(), matrix: out })
    }

    /// `self ⊗ I` on the given extra labels, canonical label order.
    pub fn extend_identity(&self, extra: &[SystemLabel]) -> OpResult<Self> {
        if extra.is_empty() {
            return Ok(self.canonicalize());
        }
        self.tensor(&LabeledOperator::identity(extra.to_vec())?)
    }

    /// Link product `X ⋆ Y = tr_S[(X^{T_S} ⊗ I)(I ⊗ Y)]` over the shared labels `S`.
    ///
    /// Computed by realignment: with `X` ordered as (own, shared) and `Y` as
    /// (own, shared),
    /// `(X ⋆ Y)[(x,y),(x′,y′)] = Σ_{a,b} X[(x,b),(x′,a)] · Y[(y,b),(y′,a)]`,
    /// which is one matrix product of the realigned operators.
    pub fn link_product(&self, other: &Self) -> OpResult<Self> {
        let mut shared: Vec<u32> = Vec::new();
        for l in &self.labels {
            if let Some(d) = other.label_dim(l.id) {
                if d != l.dim {
                    return Err(OperatorError::DimMismatch { id: l.id, left: l.dim, right: d });
                }
                shared.push(l.id);
            }
        }
        shared.sort_unstable();
        let mut x_own: Vec<u32> = self.ids().into_iter().filter(|id| !shared.contains(id)).collect();
        let mut y_own: Vec<u32> = other.ids().into_iter().filter(|id| !shared.contains(id)).collect();
        x_own.sort_unstable();
        y_own.sort_unstable();
        let xo: Vec<u32> = x_own.iter().chain(shared.iter()).copied().collect();
        let yo: Vec<u32> = y_own.iter().chain(shared.iter()).copied().collect();
        let x = self.reorder(&xo)?;
        let y = other.reorder(&yo)?;
        let ds: usize = shared.iter().map(|&id| self.label_dim(id).expect("present")).product();
        let dx = x.dim() / ds;
        let dy = y.dim() / ds;

        let xr = CMat::from_fn(dx * dx, ds * ds, |r, c| {
            let (xi, xj) = (r / dx, r % dx);
            let (b, a) = (c / ds, c % ds);
            x.matrix[(xi * ds + b, xj * ds + a)]
        });
        let yr = CMat::from_fn(ds * ds, dy * dy, |r, c| {
            let (b, a) = (r / ds, r % ds);
            let (yi, yj) = (c / dy, c % dy);
            y.matrix[(yi * ds + b, yj * ds + a)]
        });
        let z = xr * yr;
        let n = dx * dy;
        let matrix = CMat::from_fn(n, n, |r, c| {
            let (xi, yi) = (r / dy, r % dy);
            let (xj, yj) = (c / dy, c % dy);
            z[(xi * dx + xj, yi * dy + yj)]
        });
        let mut labels: Vec<SystemLabel> = x.labels[..x_own.len()].to_vec();
        labels.extend_from_slice(&y.labels[..y_own.len()]);
        Ok(LabeledOperator { labels, matrix }.canonicalize())
    }
}
