//! Young diagrams, standard tableaux and Kerov interlacing sequences.
//!
//! Conventions:
//!
//! * Rows and columns are 0-based and the content of a cell is `col − row`.
//!   In `(6,5,3,3,2,1,1,1)` the last cell of the first row has content 5 and
//!   the bottom cell of the first column has content −7.
//! * Diagrams of equal size are ordered reverse-lexicographically, so
//!   `(4) < (3,1) < (2,2) < (2,1,1) < (1,1,1,1)`.
//! * A standard tableau is stored as its Yamanouchi word: `word[i]` is the row
//!   holding entry `i + 1`. Tableaux of one shape are ordered lexicographically
//!   by word, which is the order of [`enumerate_tableaux`].
//!
//! Every identity in this module is evaluated in exact rational arithmetic.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum YoungError {
    #[error("rows must be positive and weakly decreasing: {0:?}")]
    InvalidPartition(Vec<usize>),
    #[error("word {0:?} is not a standard tableau")]
    InvalidTableau(Vec<usize>),
    #[error("diagrams must be distinct")]
    NotDistinct,
    #[error("diagrams {0} and {1} do not differ by moving one box")]
    NotAdjacent(String, String),
    #[error("{0} is not obtained from {1} by removing one box")]
    NotParent(String, String),
    #[error("{0} has fewer than two removable boxes")]
    TooFewParents(String),
    #[error("index {index} out of range for sequence of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("values must be pairwise distinct")]
    RepeatedValues,
    #[error("expected {expected} betas for {alphas} alphas, got {got}")]
    LengthMismatch { alphas: usize, expected: usize, got: usize },
}

/// A cell of a Young diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
}

impl Cell {
    pub fn new(row: usize, col: usize) -> Self {
        Cell { row, col }
    }

    /// Axial coordinate `col − row`.
    pub fn content(&self) -> i64 {
        self.col as i64 - self.row as i64
    }
}

/// An integer partition, stored as its positive, weakly decreasing rows.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct YoungDiagram {
    rows: Vec<usize>,
}

impl TryFrom<Vec<usize>> for YoungDiagram {
    type Error = YoungError;
    fn try_from(rows: Vec<usize>) -> Result<Self, YoungError> {
        YoungDiagram::new(rows)
    }
}

impl From<YoungDiagram> for Vec<usize> {
    fn from(d: YoungDiagram) -> Self {
        d.rows
    }
}

impl YoungDiagram {
    pub fn new(rows: Vec<usize>) -> Result<Self, YoungError> {
        let ok = rows.iter().all(|&r| r > 0) && rows.windows(2).all(|w| w[0] >= w[1]);
        if !ok {
            return Err(YoungError::InvalidPartition(rows));
        }
        Ok(YoungDiagram { rows })
    }

    /// Accepts trailing zeros and drops them.
    pub fn from_padded(mut rows: Vec<usize>) -> Result<Self, YoungError> {
        while rows.last() == Some(&0) {
            rows.pop();
        }
        Self::new(rows)
    }

    pub fn empty() -> Self {
        YoungDiagram { rows: Vec::new() }
    }

    pub fn single_row(n: usize) -> Self {
        if n == 0 {
            Self::empty()
        } else {
            YoungDiagram { rows: vec![n] }
        }
    }

    pub fn single_column(n: usize) -> Self {
        YoungDiagram { rows: vec![1; n] }
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    /// Row length, 0 beyond the last row.
    pub fn row(&self, r: usize) -> usize {
        self.rows.get(r).copied().unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        self.rows.iter().sum()
    }

    /// Number of rows ℓ(λ).
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn conjugate(&self) -> Self {
        let width = self.row(0);
        let rows = (0..width).map(|c| self.rows.iter().filter(|&&r| r > c).count()).collect();
        YoungDiagram { rows }
    }

    pub fn contains(&self, cell: Cell) -> bool {
        cell.col < self.row(cell.row)
    }

    /// Cells in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(r, &len)| (0..len).map(move |c| Cell::new(r, c)))
    }

    /// Hook length; `None` when the cell is outside the diagram.
    pub fn hook(&self, cell: Cell) -> Option<usize> {
        if !self.contains(cell) {
            return None;
        }
        let arm = self.rows[cell.row] - cell.col - 1;
        let leg = self.rows.iter().skip(cell.row + 1).filter(|&&r| r > cell.col).count();
        Some(arm + leg + 1)
    }

    /// Positions where a box can be added, top row first.
    pub fn addable_cells(&self) -> Vec<Cell> {
        (0..=self.len())
            .filter(|&r| r == 0 || self.row(r - 1) > self.row(r))
            .map(|r| Cell::new(r, self.row(r)))
            .collect()
    }

    /// Removable boxes, top row first.
    pub fn removable_cells(&self) -> Vec<Cell> {
        (0..self.len())
            .filter(|&r| self.row(r) > self.row(r + 1))
            .map(|r| Cell::new(r, self.row(r) - 1))
            .collect()
    }

    /// Diagram with one box added in row `r`, if that is a valid partition.
    pub fn add_box(&self, r: usize) -> Option<Self> {
        if r > self.len() || (r > 0 && self.row(r - 1) == self.row(r)) {
            return None;
        }
        let mut rows = self.rows.clone();
        if r == rows.len() {
            rows.push(1);
        } else {
            rows[r] += 1;
        }
        Some(YoungDiagram { rows })
    }

    /// Diagram with the last box of row `r` removed, if that is a valid partition.
    pub fn remove_box(&self, r: usize) -> Option<Self> {
        if r >= self.len() || self.row(r) == self.row(r + 1) {
            return None;
        }
        let mut rows = self.rows.clone();
        rows[r] -= 1;
        if rows[r] == 0 {
            rows.pop();
        }
        Some(YoungDiagram { rows })
    }

    /// All λ with `self ↗ λ`, top row first.
    pub fn successors(&self) -> Vec<Self> {
        self.addable_cells().iter().filter_map(|c| self.add_box(c.row)).collect()
    }

    /// All μ with `μ ↗ self`, in canonical order.
    pub fn predecessors(&self) -> Vec<Self> {
        self.removable_cells().iter().filter_map(|c| self.remove_box(c.row)).collect()
    }

    pub fn union(&self, other: &Self) -> Self {
        let n = self.len().max(other.len());
        YoungDiagram { rows: (0..n).map(|r| self.row(r).max(other.row(r))).collect() }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let n = self.len().min(other.len());
        YoungDiagram { rows: (0..n).map(|r| self.row(r).min(other.row(r))).collect() }
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.len() <= other.len() && self.rows.iter().enumerate().all(|(r, &l)| l <= other.row(r))
    }

    /// The single cell of `self ∖ smaller` when `smaller ↗ self`.
    pub fn box_over(&self, smaller: &Self) -> Option<Cell> {
        if self.size() != smaller.size() + 1 || !smaller.is_subset_of(self) {
            return None;
        }
        (0..self.len()).find(|&r| self.row(r) != smaller.row(r)).map(|r| Cell::new(r, smaller.row(r)))
    }
}

impl Ord for YoungDiagram {
    fn cmp(&self, other: &Self) -> Ordering {
        self.size().cmp(&other.size()).then_with(|| other.rows.cmp(&self.rows))
    }
}

impl PartialOrd for YoungDiagram {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for YoungDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rows.is_empty() {
            return f.write_str("∅");
        }
        f.write_str("(")?;
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{r}")?;
        }
        f.write_str(")")
    }
}

fn label(d: &YoungDiagram) -> String {
    alloc::format!("{d}")
}

/// All partitions of `n` with at most `max_rows` rows, reverse-lexicographic.
pub fn enumerate_partitions(n: usize, max_rows: Option<usize>) -> Vec<YoungDiagram> {
    fn rec(rest: usize, cap: usize, rows_left: usize, cur: &mut Vec<usize>, out: &mut Vec<YoungDiagram>) {
        if rest == 0 {
            out.push(YoungDiagram { rows: cur.clone() });
            return;
        }
        if rows_left == 0 {
            return;
        }
        for first in (1..=cap.min(rest)).rev() {
            cur.push(first);
            rec(rest - first, first, rows_left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, max_rows.unwrap_or(usize::MAX), &mut Vec::new(), &mut out);
    out
}

fn factorial(n: usize) -> BigUint {
    (1..=n as u64).fold(BigUint::one(), |acc, k| acc * k)
}

/// `|Tab(λ)| = n! / Π h_λ(□)` in arbitrary precision.
pub fn num_tableaux(shape: &YoungDiagram) -> BigUint {
    let hooks = shape
        .cells()
        .map(|c| shape.hook(c).expect("cell of the diagram"))
        .fold(BigUint::one(), |acc, h| acc * h as u64);
    factorial(shape.size()) / hooks
}

/// Convenience for shapes whose tableau count fits a machine word.
pub fn dim_p(shape: &YoungDiagram) -> usize {
    let n = num_tableaux(shape);
    n.try_into().expect("tableau count fits usize")
}

fn rat(n: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(n.clone()))
}

fn rat_i(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// A standard Young tableau, stored as its Yamanouchi word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StandardTableau {
    shape: YoungDiagram,
    word: Vec<usize>,
}

impl StandardTableau {
    pub fn from_word(word: Vec<usize>) -> Result<Self, YoungError> {
        let mut counts: Vec<usize> = Vec::new();
        for &r in &word {
            if r > counts.len() || (r > 0 && counts[r - 1] == counts.get(r).copied().unwrap_or(0)) {
                return Err(YoungError::InvalidTableau(word));
            }
            if r == counts.len() {
                counts.push(0);
            }
            counts[r] += 1;
        }
        Ok(StandardTableau { shape: YoungDiagram { rows: counts }, word })
    }

    pub fn empty() -> Self {
        StandardTableau { shape: YoungDiagram::empty(), word: Vec::new() }
    }

    pub fn shape(&self) -> &YoungDiagram {
        &self.shape
    }

    pub fn word(&self) -> &[usize] {
        &self.word
    }

    pub fn size(&self) -> usize {
        self.word.len()
    }

    /// Growth chain `λ^(1) ↗ … ↗ λ^(n)`.
    pub fn chain(&self) -> Vec<YoungDiagram> {
        let mut cur = YoungDiagram::empty();
        self.word
            .iter()
            .map(|&r| {
                cur = cur.add_box(r).expect("valid word");
                cur.clone()
            })
            .collect()
    }

    /// Cell holding `entry` (1-based).
    pub fn cell_of(&self, entry: usize) -> Cell {
        assert!(entry >= 1 && entry <= self.word.len(), "entry out of range");
        let r = self.word[entry - 1];
        let col = self.word[..entry - 1].iter().filter(|&&x| x == r).count();
        Cell::new(r, col)
    }

    /// Content of the cell holding `entry` (1-based).
    pub fn content_of(&self, entry: usize) -> i64 {
        self.cell_of(entry).content()
    }

    /// The tableau with its largest entry removed (`T↓`).
    pub fn lowered(&self) -> Self {
        let mut word = self.word.clone();
        let r = word.pop().expect("non-empty tableau");
        let shape = self.shape.remove_box(r).expect("last entry sits in a corner");
        StandardTableau { shape, word }
    }

    /// The tableau with entry `n + 1` placed at the end of row `r`.
    pub fn raised(&self, r: usize) -> Option<Self> {
        let shape = self.shape.add_box(r)?;
        let mut word = self.word.clone();
        word.push(r);
        Some(StandardTableau { shape, word })
    }

    /// `s_i T`: entries `i` and `i + 1` exchanged (1-based), if still standard.
    pub fn swap(&self, i: usize) -> Option<Self> {
        assert!(i >= 1 && i < self.word.len(), "adjacent index out of range");
        let (a, b) = (self.word[i - 1], self.word[i]);
        let ca = self.cell_of(i);
        let cb = self.cell_of(i + 1);
        if a == b || ca.col == cb.col {
            return None;
        }
        let mut word = self.word.clone();
        word.swap(i - 1, i);
        Some(StandardTableau { shape: self.shape.clone(), word })
    }

    /// Entries laid out row by row (1-based).
    pub fn filling(&self) -> Vec<Vec<usize>> {
        let mut rows = vec![Vec::new(); self.shape.len()];
        for (i, &r) in self.word.iter().enumerate() {
            rows[r].push(i + 1);
        }
        rows
    }
}

/// All standard tableaux of `shape`, lexicographic in the Yamanouchi word.
pub fn enumerate_tableaux(shape: &YoungDiagram) -> Vec<StandardTableau> {
    fn rec(shape: &YoungDiagram, counts: &mut Vec<usize>, word: &mut Vec<usize>, out: &mut Vec<StandardTableau>) {
        if word.len() == shape.size() {
            out.push(StandardTableau { shape: shape.clone(), word: word.clone() });
            return;
        }
        for r in 0..shape.len() {
            if counts[r] < shape.row(r) && (r == 0 || counts[r - 1] > counts[r]) {
                counts[r] += 1;
                word.push(r);
                rec(shape, counts, word, out);
                word.pop();
                counts[r] -= 1;
            }
        }
    }
    let mut out = Vec::new();
    rec(shape, &mut vec![0; shape.len()], &mut Vec::new(), &mut out);
    out
}

/// Tableaux of shape `lambda` whose lowered tableau has shape `mu`.
pub fn tableaux_through(lambda: &YoungDiagram, mu: &YoungDiagram) -> Vec<StandardTableau> {
    enumerate_tableaux(lambda).into_iter().filter(|t| t.lowered().shape() == mu).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterlacingSequences {
    pub alphas: Vec<i64>,
    pub betas: Vec<i64>,
}

impl InterlacingSequences {
    /// `α_1 < β_1 < α_2 < … < β_{L−1} < α_L` and `Σα = Σβ`.
    pub fn is_valid(&self) -> bool {
        if self.alphas.len() != self.betas.len() + 1 {
            return false;
        }
        let interlaced = self.betas.iter().enumerate().all(|(i, &b)| self.alphas[i] < b && b < self.alphas[i + 1]);
        let sum: i64 = self.alphas.iter().sum::<i64>() - self.betas.iter().sum::<i64>();
        interlaced && sum == 0
    }
}

/// Contents of addable cells (α) and removable cells (β), both ascending.
pub fn interlacing(shape: &YoungDiagram) -> InterlacingSequences {
    let mut alphas: Vec<i64> = shape.addable_cells().iter().map(Cell::content).collect();
    let mut betas: Vec<i64> = shape.removable_cells().iter().map(Cell::content).collect();
    alphas.reverse();
    betas.reverse();
    InterlacingSequences { alphas, betas }
}

/// `|Tab(λ)| / |Tab(μ)|` for λ obtained from μ by adding a box at `α_k`.
///
/// `k` is a 0-based index into the ascending α sequence of `mu`.
pub fn add_box_ratio(mu: &YoungDiagram, k: usize) -> Result<BigRational, YoungError> {
    let s = interlacing(mu);
    let (a, b) = (&s.alphas, &s.betas);
    if k >= a.len() {
        return Err(YoungError::IndexOutOfRange { index: k, len: a.len() });
    }
    let ak = a[k];
    let mut r = rat_i(mu.size() as i64 + 1);
    for i in 0..k {
        r *= BigRational::new(BigInt::from(ak - b[i]), BigInt::from(ak - a[i]));
    }
    for i in k + 1..a.len() {
        r *= BigRational::new(BigInt::from(ak - b[i - 1]), BigInt::from(ak - a[i]));
    }
    Ok(r)
}

/// `|Tab(μ)| / |Tab(λ)|` for μ obtained from λ by removing the box at `β_k`.
///
/// `k` is a 0-based index into the ascending β sequence of `lambda`.
pub fn remove_box_ratio(lambda: &YoungDiagram, k: usize) -> Result<BigRational, YoungError> {
    let s = interlacing(lambda);
    let (a, b) = (&s.alphas, &s.betas);
    if k >= b.len() {
        return Err(YoungError::IndexOutOfRange { index: k, len: b.len() });
    }
    let bk = b[k];
    let l = a.len();
    let mut r = BigRational::new(BigInt::from((a[l - 1] - bk) * (bk - a[0])), BigInt::from(lambda.size()));
    for i in 0..k {
        r *= BigRational::new(BigInt::from(bk - a[i + 1]), BigInt::from(bk - b[i]));
    }
    for i in k + 1..b.len() {
        r *= BigRational::new(BigInt::from(bk - a[i]), BigInt::from(bk - b[i]));
    }
    Ok(r)
}

fn dim_ratio(num: &YoungDiagram, den: &YoungDiagram) -> BigRational {
    rat(&num_tableaux(num)) / rat(&num_tableaux(den))
}

fn content_over(big: &YoungDiagram, small: &YoungDiagram) -> Result<i64, YoungError> {
    big.box_over(small)
        .map(|c| c.content())
        .ok_or_else(|| YoungError::NotParent(label(small), label(big)))
}

/// Residual of
/// `dimμ·dimν / (dim(μ∪ν)·dim(μ∩ν)) = n/(n+1) · (1 − 1/(c(μ∖ν) − c(ν∖μ))²)`.
pub fn check_hook_ratio_identity(mu: &YoungDiagram, nu: &YoungDiagram) -> Result<BigRational, YoungError> {
    if mu == nu {
        return Err(YoungError::NotDistinct);
    }
    let n = mu.size();
    let cap = mu.intersection(nu);
    if nu.size() != n || cap.size() + 1 != n {
        return Err(YoungError::NotAdjacent(label(mu), label(nu)));
    }
    let cup = mu.union(nu);
    let d = content_over(mu, &cap)? - content_over(nu, &cap)?;
    let lhs = rat(&num_tableaux(mu)) * rat(&num_tableaux(nu)) / (rat(&num_tableaux(&cup)) * rat(&num_tableaux(&cap)));
    let rhs = BigRational::new(BigInt::from(n), BigInt::from(n + 1))
        * (BigRational::one() - BigRational::new(BigInt::one(), BigInt::from(d * d)));
    Ok(lhs - rhs)
}

/// `Σ_{λ: ν↗λ} (dimλ/dimν) / ((c(λ∖ν) − c(ν∖τ))(c(λ∖ν) − c(ν∖κ)))`, which vanishes.
pub fn check_zero_sum_identity(
    nu: &YoungDiagram,
    tau: &YoungDiagram,
    kappa: &YoungDiagram,
) -> Result<BigRational, YoungError> {
    if nu.removable_cells().len() < 2 {
        return Err(YoungError::TooFewParents(label(nu)));
    }
    if tau == kappa {
        return Err(YoungError::NotDistinct);
    }
    let ct = content_over(nu, tau)?;
    let ck = content_over(nu, kappa)?;
    let mut sum = BigRational::zero();
    for lambda in nu.successors() {
        let c = content_over(&lambda, nu)?;
        sum += dim_ratio(&lambda, nu) / rat_i((c - ct) * (c - ck));
    }
    Ok(sum)
}

/// `Σ_{λ: ν↗λ} (dimλ/dimν) / (c(λ∖ν) − c(ν∖τ))² − ((n+1)/n)(dimν/dimτ)`.
pub fn check_inverse_square_identity(nu: &YoungDiagram, tau: &YoungDiagram) -> Result<BigRational, YoungError> {
    let ct = content_over(nu, tau)?;
    let n = nu.size() as i64;
    let mut sum = BigRational::zero();
    for lambda in nu.successors() {
        let c = content_over(&lambda, nu)? - ct;
        sum += dim_ratio(&lambda, nu) / rat_i(c * c);
    }
    Ok(sum - BigRational::new(BigInt::from(n + 1), BigInt::from(n)) * dim_ratio(nu, tau))
}

/// Left-hand side of the Lagrange-interpolation identity
/// `Σ_i 1/(α_i − β_m) Π_{j<i} (α_i − β_j)/(α_i − α_j) Π_{j>i} (α_i − β_{j−1})/(α_i − α_j) = 0`.
///
/// `m` is 1-based, `1 ≤ m ≤ L − 1`. The values need only be pairwise distinct.
pub fn check_lagrange_identity(
    alphas: &[BigRational],
    betas: &[BigRational],
    m: usize,
) -> Result<BigRational, YoungError> {
    let l = alphas.len();
    if betas.len() + 1 != l {
        return Err(YoungError::LengthMismatch { alphas: l, expected: l.saturating_sub(1), got: betas.len() });
    }
    if m == 0 || m > betas.len() {
        return Err(YoungError::IndexOutOfRange { index: m, len: betas.len() });
    }
    let mut all: Vec<&BigRational> = alphas.iter().chain(betas.iter()).collect();
    all.sort();
    if all.windows(2).any(|w| w[0] == w[1]) {
        return Err(YoungError::RepeatedValues);
    }
    let bm = &betas[m - 1];
    let mut sum = BigRational::zero();
    for i in 0..l {
        let ai = &alphas[i];
        let mut term = (ai - bm).recip();
        for j in 0..i {
            term *= (ai - &betas[j]) / (ai - &alphas[j]);
        }
        for j in i + 1..l {
            term *= (ai - &betas[j - 1]) / (ai - &alphas[j]);
        }
        sum += term;
    }
    Ok(sum)
}
