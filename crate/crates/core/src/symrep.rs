//! Irreducible representations of the symmetric group in Young's orthogonal form.
//!
//! Permutations compose as maps, `(πσ)(x) = π(σ(x))`, and are written with
//! 1-based images in the public API. Matrices are indexed by the standard
//! tableaux of the shape in the order of [`enumerate_tableaux`].

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use nalgebra::DMatrix;
use num_traits::Float;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{max_abs_diff, real, CMat};
use crate::young::{enumerate_tableaux, StandardTableau, YoungDiagram};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymRepError {
    #[error("images {0:?} do not form a permutation of 1..n")]
    NotAPermutation(Vec<usize>),
    #[error("adjacent index {index} out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("permutation acts on {perm} points but the shape has {shape} boxes")]
    SizeMismatch { perm: usize, shape: usize },
    #[error("representation violates {relation} by {residual:e}")]
    InconsistentRepresentation { relation: String, residual: f64 },
}

/// A permutation of `{1, …, n}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    // 0-based images
    map: Vec<usize>,
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = SymRepError;
    fn try_from(images: Vec<usize>) -> Result<Self, SymRepError> {
        Permutation::new(images)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.images()
    }
}

impl Permutation {
    /// From 1-based images `[π(1), …, π(n)]`.
    pub fn new(images: Vec<usize>) -> Result<Self, SymRepError> {
        let n = images.len();
        let mut seen = alloc::vec![false; n];
        for &x in &images {
            if x == 0 || x > n || seen[x - 1] {
                return Err(SymRepError::NotAPermutation(images));
            }
            seen[x - 1] = true;
        }
        Ok(Permutation { map: images.iter().map(|x| x - 1).collect() })
    }

    pub fn identity(n: usize) -> Self {
        Permutation { map: (0..n).collect() }
    }

    /// Adjacent transposition `s_i = (i, i+1)`, 1-based.
    pub fn adjacent(n: usize, i: usize) -> Result<Self, SymRepError> {
        if i == 0 || i >= n {
            return Err(SymRepError::IndexOutOfRange { index: i, n });
        }
        let mut map: Vec<usize> = (0..n).collect();
        map.swap(i - 1, i);
        Ok(Permutation { map })
    }

    pub fn n(&self) -> usize {
        self.map.len()
    }

    /// 1-based images.
    pub fn images(&self) -> Vec<usize> {
        self.map.iter().map(|x| x + 1).collect()
    }

    /// `π(i)`, 1-based.
    pub fn apply(&self, i: usize) -> usize {
        self.map[i - 1] + 1
    }

    pub(crate) fn map0(&self) -> &[usize] {
        &self.map
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.n(), other.n(), "permutations on different sets");
        Permutation { map: other.map.iter().map(|&x| self.map[x]).collect() }
    }

    pub fn inverse(&self) -> Self {
        let mut map = alloc::vec![0; self.n()];
        for (i, &x) in self.map.iter().enumerate() {
            map[x] = i;
        }
        Permutation { map }
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// Cycle lengths, descending; fixed points included.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut seen = alloc::vec![false; self.n()];
        let mut lens = Vec::new();
        for start in 0..self.n() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.map[x];
                len += 1;
            }
            lens.push(len);
        }
        lens.sort_unstable_by(|a, b| b.cmp(a));
        lens
    }

    pub fn sign(&self) -> i32 {
        let odd = self.cycle_type().iter().filter(|&&l| l % 2 == 0).count() % 2 == 1;
        if odd {
            -1
        } else {
            1
        }
    }

    /// Indices `[j_1, …, j_m]` (1-based) with `π = s_{j_m} ⋯ s_{j_1}`,
    /// read off a bubble sort of the one-line notation.
    pub fn adjacent_factorization(&self) -> Vec<usize> {
        let mut a = self.map.clone();
        let mut out = Vec::new();
        let n = a.len();
        for pass in 0..n {
            for j in 0..n.saturating_sub(1 + pass) {
                if a[j] > a[j + 1] {
                    a.swap(j, j + 1);
                    out.push(j + 1);
                }
            }
        }
        out
    }

    /// Same permutation on `{1, …, m}` fixing the added points.
    pub fn extend(&self, m: usize) -> Self {
        assert!(m >= self.n());
        let mut map = self.map.clone();
        map.extend(self.n()..m);
        Permutation { map }
    }

    /// Restriction to `{1, …, n−1}`; `None` unless `π(n) = n`.
    pub fn restrict(&self) -> Option<Self> {
        let n = self.n();
        if n == 0 || self.map[n - 1] != n - 1 {
            return None;
        }
        Some(Permutation { map: self.map[..n - 1].to_vec() })
    }

    /// All of `S_n` in lexicographic order of the one-line notation.
    pub fn all(n: usize) -> Vec<Self> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..n).collect();
        loop {
            out.push(Permutation { map: cur.clone() });
            // next permutation
            let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
                break;
            };
            let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).expect("successor exists");
            cur.swap(i, j);
            cur[i + 1..].reverse();
        }
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, x) in self.map.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}", x + 1)?;
        }
        f.write_str("]")
    }
}

/// `P_λ(π)`: a real orthogonal matrix indexed by the tableaux of `shape`.
#[derive(Debug, Clone, PartialEq)]
pub struct IrrepMatrix {
    pub shape: YoungDiagram,
    pub matrix: DMatrix<f64>,
}

impl IrrepMatrix {
    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    pub fn to_complex(&self) -> CMat {
        self.matrix.map(real)
    }
}

/// `c(box of i+1) − c(box of i)`; never zero in a standard tableau.
pub fn axial_distance(t: &StandardTableau, i: usize) -> Result<i64, SymRepError> {
    let n = t.size();
    if i == 0 || i >= n {
        return Err(SymRepError::IndexOutOfRange { index: i, n });
    }
    Ok(t.content_of(i + 1) - t.content_of(i))
}

/// Sparse form of `s_i` in the Young basis: per tableau, its diagonal entry
/// and the optional partner `s_i T` with the off-diagonal entry.
#[derive(Debug, Clone)]
struct Generator {
    diag: Vec<f64>,
    partner: Vec<Option<(usize, f64)>>,
}

/// Young's orthogonal form of every adjacent transposition for one shape.
///
/// Built once and read-only afterwards, so a shared reference can be used
/// from any number of threads.
#[derive(Debug, Clone)]
pub struct YoungOrthogonalForm {
    shape: YoungDiagram,
    tableaux: Vec<StandardTableau>,
    generators: Vec<Generator>,
}

impl YoungOrthogonalForm {
    pub fn new(shape: &YoungDiagram) -> Self {
        let tableaux = enumerate_tableaux(shape);
        let n = shape.size();
        let generators = (1..n)
            .map(|i| {
                let mut diag = Vec::with_capacity(tableaux.len());
                let mut partner = Vec::with_capacity(tableaux.len());
                for t in &tableaux {
                    let r = axial_distance(t, i).expect("index in range") as f64;
                    diag.push(1.0 / r);
                    partner.push(t.swap(i).map(|s| {
                        let idx = tableaux.binary_search(&s).expect("swapped tableau is enumerated");
                        (idx, Float::sqrt(1.0 - 1.0 / (r * r)))
                    }));
                }
                Generator { diag, partner }
            })
            .collect();
        YoungOrthogonalForm { shape: shape.clone(), tableaux, generators }
    }

    pub fn shape(&self) -> &YoungDiagram {
        &self.shape
    }

    pub fn tableaux(&self) -> &[StandardTableau] {
        &self.tableaux
    }

    pub fn dim(&self) -> usize {
        self.tableaux.len()
    }

    fn left_apply(&self, i: usize, m: &DMatrix<f64>) -> DMatrix<f64> {
        let g = &self.generators[i - 1];
        let mut out = DMatrix::zeros(m.nrows(), m.ncols());
        for t in 0..self.dim() {
            let mut row = m.row(t) * g.diag[t];
            if let Some((s, w)) = g.partner[t] {
                row += m.row(s) * w;
            }
            out.set_row(t, &row);
        }
        out
    }

    pub fn transposition(&self, i: usize) -> Result<IrrepMatrix, SymRepError> {
        let n = self.shape.size();
        if i == 0 || i >= n {
            return Err(SymRepError::IndexOutOfRange { index: i, n });
        }
        let id = DMatrix::identity(self.dim(), self.dim());
        Ok(IrrepMatrix { shape: self.shape.clone(), matrix: self.left_apply(i, &id) })
    }

    pub fn matrix(&self, pi: &Permutation) -> Result<IrrepMatrix, SymRepError> {
        if pi.n() != self.shape.size() {
            return Err(SymRepError::SizeMismatch { perm: pi.n(), shape: self.shape.size() });
        }
        let mut m = DMatrix::identity(self.dim(), self.dim());
        for j in pi.adjacent_factorization() {
            m = self.left_apply(j, &m);
        }
        Ok(IrrepMatrix { shape: self.shape.clone(), matrix: m })
    }

    pub fn character(&self, pi: &Permutation) -> Result<f64, SymRepError> {
        Ok(self.matrix(pi)?.trace())
    }
}

/// `P_λ(s_i)` with diagonal `1/r(T)` and off-diagonal `√(1 − 1/r(T)²)`.
pub fn transposition_action(shape: &YoungDiagram, i: usize) -> Result<IrrepMatrix, SymRepError> {
    YoungOrthogonalForm::new(shape).transposition(i)
}

/// `P_λ(π)` as an ordered product of adjacent transposition matrices.
pub fn irrep_matrix(shape: &YoungDiagram, pi: &Permutation) -> Result<IrrepMatrix, SymRepError> {
    YoungOrthogonalForm::new(shape).matrix(pi)
}

/// `χ_λ(π) = tr P_λ(π)`.
pub fn character(shape: &YoungDiagram, pi: &Permutation) -> Result<f64, SymRepError> {
    YoungOrthogonalForm::new(shape).character(pi)
}

/// Tolerance used when spot-checking a representation handed to
/// [`isotypic_projector`].
pub const REP_CHECK_TOL: f64 = 1e-9;

/// Checks `ρ(e) = I`, `ρ(s_i)² = I`, far commutation and the braid relation.
/// Those relations present `S_k`, so they certify a homomorphism.
pub fn check_representation<F>(k: usize, rep: &F) -> Result<(), SymRepError>
where
    F: Fn(&Permutation) -> CMat,
{
    let fail = |relation: &str, residual: f64| SymRepError::InconsistentRepresentation {
        relation: String::from(relation),
        residual,
    };
    let e = rep(&Permutation::identity(k));
    let dim = e.nrows();
    let id = CMat::identity(dim, dim);
    let r = max_abs_diff(&e, &id);
    if r > REP_CHECK_TOL {
        return Err(fail("rho(e) = I", r));
    }
    let gens: Vec<CMat> = (1..k).map(|i| rep(&Permutation::adjacent(k, i).expect("in range"))).collect();
    for (i, g) in gens.iter().enumerate() {
        let r = max_abs_diff(&(g * g), &id);
        if r > REP_CHECK_TOL {
            return Err(fail("s_i^2 = e", r));
        }
        if let Some(h) = gens.get(i + 1) {
            let gh = g * h;
            let r = max_abs_diff(&(&gh * &gh * &gh), &id);
            if r > REP_CHECK_TOL {
                return Err(fail("(s_i s_i+1)^3 = e", r));
            }
        }
        for h in gens.iter().skip(i + 2) {
            let r = max_abs_diff(&(g * h), &(h * g));
            if r > REP_CHECK_TOL {
                return Err(fail("s_i s_j = s_j s_i", r));
            }
        }
    }
    Ok(())
}

/// `e_λ = (dim P_λ / k!) Σ_π χ_λ(π) ρ(π)` for a unitary representation `ρ` of `S_k`.
///
/// The representation is checked against the Coxeter relations first and
/// rejected if it does not satisfy them.
pub fn isotypic_projector<F>(shape: &YoungDiagram, rep: F) -> Result<CMat, SymRepError>
where
    F: Fn(&Permutation) -> CMat,
{
    let k = shape.size();
    check_representation(k, &rep)?;
    let yof = YoungOrthogonalForm::new(shape);
    let perms = Permutation::all(k);
    let mut acc: Option<CMat> = None;
    for p in &perms {
        let chi = yof.character(p)?;
        if chi.abs() < 1e-12 {
            continue;
        }
        let term = rep(p) * real(chi);
        acc = Some(match acc {
            Some(a) => a + term,
            None => term,
        });
    }
    let dim = rep(&Permutation::identity(k)).nrows();
    let scale = yof.dim() as f64 / perms.len() as f64;
    Ok(acc.map(|a| a * real(scale)).unwrap_or_else(|| CMat::zeros(dim, dim)))
}
