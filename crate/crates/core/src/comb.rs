//! Quantum combs, Choi operators and channel distances.
//!
//! Vectorization is row-major, `|X⟩⟩ = Σ_{ij} X_ij |i⟩|j⟩`, so the Choi operator
//! of a unitary lives on `(out, in)` and `|XYZ⟩⟩ = (X ⊗ Zᵀ)|Y⟩⟩`. A channel acts
//! through the link product: `E(X) = C ⋆ X` with `X` carried on the input label.

use alloc::string::String;
use alloc::vec::Vec;
use nalgebra::SymmetricEigen;
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    haar_isometry, haar_unitary, hermiticity_residual, hermitize, kron, max_abs_diff, min_eigenvalue, op_norm, real,
    trace_norm, CMat, CVec,
};
use crate::operator::{LabeledOperator, OperatorError, SystemLabel};
use crate::rng::from_seed;

/// Relative Hermiticity tolerance: `‖X − X†‖_F ≤ HERMITIAN_TOL · ‖X‖_F`.
pub const HERMITIAN_TOL: f64 = 1e-9;
/// PSD tolerance: `λ_min ≥ −PSD_TOL · (1 + ‖X‖₂)`.
pub const PSD_TOL: f64 = 1e-8;

/// A `d × d` matrix with `U†U = I` to within `1e−12`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix(CMat);

impl UnitaryMatrix {
    pub const TOL: f64 = 1e-12;

    pub fn new(m: CMat) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::InvalidArgument("unitary must be square".into()));
        }
        let n = m.nrows();
        let err = max_abs_diff(&(m.adjoint() * &m), &CMat::identity(n, n));
        if err > Self::TOL {
            return Err(Error::InvalidArgument(alloc::format!("U†U deviates from I by {err:e}")));
        }
        Ok(UnitaryMatrix(m))
    }

    pub fn identity(d: usize) -> Self {
        UnitaryMatrix(CMat::identity(d, d))
    }

    pub fn haar(d: usize, seed: u64) -> Self {
        UnitaryMatrix(haar_unitary(d, &mut from_seed(seed)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.0
    }
}

/// `|X⟩⟩`, row-major flattening of `X`.
pub fn vectorize(x: &CMat) -> CVec {
    let (r, c) = x.shape();
    CVec::from_fn(r * c, |k, _| x[(k / c, k % c)])
}

/// `|X⟩⟩⟨⟨X|` on labels `(out, in)`.
pub fn choi_of_matrix(x: &CMat, out_id: u32, in_id: u32) -> Result<LabeledOperator> {
    let v = vectorize(x);
    let labels = alloc::vec![SystemLabel::new(out_id, x.nrows()), SystemLabel::new(in_id, x.ncols())];
    Ok(LabeledOperator::new(labels, &v * v.adjoint())?)
}

/// `|U⟩⟩⟨⟨U|` on labels `(out, in)`.
pub fn choi_of_unitary(u: &UnitaryMatrix, out_id: u32, in_id: u32) -> Result<LabeledOperator> {
    choi_of_matrix(u.matrix(), out_id, in_id)
}

/// Choi operator of the completely depolarizing channel, `I ⊗ I / d`.
pub fn depolarizing_choi(d: usize, out_id: u32, in_id: u32) -> Result<LabeledOperator> {
    let labels = alloc::vec![SystemLabel::new(out_id, d), SystemLabel::new(in_id, d)];
    Ok(LabeledOperator::identity(labels)?.scale(real(1.0 / d as f64)))
}

/// `E(X) = C ⋆ X`, where `X` acts on the input label of the Choi operator.
pub fn apply_channel(choi: &LabeledOperator, in_id: u32, x: &CMat) -> Result<CMat> {
    let d = choi.label_dim(in_id).ok_or(OperatorError::MissingLabel(in_id))?;
    let xin = LabeledOperator::new(alloc::vec![SystemLabel::new(in_id, d)], x.clone())?;
    Ok(choi.link_product(&xin)?.into_matrix())
}

/// A Choi-style operator together with its ordered `(input, output)` teeth.
#[derive(Debug, Clone, PartialEq)]
pub struct Comb {
    op: LabeledOperator,
    teeth: Vec<(u32, u32)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombReport {
    pub hermiticity_residual: f64,
    pub min_eigenvalue: f64,
    pub psd_scale: f64,
    /// `‖tr_out X^(j) − I ⊗ X^(j−1)‖_F`, last tooth first.
    pub causality: Vec<f64>,
    /// `|X^(0) − 1|`.
    pub normalization: f64,
    pub valid: bool,
    pub failure: Option<String>,
}

impl Comb {
    /// Every label must belong to exactly one tooth.
    pub fn new(op: LabeledOperator, teeth: Vec<(u32, u32)>) -> Result<Self> {
        let mut seen: Vec<u32> = Vec::new();
        for &(a, b) in &teeth {
            for id in [a, b] {
                if !op.has(id) {
                    return Err(OperatorError::MissingLabel(id).into());
                }
                if seen.contains(&id) {
                    return Err(OperatorError::DuplicateLabel(id).into());
                }
                seen.push(id);
            }
        }
        if seen.len() != op.labels().len() {
            return Err(Error::InvalidComb("some labels belong to no tooth".into()));
        }
        Ok(Comb { op, teeth })
    }

    /// Teeth `(2j, 2j+1)` inferred from the sorted label ids.
    pub fn with_consecutive_teeth(op: LabeledOperator) -> Result<Self> {
        let mut ids = op.ids();
        ids.sort_unstable();
        if !ids.len().is_multiple_of(2) {
            return Err(Error::InvalidComb("odd number of labels".into()));
        }
        let teeth = ids.chunks(2).map(|c| (c[0], c[1])).collect();
        Comb::new(op, teeth)
    }

    pub fn op(&self) -> &LabeledOperator {
        &self.op
    }

    pub fn teeth(&self) -> &[(u32, u32)] {
        &self.teeth
    }

    pub fn n_teeth(&self) -> usize {
        self.teeth.len()
    }

    pub fn into_op(self) -> LabeledOperator {
        self.op
    }

    pub fn link(&self, other: &LabeledOperator) -> Result<LabeledOperator> {
        Ok(self.op.link_product(other)?)
    }

    /// PSD check followed by the recursive causality chain
    /// `tr_{out_j} X^(j) = I_{in_j} ⊗ X^(j−1)`, ending in `X^(0) = 1`.
    pub fn check(&self, tol: f64) -> CombReport {
        let m = self.op.matrix();
        let norm = m.norm();
        let herm = hermiticity_residual(m);
        let mut report = CombReport {
            hermiticity_residual: herm,
            min_eigenvalue: f64::NAN,
            psd_scale: 0.0,
            causality: Vec::new(),
            normalization: f64::NAN,
            valid: false,
            failure: None,
        };
        if herm > HERMITIAN_TOL * norm.max(1.0) {
            report.failure = Some(alloc::format!("not Hermitian: residual {herm:e}"));
            return report;
        }
        let h = hermitize(m);
        report.psd_scale = 1.0 + op_norm(&h);
        report.min_eigenvalue = min_eigenvalue(&h);
        if report.min_eigenvalue < -PSD_TOL * report.psd_scale {
            report.failure = Some(alloc::format!("not PSD: min eigenvalue {:e}", report.min_eigenvalue));
            return report;
        }
        let mut x = self.op.map_matrix(|_| h.clone());
        for &(tin, tout) in self.teeth.iter().rev() {
            let y = match x.partial_trace(&[tout]) {
                Ok(y) => y,
                Err(e) => {
                    report.failure = Some(alloc::format!("{e}"));
                    return report;
                }
            };
            let din = y.label_dim(tin).expect("tooth input present");
            let prev = y.partial_trace(&[tin]).expect("present").scale(real(1.0 / din as f64));
            let expanded = LabeledOperator::identity(alloc::vec![SystemLabel::new(tin, din)])
                .and_then(|i| i.kron(&prev))
                .and_then(|e| e.aligned_to(&y))
                .expect("same labels");
            let r = (y.matrix() - expanded.matrix()).norm();
            report.causality.push(r);
            if r > tol * y.matrix().norm().max(1.0) {
                report.failure = Some(alloc::format!("causality fails at tooth ({tin},{tout}): residual {r:e}"));
                return report;
            }
            x = prev;
        }
        let z = x.matrix()[(0, 0)];
        report.normalization = (z - real(1.0)).norm();
        if report.normalization > tol {
            report.failure = Some(alloc::format!("normalization {z} differs from 1"));
            return report;
        }
        report.valid = true;
        report
    }

    pub fn is_valid(&self, tol: f64) -> bool {
        self.check(tol).valid
    }
}

/// [`Comb::check`] as a free function.
pub fn is_comb(comb: &Comb, tol: f64) -> CombReport {
    comb.check(tol)
}

/// Choi operator of a sequential strategy on labels `0..2·n_teeth`
/// (tooth `j` is `(2j, 2j+1)`), built from Haar-random isometries
/// `V_0: H_0 → H_1 ⊗ M` and unitaries `V_j: M ⊗ H_{2j} → H_{2j+1} ⊗ M`
/// with the final memory `M` traced out.
pub fn random_comb(d: usize, n_teeth: usize, ancilla_dim: usize, seed: u64) -> Result<Comb> {
    if d == 0 || n_teeth == 0 || ancilla_dim == 0 {
        return Err(Error::InvalidArgument("d, n_teeth and ancilla_dim must be positive".into()));
    }
    let mut rng = from_seed(seed);
    let m = ancilla_dim;
    // maps (H_0, H_2, …) → (H_1, H_3, …, M)
    let mut w = haar_isometry(d * m, d, &mut rng);
    let mut outs = d;
    for _ in 1..n_teeth {
        let v = haar_unitary(d * m, &mut rng);
        let widened = kron(&w, &CMat::identity(d, d));
        w = kron(&CMat::identity(outs, outs), &v) * widened;
        outs *= d;
    }
    let ins = w.ncols();
    let mut choi = CMat::zeros(outs * ins, outs * ins);
    for a in 0..m {
        let wa = CMat::from_fn(outs, ins, |o, i| w[(o * m + a, i)]);
        let v = vectorize(&wa);
        choi += &v * v.adjoint();
    }
    let mut labels: Vec<SystemLabel> = (0..n_teeth).map(|j| SystemLabel::new(2 * j as u32 + 1, d)).collect();
    labels.extend((0..n_teeth).map(|j| SystemLabel::new(2 * j as u32, d)));
    let op = LabeledOperator::new(labels, choi)?.canonicalize();
    Comb::with_consecutive_teeth(op)
}

/// `C_U = |U⟩⟩⟨⟨U|^{⊗(n+1)}` with tooth `i` on `(H_{2i−1}, H_{2i})`, `i = 1..n+1`.
pub fn c_u(u: &UnitaryMatrix, n: usize) -> Result<Comb> {
    let mut op = LabeledOperator::scalar(real(1.0));
    let mut teeth = Vec::new();
    for i in 1..=(n as u32 + 1) {
        op = op.kron(&choi_of_unitary(u, 2 * i, 2 * i - 1)?)?;
        teeth.push((2 * i - 1, 2 * i));
    }
    Comb::new(op.canonicalize(), teeth)
}

fn single_tooth(e: &Comb) -> Result<(u32, u32, usize)> {
    match e.teeth() {
        [(tin, tout)] => {
            let d = e.op().label_dim(*tin).expect("present");
            Ok((*tin, *tout, d))
        }
        _ => Err(Error::InvalidComb("expected a channel (one tooth)".into())),
    }
}

/// `(d/(d+1)) · (1 − tr(|U⟩⟩⟨⟨U| · C_E) / d²)`.
pub fn avg_case_distance_to_unitary(e: &Comb, u: &UnitaryMatrix) -> Result<f64> {
    let (tin, tout, d) = single_tooth(e)?;
    let cu = choi_of_unitary(u, tout, tin)?.aligned_to(e.op())?;
    let fid = (cu.matrix() * e.op().matrix()).trace().re;
    let d = d as f64;
    Ok(d / (d + 1.0) * (1.0 - fid / (d * d)))
}

/// `(1/d) ‖C_1 − C_2‖_1`, a lower bound on the diamond distance.
pub fn choi_trace_distance(e1: &Comb, e2: &Comb) -> Result<f64> {
    let (_, _, d) = single_tooth(e1)?;
    let diff = e1.op().sub(e2.op())?;
    Ok(trace_norm(diff.matrix()) / d as f64)
}

/// Whether `M ⊒ |ψ⟩⟨ψ|`, decided by `⟨ψ|M⁺|ψ⟩ ≤ 1 + tol` on the support of `M`.
///
/// Returns `false` when ψ has a component outside the support larger than
/// `tol · ‖ψ‖`, since then no multiple of `M` dominates `|ψ⟩⟨ψ|`.
pub fn loewner_dominates_rank_one(m: &CMat, psi: &CVec, tol: f64) -> bool {
    let eig = SymmetricEigen::new(hermitize(m));
    let top = eig.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let cutoff = tol.max(1e-12) * top.max(1.0);
    let mut quad = 0.0;
    let mut captured = 0.0;
    for (i, &lam) in eig.eigenvalues.iter().enumerate() {
        if lam > cutoff {
            let c = eig.eigenvectors.column(i).dotc(psi).norm_sqr();
            quad += c / lam;
            captured += c;
        }
    }
    let outside = Float::sqrt((psi.norm_squared() - captured).max(0.0));
    if outside > tol * psi.norm().max(1e-300) {
        return false;
    }
    quad <= 1.0 + tol
}
