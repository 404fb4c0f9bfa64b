//! Schur-Weyl decomposition of `(C^d)^{⊗n}` into blocks `Q_λ ⊗ P_λ`.
//!
//! A permutation acts on tensor factors by
//! `P(π)|ψ_1⟩⋯|ψ_n⟩ = |ψ_{π⁻¹(1)}⟩⋯|ψ_{π⁻¹(n)}⟩`: the factor in position `j`
//! moves to position `π(j)`. The Young basis `|λ, q, T⟩` is built from chained
//! isotypic projectors for a reference tableau and transported to the other
//! tableaux with group-algebra matrix units, so that
//! `P(π)|λ,q,T⟩ = Σ_{T′} P_λ(π)_{T′T} |λ,q,T′⟩` in Young's orthogonal form.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::linalg::{column_span, kron, op_norm, real, CMat, CVec, ZERO};
use crate::operator::{uniform_labels, LabeledOperator, OperatorError, SystemLabel};
use crate::symrep::{isotypic_projector, Permutation, YoungOrthogonalForm};
use crate::young::{enumerate_partitions, num_tableaux, StandardTableau, YoungDiagram};

/// `out[i]`: index of `P(π)|e_i⟩` for `n = π.n()` factors of dimension `d`.
pub fn perm_index_map(pi: &Permutation, d: usize) -> Vec<usize> {
    let n = pi.n();
    let total = d.pow(n as u32);
    let mut stride = alloc::vec![1usize; n];
    for p in (0..n.saturating_sub(1)).rev() {
        stride[p] = stride[p + 1] * d;
    }
    let map = pi.map0();
    (0..total)
        .map(|i| (0..n).map(|j| (i / stride[j]) % d * stride[map[j]]).sum())
        .collect()
}

/// `P(π)` as a dense 0/1 matrix on `n` factors of dimension `d`.
pub fn perm_matrix(pi: &Permutation, d: usize) -> CMat {
    let map = perm_index_map(pi, d);
    let mut m = CMat::zeros(map.len(), map.len());
    for (i, &o) in map.iter().enumerate() {
        m[(o, i)] = real(1.0);
    }
    m
}

/// `P(π)` on the ordered factors `labels`; order, not ids, decides the action.
pub fn perm_action(pi: &Permutation, labels: &[SystemLabel]) -> Result<LabeledOperator> {
    let d = labels.first().map(|l| l.dim).unwrap_or(1);
    if let Some(l) = labels.iter().find(|l| l.dim != d) {
        return Err(OperatorError::DimMismatch { id: l.id, left: d, right: l.dim }.into());
    }
    if labels.len() != pi.n() {
        return Err(Error::InvalidArgument(alloc::format!(
            "permutation of {} points on {} factors",
            pi.n(),
            labels.len()
        )));
    }
    Ok(LabeledOperator::new(labels.to_vec(), perm_matrix(pi, d))?)
}

/// `P(π)v` without forming the matrix.
pub fn apply_perm(map: &[usize], v: &CMat) -> CMat {
    let mut out = CMat::zeros(v.nrows(), v.ncols());
    for (i, &o) in map.iter().enumerate() {
        out.set_row(o, &v.row(i));
    }
    out
}

/// Dimension of the polynomial `U_d` irrep `Q_λ`: `Π (d + c(□)) / Π h(□)`,
/// and 0 when λ has more than `d` rows.
pub fn dim_q(shape: &YoungDiagram, d: usize) -> BigUint {
    if shape.len() > d {
        return BigUint::zero();
    }
    let mut num = BigInt::from(1);
    let mut den = BigInt::from(1);
    for c in shape.cells() {
        num *= d as i64 + c.content();
        den *= shape.hook(c).expect("cell of the diagram") as i64;
    }
    (num / den).to_biguint().expect("non-negative")
}

pub fn dim_q_usize(shape: &YoungDiagram, d: usize) -> usize {
    dim_q(shape, d).to_usize().expect("dimension fits usize")
}

/// One isotypic block: columns `q · dimP + t` hold `|λ, q, T_t⟩`.
#[derive(Debug, Clone)]
pub struct SchurBlock {
    pub shape: YoungDiagram,
    pub tableaux: Vec<StandardTableau>,
    pub dim_q: usize,
    pub vectors: CMat,
}

impl SchurBlock {
    pub fn dim_p(&self) -> usize {
        self.tableaux.len()
    }

    pub fn column(&self, q: usize, t: usize) -> usize {
        q * self.dim_p() + t
    }

    pub fn tableau_index(&self, t: &StandardTableau) -> Option<usize> {
        self.tableaux.binary_search(t).ok()
    }

    /// `d^n × dimP` slab for a fixed multiplicity index.
    pub fn q_slab(&self, q: usize) -> CMat {
        let p = self.dim_p();
        self.vectors.columns(q * p, p).into_owned()
    }
}

/// Orthonormal Young basis of `(C^d)^{⊗n}`, one block per `λ ⊢ n` with
/// at most `d` rows, in partition order.
#[derive(Debug, Clone)]
pub struct SchurBasis {
    pub d: usize,
    pub n: usize,
    pub blocks: Vec<SchurBlock>,
}

const SPAN_THRESHOLD: f64 = 1e-6;

/// Builds the Young basis by projector chains and matrix-unit transport.
pub fn schur_basis(d: usize, n: usize, budget: Budget) -> Result<SchurBasis> {
    if d == 0 {
        return Err(Error::InvalidArgument("d must be positive".into()));
    }
    let total = d.pow(n as u32);
    budget.check_dense("Schur basis", total)?;
    let perms = Permutation::all(n);
    let maps: Vec<Vec<usize>> = perms.iter().map(|p| perm_index_map(p, d)).collect();
    // isotypic projector of each shape at each level, padded with identities
    let mut projectors: BTreeMap<YoungDiagram, CMat> = BTreeMap::new();
    let mut blocks = Vec::new();
    for shape in enumerate_partitions(n, Some(d)) {
        let yof = YoungOrthogonalForm::new(&shape);
        let tableaux = yof.tableaux().to_vec();
        let dq = dim_q_usize(&shape, d);
        let p = tableaux.len();

        let mut chain = CMat::identity(total, total);
        if let Some(t0) = tableaux.first() {
            for level in t0.chain() {
                if !projectors.contains_key(&level) {
                    let k = level.size();
                    let e = isotypic_projector(&level, |pi: &Permutation| perm_matrix(pi, d))?;
                    let pad = CMat::identity(d.pow((n - k) as u32), d.pow((n - k) as u32));
                    projectors.insert(level.clone(), kron(&e, &pad));
                }
                chain = &projectors[&level] * chain;
            }
        }
        let frame = column_span(&chain, SPAN_THRESHOLD);
        if frame.len() != dq {
            return Err(Error::InvalidArgument(alloc::format!(
                "multiplicity frame for {shape} has {} vectors, expected {dq}",
                frame.len()
            )));
        }
        let mut reference = CMat::zeros(total, dq);
        for (q, v) in frame.iter().enumerate() {
            reference.set_column(q, v);
        }

        let mut vectors = CMat::zeros(total, dq * p);
        let scale = p as f64 / perms.len() as f64;
        for (pi, map) in perms.iter().zip(&maps) {
            let rep = yof.matrix(pi)?.matrix;
            if rep.column(0).iter().all(|x| x.abs() < 1e-14) {
                continue;
            }
            let moved = apply_perm(map, &reference);
            for t in 0..p {
                let w = rep[(t, 0)] * scale;
                if w == 0.0 {
                    continue;
                }
                for q in 0..dq {
                    let mut col = vectors.column_mut(q * p + t);
                    col.axpy(real(w), &moved.column(q), real(1.0));
                }
            }
        }
        blocks.push(SchurBlock { shape, tableaux, dim_q: dq, vectors });
    }
    Ok(SchurBasis { d, n, blocks })
}

impl SchurBasis {
    pub fn block(&self, shape: &YoungDiagram) -> Option<&SchurBlock> {
        self.blocks.iter().find(|b| &b.shape == shape)
    }

    pub fn total_dim(&self) -> usize {
        self.d.pow(self.n as u32)
    }

    /// All basis vectors as columns, blocks in partition order.
    pub fn unitary(&self) -> CMat {
        let total = self.total_dim();
        let mut u = CMat::zeros(total, total);
        let mut c = 0;
        for b in &self.blocks {
            for j in 0..b.vectors.ncols() {
                u.set_column(c, &b.vectors.column(j));
                c += 1;
            }
        }
        u
    }

    pub fn vector(&self, shape: &YoungDiagram, q: usize, t: usize) -> Option<CVec> {
        let b = self.block(shape)?;
        Some(b.vectors.column(b.column(q, t)).into_owned())
    }

    /// `Σ_q Σ_{T,S} op[T,S] |λ,q,T⟩⟨λ,q,S|` as a dense matrix.
    pub fn embed(&self, shape: &YoungDiagram, op: &CMat) -> Result<CMat> {
        let b = self
            .block(shape)
            .ok_or_else(|| Error::InvalidArgument(alloc::format!("no block {shape} for d = {}", self.d)))?;
        if op.nrows() != b.dim_p() || op.ncols() != b.dim_p() {
            return Err(Error::InvalidArgument(alloc::format!(
                "tableau operator must be {0}x{0}",
                b.dim_p()
            )));
        }
        let total = self.total_dim();
        let mut out = CMat::zeros(total, total);
        for q in 0..b.dim_q {
            let v = b.q_slab(q);
            out += &v * op * v.adjoint();
        }
        Ok(out)
    }

    /// [`SchurBasis::embed`] on factors labeled `0..n`.
    pub fn embed_block(&self, shape: &YoungDiagram, op: &CMat) -> Result<LabeledOperator> {
        let labels = uniform_labels(0..self.n as u32, self.d);
        Ok(LabeledOperator::new(labels, self.embed(shape, op)?)?)
    }

    /// Inverse of [`SchurBasis::embed`] on the block: `(1/dimQ) Σ_q V_q† X V_q`.
    pub fn project_block(&self, shape: &YoungDiagram, x: &CMat) -> Option<CMat> {
        let b = self.block(shape)?;
        let mut acc = CMat::zeros(b.dim_p(), b.dim_p());
        for q in 0..b.dim_q {
            let v = b.q_slab(q);
            acc += v.adjoint() * x * &v;
        }
        Some(acc / real(b.dim_q as f64))
    }

    /// Largest deviation from `P(π)|λ,q,T⟩ = Σ_{T′} P_λ(π)_{T′T} |λ,q,T′⟩`.
    pub fn equivariance_residual(&self, pi: &Permutation) -> Result<f64> {
        let map = perm_index_map(pi, self.d);
        let mut worst: f64 = 0.0;
        for b in &self.blocks {
            let rep = YoungOrthogonalForm::new(&b.shape).matrix(pi)?.matrix.map(real);
            for q in 0..b.dim_q {
                let v = b.q_slab(q);
                let diff = apply_perm(&map, &v) - &v * &rep;
                worst = worst.max(diff.iter().map(|z| z.norm()).fold(0.0, f64::max));
            }
        }
        Ok(worst)
    }
}

/// `|T⟩⟨S|` on the tableau space of the block.
pub fn tableau_unit(dim_p: usize, t: usize, s: usize) -> CMat {
    let mut m = CMat::zeros(dim_p, dim_p);
    m[(t, s)] = real(1.0);
    m
}

fn block_or_err<'a>(basis: &'a SchurBasis, shape: &YoungDiagram) -> Result<&'a SchurBlock> {
    basis
        .block(shape)
        .ok_or_else(|| Error::InvalidArgument(alloc::format!("no block {shape} for d = {}", basis.d)))
}

/// Operator-norm distance between `embed_{n−1}(μ, |T⟩⟨S|) ⊗ I_{H_n}` and
/// `Σ_{λ: μ↗λ} embed_n(λ, |T^{↑λ}⟩⟨S^{↑λ}|)`; `H_n` is the last factor.
pub fn verify_raising(
    lower: &SchurBasis,
    upper: &SchurBasis,
    mu: &YoungDiagram,
    t: &StandardTableau,
    s: &StandardTableau,
) -> Result<f64> {
    let lb = block_or_err(lower, mu)?;
    let (ti, si) = tableau_pair(lb, t, s)?;
    let d = lower.d;
    let lhs = kron(&lower.embed(mu, &tableau_unit(lb.dim_p(), ti, si))?, &CMat::identity(d, d));
    let mut rhs = CMat::zeros(lhs.nrows(), lhs.ncols());
    for ub in &upper.blocks {
        let Some(cell) = ub.shape.box_over(mu) else { continue };
        let tu = t.raised(cell.row).expect("addable row");
        let su = s.raised(cell.row).expect("addable row");
        let (a, b) = tableau_pair(ub, &tu, &su)?;
        rhs += upper.embed(&ub.shape, &tableau_unit(ub.dim_p(), a, b))?;
    }
    Ok(op_norm(&(lhs - rhs)))
}

fn tableau_pair(b: &SchurBlock, t: &StandardTableau, s: &StandardTableau) -> Result<(usize, usize)> {
    let find = |x: &StandardTableau| {
        b.tableau_index(x)
            .ok_or_else(|| Error::InvalidArgument(alloc::format!("tableau {:?} has shape other than {}", x.word(), b.shape)))
    };
    Ok((find(t)?, find(s)?))
}

/// Norm distance between `tr_{H_n} embed_n(λ, |T⟩⟨S|)` and
/// `[Sh(T↓) = Sh(S↓)] · (dimQ_λ / dimQ_{Sh(T↓)}) · embed_{n−1}(Sh(T↓), |T↓⟩⟨S↓|)`.
pub fn verify_lowering(
    upper: &SchurBasis,
    lower: &SchurBasis,
    lambda: &YoungDiagram,
    t: &StandardTableau,
    s: &StandardTableau,
) -> Result<f64> {
    let ub = block_or_err(upper, lambda)?;
    let (ti, si) = tableau_pair(ub, t, s)?;
    let n = upper.n as u32;
    let full = LabeledOperator::new(
        uniform_labels(0..n, upper.d),
        upper.embed(lambda, &tableau_unit(ub.dim_p(), ti, si))?,
    )?;
    let lhs = full.partial_trace(&[n - 1])?.into_matrix();
    let (tl, sl) = (t.lowered(), s.lowered());
    let rhs = if tl.shape() == sl.shape() {
        let lb = block_or_err(lower, tl.shape())?;
        let (a, b) = tableau_pair(lb, &tl, &sl)?;
        let ratio = ub.dim_q as f64 / lb.dim_q as f64;
        lower.embed(tl.shape(), &tableau_unit(lb.dim_p(), a, b))? * real(ratio)
    } else {
        CMat::from_element(lhs.nrows(), lhs.ncols(), ZERO)
    };
    Ok(op_norm(&(lhs - rhs)))
}

/// `Σ_λ dimQ_λ · dimP_λ` over shapes with at most `d` rows; equals `d^n`.
pub fn dimension_count(d: usize, n: usize) -> BigUint {
    enumerate_partitions(n, None)
        .iter()
        .map(|s| dim_q(s, d) * num_tableaux(s))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use crate::young::enumerate_tableaux;
    use alloc::vec;

    fn yd(rows: &[usize]) -> YoungDiagram {
        YoungDiagram::new(rows.to_vec()).unwrap()
    }

    #[test]
    fn swap_on_two_qubits() {
        let s = perm_matrix(&Permutation::adjacent(2, 1).unwrap(), 2);
        assert_eq!(s[(1, 2)], real(1.0));
        assert_eq!(s[(2, 1)], real(1.0));
        assert_eq!(s[(0, 0)], real(1.0));
        assert!(max_abs_diff(&perm_matrix(&Permutation::identity(3), 2), &CMat::identity(8, 8)) == 0.0);
    }

    #[test]
    fn factor_moves_to_image_position() {
        // π = (1 2 3): factor 1 → position 2, 2 → 3, 3 → 1
        let pi = Permutation::new(vec![2, 3, 1]).unwrap();
        let map = perm_index_map(&pi, 3);
        // |a b c⟩ = |0 1 2⟩ → |c a b⟩ = |2 0 1⟩
        assert_eq!(map[5], 2 * 9 + 1);
    }

    #[test]
    fn perm_action_is_homomorphism() {
        let perms = Permutation::all(3);
        for p in &perms {
            for q in &perms {
                let lhs = perm_matrix(p, 3) * perm_matrix(q, 3);
                assert_eq!(lhs, perm_matrix(&p.compose(q), 3));
            }
        }
        let bad = vec![SystemLabel::new(0, 2), SystemLabel::new(1, 3)];
        assert!(perm_action(&Permutation::identity(2), &bad).is_err());
    }

    #[test]
    fn dim_q_instances() {
        for d in 2..7usize {
            assert_eq!(dim_q(&yd(&[2]), d), BigUint::from(d * (d + 1) / 2));
            assert_eq!(dim_q(&yd(&[1, 1]), d), BigUint::from(d * (d - 1) / 2));
            assert_eq!(dim_q(&yd(&[1]), d), BigUint::from(d));
        }
        assert!(dim_q(&yd(&[1, 1, 1]), 2).is_zero());
        for d in 2..4usize {
            for n in 0..7usize {
                assert_eq!(dimension_count(d, n), BigUint::from(d.pow(n as u32)));
            }
        }
    }

    #[test]
    fn qubit_pair_basis() {
        let b = schur_basis(2, 2, Budget::default()).unwrap();
        let sizes: Vec<(usize, usize)> = b.blocks.iter().map(|x| (x.dim_q, x.dim_p())).collect();
        assert_eq!(sizes, vec![(3, 1), (1, 1)]);
        let u = b.unitary();
        assert!(max_abs_diff(&(u.adjoint() * &u), &CMat::identity(4, 4)) < 1e-12);
        let anti = b.vector(&yd(&[1, 1]), 0, 0).unwrap();
        // singlet up to sign
        assert!((anti[1].norm() - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((anti[1] + anti[2]).norm() < 1e-12);
        let sym = b.embed(&yd(&[2]), &CMat::identity(1, 1)).unwrap();
        let swap = perm_matrix(&Permutation::adjacent(2, 1).unwrap(), 2);
        let p_sym = (CMat::identity(4, 4) + swap) * real(0.5);
        assert!(max_abs_diff(&sym, &p_sym) < 1e-12);
    }

    #[test]
    fn block_sizes_and_equivariance() {
        let b = schur_basis(2, 3, Budget::default()).unwrap();
        let sizes: Vec<(usize, usize)> = b.blocks.iter().map(|x| (x.dim_q, x.dim_p())).collect();
        assert_eq!(sizes, vec![(4, 1), (2, 2)]);
        for p in Permutation::all(3) {
            assert!(b.equivariance_residual(&p).unwrap() < 1e-10);
        }
        let b = schur_basis(3, 2, Budget::default()).unwrap();
        let total: usize = b.blocks.iter().map(|x| x.dim_q * x.dim_p()).sum();
        assert_eq!(total, 9);
    }

    #[test]
    fn embed_round_trip() {
        let b = schur_basis(3, 3, Budget::default()).unwrap();
        let shape = yd(&[2, 1]);
        let op = CMat::from_fn(2, 2, |i, j| crate::linalg::C64::new(i as f64 + 0.5, j as f64 - 0.25));
        let big = b.embed(&shape, &op).unwrap();
        let back = b.project_block(&shape, &big).unwrap();
        assert!(max_abs_diff(&back, &op) < 1e-10);
    }

    #[test]
    fn lowering_examples() {
        let b1 = schur_basis(2, 1, Budget::default()).unwrap();
        let b2 = schur_basis(2, 2, Budget::default()).unwrap();
        for shape in [yd(&[2]), yd(&[1, 1])] {
            let t = &enumerate_tableaux(&shape)[0];
            assert!(verify_lowering(&b2, &b1, &shape, t, t).unwrap() < 1e-10);
        }
        let t = &enumerate_tableaux(&yd(&[1]))[0];
        assert!(verify_raising(&b1, &b2, &yd(&[1]), t, t).unwrap() < 1e-10);
    }

    #[test]
    fn refuses_over_budget() {
        assert!(matches!(schur_basis(3, 6, Budget(1 << 20)), Err(Error::BudgetExceeded { .. })));
    }
}
