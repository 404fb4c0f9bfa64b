//! Stair operators `A_k` and the Löwner-order checks built on them.
//!
//! `A_k` acts on the even register `(H_2, H_4, …, H_{2k}, H_{2n+2})` (k+1
//! factors, `S_{k+1}` permuting them) and the odd register
//! `(H_1, H_3, …, H_{2k−1})` (k factors, `S_k`):
//!
//! `A_k = ⊕_{λ ⊢_d k+1} ⊕_{μ ↗ λ} c_{λμ} I_{Q_λ} ⊗ I_{Q_μ} ⊗ Σ_{T,S ∈ Tab(λ,μ)} |T⟩⟨S| ⊗ |T↓⟩⟨S↓|`
//!
//! with `c_{λμ} = dim P_λ / (dim P_μ · dim Q_λ)`. Each `(λ, μ)` term is
//! assembled as `c · W W†` where the columns of `W` are
//! `Σ_{T ∈ Tab(λ,μ)} |λ,q,T⟩ ⊗ |μ,q′,T↓⟩`.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::budget::Budget;
use crate::check::Check;
use crate::comb::{choi_of_unitary, Comb, UnitaryMatrix};
use crate::error::{Error, Result};
use crate::haarmoment::haar_moment_rep;
use crate::linalg::{hermitize, kron, max_eigenvalue, min_eigenvalue, op_norm, real, CMat, CVec};
use crate::operator::{uniform_labels, LabeledOperator, SystemLabel};
use crate::schurweyl::{dim_q_usize, schur_basis, SchurBasis, SchurBlock};
use crate::young::{dim_p, enumerate_partitions, enumerate_tableaux, StandardTableau, YoungDiagram};

/// Default Löwner tolerance, scaled by the operator norm.
pub const STAIR_TOL: f64 = 1e-8;

/// One `(λ, μ)` term of a stair operator.
#[derive(Debug, Clone)]
pub struct StairBlock {
    pub lambda: YoungDiagram,
    pub mu: YoungDiagram,
    /// `dim P_λ / (dim P_μ · dim Q_λ)`
    pub coefficient: BigRational,
    pub dim_q_lambda: usize,
    pub dim_q_mu: usize,
    /// `(index of T in Tab(λ), index of T↓ in Tab(μ))` for every `T ∈ Tab(λ,μ)`.
    pub pairs: Vec<(usize, usize)>,
}

/// `A_k` in block form together with its embedding on labeled registers.
#[derive(Debug, Clone)]
pub struct StairOperator {
    pub d: usize,
    pub n: usize,
    pub k: usize,
    pub blocks: Vec<StairBlock>,
    pub embedded: LabeledOperator,
}

/// Even register ids `2, 4, …, 2k, 2n+2`.
pub fn even_ids(n: usize, k: usize) -> Vec<u32> {
    let mut ids: Vec<u32> = (1..=k as u32).map(|i| 2 * i).collect();
    ids.push(2 * n as u32 + 2);
    ids
}

/// Odd register ids `1, 3, …, 2k−1`.
pub fn odd_ids(k: usize) -> Vec<u32> {
    (1..=k as u32).map(|i| 2 * i - 1).collect()
}

/// Block description of `A_k` at dimension `d`; no tensor space is touched.
pub fn stair_blocks(d: usize, k: usize) -> Vec<StairBlock> {
    let mut out = Vec::new();
    for lambda in enumerate_partitions(k + 1, Some(d)) {
        let upper = enumerate_tableaux(&lambda);
        let dql = dim_q_usize(&lambda, d);
        for mu in lambda.predecessors() {
            let lower = enumerate_tableaux(&mu);
            let pairs: Vec<(usize, usize)> = upper
                .iter()
                .enumerate()
                .filter(|(_, t)| t.lowered().shape() == &mu)
                .map(|(i, t)| (i, lower.binary_search(&t.lowered()).expect("T↓ is a tableau of μ")))
                .collect();
            let coefficient = BigRational::new(
                BigInt::from(dim_p(&lambda)),
                BigInt::from(dim_p(&mu)) * BigInt::from(dql),
            );
            out.push(StairBlock {
                dim_q_mu: dim_q_usize(&mu, d),
                lambda: lambda.clone(),
                mu,
                coefficient,
                dim_q_lambda: dql,
                pairs,
            });
        }
    }
    out
}

fn tableau_slab(block: &SchurBlock, t: usize) -> CMat {
    let cols: Vec<usize> = (0..block.dim_q).map(|q| block.column(q, t)).collect();
    block.vectors.select_columns(&cols)
}

/// Embedded `A_k` from a Young basis of the `(k+1)`-factor register (`upper`)
/// and of the `k`-factor register (`lower`); labels are canonical.
pub fn stair_embed(d: usize, n: usize, k: usize, upper: &SchurBasis, lower: &SchurBasis) -> Result<LabeledOperator> {
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(alloc::format!("stair index k={k} must lie in 1..={n}")));
    }
    if upper.d != d || lower.d != d || upper.n != k + 1 || lower.n != k {
        return Err(Error::InvalidArgument("Young bases do not match (d, k+1) and (d, k)".into()));
    }
    let dim = d.pow(2 * k as u32 + 1);
    let mut a = CMat::zeros(dim, dim);
    for sb in stair_blocks(d, k) {
        let (Some(ub), Some(lb)) = (upper.block(&sb.lambda), lower.block(&sb.mu)) else {
            return Err(Error::InvalidArgument(alloc::format!("missing block for {} or {}", sb.lambda, sb.mu)));
        };
        let mut w = CMat::zeros(dim, sb.dim_q_lambda * sb.dim_q_mu);
        for &(t, s) in &sb.pairs {
            w += kron(&tableau_slab(ub, t), &tableau_slab(lb, s));
        }
        let c = sb.coefficient.to_f64().expect("finite");
        a += (&w * w.adjoint()) * real(c);
    }
    let mut labels = uniform_labels(even_ids(n, k), d);
    labels.extend(uniform_labels(odd_ids(k), d));
    Ok(LabeledOperator::new(labels, a)?.canonicalize())
}

impl StairOperator {
    /// Builds both Young bases and the embedded operator.
    pub fn new(d: usize, n: usize, k: usize, budget: Budget) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::InvalidArgument(alloc::format!("stair index k={k} must lie in 1..={n}")));
        }
        budget.check_dense("stair operator", d.pow(2 * k as u32 + 1))?;
        let upper = schur_basis(d, k + 1, budget)?;
        let lower = schur_basis(d, k, budget)?;
        let embedded = stair_embed(d, n, k, &upper, &lower)?;
        Ok(StairOperator { d, n, k, blocks: stair_blocks(d, k), embedded })
    }

    /// `I_{H_{2k+1}} ⊗ A_k`, canonical.
    pub fn padded(&self) -> Result<LabeledOperator> {
        Ok(self.embedded.extend_identity(&[SystemLabel::new(2 * self.k as u32 + 1, self.d)])?)
    }
}

fn loewner_check(name: &str, gap: &CMat, reference: &CMat, tol: f64) -> Check {
    let scale = op_norm(&hermitize(reference)).max(1.0);
    let min = min_eigenvalue(&hermitize(gap));
    Check::at_least(name, min, -tol * scale).param("scale", scale)
}

/// `min eig(I_{H_{2n+1}} ⊗ A_n − E_U[C_U]) ≥ −tol · scale`.
pub fn check_lemma38(d: usize, n: usize, tol: f64, budget: Budget) -> Result<Check> {
    budget.check_dense("stair domination", d.pow(2 * n as u32 + 2))?;
    let stair = StairOperator::new(d, n, n, budget)?.padded()?;
    let moment = haar_moment_rep(d, n + 1, budget)?;
    let gap = stair.sub(&moment)?;
    Ok(loewner_check("stair_dominates_moment", gap.matrix(), stair.matrix(), tol)
        .param("d", d)
        .param("n", n))
}

/// For `k ≥ 2`: `min eig((k+1)/k · I_{H_{2k−1}} ⊗ A_{k−1} − tr_{H_{2k}} A_k) ≥ −tol · scale`.
/// For `k = 1`: `‖tr_{H_2} A_1 − (2/d) I_{H_1} ⊗ I_{H_{2n+2}}‖ ≤ tol`.
pub fn check_lemma39(d: usize, n: usize, k: usize, tol: f64, budget: Budget) -> Result<Check> {
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(alloc::format!("stair index k={k} must lie in 1..={n}")));
    }
    let upper = StairOperator::new(d, n, k, budget)?;
    let reduced = upper.embedded.partial_trace(&[2 * k as u32])?;
    if k == 1 {
        let target = LabeledOperator::identity(reduced.labels().to_vec())?.scale(real(2.0 / d as f64));
        let residual = op_norm(reduced.sub(&target)?.matrix());
        return Ok(Check::at_most("stair_base_case", residual, tol).param("d", d).param("n", n).param("k", 1));
    }
    let lower = StairOperator::new(d, n, k - 1, budget)?;
    let bound = lower
        .embedded
        .extend_identity(&[SystemLabel::new(2 * k as u32 - 1, d)])?
        .scale(real((k + 1) as f64 / k as f64));
    let gap = bound.sub(&reduced)?;
    Ok(loewner_check("stair_contraction", gap.matrix(), bound.matrix(), tol)
        .param("d", d)
        .param("n", n)
        .param("k", k))
}

/// Teeth `(0,1), (2,3), …, (2k, 2k+1)`.
pub fn protocol_teeth(k: usize) -> Vec<(u32, u32)> {
    (0..=k as u32).map(|j| (2 * j, 2 * j + 1)).collect()
}

/// `|U⟩⟩⟨⟨U|` on every tooth `(H_{2j}, H_{2j+1})`, `j = 0..=k`: a `(k+1)`-comb
/// that applies `U` at each step and forwards nothing between steps.
pub fn repeated_unitary_comb(u: &UnitaryMatrix, k: usize) -> Result<Comb> {
    let mut op = LabeledOperator::scalar(real(1.0));
    for j in 0..=k as u32 {
        op = op.kron(&choi_of_unitary(u, 2 * j + 1, 2 * j)?)?;
    }
    Comb::new(op.canonicalize(), protocol_teeth(k))
}

/// `max eig(X ⋆ (I_{H_{2k+1}} ⊗ A_k)) ≤ (k+1)/d + tol`, where `X` is a
/// `(k+1)`-comb on `H_0, …, H_{2k+1}`.
pub fn check_cor310(x: &Comb, stair: &StairOperator, tol: f64) -> Result<Check> {
    let (d, n, k) = (stair.d, stair.n, stair.k);
    if x.teeth() != protocol_teeth(k).as_slice() {
        return Err(Error::InvalidComb(alloc::format!("expected teeth (0,1)..({},{})", 2 * k, 2 * k + 1)));
    }
    let report = x.check(tol);
    if !report.valid {
        return Err(Error::InvalidComb(report.failure.unwrap_or_default()));
    }
    let out = x.link(&stair.padded()?)?;
    if out.ids() != vec![0, 2 * n as u32 + 2] {
        return Err(Error::InvalidComb(alloc::format!("contraction left labels {:?}", out.ids())));
    }
    let top = max_eigenvalue(&hermitize(out.matrix()));
    Ok(Check::at_most("stair_comb_contraction", top, (k + 1) as f64 / d as f64 + tol)
        .param("d", d)
        .param("n", n)
        .param("k", k))
}

/// `|Φ_μ^λ⟩ = Σ_{T ∈ Tab(λ,μ)} |T⟩|T⟩` in `P_λ ⊗ P_λ`, index `t · dim P_λ + t`.
pub fn phi_vector(lambda: &YoungDiagram, mu: &YoungDiagram) -> Result<CVec> {
    if lambda.box_over(mu).is_none() {
        return Err(Error::InvalidArgument(alloc::format!("{mu} is not obtained from {lambda} by removing a box")));
    }
    let tabs = enumerate_tableaux(lambda);
    let p = tabs.len();
    let mut v = CVec::zeros(p * p);
    for (t, tab) in tabs.iter().enumerate() {
        if tab.lowered().shape() == mu {
            v[t * p + t] = real(1.0);
        }
    }
    Ok(v)
}

/// `⟨ΣΦ| (Σ_μ c_μ |Φ_μ⟩⟨Φ_μ|)⁺ |ΣΦ⟩` with `c_μ = dim P_λ / dim P_μ`, in exact
/// arithmetic. Equals 1 because `Σ_μ dim P_μ = dim P_λ`.
///
/// The Φ vectors are linearly independent, so with Gram matrix `G` and
/// `C = diag(c)` the quantity is `(G1)ᵀ (G C G)⁻¹ (G1)`.
pub fn phi_gram_quantity(lambda: &YoungDiagram) -> Result<BigRational> {
    let mus = lambda.predecessors();
    let phis: Vec<Vec<BigRational>> = mus
        .iter()
        .map(|mu| {
            phi_vector(lambda, mu).map(|v| {
                v.iter().map(|z| BigRational::from_float(z.re).expect("entries are 0 or 1")).collect()
            })
        })
        .collect::<Result<_>>()?;
    let m = mus.len();
    let dot = |a: &[BigRational], b: &[BigRational]| a.iter().zip(b).fold(BigRational::zero(), |s, (x, y)| s + x * y);
    let g: Vec<Vec<BigRational>> = (0..m).map(|i| (0..m).map(|j| dot(&phis[i], &phis[j])).collect()).collect();
    let pl = BigInt::from(dim_p(lambda));
    let c: Vec<BigRational> = mus.iter().map(|mu| BigRational::new(pl.clone(), BigInt::from(dim_p(mu)))).collect();
    let gcg: Vec<Vec<BigRational>> = (0..m)
        .map(|i| (0..m).map(|j| (0..m).fold(BigRational::zero(), |s, l| s + &g[i][l] * &c[l] * &g[l][j])).collect())
        .collect();
    let g1: Vec<BigRational> = g.iter().map(|row| row.iter().fold(BigRational::zero(), |s, x| s + x)).collect();
    let x = solve_rational(gcg, g1.clone())
        .ok_or_else(|| Error::InvalidArgument("Φ vectors are linearly dependent".into()))?;
    Ok(dot(&g1, &x))
}

/// Gaussian elimination over the rationals; `None` when singular.
fn solve_rational(mut a: Vec<Vec<BigRational>>, mut b: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = BigRational::one() / &a[col][col];
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = &a[r][col] * &inv;
                for j in col..n {
                    let delta = &f * &a[col][j];
                    a[r][j] -= delta;
                }
                let delta = &f * &b[col];
                b[r] -= delta;
            }
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

/// Tableaux of `λ` whose largest entry sits in the box `λ / μ`.
pub fn stair_tableaux(lambda: &YoungDiagram, mu: &YoungDiagram) -> Vec<StandardTableau> {
    enumerate_tableaux(lambda).into_iter().filter(|t| t.lowered().shape() == mu).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comb::random_comb;
    use crate::linalg::{haar_unitary, hermiticity_residual, C64};
    use crate::rng::from_seed;

    fn yd(rows: &[usize]) -> YoungDiagram {
        YoungDiagram::new(rows.to_vec()).unwrap()
    }

    #[test]
    fn qubit_coefficients() {
        let blocks = stair_blocks(2, 1);
        assert_eq!(blocks.len(), 2);
        assert_eq!(blocks[0].lambda, yd(&[2]));
        assert_eq!(blocks[0].coefficient, BigRational::new(1.into(), 3.into()));
        assert_eq!(blocks[0].dim_q_lambda, 3);
        assert_eq!(blocks[1].lambda, yd(&[1, 1]));
        assert_eq!(blocks[1].coefficient, BigRational::one());
        assert_eq!(blocks[1].dim_q_lambda, 1);
    }

    #[test]
    fn hermitian_and_psd() {
        for (d, k) in [(2, 1), (2, 2), (3, 1)] {
            let a = StairOperator::new(d, k, k, Budget::default()).unwrap();
            let m = a.embedded.matrix();
            assert!(hermiticity_residual(m) <= 1e-12, "d={d} k={k}");
            assert!(min_eigenvalue(&hermitize(m)) >= -1e-10 * op_norm(m), "d={d} k={k}");
        }
    }

    #[test]
    fn labels_cover_both_registers() {
        let a = StairOperator::new(2, 3, 2, Budget::default()).unwrap();
        assert_eq!(a.embedded.ids(), vec![1, 2, 3, 4, 8]);
    }

    #[test]
    fn commutes_with_local_unitaries() {
        let (d, k) = (2, 2);
        let a = StairOperator::new(d, k, k, Budget::default()).unwrap();
        let mut rng = from_seed(5);
        let v = haar_unitary(d, &mut rng);
        let w = haar_unitary(d, &mut rng);
        // canonical ids 1,2,3,4,6: odd factors get W, even ones V
        let mut u = CMat::identity(1, 1);
        for id in a.embedded.ids() {
            u = kron(&u, if id % 2 == 0 { &v } else { &w });
        }
        let m = a.embedded.matrix();
        let r = (&u * m * u.adjoint() - m).norm();
        assert!(r <= 1e-8, "{r}");
    }

    #[test]
    fn base_case_is_exact() {
        for d in [2, 3] {
            let c = check_lemma39(d, 1, 1, 1e-10, Budget::default()).unwrap();
            assert!(c.passed, "{c:?}");
        }
    }

    #[test]
    fn contraction_step_holds() {
        let c = check_lemma39(2, 2, 2, STAIR_TOL, Budget::default()).unwrap();
        assert!(c.passed, "{c:?}");
    }

    #[test]
    fn domination_small() {
        for (d, n) in [(2, 1), (2, 2), (3, 1)] {
            let c = check_lemma38(d, n, STAIR_TOL, Budget::default()).unwrap();
            assert!(c.passed, "{c:?}");
        }
    }

    #[test]
    fn identity_comb_contracts_to_bound() {
        let a = StairOperator::new(2, 1, 1, Budget::default()).unwrap();
        let c = check_cor310(&repeated_unitary_comb(&UnitaryMatrix::identity(2), 1).unwrap(), &a, STAIR_TOL).unwrap();
        assert!(c.passed, "{c:?}");
        assert!(c.value <= 1.0 + 1e-9);
    }

    #[test]
    fn fixed_unitary_comb_contracts() {
        let a = StairOperator::new(2, 2, 2, Budget::default()).unwrap();
        let c = check_cor310(&repeated_unitary_comb(&UnitaryMatrix::haar(2, 11), 2).unwrap(), &a, STAIR_TOL).unwrap();
        assert!(c.passed, "{c:?}");
    }

    #[test]
    fn random_combs_contract() {
        for k in [1, 2] {
            let a = StairOperator::new(2, k, k, Budget::default()).unwrap();
            for seed in 0..10 {
                let x = random_comb(2, k + 1, 2, seed).unwrap();
                let c = check_cor310(&x, &a, STAIR_TOL).unwrap();
                assert!(c.passed, "k={k} seed={seed} {c:?}");
            }
        }
    }

    #[test]
    fn rejects_wrong_teeth() {
        let a = StairOperator::new(2, 1, 1, Budget::default()).unwrap();
        let x = random_comb(2, 1, 2, 0).unwrap();
        assert!(check_cor310(&x, &a, STAIR_TOL).is_err());
    }

    #[test]
    fn phi_vectors() {
        let v = phi_vector(&yd(&[2]), &yd(&[1])).unwrap();
        assert_eq!(v.norm_squared(), 1.0);
        let a = phi_vector(&yd(&[2, 1]), &yd(&[2])).unwrap();
        let b = phi_vector(&yd(&[2, 1]), &yd(&[1, 1])).unwrap();
        assert_eq!(a.norm_squared(), 1.0);
        assert_eq!(b.norm_squared(), 1.0);
        assert_eq!(a.dotc(&b), C64::new(0.0, 0.0));
        assert!(phi_vector(&yd(&[2, 1]), &yd(&[1])).is_err());

        let lambda = yd(&[3, 2, 1]);
        let total: f64 = lambda.predecessors().iter().map(|mu| phi_vector(&lambda, mu).unwrap().norm_squared()).sum();
        assert_eq!(total as usize, dim_p(&lambda));
        let sum = lambda
            .predecessors()
            .iter()
            .fold(CVec::zeros(dim_p(&lambda).pow(2)), |s, mu| s + phi_vector(&lambda, mu).unwrap());
        let p = dim_p(&lambda);
        for i in 0..p {
            for j in 0..p {
                assert_eq!(sum[i * p + j].re, if i == j { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn gram_quantity_is_one() {
        for n in 1..=5 {
            for lambda in enumerate_partitions(n + 1, None) {
                assert_eq!(phi_gram_quantity(&lambda).unwrap(), BigRational::one(), "{lambda}");
            }
        }
    }

    #[test]
    fn rational_solver() {
        let r = |x: i64| BigRational::from_integer(x.into());
        let a = vec![vec![r(0), r(1)], vec![r(2), r(0)]];
        let x = solve_rational(a, vec![r(3), r(4)]).unwrap();
        assert_eq!(x, vec![r(2), r(3)]);
        assert!(solve_rational(vec![vec![r(1), r(1)], vec![r(1), r(1)]], vec![r(0), r(0)]).is_none());
    }
}
