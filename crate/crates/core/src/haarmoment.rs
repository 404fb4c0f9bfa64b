//! The Haar moment `E_U[|U⟩⟩⟨⟨U|^{⊗k}]` on labels `1..2k`, where copy `i`
//! sits on `(H_{2i}, H_{2i−1})` = (output, input).
//!
//! Three independent constructions are provided:
//!
//! * [`haar_moment_rep`]: the Schur-Weyl block formula
//!   `⊕_λ (1/dim Q_λ) I_{Q_λ} ⊗ I_{Q_λ} ⊗ |I_{P_λ}⟩⟩⟨⟨I_{P_λ}|` over the even
//!   register `(H_2, …, H_{2k})` and the odd register `(H_1, …, H_{2k−1})`;
//! * [`haar_moment_weingarten`]: entrywise Weingarten calculus;
//! * [`haar_moment_mc`]: a seeded Monte-Carlo average over Haar samples.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, ToPrimitive, Zero};

use crate::budget::Budget;
use crate::comb::vectorize;
use crate::error::{Error, Result};
use crate::linalg::{haar_unitary, kron, kron_vec, max_abs_diff, real, CMat, CVec};
use crate::operator::{uniform_labels, LabeledOperator};
use crate::rng::{derive_seed, from_seed};
use crate::schurweyl::{dim_q, perm_index_map, perm_matrix, schur_basis, SchurBasis};
use crate::symrep::{Permutation, YoungOrthogonalForm};
use crate::young::{enumerate_partitions, num_tableaux, YoungDiagram};

/// Even register ids `2, 4, …, 2k` followed by odd ids `1, 3, …, 2k−1`.
pub fn register_ids(k: usize) -> Vec<u32> {
    let k = k as u32;
    (1..=k).map(|i| 2 * i).chain((1..=k).map(|i| 2 * i - 1)).collect()
}

/// Schur-Weyl formula for the moment, given the Young basis of `(C^d)^{⊗k}`.
pub fn haar_moment_from_basis(basis: &SchurBasis) -> Result<LabeledOperator> {
    let (d, k) = (basis.d, basis.n);
    let half = basis.total_dim();
    let cols: usize = basis.blocks.iter().map(|b| b.dim_q * b.dim_q).sum();
    let mut v = CMat::zeros(half * half, cols);
    let mut c = 0;
    for b in &basis.blocks {
        let w = 1.0 / Float::sqrt(b.dim_q as f64);
        for r in 0..b.dim_q {
            for q in 0..b.dim_q {
                let mut col = CVec::zeros(half * half);
                for t in 0..b.dim_p() {
                    let even = b.vectors.column(b.column(r, t)).into_owned();
                    let odd = b.vectors.column(b.column(q, t)).into_owned();
                    col += kron_vec(&even, &odd);
                }
                v.set_column(c, &(col * real(w)));
                c += 1;
            }
        }
    }
    let m = &v * v.adjoint();
    Ok(LabeledOperator::new(uniform_labels(register_ids(k), d), m)?.canonicalize())
}

/// [`haar_moment_from_basis`] with a freshly built basis.
pub fn haar_moment_rep(d: usize, k: usize, budget: Budget) -> Result<LabeledOperator> {
    budget.check_dense("Haar moment", d.pow(2 * k as u32))?;
    let basis = schur_basis(d, k, budget)?;
    haar_moment_from_basis(&basis)
}

/// Exact Weingarten values of `S_k` at dimension `d`, keyed by cycle type.
///
/// `Wg(σ, d) = (1/k!²) Σ_{λ ⊢ k, ℓ(λ) ≤ d} (dim P_λ)² χ_λ(σ) / dim Q_λ(d)`.
#[derive(Debug, Clone)]
pub struct WeingartenTable {
    pub k: usize,
    pub d: usize,
    pub values: BTreeMap<YoungDiagram, BigRational>,
}

/// Characters of `S_k` are integers; the orthogonal-form trace is rounded.
fn integer_character(yof: &YoungOrthogonalForm, pi: &Permutation) -> Result<BigInt> {
    let x = yof.character(pi)?;
    let r = Float::round(x);
    if (x - r).abs() > 1e-6 {
        return Err(Error::InvalidArgument(alloc::format!("character {x} is not an integer")));
    }
    Ok(BigInt::from(r as i64))
}

fn cycle_class(pi: &Permutation) -> YoungDiagram {
    YoungDiagram::new(pi.cycle_type()).expect("cycle type is a partition")
}

impl WeingartenTable {
    pub fn new(d: usize, k: usize) -> Result<Self> {
        let perms = Permutation::all(k);
        let mut reps: BTreeMap<YoungDiagram, Permutation> = BTreeMap::new();
        for p in &perms {
            reps.entry(cycle_class(p)).or_insert_with(|| p.clone());
        }
        let kf: BigInt = (1..=k as u64).product::<u64>().into();
        let denom = &kf * &kf;
        let mut values = BTreeMap::new();
        let shapes = enumerate_partitions(k, Some(d));
        let forms: Vec<(YoungOrthogonalForm, BigInt, BigInt)> = shapes
            .iter()
            .map(|s| {
                let p = BigInt::from(num_tableaux(s));
                let q = BigInt::from(dim_q(s, d));
                (YoungOrthogonalForm::new(s), p, q)
            })
            .collect();
        for (class, rep) in reps {
            let mut acc = BigRational::zero();
            for (yof, p, q) in &forms {
                let chi = integer_character(yof, &rep)?;
                acc += BigRational::new(p * p * chi, q.clone());
            }
            values.insert(class, acc / BigRational::from_integer(denom.clone()));
        }
        Ok(WeingartenTable { k, d, values })
    }

    pub fn exact(&self, class: &YoungDiagram) -> Option<&BigRational> {
        self.values.get(class)
    }

    pub fn get(&self, pi: &Permutation) -> f64 {
        self.values[&cycle_class(pi)].to_f64().expect("finite")
    }
}

/// `Wg(σ, d)` for the class with the given cycle type.
pub fn weingarten(class: &YoungDiagram, d: usize) -> Result<f64> {
    let t = WeingartenTable::new(d, class.size())?;
    Ok(t.exact(class).and_then(|x| x.to_f64()).expect("class present"))
}

/// Largest order accepted by [`haar_moment_weingarten`].
pub const WEINGARTEN_MAX_K: usize = 4;

/// Moment assembled entrywise:
/// `E[Π U_{i_m j_m} Π Ū_{i′_m j′_m}] = Σ_{σ,τ} [i′∘σ = i][j′∘τ = j] Wg(τσ⁻¹, d)`.
pub fn haar_moment_weingarten(d: usize, k: usize) -> Result<LabeledOperator> {
    if k > WEINGARTEN_MAX_K {
        return Err(Error::InvalidArgument(alloc::format!("Weingarten assembly supports k ≤ {WEINGARTEN_MAX_K}")));
    }
    let table = WeingartenTable::new(d, k)?;
    let perms = Permutation::all(k);
    let maps: Vec<Vec<usize>> = perms.iter().map(|p| perm_index_map(p, d)).collect();
    let half = d.pow(k as u32);
    let mut m = CMat::zeros(half * half, half * half);
    for (si, sigma) in perms.iter().enumerate() {
        let sinv = sigma.inverse();
        for (ti, tau) in perms.iter().enumerate() {
            let w = table.get(&tau.compose(&sinv));
            if w == 0.0 {
                continue;
            }
            for i in 0..half {
                let ip = maps[si][i];
                for j in 0..half {
                    let jp = maps[ti][j];
                    m[(i * half + j, ip * half + jp)] += real(w);
                }
            }
        }
    }
    Ok(LabeledOperator::new(uniform_labels(register_ids(k), d), m)?.canonicalize())
}

/// Samples per Monte-Carlo shard; each shard draws from its own derived seed.
pub const MC_SHARD_SIZE: usize = 4096;

/// `(shard index, sample count)` for every shard of a run.
pub fn mc_shards(samples: usize) -> Vec<(u64, usize)> {
    (0..samples.div_ceil(MC_SHARD_SIZE))
        .map(|s| (s as u64, MC_SHARD_SIZE.min(samples - s * MC_SHARD_SIZE)))
        .collect()
}

fn pair_ids(k: usize) -> Vec<u32> {
    (1..=k as u32).flat_map(|i| [2 * i, 2 * i - 1]).collect()
}

/// Unnormalized sum of `|U⟩⟩⟨⟨U|^{⊗k}` over the samples of one shard,
/// on labels `(2, 1, 4, 3, …)`.
pub fn mc_shard_sum(d: usize, k: usize, master_seed: u64, shard: u64, count: usize) -> CMat {
    let mut rng = from_seed(derive_seed(master_seed, shard));
    let dim = d.pow(2 * k as u32);
    let mut acc = CMat::zeros(dim, dim);
    for _ in 0..count {
        let u = haar_unitary(d, &mut rng);
        let vu = vectorize(&u);
        let mut v = vu.clone();
        for _ in 1..k {
            v = kron_vec(&v, &vu);
        }
        acc.ger(real(1.0), &v, &v.conjugate(), real(1.0));
    }
    acc
}

/// Turns the in-order sum of shard sums into the moment operator.
pub fn mc_finish(sum: CMat, d: usize, k: usize, samples: usize) -> Result<LabeledOperator> {
    let m = sum / real(samples as f64);
    Ok(LabeledOperator::new(uniform_labels(pair_ids(k), d), m)?.canonicalize())
}

/// Monte-Carlo moment; shard sums are added in shard order, so any parallel
/// evaluation of [`mc_shard_sum`] merged in the same order is bit-identical.
pub fn haar_moment_mc(d: usize, k: usize, samples: usize, seed: u64) -> Result<LabeledOperator> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    let dim = d.pow(2 * k as u32);
    let mut sum = CMat::zeros(dim, dim);
    for (shard, count) in mc_shards(samples) {
        sum += mc_shard_sum(d, k, seed, shard, count);
    }
    mc_finish(sum, d, k, samples)
}

/// `‖[(V ⊗ W)^{⊗k}, M]‖_max` with `V` on outputs and `W` on inputs.
pub fn commutant_residual(moment: &LabeledOperator, v: &CMat, w: &CMat) -> Result<f64> {
    let k = moment.labels().len() / 2;
    let ordered = moment.reorder(&pair_ids(k))?;
    let vw = kron(v, w);
    let mut g = vw.clone();
    for _ in 1..k {
        g = kron(&g, &vw);
    }
    let m = ordered.matrix();
    Ok(max_abs_diff(&(&g * m), &(m * &g)))
}

/// `‖P^even(π) ⊗ P^odd(π) · M − M‖_max`.
pub fn permutation_residual(moment: &LabeledOperator, pi: &Permutation) -> Result<f64> {
    let k = pi.n();
    let d = moment.labels()[0].dim;
    let ordered = moment.reorder(&register_ids(k))?;
    let p = perm_matrix(pi, d);
    let g = kron(&p, &p);
    let m = ordered.matrix();
    Ok(max_abs_diff(&(&g * m), m).max(max_abs_diff(&(m * &g), m)))
}
