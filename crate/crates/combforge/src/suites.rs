//! Verification suites behind `combforge verify`.
//!
//! Each suite either runs on the `(d, n)` given on the command line or, when
//! neither is given, on its fixed desk-scale ladder. Instances run in parallel
//! and their checks are collected in ladder order, so reports do not depend
//! on scheduling.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use combforge_core::certify::{
    certify, depolarizing_protocol, identity_through_protocol, implied_query_bound, protocol_moment,
    score_with_moment, thm36_negative_control, Metric,
};
use combforge_core::check::Check;
use combforge_core::comb::{random_comb, UnitaryMatrix};
use combforge_core::haarmoment::{
    commutant_residual, haar_moment_rep, haar_moment_weingarten, mc_finish, mc_shard_sum, mc_shards,
    permutation_residual, register_ids, WEINGARTEN_MAX_K,
};
use combforge_core::linalg::{haar_unitary, hermitize, max_abs_diff, min_eigenvalue, op_norm, CMat};
use combforge_core::operator::LabeledOperator;
use combforge_core::rng::{derive_seed, from_seed};
use combforge_core::schurweyl::{dim_q, dimension_count, schur_basis, verify_lowering, verify_raising};
use combforge_core::stair::{check_cor310, check_lemma38, check_lemma39, repeated_unitary_comb, StairOperator};
use combforge_core::symrep::{Permutation, YoungOrthogonalForm};
use combforge_core::young::{
    add_box_ratio, check_hook_ratio_identity, check_inverse_square_identity, check_lagrange_identity,
    check_zero_sum_identity, enumerate_partitions, interlacing, num_tableaux, remove_box_ratio, YoungDiagram,
};
use combforge_core::Budget;
use num_bigint::BigUint;
use num_rational::BigRational as Rational;
use num_traits::Zero;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::report::{ConfigEcho, ReportFormat, VerificationReport};

/// Exact-equality residual allowed for the k = 1 stair contraction.
pub const BASE_CASE_TOL: f64 = 1e-10;
/// Residual allowed for symmetric-group relations.
pub const REP_TOL: f64 = 1e-10;
/// Residual allowed for raising and lowering.
pub const RAISE_LOWER_TOL: f64 = 1e-8;
/// Young-basis unitarity and equivariance.
pub const BASIS_TOL: f64 = 1e-10;
/// Operator-norm distance between the block and Weingarten moments.
pub const WEINGARTEN_TOL: f64 = 1e-9;
/// Operator-norm distance between the block moment and Monte Carlo.
pub const MC_TOL: f64 = 3e-2;
/// Moment symmetry residuals.
pub const SYMMETRY_TOL: f64 = 1e-8;
/// Random combs per instance in the comb suites.
pub const COMBS_PER_INSTANCE: usize = 50;
/// Largest dense dimension accepted by the operator suites.
pub const MAX_DENSE_DIM: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    YoungIdentities,
    Symrep,
    Schurweyl,
    RaisingLowering,
    Haar,
    Lemma38,
    Lemma39,
    Cor310,
    Thm36,
    All,
}

impl Suite {
    /// Every suite that `all` runs, in order.
    pub const EACH: [Suite; 9] = [
        Suite::YoungIdentities,
        Suite::Symrep,
        Suite::Schurweyl,
        Suite::RaisingLowering,
        Suite::Haar,
        Suite::Lemma38,
        Suite::Lemma39,
        Suite::Cor310,
        Suite::Thm36,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::YoungIdentities => "young-identities",
            Suite::Symrep => "symrep",
            Suite::Schurweyl => "schurweyl",
            Suite::RaisingLowering => "raising-lowering",
            Suite::Haar => "haar",
            Suite::Lemma38 => "lemma38",
            Suite::Lemma39 => "lemma39",
            Suite::Cor310 => "cor310",
            Suite::Thm36 => "thm36",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .iter()
            .chain([Suite::All].iter())
            .copied()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown suite {s:?}")))
    }
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub d: Option<usize>,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub tol: f64,
    pub seed: u64,
    pub samples: usize,
    pub budget: Budget,
    pub threads: Option<usize>,
    pub format: ReportFormat,
    pub out: Option<PathBuf>,
}

impl SuiteConfig {
    pub const DEFAULT_TOL: f64 = 1e-8;
    pub const DEFAULT_SEED: u64 = 0;
    pub const DEFAULT_SAMPLES: usize = 100_000;

    pub fn new(suite: Suite) -> Self {
        SuiteConfig {
            suite,
            d: None,
            n: None,
            k: None,
            tol: Self::DEFAULT_TOL,
            seed: Self::DEFAULT_SEED,
            samples: Self::DEFAULT_SAMPLES,
            budget: Budget::default(),
            threads: None,
            format: ReportFormat::Json,
            out: None,
        }
    }

    pub fn with_dn(mut self, d: usize, n: usize) -> Self {
        self.d = Some(d);
        self.n = Some(n);
        self
    }

    fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            d: self.d,
            n: self.n,
            k: self.k,
            tol: self.tol,
            seed: self.seed,
            samples: self.samples,
            budget_bytes: self.budget.bytes(),
        }
    }

    /// Rejects configurations outside the supported ranges.
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::Config(format!("tol must be positive, got {}", self.tol)));
        }
        if self.d == Some(0) {
            return Err(Error::Config("d must be at least 1".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        let suites: Vec<Suite> = if self.suite == Suite::All { Suite::EACH.to_vec() } else { vec![self.suite] };
        for s in suites {
            self.validate_for(s)?;
        }
        Ok(())
    }

    fn validate_for(&self, suite: Suite) -> Result<()> {
        let too_big = |what: &str| Err(Error::Config(format!("{what} is outside the supported size ladder")));
        let own = self.suite == suite;
        match suite {
            Suite::YoungIdentities if own && self.n.is_some_and(|n| n > 14) => too_big("n > 14"),
            Suite::Symrep if own && self.n.is_some_and(|n| n > 7) => too_big("n > 7"),
            Suite::Schurweyl | Suite::RaisingLowering => {
                let (d, n) = (self.d.unwrap_or(2), self.n.unwrap_or(1));
                if n > 7 || dense_dim(d, n).is_none() {
                    return too_big("d^n");
                }
                Ok(())
            }
            Suite::Haar => {
                let (d, k) = (self.d.unwrap_or(2), self.haar_k());
                if k == 0 {
                    return Err(Error::Config("moment order k must be at least 1".into()));
                }
                if k > 7 || dense_dim(d, 2 * k).is_none() {
                    return too_big("d^(2k)");
                }
                Ok(())
            }
            Suite::Lemma38 | Suite::Lemma39 | Suite::Cor310 | Suite::Thm36 => {
                let (d, n) = (self.d.unwrap_or(2), self.n.unwrap_or(1));
                if d < 2 {
                    return Err(Error::Config("stair and comb suites need d ≥ 2".into()));
                }
                if n == 0 {
                    return Err(Error::Config("n must be at least 1".into()));
                }
                if dense_dim(d, 2 * n + 2).is_none() {
                    return too_big("d^(2n+2)");
                }
                if let Some(k) = self.k {
                    if matches!(suite, Suite::Lemma39 | Suite::Cor310) && (k == 0 || k > n) {
                        return Err(Error::Config(format!("k must lie in 1..={n}")));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    fn haar_k(&self) -> usize {
        self.k.or(self.n.map(|n| n + 1)).unwrap_or(2)
    }

    /// The explicit `(d, n)` instance, the ladder filtered to whichever of
    /// `d`, `n` was given, or the whole ladder.
    fn instances(&self, ladder: &[(usize, usize)]) -> Vec<(usize, usize)> {
        match (self.d, self.n) {
            (Some(d), Some(n)) => vec![(d, n)],
            (None, None) => ladder.to_vec(),
            (d, n) => {
                let picked: Vec<_> = ladder
                    .iter()
                    .copied()
                    .filter(|&(ld, ln)| d.is_none_or(|x| x == ld) && n.is_none_or(|x| x == ln))
                    .collect();
                if picked.is_empty() {
                    vec![(d.unwrap_or(2), n.unwrap_or(1))]
                } else {
                    picked
                }
            }
        }
    }
}

fn dense_dim(d: usize, factors: usize) -> Option<usize> {
    d.checked_pow(factors as u32).filter(|&x| x <= MAX_DENSE_DIM)
}

/// Runs the configured suite on a pool of `threads` workers (all cores by default).
pub fn run_suite(cfg: &SuiteConfig) -> Result<VerificationReport> {
    cfg.validate()?;
    let start = Instant::now();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cfg.threads {
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| Error::Config(e.to_string()))?;
    let checks = pool.install(|| suite_checks(cfg))?;
    let elapsed = start.elapsed().as_millis() as u64;
    Ok(VerificationReport::new(cfg.suite.name(), cfg.echo(), checks, elapsed))
}

fn suite_checks(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    match cfg.suite {
        Suite::YoungIdentities => young_identities(cfg),
        Suite::Symrep => symrep(cfg),
        Suite::Schurweyl => schurweyl(cfg),
        Suite::RaisingLowering => raising_lowering(cfg),
        Suite::Haar => haar(cfg),
        Suite::Lemma38 => lemma38(cfg),
        Suite::Lemma39 => lemma39(cfg),
        Suite::Cor310 => cor310(cfg),
        Suite::Thm36 => thm36(cfg),
        Suite::All => {
            let mut out = Vec::new();
            for s in Suite::EACH {
                let mut sub = cfg.clone();
                sub.suite = s;
                // the purely combinatorial suites keep their own ladders
                if matches!(s, Suite::YoungIdentities | Suite::Symrep) {
                    sub.n = None;
                }
                out.extend(suite_checks(&sub)?.into_iter().map(|c| c.param("suite", s.name())));
            }
            Ok(out)
        }
    }
}

fn collect<T: Send, F>(items: Vec<T>, f: F) -> Result<Vec<Check>>
where
    F: Fn(T) -> Result<Vec<Check>> + Sync + Send,
{
    let parts: Vec<Result<Vec<Check>>> = items.into_par_iter().map(f).collect();
    let mut out = Vec::new();
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

fn instance_seed(master: u64, d: usize, n: usize, k: usize) -> u64 {
    derive_seed(master, (d * 1_000_000 + n * 1_000 + k) as u64)
}

// ---------------------------------------------------------------- young

fn rational(p: i64, q: i64) -> Rational {
    Rational::new(p.into(), q.into())
}

fn identity_checks(n: usize) -> Result<Vec<Check>> {
    let shapes = enumerate_partitions(n, None);
    let mut nonzero = [0usize; 3];
    let mut tuples = [0usize; 3];
    let mut record = |i: usize, r: Rational| {
        tuples[i] += 1;
        if !r.is_zero() {
            nonzero[i] += 1;
        }
    };
    for mu in &shapes {
        for nu in &shapes {
            if mu != nu && mu.intersection(nu).size() + 1 == n {
                record(0, check_hook_ratio_identity(mu, nu).map_err(combforge_core::Error::from)?);
            }
        }
    }
    for nu in &shapes {
        let parents = nu.predecessors();
        for tau in &parents {
            record(2, check_inverse_square_identity(nu, tau).map_err(combforge_core::Error::from)?);
            for kappa in &parents {
                if tau != kappa {
                    record(1, check_zero_sum_identity(nu, tau, kappa).map_err(combforge_core::Error::from)?);
                }
            }
        }
    }
    let names = ["hook_ratio_identity", "zero_sum_identity", "inverse_square_identity"];
    Ok((0..3)
        .map(|i| {
            Check::exact_zero(names[i], nonzero[i] == 0, nonzero[i] as f64)
                .param("n", n)
                .param("tuples", tuples[i])
        })
        .collect())
}

fn kerov_checks(n: usize) -> Result<Vec<Check>> {
    let mut mismatches = 0usize;
    let mut transitions = 0usize;
    let ratio = |a: &YoungDiagram, b: &YoungDiagram| {
        Rational::new(num_tableaux(a).into(), num_tableaux(b).into())
    };
    for shape in enumerate_partitions(n, None) {
        let seq = interlacing(&shape);
        for lambda in shape.successors() {
            let c = lambda.box_over(&shape).expect("successor").content();
            let k = seq.alphas.iter().position(|&a| a == c).expect("addable content is an alpha");
            transitions += 1;
            if add_box_ratio(&shape, k).map_err(combforge_core::Error::from)? != ratio(&lambda, &shape) {
                mismatches += 1;
            }
        }
        for mu in shape.predecessors() {
            let c = shape.box_over(&mu).expect("predecessor").content();
            let k = seq.betas.iter().position(|&b| b == c).expect("removable content is a beta");
            transitions += 1;
            if remove_box_ratio(&shape, k).map_err(combforge_core::Error::from)? != ratio(&mu, &shape) {
                mismatches += 1;
            }
        }
    }
    Ok(vec![Check::exact_zero("kerov_transition_ratios", mismatches == 0, mismatches as f64)
        .param("n", n)
        .param("transitions", transitions)])
}

fn lagrange_check(seed: u64, instances: usize) -> Result<Check> {
    let mut rng = from_seed(derive_seed(seed, 0x4c41_4752));
    let mut failures = 0usize;
    for _ in 0..instances {
        let l = rng.gen_range(2..=6usize);
        let mut values: Vec<Rational> = Vec::with_capacity(2 * l - 1);
        while values.len() < 2 * l - 1 {
            let v = rational(rng.gen_range(-60..=60), rng.gen_range(1..=9));
            if !values.contains(&v) {
                values.push(v);
            }
        }
        let m = rng.gen_range(1..l);
        let r = check_lagrange_identity(&values[..l], &values[l..], m).map_err(combforge_core::Error::from)?;
        if !r.is_zero() {
            failures += 1;
        }
    }
    Ok(Check::exact_zero("lagrange_identity", failures == 0, failures as f64).param("instances", instances))
}

fn young_identities(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let max_identity = cfg.n.unwrap_or(8);
    let max_kerov = cfg.n.unwrap_or(12);
    let mut out = collect((1..=max_identity).collect(), identity_checks)?;
    out.extend(collect((0..=max_kerov).collect(), kerov_checks)?);
    out.push(lagrange_check(cfg.seed, 1000)?);
    let s = interlacing(&YoungDiagram::new(vec![6, 5, 3, 3, 2, 1, 1, 1]).map_err(combforge_core::Error::from)?);
    let stated = s.alphas == [-8, -4, -2, 1, 4, 6] && s.betas == [-7, -3, -1, 3, 5];
    out.push(Check::exact_zero("stated_interlacing_sequence", stated, if stated { 0.0 } else { 1.0 }));
    Ok(out)
}

// ---------------------------------------------------------------- symrep

fn max_entry(m: &CMat) -> f64 {
    m.iter().fold(0.0f64, |a, x| a.max(x.norm()))
}

fn symrep_checks(n: usize, seed: u64) -> Result<Vec<Check>> {
    let shapes = enumerate_partitions(n, None);
    let perms = Permutation::all(n);
    let sym = |e: combforge_core::symrep::SymRepError| Error::Core(e.into());
    let mut relations = 0.0f64;
    let mut homomorphism = 0.0f64;
    let mut branching = 0.0f64;
    let pairs: Vec<(usize, usize)> = if perms.len() <= 24 {
        (0..perms.len()).flat_map(|i| (0..perms.len()).map(move |j| (i, j))).collect()
    } else {
        let mut rng = from_seed(derive_seed(seed, n as u64));
        (0..200).map(|_| (rng.gen_range(0..perms.len()), rng.gen_range(0..perms.len()))).collect()
    };
    let mut table: Vec<Vec<f64>> = Vec::new();
    for shape in &shapes {
        let yof = YoungOrthogonalForm::new(shape);
        let id = CMat::identity(yof.dim(), yof.dim());
        let gens = (1..n)
            .map(|i| yof.transposition(i).map(|m| m.to_complex()))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(sym)?;
        for (i, s) in gens.iter().enumerate() {
            relations = relations.max(max_entry(&(s * s - &id)));
            relations = relations.max(max_entry(&(s.transpose() - s)));
            if let Some(t) = gens.get(i + 1) {
                relations = relations.max(max_entry(&(s * t * s - t * s * t)));
            }
            for t in gens.iter().skip(i + 2) {
                relations = relations.max(max_entry(&(s * t - t * s)));
            }
        }
        for &(a, b) in &pairs {
            let lhs = yof.matrix(&perms[a].compose(&perms[b])).map_err(sym)?.to_complex();
            let rhs = yof.matrix(&perms[a]).map_err(sym)?.to_complex() * yof.matrix(&perms[b]).map_err(sym)?.to_complex();
            homomorphism = homomorphism.max(max_entry(&(lhs - rhs)));
        }
        table.push(perms.iter().map(|p| yof.character(p)).collect::<std::result::Result<_, _>>().map_err(sym)?);
        if n >= 2 {
            let tabs = yof.tableaux();
            for pi in Permutation::all(n - 1) {
                let big = yof.matrix(&pi.extend(n)).map_err(sym)?.matrix;
                for mu in shape.predecessors() {
                    let small = YoungOrthogonalForm::new(&mu).matrix(&pi).map_err(sym)?.matrix;
                    let rows: Vec<usize> = (0..tabs.len()).filter(|&t| tabs[t].lowered().shape() == &mu).collect();
                    for (a, &i) in rows.iter().enumerate() {
                        for j in 0..tabs.len() {
                            let want = rows.iter().position(|&r| r == j).map_or(0.0, |b| small[(a, b)]);
                            branching = branching.max((big[(i, j)] - want).abs());
                        }
                    }
                }
            }
        }
    }
    let mut orthogonality = 0.0f64;
    for (i, a) in table.iter().enumerate() {
        for (j, b) in table.iter().enumerate() {
            let ip = a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() / perms.len() as f64;
            orthogonality = orthogonality.max((ip - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    let dim_sum: usize = shapes.iter().map(|s| YoungOrthogonalForm::new(s).dim().pow(2)).sum();
    let dims_ok = dim_sum == perms.len();
    Ok(vec![
        Check::at_most("coxeter_relations", relations, REP_TOL).param("n", n),
        Check::at_most("homomorphism", homomorphism, REP_TOL).param("n", n).param("pairs", pairs.len()),
        Check::at_most("character_orthogonality", orthogonality, REP_TOL).param("n", n),
        Check::at_most("branching_block_diagonal", branching, REP_TOL).param("n", n),
        Check::exact_zero("dimension_squares_sum_to_factorial", dims_ok, (dim_sum as f64 - perms.len() as f64).abs())
            .param("n", n),
    ])
}

fn symrep(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let seed = cfg.seed;
    collect((1..=cfg.n.unwrap_or(6)).collect(), |n| symrep_checks(n, seed))
}

// ---------------------------------------------------------------- schur-weyl

const SCHUR_LADDER: [(usize, usize); 7] = [(2, 1), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (3, 3)];

fn schurweyl(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let budget = cfg.budget;
    let mut out = collect(cfg.instances(&SCHUR_LADDER), |(d, n)| {
        let basis = schur_basis(d, n, budget)?;
        let u = basis.unitary();
        let dim = u.nrows();
        let unitarity = max_abs_diff(&(u.adjoint() * &u), &CMat::identity(dim, dim));
        let mut equivariance = 0.0f64;
        for pi in Permutation::all(n) {
            equivariance = equivariance.max(basis.equivariance_residual(&pi)?);
        }
        let count_ok = dimension_count(d, n) == BigUint::from(d).pow(n as u32);
        Ok(vec![
            Check::at_most("young_basis_unitarity", unitarity, BASIS_TOL).param("d", d).param("n", n),
            Check::at_most("young_basis_equivariance", equivariance, BASIS_TOL).param("d", d).param("n", n),
            Check::exact_zero("dimension_count", count_ok, if count_ok { 0.0 } else { 1.0 }).param("d", d).param("n", n),
        ])
    })?;
    let ds: Vec<usize> = match cfg.d {
        Some(d) => vec![d],
        None => vec![2, 3, 4, 5],
    };
    for d in ds {
        let shape = |r: &[usize]| YoungDiagram::new(r.to_vec()).expect("valid shape");
        let cases = [
            ("dim_q_symmetric", shape(&[2]), d * (d + 1) / 2),
            ("dim_q_antisymmetric", shape(&[1, 1]), d * d.saturating_sub(1) / 2),
            ("dim_q_single_box", shape(&[1]), d),
        ];
        for (name, s, want) in cases {
            let ok = dim_q(&s, d) == BigUint::from(want);
            out.push(Check::exact_zero(name, ok, if ok { 0.0 } else { 1.0 }).param("d", d));
        }
    }
    Ok(out)
}

const RAISE_LADDER: [(usize, usize); 5] = [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3)];

fn raising_lowering(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let instances: Vec<(usize, usize)> = match (cfg.d, cfg.n) {
        (Some(d), Some(n)) => (2..=n).map(|m| (d, m)).collect(),
        _ => cfg.instances(&RAISE_LADDER),
    };
    let budget = cfg.budget;
    collect(instances, |(d, n)| {
        let lower = schur_basis(d, n - 1, budget)?;
        let upper = schur_basis(d, n, budget)?;
        let mut raise = 0.0f64;
        let mut pairs = 0usize;
        for b in &lower.blocks {
            for t in &b.tableaux {
                for s in &b.tableaux {
                    raise = raise.max(verify_raising(&lower, &upper, &b.shape, t, s)?);
                    pairs += 1;
                }
            }
        }
        let mut lower_res = 0.0f64;
        for b in &upper.blocks {
            for t in &b.tableaux {
                for s in &b.tableaux {
                    lower_res = lower_res.max(verify_lowering(&upper, &lower, &b.shape, t, s)?);
                    pairs += 1;
                }
            }
        }
        Ok(vec![
            Check::at_most("raising", raise, RAISE_LOWER_TOL).param("d", d).param("n", n),
            Check::at_most("lowering", lower_res, RAISE_LOWER_TOL).param("d", d).param("n", n).param("pairs", pairs),
        ])
    })
}

// ---------------------------------------------------------------- haar

const HAAR_LADDER: [(usize, usize); 5] = [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2)];

/// Monte-Carlo moment with shards evaluated in parallel and summed in shard order.
pub fn parallel_mc(d: usize, k: usize, samples: usize, seed: u64) -> Result<LabeledOperator> {
    if samples == 0 {
        return Err(Error::Config("samples must be at least 1".into()));
    }
    let sums: Vec<CMat> =
        mc_shards(samples).into_par_iter().map(|(shard, count)| mc_shard_sum(d, k, seed, shard, count)).collect();
    let dim = d.pow(2 * k as u32);
    let total = sums.into_iter().fold(CMat::zeros(dim, dim), |acc, s| acc + s);
    Ok(mc_finish(total, d, k, samples)?)
}

fn haar_instance(d: usize, k: usize, mc_samples: usize, seed: u64, budget: Budget) -> Result<Vec<Check>> {
    let rep = haar_moment_rep(d, k, budget)?;
    let mut out = Vec::new();
    if k <= WEINGARTEN_MAX_K {
        let wg = haar_moment_weingarten(d, k)?;
        let diff = op_norm(rep.sub(&wg)?.matrix());
        out.push(Check::at_most("rep_vs_weingarten", diff, WEINGARTEN_TOL).param("d", d).param("k", k));
    }
    if mc_samples > 0 {
        let mc = parallel_mc(d, k, mc_samples, seed)?;
        let diff = op_norm(rep.sub(&mc)?.matrix());
        out.push(Check::at_most("rep_vs_monte_carlo", diff, MC_TOL).param("d", d).param("k", k).param("samples", mc_samples));
    }
    let dk = (d as f64).powi(k as i32);
    out.push(Check::at_most("moment_trace", (rep.trace().re - dk).abs(), 1e-9 * dk).param("d", d).param("k", k));
    let evens: Vec<u32> = register_ids(k).into_iter().filter(|id| id % 2 == 0).collect();
    let odd_marginal = rep.partial_trace(&evens)?;
    let dim = odd_marginal.dim();
    let marginal = max_abs_diff(odd_marginal.matrix(), &CMat::identity(dim, dim));
    out.push(Check::at_most("output_marginal_identity", marginal, 1e-9).param("d", d).param("k", k));
    let min = min_eigenvalue(&hermitize(rep.matrix()));
    out.push(Check::at_least("moment_psd", min, -1e-10).param("d", d).param("k", k));
    let mut rng = from_seed(derive_seed(seed, (d * 100 + k) as u64));
    let mut commutant = 0.0f64;
    for _ in 0..10 {
        let v = haar_unitary(d, &mut rng);
        let w = haar_unitary(d, &mut rng);
        commutant = commutant.max(commutant_residual(&rep, &v, &w)?);
    }
    out.push(Check::at_most("local_unitary_invariance", commutant, SYMMETRY_TOL).param("d", d).param("k", k));
    let mut perm = 0.0f64;
    for pi in Permutation::all(k) {
        perm = perm.max(permutation_residual(&rep, &pi)?);
    }
    out.push(Check::at_most("simultaneous_permutation_invariance", perm, SYMMETRY_TOL).param("d", d).param("k", k));
    Ok(out)
}

fn haar(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let explicit = cfg.d.is_some() || cfg.n.is_some() || cfg.k.is_some();
    let instances: Vec<(usize, usize)> = if explicit {
        vec![(cfg.d.unwrap_or(2), cfg.haar_k())]
    } else {
        HAAR_LADDER.to_vec()
    };
    let (seed, budget, samples) = (cfg.seed, cfg.budget, cfg.samples);
    // instances one at a time so the Monte-Carlo shards get the whole pool
    let mut out = Vec::new();
    for (d, k) in instances {
        let mc = if explicit || (d, k) == (2, 2) { samples } else { 0 };
        out.extend(haar_instance(d, k, mc, seed, budget)?);
    }
    Ok(out)
}

// ---------------------------------------------------------------- stairs

const LEMMA38_LADDER: [(usize, usize); 5] = [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2)];

fn lemma38(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let (tol, budget) = (cfg.tol, cfg.budget);
    collect(cfg.instances(&LEMMA38_LADDER), |(d, n)| Ok(vec![check_lemma38(d, n, tol, budget)?]))
}

const LEMMA39_LADDER: [(usize, usize, usize); 8] =
    [(2, 1, 1), (3, 1, 1), (4, 1, 1), (5, 1, 1), (2, 2, 2), (2, 3, 2), (2, 3, 3), (3, 2, 2)];

fn stair_instances(cfg: &SuiteConfig, ladder: &[(usize, usize, usize)]) -> Vec<(usize, usize, usize)> {
    if cfg.d.is_none() && cfg.n.is_none() {
        return ladder.iter().copied().filter(|&(_, _, k)| cfg.k.is_none_or(|x| x == k)).collect();
    }
    let mut out = Vec::new();
    for (d, n) in cfg.instances(&ladder.iter().map(|&(d, n, _)| (d, n)).collect::<Vec<_>>()) {
        match cfg.k {
            Some(k) => out.push((d, n, k)),
            None => out.extend((1..=n).map(|k| (d, n, k))),
        }
    }
    out.dedup();
    out
}

fn lemma39(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let (tol, budget) = (cfg.tol, cfg.budget);
    collect(stair_instances(cfg, &LEMMA39_LADDER), |(d, n, k)| {
        let t = if k == 1 { BASE_CASE_TOL } else { tol };
        Ok(vec![check_lemma39(d, n, k, t, budget)?])
    })
}

const COR310_LADDER: [(usize, usize, usize); 3] = [(2, 1, 1), (2, 2, 1), (2, 2, 2)];

fn cor310(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let (tol, budget, seed) = (cfg.tol, cfg.budget, cfg.seed);
    collect(stair_instances(cfg, &COR310_LADDER), |(d, n, k)| {
        let stair = StairOperator::new(d, n, k, budget)?;
        let base = instance_seed(seed, d, n, k);
        let checks: Vec<Result<Check>> = (0..COMBS_PER_INSTANCE)
            .into_par_iter()
            .map(|i| {
                let x = random_comb(d, k + 1, 1 + i % 3, derive_seed(base, i as u64))?;
                Ok(check_cor310(&x, &stair, tol)?)
            })
            .collect();
        let checks = checks.into_iter().collect::<Result<Vec<_>>>()?;
        let worst = checks.iter().map(|c| c.value).fold(f64::NEG_INFINITY, f64::max);
        let failures = checks.iter().filter(|c| !c.passed).count();
        let limit = (k + 1) as f64 / d as f64 + tol;
        let identity = check_cor310(&repeated_unitary_comb(&UnitaryMatrix::identity(d), k)?, &stair, tol)?;
        let fixed_v = UnitaryMatrix::haar(d, derive_seed(base, u64::MAX));
        let repeated = check_cor310(&repeated_unitary_comb(&fixed_v, k)?, &stair, tol)?;
        Ok(vec![
            Check::at_most("random_comb_contraction", worst, limit)
                .param("d", d)
                .param("n", n)
                .param("k", k)
                .param("combs", COMBS_PER_INSTANCE)
                .param("violations", failures),
            identity.param("comb", "identity"),
            repeated.param("comb", "repeated_unitary"),
        ])
    })
}

const THM36_LADDER: [(usize, usize); 3] = [(2, 1), (2, 2), (3, 1)];

fn thm36(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let (tol, budget, seed) = (cfg.tol, cfg.budget, cfg.seed);
    let mut out = collect(cfg.instances(&THM36_LADDER), |(d, n)| {
        let moment = protocol_moment(d, n, budget)?;
        let base = instance_seed(seed, d, n, 0);
        let certs: Vec<Result<_>> = (0..COMBS_PER_INSTANCE)
            .into_par_iter()
            .map(|i| {
                let r = random_comb(d, n + 1, 1 + i % 3, derive_seed(base, i as u64))?;
                Ok(certify(&r, &moment, d, n, tol)?)
            })
            .collect();
        let certs = certs.into_iter().collect::<Result<Vec<_>>>()?;
        let worst_eig = certs.iter().map(|c| c.thm36_max_eig).fold(f64::NEG_INFINITY, f64::max);
        let worst_score = certs.iter().map(|c| c.score).fold(f64::NEG_INFINITY, f64::max);
        let failed = certs.iter().filter(|c| !c.pass).count();
        let identity = score_with_moment(&identity_through_protocol(d, n)?, &moment, d, n)?;
        let depolarizing = score_with_moment(&depolarizing_protocol(d, n)?, &moment, d, n)?;
        let (is_comb, control) = thm36_negative_control(&moment, d, n, tol)?;
        let detected = !is_comb && !control.passed;
        let p = |c: Check| c.param("d", d).param("n", n);
        Ok(vec![
            p(Check::at_most("random_comb_max_eigenvalue", worst_eig, (n + 1) as f64 / d as f64 + tol))
                .param("combs", COMBS_PER_INSTANCE),
            p(Check::at_most("random_comb_score", worst_score, (n + 1) as f64 + tol)).param("combs", COMBS_PER_INSTANCE),
            p(Check::exact_zero("certificate_chain_failures", failed == 0, failed as f64)),
            p(Check::at_most("identity_through_score_error", (identity - 1.0).abs(), 1e-9)),
            p(Check::at_most("depolarizing_score_error", (depolarizing - 1.0).abs(), 1e-9)),
            p(Check::exact_zero("negative_control_detected", detected, control.value)),
        ])
    })?;
    for metric in [Metric::Average, Metric::Diamond] {
        let b = implied_query_bound(2, 0.0, metric)?;
        let name = match metric {
            Metric::Average => "implied_bound_average_d2_eps0",
            Metric::Diamond => "implied_bound_diamond_d2_eps0",
        };
        out.push(Check::exact_zero(name, b == 3, (b as f64 - 3.0).abs()));
    }
    Ok(out)
}
