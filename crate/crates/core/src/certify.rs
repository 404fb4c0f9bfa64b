//! Scoring time-reversal protocols against the Haar moment and the
//! query lower bounds that follow from the score.
//!
//! A protocol making `n` queries is an `(n+1)`-comb `R` on `H_0, …, H_{2n+1}`
//! with teeth `(H_{2j}, H_{2j+1})`; query `i` is plugged into
//! `(H_{2i−1}, H_{2i})` and one extra query lands on `(H_{2n+1}, H_{2n+2})`.
//! The score `tr(|I⟩⟩⟨⟨I| · (R ⋆ E_U[C_U]))` is at most `n + 1` for every comb,
//! and a protocol with average-case error `ε` scores at least `d² − d(d+1)ε`.
//!
//! The error `ε̄` inverted from the score is a Haar average over `U`; the
//! worst-case error over `U` can only be larger, so bounds evaluated at `ε̄`
//! hold for the worst-case error as well.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::check::Check;
use crate::comb::{choi_of_unitary, Comb, UnitaryMatrix};
use crate::error::{Error, Result};
use crate::haarmoment::haar_moment_rep;
use crate::linalg::{hermitize, max_eigenvalue, real, CMat, ZERO};
use crate::operator::{LabeledOperator, SystemLabel};
use crate::stair::protocol_teeth;

/// Default tolerance for certificate checks.
pub const CERTIFY_TOL: f64 = 1e-8;
/// Largest admissible imaginary part of a score.
pub const SCORE_IMAG_TOL: f64 = 1e-9;
/// Slack absorbed before taking a ceiling, so `3 + 1e−15` still rounds to 3.
const CEIL_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Average,
    Diamond,
}

impl core::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "average" | "avg" => Ok(Metric::Average),
            "diamond" => Ok(Metric::Diamond),
            _ => Err(Error::InvalidArgument(alloc::format!("unknown metric {s:?}"))),
        }
    }
}

/// Smallest admissible query count for error `eps`:
/// `⌈d(d+1)(1−ε) − (d+1)⌉` (average) or `⌈d²(1−ε) − 1⌉` (diamond), floored at 0.
pub fn implied_query_bound(d: usize, eps: f64, metric: Metric) -> Result<u64> {
    if d == 0 {
        return Err(Error::InvalidArgument("d must be positive".into()));
    }
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::InvalidArgument(alloc::format!("error {eps} outside [0, 1]")));
    }
    let d = d as f64;
    let x = match metric {
        Metric::Average => d * (d + 1.0) * (1.0 - eps) - (d + 1.0),
        Metric::Diamond => d * d * (1.0 - eps) - 1.0,
    };
    let x = x - CEIL_SLACK * x.abs().max(1.0);
    Ok(if x <= 0.0 { 0 } else { Float::ceil(x) as u64 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub average: u64,
    pub diamond: u64,
}

/// Outcome of scoring one protocol comb.
///
/// `implied_avg_error` is averaged over Haar-random `U`, so it never exceeds
/// the worst-case error of the protocol; bounds derived from it therefore
/// also hold for the worst case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub d: usize,
    pub n: usize,
    pub score: f64,
    /// `score / d²`
    pub avg_fidelity: f64,
    /// `ε̄ = (d/(d+1))(1 − score/d²)`
    pub implied_avg_error: f64,
    /// `max eig(R ⋆ E_U[C_U])`, at most `(n+1)/d`.
    pub thm36_max_eig: f64,
    /// Bounds evaluated at `ε̄` (average) and at `min(1, (d+1)ε̄/d)` (diamond).
    pub bounds: Bounds,
    pub pass: bool,
    pub tol: f64,
}

/// `ε̄ = (d/(d+1))(1 − score/d²)`.
pub fn implied_avg_error(d: usize, score: f64) -> f64 {
    let d = d as f64;
    d / (d + 1.0) * (1.0 - score / (d * d))
}

/// Haar moment `E_U[C_U]` on labels `1..2n+2`.
pub fn protocol_moment(d: usize, n: usize, budget: Budget) -> Result<LabeledOperator> {
    haar_moment_rep(d, n + 1, budget)
}

fn validate(r: &Comb, d: usize, n: usize, tol: f64) -> Result<()> {
    if r.teeth() != protocol_teeth(n).as_slice() {
        return Err(Error::InvalidComb(alloc::format!(
            "protocol with {n} queries needs teeth (0,1)..({},{})",
            2 * n,
            2 * n + 1
        )));
    }
    if r.op().labels().iter().any(|l| l.dim != d) {
        return Err(Error::InvalidComb(alloc::format!("every register must have dimension {d}")));
    }
    let report = r.check(tol);
    if !report.valid {
        return Err(Error::InvalidComb(report.failure.unwrap_or_default()));
    }
    Ok(())
}

fn overall_channel(op: &LabeledOperator, moment: &LabeledOperator, n: usize) -> Result<LabeledOperator> {
    let out = op.link_product(moment)?;
    if out.ids() != vec![0, 2 * n as u32 + 2] {
        return Err(Error::InvalidComb(alloc::format!("contraction left labels {:?}", out.ids())));
    }
    Ok(out)
}

/// `Σ_{ij} M[(i,i),(j,j)] = ⟨⟨I|M|I⟩⟩`.
fn identity_overlap(m: &CMat, d: usize) -> Result<f64> {
    let mut s = ZERO;
    for i in 0..d {
        for j in 0..d {
            s += m[(i * d + i, j * d + j)];
        }
    }
    if s.im.abs() > SCORE_IMAG_TOL * s.re.abs().max(1.0) {
        return Err(Error::InvalidArgument(alloc::format!("score has imaginary part {:e}", s.im)));
    }
    Ok(s.re)
}

/// Score against a precomputed moment (see [`protocol_moment`]).
pub fn score_with_moment(r: &Comb, moment: &LabeledOperator, d: usize, n: usize) -> Result<f64> {
    validate(r, d, n, CERTIFY_TOL)?;
    identity_overlap(overall_channel(r.op(), moment, n)?.matrix(), d)
}

/// `tr(|I⟩⟩⟨⟨I|_{(H_{2n+2}, H_0)} · (R ⋆ E_U[C_U]))`.
pub fn timereversal_score(r: &Comb, d: usize, n: usize, budget: Budget) -> Result<f64> {
    let moment = protocol_moment(d, n, budget)?;
    score_with_moment(r, &moment, d, n)
}

/// Eigenvalue and trace checks on an operator assumed (not verified) to be a
/// protocol comb. Used directly by the negative control.
fn thm36_checks(op: &LabeledOperator, moment: &LabeledOperator, d: usize, n: usize, tol: f64) -> Result<Vec<Check>> {
    let out = overall_channel(op, moment, n)?;
    let top = max_eigenvalue(&hermitize(out.matrix()));
    let score = identity_overlap(out.matrix(), d)?;
    Ok(vec![
        Check::at_most("channel_max_eigenvalue", top, (n + 1) as f64 / d as f64 + tol)
            .param("d", d)
            .param("n", n),
        Check::at_most("identity_overlap", score, (n + 1) as f64 + tol).param("d", d).param("n", n),
    ])
}

/// `max eig(R ⋆ E_U[C_U]) ≤ (n+1)/d + tol` and `score ≤ n + 1 + tol`.
pub fn check_thm36(r: &Comb, moment: &LabeledOperator, d: usize, n: usize, tol: f64) -> Result<Vec<Check>> {
    validate(r, d, n, tol)?;
    thm36_checks(r.op(), moment, d, n, tol)
}

/// Identity on every register `0..2n+1`: PSD, not a comb, and far above the
/// eigenvalue bound. Returns the comb verdict and the (failing) eigenvalue check.
pub fn thm36_negative_control(moment: &LabeledOperator, d: usize, n: usize, tol: f64) -> Result<(bool, Check)> {
    let labels: Vec<SystemLabel> = (0..=2 * n as u32 + 1).map(|id| SystemLabel::new(id, d)).collect();
    let op = LabeledOperator::identity(labels)?;
    let is_comb = Comb::new(op.clone(), protocol_teeth(n))?.is_valid(tol);
    let mut checks = thm36_checks(&op, moment, d, n, tol)?;
    Ok((is_comb, checks.swap_remove(0)))
}

/// Full certificate for `R` against a precomputed moment.
pub fn certify(r: &Comb, moment: &LabeledOperator, d: usize, n: usize, tol: f64) -> Result<Certificate> {
    validate(r, d, n, tol)?;
    let checks = thm36_checks(r.op(), moment, d, n, tol)?;
    let score = checks[1].value;
    let eps = implied_avg_error(d, score);
    let eps_avg = eps.clamp(0.0, 1.0);
    let df = d as f64;
    let eps_diamond = ((df + 1.0) / df * eps_avg).min(1.0);
    let bounds = Bounds {
        average: implied_query_bound(d, eps_avg, Metric::Average)?,
        diamond: implied_query_bound(d, eps_diamond, Metric::Diamond)?,
    };
    let inverted = df * df - df * (df + 1.0) * eps;
    let consistent = (inverted - score).abs() <= 1e-12 * score.abs().max(1.0);
    let chain = n as u64 >= bounds.average && n as u64 >= bounds.diamond;
    let pass = checks.iter().all(|c| c.passed) && consistent && chain && score >= -tol;
    Ok(Certificate {
        d,
        n,
        score,
        avg_fidelity: score / (df * df),
        implied_avg_error: eps,
        thm36_max_eig: checks[0].value,
        bounds,
        pass,
        tol,
    })
}

fn query_slots(d: usize, n: usize, first: LabeledOperator) -> Result<Comb> {
    // |0⟩⟨0| into each query input H_{2j−1}, query output H_{2j} discarded
    let mut zero = CMat::zeros(d, d);
    zero[(0, 0)] = real(1.0);
    let mut op = first;
    for j in 1..=n as u32 {
        let prep = LabeledOperator::new(vec![SystemLabel::new(2 * j - 1, d)], zero.clone())?;
        let discard = LabeledOperator::identity(vec![SystemLabel::new(2 * j, d)])?;
        op = op.kron(&prep)?.kron(&discard)?;
    }
    Comb::new(op.canonicalize(), protocol_teeth(n))
}

/// Routes `H_0` straight to `H_{2n+1}` and feeds `|0⟩` to every query. Scores
/// `E_U |tr U|² = 1`.
pub fn identity_through_protocol(d: usize, n: usize) -> Result<Comb> {
    let wire = choi_of_unitary(&UnitaryMatrix::identity(d), 2 * n as u32 + 1, 0)?;
    query_slots(d, n, wire)
}

/// Replaces the input with `I/d` on `H_{2n+1}`; also scores 1.
pub fn depolarizing_protocol(d: usize, n: usize) -> Result<Comb> {
    let labels = vec![SystemLabel::new(2 * n as u32 + 1, d), SystemLabel::new(0, d)];
    let choi = LabeledOperator::identity(labels)?.scale(real(1.0 / d as f64));
    query_slots(d, n, choi)
}

/// `(a, b)` with `1 ≤ b ≤ N` and `|bt − a| < 1/N`, smallest such `b`.
pub fn dirichlet_approx(t: f64, big_n: u64) -> Result<(i64, u64)> {
    if big_n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    if !t.is_finite() {
        return Err(Error::InvalidArgument("t must be finite".into()));
    }
    let limit = 1.0 / big_n as f64;
    for b in 1..=big_n {
        let bt = b as f64 * t;
        let a = Float::round(bt);
        if (bt - a).abs() < limit {
            return Ok((a as i64, b));
        }
    }
    Err(Error::InvalidArgument(alloc::format!("no approximation found for t={t}, N={big_n}")))
}

/// Query arithmetic for reducing `U^{−t}` to `U^{−1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralizedBudget {
    pub t: f64,
    pub eps: f64,
    pub a_prime: i64,
    pub b_prime: u64,
    pub a: i64,
    pub b: u64,
    /// `|bt − a|`, at most 0.01
    pub phase_error: f64,
    /// `bε + 0.02π`
    pub error_bound: f64,
    /// `a − 1` queries appended after repeating the protocol `b` times
    pub extra_queries: i64,
    pub pass: bool,
}

/// Repeat the `U^{−t}` protocol `b = 10b′` times and append `a − 1` queries,
/// where `|b′t − a′| < 10⁻³` and `a = 10a′`.
pub fn generalized_budget(t: f64, eps: f64) -> Result<GeneralizedBudget> {
    if !(t >= 0.1) || !t.is_finite() {
        return Err(Error::InvalidArgument(alloc::format!("t = {t} must be at least 0.1")));
    }
    if !(0.0..=1e-5).contains(&eps) {
        return Err(Error::InvalidArgument(alloc::format!("eps = {eps} must lie in [0, 1e-5]")));
    }
    let (a_prime, b_prime) = dirichlet_approx(t, 1000)?;
    let (a, b) = (10 * a_prime, 10 * b_prime);
    let phase_error = (b as f64 * t - a as f64).abs();
    let error_bound = b as f64 * eps + 0.02 * core::f64::consts::PI;
    let pass = phase_error <= 0.01 + 1e-12 && b as f64 * eps <= 0.1 && error_bound < 0.2 && a >= 1;
    Ok(GeneralizedBudget {
        t,
        eps,
        a_prime,
        b_prime,
        a,
        b,
        phase_error,
        error_bound,
        extra_queries: a - 1,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comb::random_comb;
    use crate::haarmoment::haar_moment_mc;

    #[test]
    fn bounds_at_zero_error() {
        assert_eq!(implied_query_bound(2, 0.0, Metric::Average).unwrap(), 3);
        assert_eq!(implied_query_bound(2, 0.0, Metric::Diamond).unwrap(), 3);
        assert_eq!(implied_query_bound(3, 0.0, Metric::Average).unwrap(), 8);
        assert_eq!(implied_query_bound(3, 0.0, Metric::Diamond).unwrap(), 8);
        assert_eq!(implied_query_bound(2, 1.0, Metric::Average).unwrap(), 0);
        assert_eq!(implied_query_bound(2, 1.0, Metric::Diamond).unwrap(), 0);
        assert!(implied_query_bound(2, 1.5, Metric::Average).is_err());
        assert!(implied_query_bound(2, -0.1, Metric::Diamond).is_err());
    }

    #[test]
    fn metric_parsing() {
        assert_eq!("average".parse::<Metric>().unwrap(), Metric::Average);
        assert_eq!("diamond".parse::<Metric>().unwrap(), Metric::Diamond);
        assert!("trace".parse::<Metric>().is_err());
    }

    #[test]
    fn reference_protocols_score_one() {
        for (d, n) in [(2, 1), (2, 2), (3, 1)] {
            let m = protocol_moment(d, n, Budget::default()).unwrap();
            for r in [identity_through_protocol(d, n).unwrap(), depolarizing_protocol(d, n).unwrap()] {
                let s = score_with_moment(&r, &m, d, n).unwrap();
                assert!((s - 1.0).abs() < 1e-10, "d={d} n={n} score={s}");
            }
        }
    }

    #[test]
    fn identity_through_matches_monte_carlo() {
        let (d, n) = (2, 1);
        let r = identity_through_protocol(d, n).unwrap();
        let mc = haar_moment_mc(d, n + 1, 20_000, 3).unwrap();
        let s = identity_overlap(overall_channel(r.op(), &mc, n).unwrap().matrix(), d).unwrap();
        assert!((s - 1.0).abs() < 5e-2, "{s}");
    }

    #[test]
    fn random_combs_certify() {
        for (d, n) in [(2, 1), (2, 2)] {
            let m = protocol_moment(d, n, Budget::default()).unwrap();
            for seed in 0..10 {
                let r = random_comb(d, n + 1, 2, seed).unwrap();
                let c = certify(&r, &m, d, n, CERTIFY_TOL).unwrap();
                assert!(c.pass, "{c:?}");
                assert!(c.score <= (n + 1) as f64 + 1e-8);
                assert!(n as u64 >= c.bounds.average);
            }
        }
    }

    #[test]
    fn score_is_linear_in_mixtures() {
        let (d, n) = (2, 1);
        let m = protocol_moment(d, n, Budget::default()).unwrap();
        let r1 = random_comb(d, n + 1, 2, 1).unwrap();
        let r2 = random_comb(d, n + 1, 3, 2).unwrap();
        let mix = r1.op().scale(real(0.3)).add(&r2.op().scale(real(0.7))).unwrap();
        let mix = Comb::new(mix, protocol_teeth(n)).unwrap();
        let s1 = score_with_moment(&r1, &m, d, n).unwrap();
        let s2 = score_with_moment(&r2, &m, d, n).unwrap();
        let s = score_with_moment(&mix, &m, d, n).unwrap();
        assert!((s - (0.3 * s1 + 0.7 * s2)).abs() < 1e-10);
        assert!(s <= s1.max(s2) + 1e-12 && s >= s1.min(s2) - 1e-12);
    }

    #[test]
    fn negative_control_violates() {
        for (d, n) in [(2, 1), (2, 2), (3, 1)] {
            let m = protocol_moment(d, n, Budget::default()).unwrap();
            let (is_comb, check) = thm36_negative_control(&m, d, n, CERTIFY_TOL).unwrap();
            assert!(!is_comb);
            assert!(!check.passed, "{check:?}");
        }
    }

    #[test]
    fn rejects_non_protocols() {
        let m = protocol_moment(2, 1, Budget::default()).unwrap();
        let wrong_size = random_comb(2, 1, 2, 0).unwrap();
        assert!(score_with_moment(&wrong_size, &m, 2, 1).is_err());
    }

    #[test]
    fn dirichlet_examples() {
        assert_eq!(dirichlet_approx(0.5, 2).unwrap(), (1, 2));
        assert_eq!(dirichlet_approx(3.0, 5).unwrap(), (3, 1));
        let (a, b) = dirichlet_approx(core::f64::consts::PI, 10).unwrap();
        assert_eq!((a, b), (22, 7));
        assert!(dirichlet_approx(1.0, 0).is_err());
    }

    #[test]
    fn budget_examples() {
        let g = generalized_budget(1.0, 1e-5).unwrap();
        assert_eq!(g.b, 10);
        assert!((g.error_bound - (1e-4 + 0.02 * core::f64::consts::PI)).abs() < 1e-15);
        assert!(g.pass);
        let g = generalized_budget(0.1, 1e-5).unwrap();
        assert!(g.a >= 1 && g.pass);
        let g = generalized_budget(core::f64::consts::PI, 1e-6).unwrap();
        assert_eq!(g.b % 10, 0);
        assert!(g.phase_error <= 0.01 && g.pass);
        assert!(generalized_budget(0.05, 1e-5).is_err());
        assert!(generalized_budget(1.0, 1e-3).is_err());
    }
}
