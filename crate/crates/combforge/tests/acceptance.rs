//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero on any FAIL.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use combforge::report::strip_timing;
use combforge::suites::{parallel_mc, run_suite, Suite, SuiteConfig};
use combforge::certs::certify_random;
use combforge_core::certify::{certify, implied_query_bound, protocol_moment, Metric};
use combforge_core::comb::random_comb;
use combforge_core::haarmoment::{haar_moment_rep, haar_moment_weingarten};
use combforge_core::linalg::op_norm;
use combforge_core::rng::derive_seed;
use combforge_core::schurweyl::dim_q_usize;
use combforge_core::stair::{check_lemma38, check_lemma39};
use combforge_core::young::{interlacing, YoungDiagram};
use combforge_core::{Budget, Check};

const BASE_CASE_TOL: f64 = 1e-10;
const BASE_CASE_TIME: Duration = Duration::from_secs(1);
const LEMMA38_TOL: f64 = 1e-8;
const LEMMA38_TIME: Duration = Duration::from_secs(120);
const LEMMA39_TOL: f64 = 1e-8;
const COMB_TOL: f64 = 1e-8;
const WEINGARTEN_TOL: f64 = 1e-9;
const MC_TOL: f64 = 3e-2;
const MC_SAMPLES: usize = 100_000;
const REP_TOL: f64 = 1e-10;
const RAISE_LOWER_TOL: f64 = 1e-8;
const INVERSION_TOL: f64 = 1e-12;
const SEED: u64 = 20_240_601;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

type Criterion = fn() -> Result<Outcome, String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn budget() -> Budget {
    Budget::default()
}

fn suite_checks(suite: Suite) -> Result<Vec<Check>, String> {
    let mut cfg = SuiteConfig::new(suite);
    cfg.seed = SEED;
    Ok(run_suite(&cfg).map_err(err)?.checks)
}

fn worst(checks: &[&Check]) -> f64 {
    checks.iter().map(|c| c.value).fold(0.0, f64::max)
}

fn c1_base_case() -> Result<Outcome, String> {
    let mut worst_res = 0.0f64;
    let mut slowest = Duration::ZERO;
    let mut pass = true;
    for d in 2..=5 {
        let start = Instant::now();
        let c = check_lemma39(d, 1, 1, BASE_CASE_TOL, budget()).map_err(err)?;
        let t = start.elapsed();
        slowest = slowest.max(t);
        worst_res = worst_res.max(c.value);
        pass &= c.passed && c.value <= BASE_CASE_TOL && t < BASE_CASE_TIME;
    }
    Ok(outcome(
        pass,
        format!("d=2..5: max ‖tr A_1 − (2/d)I‖ = {worst_res:.3e} ≤ {BASE_CASE_TOL:e}, slowest {:.3} s < 1 s", slowest.as_secs_f64()),
    ))
}

fn c2_stair_dominates_moment() -> Result<Outcome, String> {
    let start = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for (d, n) in [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2)] {
        let c = check_lemma38(d, n, LEMMA38_TOL, budget()).map_err(err)?;
        pass &= c.passed;
        parts.push(format!("({d},{n}) {:.2e}", c.value));
    }
    let t = start.elapsed();
    pass &= t <= LEMMA38_TIME;
    Ok(outcome(pass, format!("min eig {}; total {:.2} s ≤ 120 s", parts.join(", "), t.as_secs_f64())))
}

fn c3_contraction() -> Result<Outcome, String> {
    let mut pass = true;
    let mut parts = Vec::new();
    for (d, n, k) in [(2, 2, 2), (2, 3, 2), (2, 3, 3), (3, 2, 2)] {
        let c = check_lemma39(d, n, k, LEMMA39_TOL, budget()).map_err(err)?;
        pass &= c.passed;
        parts.push(format!("({d},{n},{k}) {:.2e}", c.value));
    }
    Ok(outcome(pass, format!("min eig {} ≥ −{LEMMA39_TOL:e}·scale", parts.join(", "))))
}

fn c4_random_combs() -> Result<Outcome, String> {
    let mut violations = 0usize;
    let mut parts = Vec::new();
    for (d, n) in [(2usize, 1usize), (2, 2), (3, 1)] {
        let moment = protocol_moment(d, n, budget()).map_err(err)?;
        let (mut eig, mut score) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for i in 0..50 {
            let r = random_comb(d, n + 1, 1 + i % 3, derive_seed(SEED, (d * 100 + n * 10) as u64 + i as u64 * 1000))
                .map_err(err)?;
            let c = certify(&r, &moment, d, n, COMB_TOL).map_err(err)?;
            let eig_ok = c.thm36_max_eig <= (n + 1) as f64 / d as f64 + COMB_TOL;
            let score_ok = c.score <= (n + 1) as f64 + COMB_TOL;
            violations += usize::from(!eig_ok) + usize::from(!score_ok);
            eig = eig.max(c.thm36_max_eig);
            score = score.max(c.score);
        }
        parts.push(format!("({d},{n}) eig {eig:.4}/{:.4} score {score:.4}/{}", (n + 1) as f64 / d as f64, n + 1));
    }
    Ok(outcome(violations == 0, format!("{}; {violations} violations over 150 combs", parts.join(", "))))
}

fn c5_moment_oracles() -> Result<Outcome, String> {
    let mut wg_worst = 0.0f64;
    for (d, k) in [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2)] {
        let rep = haar_moment_rep(d, k, budget()).map_err(err)?;
        let wg = haar_moment_weingarten(d, k).map_err(err)?;
        wg_worst = wg_worst.max(op_norm(rep.sub(&wg).map_err(err)?.matrix()));
    }
    let rep = haar_moment_rep(2, 2, budget()).map_err(err)?;
    let mc = parallel_mc(2, 2, MC_SAMPLES, SEED).map_err(err)?;
    let mc_diff = op_norm(rep.sub(&mc).map_err(err)?.matrix());
    Ok(outcome(
        wg_worst <= WEINGARTEN_TOL && mc_diff <= MC_TOL,
        format!("‖rep − wg‖ ≤ {wg_worst:.2e} (limit {WEINGARTEN_TOL:e}); ‖rep − mc(1e5)‖ at (2,2) = {mc_diff:.3e} (limit {MC_TOL:e})"),
    ))
}

fn c6_exact_identities() -> Result<Outcome, String> {
    let checks = suite_checks(Suite::YoungIdentities)?;
    let names = ["hook_ratio_identity", "zero_sum_identity", "inverse_square_identity"];
    let tuples: Vec<&Check> = checks.iter().filter(|c| names.contains(&c.name.as_str())).collect();
    let lagrange: Vec<&Check> = checks.iter().filter(|c| c.name == "lagrange_identity").collect();
    let max_n = tuples.iter().filter_map(|c| c.params.get("n")?.parse::<usize>().ok()).max().unwrap_or(0);
    let count: usize = tuples.iter().filter_map(|c| c.params.get("tuples")?.parse::<usize>().ok()).sum();
    let nonzero: f64 = tuples.iter().chain(lagrange.iter()).map(|c| c.value).sum();
    let instances = lagrange.first().and_then(|c| c.params.get("instances")).cloned().unwrap_or_default();
    let pass = max_n == 8
        && !lagrange.is_empty()
        && instances == "1000"
        && tuples.iter().chain(lagrange.iter()).all(|c| c.passed && c.exact);
    Ok(outcome(
        pass,
        format!("{count} tuples for n ≤ {max_n} and {instances} Lagrange instances; {nonzero} nonzero residuals"),
    ))
}

fn c7_kerov() -> Result<Outcome, String> {
    let checks = suite_checks(Suite::YoungIdentities)?;
    let kerov: Vec<&Check> = checks.iter().filter(|c| c.name == "kerov_transition_ratios").collect();
    let max_n = kerov.iter().filter_map(|c| c.params.get("n")?.parse::<usize>().ok()).max().unwrap_or(0);
    let transitions: usize = kerov.iter().filter_map(|c| c.params.get("transitions")?.parse::<usize>().ok()).sum();
    let mismatches: f64 = kerov.iter().map(|c| c.value).sum();
    let pass = max_n == 12 && kerov.iter().all(|c| c.passed && c.exact);
    Ok(outcome(pass, format!("{transitions} transitions for n ≤ {max_n}; {mismatches} mismatches")))
}

fn c8_representations() -> Result<Outcome, String> {
    let checks = suite_checks(Suite::Symrep)?;
    let numeric: Vec<&Check> = checks.iter().filter(|c| !c.exact).collect();
    let exact: Vec<&Check> = checks.iter().filter(|c| c.exact).collect();
    let max_n = checks.iter().filter_map(|c| c.params.get("n")?.parse::<usize>().ok()).max().unwrap_or(0);
    let pass = max_n == 6
        && numeric.iter().all(|c| c.passed && c.limit <= REP_TOL)
        && exact.len() == 6
        && exact.iter().all(|c| c.passed);
    Ok(outcome(
        pass,
        format!("n ≤ {max_n}: worst relation residual {:.2e} ≤ {REP_TOL:e}; Σdim² = n! for all n", worst(&numeric)),
    ))
}

fn c9_raising_lowering() -> Result<Outcome, String> {
    let checks = suite_checks(Suite::RaisingLowering)?;
    let refs: Vec<&Check> = checks.iter().collect();
    let instances: Vec<String> =
        checks.iter().filter(|c| c.name == "raising").map(|c| format!("({},{})", c.params["d"], c.params["n"])).collect();
    let expected = ["(2,2)", "(2,3)", "(2,4)", "(3,2)", "(3,3)"];
    let pass = instances == expected && checks.iter().all(|c| c.passed && c.limit <= RAISE_LOWER_TOL);
    Ok(outcome(pass, format!("{}: worst residual {:.2e} ≤ {RAISE_LOWER_TOL:e}", instances.join(" "), worst(&refs))))
}

fn c10_stated_numbers() -> Result<Outcome, String> {
    let shape = YoungDiagram::new(vec![6, 5, 3, 3, 2, 1, 1, 1]).map_err(err)?;
    let s = interlacing(&shape);
    let seq_ok = s.alphas == [-8, -4, -2, 1, 4, 6] && s.betas == [-7, -3, -1, 3, 5];
    let mut dims_ok = true;
    for d in 2..=6 {
        let sym = dim_q_usize(&YoungDiagram::new(vec![2]).map_err(err)?, d);
        let anti = dim_q_usize(&YoungDiagram::new(vec![1, 1]).map_err(err)?, d);
        let one = dim_q_usize(&YoungDiagram::new(vec![1]).map_err(err)?, d);
        dims_ok &= sym == d * (d + 1) / 2 && anti == d * (d - 1) / 2 && one == d;
    }
    let avg = implied_query_bound(2, 0.0, Metric::Average).map_err(err)?;
    let dia = implied_query_bound(2, 0.0, Metric::Diamond).map_err(err)?;
    Ok(outcome(
        seq_ok && dims_ok && avg == 3 && dia == 3,
        format!(
            "α = {:?}, β = {:?}; dimQ for d = 2..6 {}; bounds at d=2, ε=0: average {avg}, diamond {dia}",
            s.alphas,
            s.betas,
            if dims_ok { "match" } else { "differ" }
        ),
    ))
}

fn c11_consistency_chain() -> Result<Outcome, String> {
    let mut violations = 0usize;
    let mut worst_inv = 0.0f64;
    let mut total = 0usize;
    for (d, n) in [(2usize, 1usize), (2, 2), (3, 1), (3, 2)] {
        let recs = certify_random(d, n, 50, derive_seed(SEED, (d * 10 + n) as u64), None, COMB_TOL, budget()).map_err(err)?;
        let df = d as f64;
        for r in recs {
            let c = r.certificate;
            let inv = (c.score - (df * df - df * (df + 1.0) * c.implied_avg_error)).abs();
            worst_inv = worst_inv.max(inv);
            let bound = implied_query_bound(d, c.implied_avg_error.clamp(0.0, 1.0), Metric::Average).map_err(err)?;
            if inv > INVERSION_TOL * df * df || (n as u64) < bound || !c.pass {
                violations += 1;
            }
            total += 1;
        }
    }
    Ok(outcome(
        violations == 0 && total == 200,
        format!("{total} combs: worst |score − (d² − d(d+1)ε̄)| = {worst_inv:.2e}; {violations} violations"),
    ))
}

fn c12_determinism() -> Result<Outcome, String> {
    let mut differing = Vec::new();
    for s in Suite::EACH {
        let mut cfg = SuiteConfig::new(s);
        cfg.seed = SEED;
        let a = strip_timing(&run_suite(&cfg).map_err(err)?.to_json().map_err(err)?).map_err(err)?;
        let b = strip_timing(&run_suite(&cfg).map_err(err)?.to_json().map_err(err)?).map_err(err)?;
        if a != b {
            differing.push(s.name());
        }
    }
    let strip = |v: Vec<combforge::certs::CertificateRecord>| -> Result<String, String> {
        strip_timing(&serde_json::to_string(&v).map_err(err)?).map_err(err)
    };
    let c1 = strip(certify_random(2, 1, 20, SEED, None, COMB_TOL, budget()).map_err(err)?)?;
    let c2 = strip(certify_random(2, 1, 20, SEED, None, COMB_TOL, budget()).map_err(err)?)?;
    if c1 != c2 {
        differing.push("certify");
    }
    Ok(outcome(
        differing.is_empty(),
        if differing.is_empty() {
            format!("{} suites and a certificate batch byte-identical across reruns", Suite::EACH.len())
        } else {
            format!("differing: {}", differing.join(", "))
        },
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 12] = [
        ("exact base case", c1_base_case),
        ("stair operator dominates the Haar moment", c2_stair_dominates_moment),
        ("stair contraction", c3_contraction),
        ("random combs respect the query bound", c4_random_combs),
        ("Haar moment oracle agreement", c5_moment_oracles),
        ("exact combinatorial identities", c6_exact_identities),
        ("Kerov transition formulas", c7_kerov),
        ("symmetric group representations", c8_representations),
        ("raising and lowering", c9_raising_lowering),
        ("stated closed-form values", c10_stated_numbers),
        ("certificate consistency chain", c11_consistency_chain),
        ("determinism", c12_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let (pass, detail) = match f() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!pass);
        println!("{} [{:>2}] {name}: {detail}", if pass { "PASS" } else { "FAIL" }, i + 1);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
