use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use combforge::certs::{certify_file, certify_random, CertificateRecord};
use combforge::config::resolve_budget;
use combforge::error::{Error, Result};
use combforge::io::{write_comb, write_operator, FileFormat};
use combforge::report::ReportFormat;
use combforge::suites::{parallel_mc, run_suite, Suite, SuiteConfig};
use combforge_core::certify::{implied_query_bound, Metric, CERTIFY_TOL};
use combforge_core::comb::random_comb;
use combforge_core::haarmoment::{haar_moment_rep, haar_moment_weingarten};
use combforge_core::Budget;

/// Numerical certification of Haar moments, stair operators and quantum combs.
#[derive(Debug, Parser)]
#[command(name = "combforge", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a verification suite and write its report.
    Verify(VerifyArgs),
    /// Build the Haar moment E[|U⟩⟩⟨⟨U|^{⊗k}] and write it as an operator file.
    Moment(MomentArgs),
    /// Certify a protocol comb (file or seeded random batch).
    Certify(CertifyArgs),
    /// Write a seeded random protocol comb.
    GenComb(GenCombArgs),
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// young-identities, symrep, schurweyl, raising-lowering, haar, lemma38, lemma39, cor310, thm36 or all
    suite: Suite,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = SuiteConfig::DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = SuiteConfig::DEFAULT_SEED)]
    seed: u64,
    /// Monte-Carlo samples for the haar suite.
    #[arg(long, default_value_t = SuiteConfig::DEFAULT_SAMPLES)]
    samples: usize,
    /// Worker threads; all cores by default.
    #[arg(long)]
    threads: Option<usize>,
    /// Memory budget; overrides COMBFORGE_BUDGET_BYTES (default 2 GiB).
    #[arg(long)]
    budget_bytes: Option<u64>,
    /// json or csv
    #[arg(long, default_value = "json")]
    format: ReportFormat,
    /// Report path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Method {
    Rep,
    Weingarten,
    Mc,
}

#[derive(Debug, Args)]
struct MomentArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, value_enum, default_value = "rep")]
    method: Method,
    #[arg(long, default_value_t = SuiteConfig::DEFAULT_SAMPLES)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    budget_bytes: Option<u64>,
    /// `.json` writes JSON, anything else the binary format.
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
#[command(args_conflicts_with_subcommands = true, subcommand_negates_reqs = true)]
struct CertifyArgs {
    #[command(subcommand)]
    bound: Option<CertifyCommand>,
    /// Comb file; teeth (H_0,H_1), …, (H_{2n},H_{2n+1}).
    #[arg(required_unless_present = "random", conflicts_with = "random")]
    path: Option<PathBuf>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    /// Certify this many seeded random combs instead of a file.
    #[arg(long)]
    random: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Ancilla dimension of random combs; cycles through 1, 2, 3 by default.
    #[arg(long)]
    ancilla: Option<usize>,
    #[arg(long, default_value_t = CERTIFY_TOL)]
    tol: f64,
    #[arg(long)]
    budget_bytes: Option<u64>,
    /// Certificate path; stdout when absent.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum CertifyCommand {
    /// Print the query lower bounds implied by an average-case error.
    Bound(BoundArgs),
}

#[derive(Debug, Args)]
struct BoundArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    eps: f64,
    /// average or diamond; both when absent.
    #[arg(long)]
    metric: Option<Metric>,
}

#[derive(Debug, Args)]
struct GenCombArgs {
    #[arg(long)]
    d: usize,
    /// Number of queries; the comb has n + 1 teeth.
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2)]
    ancilla: usize,
    #[arg(short, long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify(a) => verify(a),
        Command::Moment(a) => moment(a),
        Command::Certify(a) => certify_cmd(a),
        Command::GenComb(a) => gen_comb(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::io(p, e)),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| Error::io("<stdout>", e)),
    }
}

fn verify(a: VerifyArgs) -> Result<u8> {
    let cfg = SuiteConfig {
        suite: a.suite,
        d: a.d,
        n: a.n,
        k: a.k,
        tol: a.tol,
        seed: a.seed,
        samples: a.samples,
        budget: resolve_budget(a.budget_bytes)?,
        threads: a.threads,
        format: a.format,
        out: a.out,
    };
    let report = run_suite(&cfg)?;
    emit(cfg.out.as_deref(), &report.render(cfg.format)?)?;
    let failed: Vec<_> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    if !failed.is_empty() {
        eprintln!("{} of {} checks failed: {}", failed.len(), report.n_checks, failed.join(", "));
    }
    Ok(report.exit_code() as u8)
}

fn moment(a: MomentArgs) -> Result<u8> {
    if a.d == 0 || a.k == 0 {
        return Err(Error::Config("d and k must be positive".into()));
    }
    let budget = resolve_budget(a.budget_bytes)?;
    let dim = a.d.checked_pow(2 * a.k as u32).ok_or_else(|| Error::Config("d^(2k) overflows".into()))?;
    budget.check_dense("Haar moment", dim)?;
    let op = match a.method {
        Method::Rep => haar_moment_rep(a.d, a.k, budget)?,
        Method::Weingarten => haar_moment_weingarten(a.d, a.k)?,
        Method::Mc => parallel_mc(a.d, a.k, a.samples, a.seed)?,
    };
    write_operator(&a.out, &op, FileFormat::from_path(&a.out))?;
    Ok(0)
}

fn certify_cmd(a: CertifyArgs) -> Result<u8> {
    if let Some(CertifyCommand::Bound(b)) = a.bound {
        return bound(b);
    }
    if !(a.tol > 0.0) {
        return Err(Error::Config("tol must be positive".into()));
    }
    let budget = resolve_budget(a.budget_bytes)?;
    let records: Vec<CertificateRecord> = match (a.path, a.random) {
        (Some(path), None) => vec![certify_file(&path, a.d, a.n, a.tol, budget)?],
        (None, Some(count)) => {
            let (d, n) = match (a.d, a.n) {
                (Some(d), Some(n)) if d >= 2 && n >= 1 => (d, n),
                _ => return Err(Error::Config("--random needs --d ≥ 2 and --n ≥ 1".into())),
            };
            check_protocol_size(d, n, budget)?;
            certify_random(d, n, count, a.seed, a.ancilla, a.tol, budget)?
        }
        _ => return Err(Error::Config("give a comb file or --random".into())),
    };
    let mut text = if records.len() == 1 && a.random.is_none() {
        serde_json::to_string_pretty(&records[0])?
    } else {
        serde_json::to_string_pretty(&records)?
    };
    text.push('\n');
    emit(a.out.as_deref(), &text)?;
    Ok(if records.iter().all(|r| r.certificate.pass) { 0 } else { 1 })
}

fn check_protocol_size(d: usize, n: usize, budget: Budget) -> Result<()> {
    let dim = d
        .checked_pow(2 * n as u32 + 2)
        .ok_or_else(|| Error::Config("d^(2n+2) overflows".into()))?;
    budget.check_dense("protocol", dim)?;
    Ok(())
}

fn bound(b: BoundArgs) -> Result<u8> {
    let metrics = match b.metric {
        Some(m) => vec![m],
        None => vec![Metric::Average, Metric::Diamond],
    };
    for m in metrics {
        let v = implied_query_bound(b.d, b.eps, m).map_err(|e| Error::Config(e.to_string()))?;
        let name = match m {
            Metric::Average => "average",
            Metric::Diamond => "diamond",
        };
        println!("{name}: {v}");
    }
    Ok(0)
}

fn gen_comb(a: GenCombArgs) -> Result<u8> {
    if a.d == 0 || a.n == 0 || a.ancilla == 0 {
        return Err(Error::Config("d, n and ancilla must be positive".into()));
    }
    check_protocol_size(a.d, a.n, Budget::default())?;
    let comb = random_comb(a.d, a.n + 1, a.ancilla, a.seed)?;
    write_comb(&a.out, &comb, FileFormat::from_path(&a.out))?;
    Ok(0)
}
