//! `leibniz-lab`: seeded experiments over the leibniz-core checkers.
//!
//! Exit codes: 0 success, 1 a theorem-backed check failed (or reference
//! values did not match), 2 bad flags or input.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use leibniz_core::fixtures::{reference_examples, ReferenceExample};
use leibniz_core::knorms::{dual_norm_bruteforce, dual_weighted_k_norm, WeightVector, ENUMERATION_CAP};
use leibniz_core::operators::{
    deflated_theta, divided_difference_matrix, lhat_row_col_bounds, theta_matrix, LaplacianMatrix,
    MatrixJson, PiecewiseLinearFn,
};
use leibniz_core::search::{search, SearchConfig, SearchResult, Target};
use leibniz_core::suites::{run_suite, SuiteConfig, SuiteKind, SuiteOutcome};
use leibniz_core::{Exponent, VerificationReport};

use output::OutputDir;

/// Parsed as one comma-separated argument rather than repeated flags.
type Vector = Vec<f64>;

#[derive(Debug, Parser, Serialize)]
#[command(name = "leibniz-lab", version, about = "Leibniz-type inequality laboratory")]
struct Cli {
    /// Base seed for randomized suites; a search config's own seed wins
    /// unless this is given.
    #[arg(long, global = true, env = "LEIBNIZ_LAB_SEED")]
    seed: Option<u64>,
    /// Tolerance override (check slack for `verify`, reference values for
    /// `examples`).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Directory for JSON-lines, CSV and manifest output.
    #[arg(long, global = true)]
    #[serde(skip)]
    out: Option<PathBuf>,
    /// Machine-readable output on stdout.
    #[arg(long, global = true)]
    #[serde(skip)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Run a randomized property suite.
    Verify(VerifyArgs),
    /// Recompute the built-in counterexamples against their reference values.
    Examples,
    /// Search for violations as described by a JSON config file.
    Search(SearchArgs),
    /// Closed-form dual weighted k-norm next to the brute-force maximum.
    Dualnorm(DualArgs),
    /// Build and describe one of the operator matrices.
    #[command(subcommand)]
    Inspect(InspectCommand),
}

#[derive(Debug, Args, Serialize)]
struct VerifyArgs {
    /// Suite name, or `all`.
    #[arg(long, value_parser = parse_suite)]
    suite: String,
    #[arg(long)]
    trials: Option<usize>,
    /// Largest number of atoms per instance.
    #[arg(long)]
    n: Option<usize>,
    /// Exponent of the strong-Leibniz sweep.
    #[arg(long)]
    p: Option<Exponent>,
}

#[derive(Debug, Args, Serialize)]
struct SearchArgs {
    /// SearchConfig JSON file.
    config: PathBuf,
}

#[derive(Debug, Args, Serialize)]
struct DualArgs {
    /// Vector, e.g. `3,1` or `[3,1]`.
    #[arg(long, value_parser = parse_vec, allow_hyphen_values = true)]
    x: Vector,
    /// Non-increasing positive weights; all ones when omitted.
    #[arg(long, value_parser = parse_vec)]
    w: Option<Vector>,
    #[arg(long)]
    k: usize,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum InspectCommand {
    /// `Θ_x` and its deflation `Θ_x − n⁻¹1xᵀ`.
    Theta {
        #[arg(long, value_parser = parse_vec, allow_hyphen_values = true)]
        x: Vector,
    },
    /// `Θ[x;φ]` for a piecewise-linear `φ` given as JSON.
    DividedDifference {
        #[arg(long, value_parser = parse_vec, allow_hyphen_values = true)]
        x: Vector,
        /// `{"breakpoints": [...], "slopes": [...], "anchor": a}`.
        #[arg(long, value_parser = parse_phi)]
        phi: PiecewiseLinearFn,
    },
    /// Validate a Laplacian given as `{"n": n, "entries": [row-major]}`.
    Laplacian {
        #[arg(long, value_parser = parse_matrix)]
        matrix: MatrixJson,
    },
}

fn parse_vec(s: &str) -> std::result::Result<Vector, String> {
    let t = s.trim().trim_start_matches('[').trim_end_matches(']');
    if t.trim().is_empty() {
        return Ok(Vec::new());
    }
    t.split(',')
        .map(|v| {
            let v = v.trim();
            v.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| format!("`{v}` is not a finite number"))
        })
        .collect()
}

fn parse_phi(s: &str) -> std::result::Result<PiecewiseLinearFn, String> {
    serde_json::from_str(s).map_err(|e| e.to_string())
}

fn parse_matrix(s: &str) -> std::result::Result<MatrixJson, String> {
    let m: MatrixJson = serde_json::from_str(s).map_err(|e| e.to_string())?;
    m.to_matrix().ok_or_else(|| format!("need n² = {} entries", m.n * m.n))?;
    Ok(m)
}

fn parse_suite(s: &str) -> std::result::Result<String, String> {
    if s == "all" || SuiteKind::parse(s).is_some() {
        return Ok(s.to_string());
    }
    let names: Vec<&str> = SuiteKind::ALL.iter().map(|k| k.name()).collect();
    Err(format!("unknown suite `{s}`; expected all, {}", names.join(", ")))
}

/// Bad user input, reported with exit code 2.
#[derive(Debug)]
struct InputError(String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

fn input_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(InputError(msg.into()).into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<bool> {
    if let Some(t) = cli.tol {
        if !(t.is_finite() && t >= 0.0) {
            return input_err(format!("--tol must be a non-negative number, got {t}"));
        }
    }
    let mut out = OutputDir::new(cli.out.clone())?;
    let mut resolved = Resolved { seed: cli.seed.unwrap_or(0), search: None };
    let (name, ok) = match &cli.command {
        Command::Verify(a) => ("verify", cmd_verify(cli, a, &mut out)?),
        Command::Examples => ("examples", cmd_examples(cli, &mut out)?),
        Command::Search(a) => ("search", cmd_search(cli, a, &mut out, &mut resolved)?),
        Command::Dualnorm(a) => ("dualnorm", cmd_dualnorm(cli, a, &mut out)?),
        Command::Inspect(c) => ("inspect", cmd_inspect(cli, c, &mut out)?),
    };
    if let (Some(root), false) = (out.root(), cli.json) {
        println!("outputs written to {}", root.display());
    }
    let seed = resolved.seed;
    out.finish(name, &ManifestConfig { args: cli, resolved }, seed)?;
    Ok(ok)
}

/// Settings actually used once flags, environment and config files are merged.
#[derive(Debug, Serialize)]
struct Resolved {
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    search: Option<SearchConfig>,
}

#[derive(Debug, Serialize)]
struct ManifestConfig<'a> {
    args: &'a Cli,
    resolved: Resolved,
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string(value)?);
    Ok(())
}

#[derive(Debug, Serialize)]
struct SuiteSummary {
    suite: String,
    checks: usize,
    failures: usize,
    expected_failures: usize,
    unconfirmed_fixtures: usize,
    open_checks: usize,
    open_failures: usize,
    max_violation: Option<f64>,
    ok: bool,
}

impl SuiteSummary {
    fn of(o: &SuiteOutcome) -> Self {
        let v = o.max_violation();
        Self {
            suite: o.suite.clone(),
            checks: o.reports.len(),
            failures: o.failures(),
            expected_failures: o.reports.iter().filter(|r| r.expected_failure).count(),
            unconfirmed_fixtures: o.unconfirmed_fixtures(),
            open_checks: o.open_reports.len(),
            open_failures: o.open_failures(),
            max_violation: v.is_finite().then_some(v),
            ok: o.ok(),
        }
    }
}

fn describe(r: &VerificationReport) -> String {
    format!(
        "{}: lhs {:.6} rhs {:.6} slack {:.3e} {}",
        r.name,
        r.lhs,
        r.rhs,
        r.slack,
        if r.pass { "PASS" } else { "FAIL" }
    )
}

fn cmd_verify(cli: &Cli, a: &VerifyArgs, out: &mut OutputDir) -> Result<bool> {
    let kinds: Vec<SuiteKind> = match SuiteKind::parse(&a.suite) {
        Some(k) => vec![k],
        None => SuiteKind::ALL.to_vec(),
    };
    let mut summaries = Vec::new();
    for kind in kinds {
        let mut cfg = SuiteConfig::for_suite(kind, cli.seed.unwrap_or(0));
        if let Some(t) = a.trials {
            cfg.trials = t;
        }
        if let Some(n) = a.n {
            if n < 2 {
                return input_err(format!("--n must be at least 2, got {n}"));
            }
            cfg.n = n;
        }
        if let Some(p) = a.p {
            cfg.p = p;
        }
        cfg.tol = cli.tol;
        let outcome = run_suite(kind, &cfg).map_err(|e| InputError(e.to_string()))?;
        out.json_lines(&format!("verify-{}.jsonl", kind.name()), &outcome.reports)?;
        if !outcome.open_reports.is_empty() {
            out.json_lines(&format!("verify-{}-open.jsonl", kind.name()), &outcome.open_reports)?;
        }
        let summary = SuiteSummary::of(&outcome);
        if cli.json {
            print_json(&summary)?;
        } else {
            print_summary(&outcome, &summary, &cfg);
        }
        summaries.push(summary);
    }
    out.json("verify-summary.json", &summaries)?;
    Ok(summaries.iter().all(|s| s.ok))
}

fn print_summary(o: &SuiteOutcome, s: &SuiteSummary, cfg: &SuiteConfig) {
    let status = if s.ok { "ok" } else { "FAILED" };
    print!("{}: {} checks, {} failures", s.suite, s.checks, s.failures);
    if let Some(v) = s.max_violation {
        print!(", max violation {v:.3e}");
    }
    println!(" [{status}]");
    for r in o.reports.iter().filter(|r| r.expected_failure) {
        let tag = if r.pass { "NOT CONFIRMED" } else { "violation confirmed" };
        println!("  expected failure, {}: {tag}", describe(r));
    }
    if s.open_checks > 0 {
        println!(
            "  open sweep at p = {}: {} instances, {} failures",
            cfg.p, s.open_checks, s.open_failures
        );
        if s.open_failures > 0 && cfg.p.value() >= 2.0 {
            println!("  !!! conjectured inequality FAILED on {} instances; see the -open.jsonl reports", s.open_failures);
        }
    }
}

#[derive(Debug, Serialize)]
struct ExampleLine<'a> {
    #[serde(flatten)]
    example: &'a ReferenceExample,
    violation_confirmed: bool,
    values_match: bool,
}

fn cmd_examples(cli: &Cli, out: &mut OutputDir) -> Result<bool> {
    let examples = reference_examples();
    let mut all_ok = true;
    let mut lines = Vec::new();
    for ex in &examples {
        let confirmed = ex.violation_confirmed();
        let matches = ex.values_match(cli.tol);
        all_ok &= confirmed && matches;
        lines.push(ExampleLine { example: ex, violation_confirmed: confirmed, values_match: matches });
    }
    if cli.json {
        for l in &lines {
            print_json(l)?;
        }
    } else {
        for l in &lines {
            let ex = l.example;
            let verdict = if l.violation_confirmed { "violation confirmed" } else { "NO VIOLATION" };
            println!("{}: {} [{verdict}]", ex.id, describe(&ex.report));
            for r in &ex.references {
                let tol = cli.tol.unwrap_or(r.tolerance);
                let ok = (r.computed - r.reference).abs() <= tol;
                println!(
                    "  {} = {:.7} (reference {} ± {:e}) {}",
                    r.quantity,
                    r.computed,
                    r.reference,
                    tol,
                    if ok { "match" } else { "MISMATCH" }
                );
            }
        }
    }
    out.json_lines("examples.jsonl", &lines)?;
    Ok(all_ok)
}

#[derive(Debug, Serialize)]
struct SweepRow {
    p: Exponent,
    best_violation: f64,
    best_trial: u64,
    verdict: String,
}

#[derive(Debug, Serialize)]
struct HistoryRow {
    p: Exponent,
    trial: u64,
    best_violation: f64,
}

fn theorem_backed(cfg: &SearchConfig) -> bool {
    match cfg.target {
        Target::Leibniz | Target::SquareBound | Target::MarkovVariance => true,
        Target::ChainRule => cfg.phi_class.monotone,
        Target::StrongLeibniz => false,
    }
}

fn cmd_search(cli: &Cli, a: &SearchArgs, out: &mut OutputDir, resolved: &mut Resolved) -> Result<bool> {
    let text = std::fs::read_to_string(&a.config)
        .with_context(|| format!("reading {}", a.config.display()))
        .map_err(|e| InputError(format!("{e:#}")))?;
    let mut cfg: SearchConfig = serde_json::from_str(&text)
        .map_err(|e| InputError(format!("parsing {}: {e}", a.config.display())))?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    cfg.validate().map_err(|e| InputError(e.to_string()))?;
    resolved.seed = cfg.seed;
    resolved.search = Some(cfg.clone());
    let result: SearchResult = search(&cfg)?;

    let sweep: Vec<SweepRow> = result
        .sweep
        .iter()
        .map(|e| SweepRow {
            p: e.p,
            best_violation: e.best_violation,
            best_trial: e.best_trial,
            verdict: e.verdict.clone(),
        })
        .collect();
    let history: Vec<HistoryRow> = result
        .sweep
        .iter()
        .flat_map(|e| {
            e.history.iter().map(move |h| HistoryRow {
                p: e.p,
                trial: h.trial,
                best_violation: h.best_violation,
            })
        })
        .collect();
    out.json("search-result.json", &result)?;
    out.csv("search-sweep.csv", &sweep)?;
    out.csv("search-history.csv", &history)?;

    if cli.json {
        print_json(&result)?;
    } else {
        println!(
            "target {} ({} trials per exponent, n <= {}); results are evidence, not proof",
            cfg.target.as_str(),
            cfg.trials,
            cfg.n
        );
        for row in &sweep {
            println!("  p = {:<4} best violation {:>12.6e}  {}", row.p.to_string(), row.best_violation, row.verdict);
        }
        println!("overall: {}", result.verdict);
        println!("witness replay: {}", describe(&result.replay));
    }
    Ok(!(theorem_backed(&cfg) && result.found_violation()))
}

#[derive(Debug, Serialize)]
struct DualLine {
    x: Vec<f64>,
    w: Vec<f64>,
    k: usize,
    formula: f64,
    bruteforce: Option<f64>,
    difference: Option<f64>,
    /// `max(‖x‖_∞, ‖x‖_1/k)`, reported when all weights are 1.
    k_norm_dual: Option<f64>,
}

fn cmd_dualnorm(cli: &Cli, a: &DualArgs, out: &mut OutputDir) -> Result<bool> {
    let n = a.x.len();
    if n == 0 {
        return input_err("--x must not be empty");
    }
    let w = a.w.clone().unwrap_or_else(|| vec![1.0; n]);
    if w.len() != n {
        return input_err(format!("--w has {} entries, --x has {n}", w.len()));
    }
    let wv = WeightVector::new(w.clone()).map_err(|e| InputError(e.to_string()))?;
    let formula = dual_weighted_k_norm(&a.x, &wv, a.k).map_err(|e| InputError(e.to_string()))?;
    let bruteforce = (n <= ENUMERATION_CAP)
        .then(|| dual_norm_bruteforce(&a.x, &wv, a.k))
        .transpose()?;
    let k_norm_dual = w.iter().all(|v| *v == 1.0).then(|| {
        let sup = a.x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let l1: f64 = a.x.iter().map(|v| v.abs()).sum();
        sup.max(l1 / a.k as f64)
    });
    let line = DualLine {
        x: a.x.clone(),
        w,
        k: a.k,
        formula,
        bruteforce,
        difference: bruteforce.map(|b| (formula - b).abs()),
        k_norm_dual,
    };
    if cli.json {
        print_json(&line)?;
    } else {
        println!("formula     {}", line.formula);
        match line.bruteforce {
            Some(b) => println!("bruteforce  {b}\ndifference  {}", line.difference.unwrap()),
            None => println!("bruteforce  skipped (n > {ENUMERATION_CAP})"),
        }
        if let Some(v) = line.k_norm_dual {
            println!("max(sup, l1/k) {v}");
        }
    }
    out.json("dualnorm.json", &line)?;
    Ok(true)
}

#[derive(Debug, Serialize)]
struct InspectLine {
    kind: &'static str,
    matrix: MatrixJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    deflated: Option<MatrixJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    monotonicity: Option<leibniz_core::operators::Monotonicity>,
    is_laplacian: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    laplacian_error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    min_eigenvalue_of_negation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_off_diagonal: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lhat_column_row_bounds: Option<(f64, f64)>,
}

impl InspectLine {
    fn new(kind: &'static str, matrix: MatrixJson, lap: leibniz_core::Result<LaplacianMatrix>) -> Self {
        let (is_laplacian, laplacian_error, eig, off, lhat) = match lap {
            Ok(l) => (
                true,
                None,
                Some(l.min_eigenvalue_of_negation()),
                Some(l.max_off_diagonal()),
                Some(lhat_row_col_bounds(&l)),
            ),
            Err(e) => (false, Some(e.to_string()), None, None, None),
        };
        Self {
            kind,
            matrix,
            deflated: None,
            monotonicity: None,
            is_laplacian,
            laplacian_error,
            min_eigenvalue_of_negation: eig,
            max_off_diagonal: off,
            lhat_column_row_bounds: lhat,
        }
    }
}

fn cmd_inspect(cli: &Cli, c: &InspectCommand, out: &mut OutputDir) -> Result<bool> {
    let line = match c {
        InspectCommand::Theta { x } => {
            if x.is_empty() {
                return input_err("--x must not be empty");
            }
            let t = theta_matrix(x).entries;
            let mut line = InspectLine::new("theta", MatrixJson::from_matrix(&t), LaplacianMatrix::new(t));
            line.deflated = Some(MatrixJson::from_matrix(&deflated_theta(x)));
            line
        }
        InspectCommand::DividedDifference { x, phi } => {
            let dd = divided_difference_matrix(x, phi).map_err(|e| InputError(e.to_string()))?;
            let mut line = InspectLine::new(
                "divided_difference",
                MatrixJson::from_matrix(&dd.entries),
                dd.as_laplacian(),
            );
            line.monotonicity = Some(dd.monotonicity);
            line
        }
        InspectCommand::Laplacian { matrix } => {
            let m = matrix.to_matrix().expect("checked while parsing");
            InspectLine::new("laplacian", matrix.clone(), LaplacianMatrix::new(m))
        }
    };
    if cli.json {
        print_json(&line)?;
    } else {
        println!("{}", serde_json::to_string_pretty(&line)?);
    }
    out.json("inspect.json", &line)?;
    Ok(true)
}
