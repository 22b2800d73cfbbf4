//! Acceptance gate: one PASS/FAIL line per criterion, with fixed seeds,
//! tolerances and time budgets. Exits non-zero when any criterion fails
//! other than the documented discrepancy in `KNOWN_DISCREPANCIES`.

use std::time::{Duration, Instant};

use leibniz_core::fixtures;
use leibniz_core::knorms::{dual_weighted_k_norm, k_norm, WeightVector};
use leibniz_core::search::{search, PhiClass, SearchConfig, Target};
use leibniz_core::suites::{run_suite, SuiteConfig, SuiteKind, SuiteOutcome};
use leibniz_core::Exponent;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_611;

/// The printed strong-Leibniz instance `f = (−0.3, 0.28, 0.38)` gives
/// 0.600982 / 0.532250, not the reference digits; `f₁ = −0.36` gives them.
const KNOWN_DISCREPANCIES: &[&str] = &["strong-leibniz-reference-as-printed"];

struct Outcome {
    id: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
    budget: Duration,
}

fn run(id: &'static str, budget_secs: u64, body: impl FnOnce() -> (bool, String)) -> Outcome {
    let start = Instant::now();
    let (pass, detail) = body();
    let elapsed = start.elapsed();
    let budget = Duration::from_secs(budget_secs);
    Outcome { id, pass: pass && elapsed < budget, detail, elapsed, budget }
}

fn suite(kind: SuiteKind, trials: usize, n: usize) -> SuiteOutcome {
    let mut cfg = SuiteConfig::for_suite(kind, SEED);
    cfg.trials = trials;
    cfg.n = n;
    run_suite(kind, &cfg).expect("suite runs")
}

fn worst(out: &SuiteOutcome, name: &str) -> f64 {
    out.reports
        .iter()
        .filter(|r| r.name == name)
        .map(|r| r.lhs)
        .fold(0.0, f64::max)
}

fn strong_leibniz_as_printed() -> (bool, String) {
    let ex = fixtures::strong_leibniz_printed_example();
    let lhs_ok = (ex.report.lhs - fixtures::STRONG_LEIBNIZ_LHS).abs() <= fixtures::STRONG_LEIBNIZ_TOLERANCE;
    let rhs_ok = (ex.report.rhs - fixtures::STRONG_LEIBNIZ_RHS).abs() <= fixtures::STRONG_LEIBNIZ_TOLERANCE;
    (
        lhs_ok && rhs_ok && ex.violation_confirmed(),
        format!(
            "f=(-0.3,0.28,0.38): lhs {:.6} rhs {:.6} (reference {} / {} ±{}), check fails: {}",
            ex.report.lhs,
            ex.report.rhs,
            fixtures::STRONG_LEIBNIZ_LHS,
            fixtures::STRONG_LEIBNIZ_RHS,
            fixtures::STRONG_LEIBNIZ_TOLERANCE,
            ex.violation_confirmed()
        ),
    )
}

fn strong_leibniz_corrected() -> (bool, String) {
    let ex = fixtures::strong_leibniz_example();
    let gap = -ex.report.slack;
    let gap_ok = (gap - fixtures::STRONG_LEIBNIZ_GAP).abs() <= fixtures::STRONG_LEIBNIZ_TOLERANCE;
    (
        ex.values_match(None) && ex.violation_confirmed() && gap_ok,
        format!(
            "f=(-0.36,0.28,0.38): lhs {:.6} rhs {:.6} gap {:.6}, check fails: {}",
            ex.report.lhs,
            ex.report.rhs,
            gap,
            ex.violation_confirmed()
        ),
    )
}

fn chain_rule_reference() -> (bool, String) {
    let ex = fixtures::chain_rule_example();
    let lip = ex.report.details["lipschitz"];
    let gap = -ex.report.slack;
    (
        ex.values_match(None)
            && lip == 1.0
            && ex.violation_confirmed()
            && (gap - fixtures::CHAIN_RULE_GAP).abs() <= fixtures::CHAIN_RULE_TOLERANCE,
        format!(
            "spread {:.6} lhs {:.6} lip {} gap {:.6}, check fails: {}",
            ex.report.details["spread_f"],
            ex.report.lhs,
            lip,
            gap,
            ex.violation_confirmed()
        ),
    )
}

fn zero_failures(out: &SuiteOutcome) -> (bool, String) {
    (
        out.ok(),
        format!(
            "{} checks, {} failures, worst violation {:.3e}",
            out.reports.len(),
            out.failures(),
            out.max_violation()
        ),
    )
}

fn k_norm_vertices() -> (bool, String) {
    let mut worst_unit = 0.0_f64;
    let mut count = 0;
    for n in 3..=5 {
        for k in 2..n {
            for signs in 0u32..(1 << n) {
                let v: Vec<f64> = (0..n)
                    .map(|i| if signs & (1 << i) != 0 { -1.0 } else { 1.0 } / k as f64)
                    .collect();
                worst_unit = worst_unit.max((k_norm(&v, k).unwrap() - 1.0).abs());
                count += 1;
            }
            for i in 0..n {
                for s in [1.0, -1.0] {
                    let mut e = vec![0.0; n];
                    e[i] = s;
                    worst_unit = worst_unit.max((k_norm(&e, k).unwrap() - 1.0).abs());
                    count += 1;
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst_dual = 0.0_f64;
    for _ in 0..1000 {
        let n = rng.random_range(1..=8);
        let k = rng.random_range(1..=n);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        let sup = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let l1: f64 = x.iter().map(|v| v.abs()).sum();
        let formula = dual_weighted_k_norm(&x, &WeightVector::ones(n).unwrap(), k).unwrap();
        worst_dual = worst_dual.max((sup.max(l1 / k as f64) - formula).abs());
    }
    (
        worst_unit <= 1e-12 && worst_dual <= 1e-12,
        format!("{count} vertices, unit deviation {worst_unit:.1e}; dual identity deviation {worst_dual:.1e}"),
    )
}

fn open_question_sweep() -> (bool, String) {
    let grid = vec![Exponent::ONE, Exponent::TWO, Exponent::new(3.0).unwrap(), Exponent::INFINITY];
    let mut cfg = SearchConfig::new(Target::ChainRule, 4, grid, 100_000, SEED);
    cfg.refine_steps = 8;
    cfg.phi_class = PhiClass { max_breakpoints: 4, monotone: false };
    let r = search(&cfg).expect("search runs");
    let p1 = r.sweep[0].best_violation;
    let rest: Vec<String> = r.sweep[1..]
        .iter()
        .map(|e| format!("p={} best {:.3e} [{}]", e.p, e.best_violation, e.verdict))
        .collect();
    let replay_ok = (r.replay.violation() - r.best_violation).abs() <= 1e-9;
    (
        p1 >= 0.01 && replay_ok,
        format!("p=1 best {:.6} (need >= 0.01); evidence only: {}", p1, rest.join("; ")),
    )
}

fn main() {
    let outcomes = vec![
        run("strong-leibniz-reference-as-printed", 1, strong_leibniz_as_printed),
        run("strong-leibniz-reference", 1, strong_leibniz_corrected),
        run("chain-rule-reference", 1, chain_rule_reference),
        run("leibniz-suite", 30, || zero_failures(&suite(SuiteKind::Leibniz, 10_000, 8))),
        run("decomposition-identity", 5, || {
            let out = suite(SuiteKind::Decomposition, 1_000, 10);
            let w = worst(&out, "decomposition");
            (out.ok() && w <= 1e-10, format!("{} pairs, max deviation {w:.2e}", out.reports.len()))
        }),
        run("deflated-theta-majorization", 60, || {
            let out = suite(SuiteKind::Majorization, 1_000, 8);
            let maj = out.reports.iter().filter(|r| r.name == "deflated_theta_majorization").count();
            let w = worst(&out, "deflated_theta_majorization");
            (
                out.ok() && w <= 1e-10,
                format!("{maj} pairs (1000 random, rest exhaustive ternary n<=4), max excess {w:.2e}"),
            )
        }),
        run("dual-norm-formula", 60, || {
            let out = suite(SuiteKind::DualNorm, 1_000, 6);
            let w = worst(&out, "dual_weighted_k_norm");
            (out.ok() && w <= 1e-9, format!("{} (x,w,k) triples, max deviation {w:.2e}", out.reports.len()))
        }),
        run("k-norm-unit-ball-vertices", 5, k_norm_vertices),
        run("laplacian-bound", 30, || zero_failures(&suite(SuiteKind::Laplacian, 1_000, 8))),
        run("operator-identities", 10, || {
            let out = suite(SuiteKind::Identities, 1_000, 8);
            let w = worst(&out, "centering_identity").max(worst(&out, "derivation_identities"));
            (out.ok() && w <= 1e-10, format!("{} checks, max deviation {w:.2e}", out.reports.len()))
        }),
        run("chain-rule-markov-square-suites", 60, || {
            let outs = [
                suite(SuiteKind::ChainRule, 10_000, 8),
                suite(SuiteKind::Markov, 10_000, 8),
                suite(SuiteKind::Square, 10_000, 8),
            ];
            let ok = outs.iter().all(|o| o.ok());
            let parts: Vec<String> = outs
                .iter()
                .map(|o| format!("{}: {} failures", o.suite, o.failures()))
                .collect();
            (ok, parts.join(", "))
        }),
        run("replication", 10, || {
            let out = suite(SuiteKind::Replication, 1_000, 8);
            let w = worst(&out, "replication");
            (out.ok() && w <= 1e-12, format!("{} measures, max deviation {w:.2e}", out.reports.len()))
        }),
        run("open-question-sweep", 600, open_question_sweep),
    ];

    let mut unexpected = Vec::new();
    for o in &outcomes {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        let note = if !o.pass && KNOWN_DISCREPANCIES.contains(&o.id) { " (documented discrepancy)" } else { "" };
        println!(
            "{tag} {:<36} {:>8.2?} / {:?}: {}{note}",
            o.id, o.elapsed, o.budget, o.detail
        );
        if o.pass == KNOWN_DISCREPANCIES.contains(&o.id) {
            unexpected.push(o.id);
        }
    }
    let passed = outcomes.iter().filter(|o| o.pass).count();
    println!("acceptance: {passed}/{} criteria pass", outcomes.len());
    if !unexpected.is_empty() {
        eprintln!("unexpected outcome for: {}", unexpected.join(", "));
        std::process::exit(1);
    }
}
