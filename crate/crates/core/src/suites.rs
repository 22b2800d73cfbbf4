//! Randomized property suites. Each instance is generated from its own
//! seed, checked independently, and the reports come back sorted by seed.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::fixtures;
use crate::knorms::{dual_norm_bruteforce, dual_weighted_k_norm, standard_norm_family, WeightVector};
use crate::measure::{lp_norm, lp_norm_uniform, Exponent, HolderTriple, ProbVector};
use crate::operators::{
    centering_identity_check, derivation_checks, divided_difference_from_values,
    divided_difference_matrix, laplacian_conditional_bound, lhat_row_col_bounds,
    LaplacianMatrix, Monotonicity, PiecewiseLinearFn,
};
use crate::report::{Instance, VerificationReport, IDENTITY_TOLERANCE, INEQUALITY_TOLERANCE};
use crate::search::{trial_seed, MASS_FLOOR};
use crate::verify::{
    check_chain_rule, check_decomposition, check_deflated_majorization, check_holder_theta,
    check_leibniz, check_markov_variance, check_square_bound, check_strong_leibniz, replicate,
    RationalProbVector,
};

/// Tolerance for the replication identities.
pub const REPLICATION_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteKind {
    Leibniz,
    Decomposition,
    Majorization,
    Laplacian,
    ChainRule,
    Markov,
    Square,
    StrongLeibniz,
    Identities,
    DualNorm,
    Replication,
}

impl SuiteKind {
    pub const ALL: [SuiteKind; 11] = [
        SuiteKind::Leibniz,
        SuiteKind::Decomposition,
        SuiteKind::Majorization,
        SuiteKind::Laplacian,
        SuiteKind::ChainRule,
        SuiteKind::Markov,
        SuiteKind::Square,
        SuiteKind::StrongLeibniz,
        SuiteKind::Identities,
        SuiteKind::DualNorm,
        SuiteKind::Replication,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SuiteKind::Leibniz => "leibniz",
            SuiteKind::Decomposition => "decomposition",
            SuiteKind::Majorization => "majorization",
            SuiteKind::Laplacian => "laplacian",
            SuiteKind::ChainRule => "chain-rule",
            SuiteKind::Markov => "markov",
            SuiteKind::Square => "square",
            SuiteKind::StrongLeibniz => "strong-leibniz",
            SuiteKind::Identities => "identities",
            SuiteKind::DualNorm => "dual-norm",
            SuiteKind::Replication => "replication",
        }
    }

    /// Accepts the names above and a few short aliases.
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.to_ascii_lowercase().replace('_', "-");
        let kind = match s.as_str() {
            "leibniz" | "theorem1" => SuiteKind::Leibniz,
            "decomposition" => SuiteKind::Decomposition,
            "majorization" | "lemma3" => SuiteKind::Majorization,
            "laplacian" | "theorem2" => SuiteKind::Laplacian,
            "chain-rule" | "theorem3" => SuiteKind::ChainRule,
            "markov" => SuiteKind::Markov,
            "square" => SuiteKind::Square,
            "strong-leibniz" => SuiteKind::StrongLeibniz,
            "identities" => SuiteKind::Identities,
            "dual-norm" | "dualnorm" | "lemma1" => SuiteKind::DualNorm,
            "replication" => SuiteKind::Replication,
            _ => return None,
        };
        Some(kind)
    }

    pub fn default_trials(self) -> usize {
        match self {
            SuiteKind::Leibniz
            | SuiteKind::ChainRule
            | SuiteKind::Markov
            | SuiteKind::Square
            | SuiteKind::StrongLeibniz => 10_000,
            _ => 1_000,
        }
    }

    pub fn default_n(self) -> usize {
        match self {
            SuiteKind::Decomposition => 10,
            SuiteKind::DualNorm => 6,
            SuiteKind::StrongLeibniz => 4,
            _ => 8,
        }
    }

    fn index(self) -> usize {
        SuiteKind::ALL.iter().position(|k| *k == self).unwrap()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub trials: usize,
    /// Largest number of atoms; each instance draws its size below it.
    pub n: usize,
    pub seed: u64,
    /// Overrides the default tolerance of every check.
    pub tol: Option<f64>,
    /// Exponent for the strong-Leibniz sweep.
    pub p: Exponent,
}

impl SuiteConfig {
    pub fn for_suite(kind: SuiteKind, seed: u64) -> Self {
        Self {
            trials: kind.default_trials(),
            n: kind.default_n(),
            seed,
            tol: None,
            p: Exponent::TWO,
        }
    }

    fn ineq_tol(&self) -> f64 {
        self.tol.unwrap_or(INEQUALITY_TOLERANCE)
    }

    fn ident_tol(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteOutcome {
    pub suite: String,
    /// Reports of statements that are theorems, plus marked fixtures.
    pub reports: Vec<VerificationReport>,
    /// Reports of statements that are only conjectured.
    pub open_reports: Vec<VerificationReport>,
}

impl SuiteOutcome {
    /// Failures of theorem-backed checks; marked fixtures do not count.
    pub fn failures(&self) -> usize {
        self.reports.iter().filter(|r| !r.pass && !r.expected_failure).count()
    }

    /// Marked fixtures that failed to fail.
    pub fn unconfirmed_fixtures(&self) -> usize {
        self.reports.iter().filter(|r| r.pass && r.expected_failure).count()
    }

    pub fn open_failures(&self) -> usize {
        self.open_reports.iter().filter(|r| !r.pass).count()
    }

    pub fn ok(&self) -> bool {
        self.failures() == 0 && self.unconfirmed_fixtures() == 0
    }

    pub fn max_violation(&self) -> f64 {
        self.reports
            .iter()
            .filter(|r| !r.expected_failure)
            .map(|r| r.violation())
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

const P_GRID: [f64; 5] = [1.0, 1.5, 2.0, 3.0, f64::INFINITY];
const R_GRID: [f64; 6] = [1.0, 1.5, 2.0, 3.0, 4.0, f64::INFINITY];
/// Fractions of `1/r` given to `1/p`; 0 puts ∞ on `p`, 1 puts it on `q`.
const SHARE_GRID: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

fn exp(v: f64) -> Exponent {
    Exponent::new(v).expect("grid exponent")
}

fn pick<T: Copy>(rng: &mut ChaCha8Rng, xs: &[T]) -> T {
    xs[rng.random_range(0..xs.len())]
}

fn atoms(rng: &mut ChaCha8Rng, max: usize) -> usize {
    rng.random_range(2..=max.max(2))
}

fn uniform_vec(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| scale * rng.random_range(-1.0..=1.0)).collect()
}

/// Uniform entries on `[−s, s]` with `s` itself drawn from `[0.1, max]`.
fn scaled_vec(rng: &mut ChaCha8Rng, n: usize, max: f64) -> Vec<f64> {
    let s = rng.random_range(0.1..=max);
    uniform_vec(rng, n, s)
}

/// Dirichlet(1, …, 1) draw lifted onto the simplex with a mass floor.
pub fn random_measure(rng: &mut ChaCha8Rng, n: usize) -> ProbVector {
    let e: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let s: f64 = e.iter().sum();
    let free = 1.0 - n as f64 * MASS_FLOOR;
    ProbVector::new(e.iter().map(|v| MASS_FLOOR + free * v / s).collect())
        .expect("floored Dirichlet draw")
}

/// Random continuous piecewise-linear map with up to 4 kinks on `[−1, 1]`.
/// `monotone` restricts it to one direction, chosen at random.
pub fn random_phi(rng: &mut ChaCha8Rng, monotone: bool) -> PiecewiseLinearFn {
    let k = rng.random_range(0..=4);
    let mut bps: Vec<f64> = (0..k).map(|_| rng.random_range(-1.0..1.0)).collect();
    bps.sort_by(f64::total_cmp);
    bps.dedup_by(|a, b| *a - *b < 1e-6);
    let scale = rng.random_range(0.1..=3.0);
    let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    let slopes: Vec<f64> = (0..=bps.len())
        .map(|_| {
            if monotone {
                sign * scale * rng.random_range(0.0..=1.0)
            } else {
                scale * rng.random_range(-1.0..=1.0)
            }
        })
        .collect();
    PiecewiseLinearFn::new(bps, slopes, rng.random_range(-1.0..=1.0)).expect("sorted knots")
}

fn run_random<F>(kind: SuiteKind, cfg: &SuiteConfig, check: F) -> Result<Vec<VerificationReport>>
where
    F: Fn(&mut ChaCha8Rng) -> Result<Vec<VerificationReport>> + Sync,
{
    let per: Vec<Result<Vec<VerificationReport>>> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| {
            let seed = trial_seed(cfg.seed, kind.index(), t);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            check(&mut rng).map(|rs| rs.into_iter().map(|r| r.with_seed(seed)).collect())
        })
        .collect();
    let mut out = Vec::new();
    for r in per {
        out.extend(r?);
    }
    out.sort_by_key(|r| r.seed);
    Ok(out)
}

fn leibniz(cfg: &SuiteConfig) -> Result<Vec<VerificationReport>> {
    let tol = cfg.ineq_tol();
    run_random(SuiteKind::Leibniz, cfg, |rng| {
        let n = atoms(rng, cfg.n);
        let mu = random_measure(rng, n);
        let f = scaled_vec(rng, n, 4.0);
        let g = scaled_vec(rng, n, 4.0);
        let r = exp(pick(rng, &R_GRID));
        let mut share = || {
            if rng.random_bool(0.5) { pick(rng, &SHARE_GRID) } else { rng.random_range(0.0..=1.0) }
        };
        let t1 = HolderTriple::split(r, share())?;
        let t2 = HolderTriple::split(r, share())?;
        Ok(vec![check_leibniz(&mu, &f, &g, t1, t2, tol)?])
    })
}

fn decomposition(cfg: &SuiteConfig) -> Result<Vec<VerificationReport>> {
    let tol = cfg.ident_tol(IDENTITY_TOLERANCE);
    run_random(SuiteKind::Decomposition, cfg, |rng| {
        let n = atoms(rng, cfg.n);
        let f = scaled_vec(rng, n, 2.0);
        let g = scaled_vec(rng, n, 2.0);
        Ok(vec![check_decomposition(&f, &g, tol)?])
    })
}

fn holder_grid() -> Vec<HolderTriple> {
    let inf = f64::INFINITY;
    [(1.0, inf, 1.0), (2.0, 2.0, inf), (2.0, 4.0, 4.0), (1.0, 2.0, 2.0), (1.5, 3.0, 3.0)]
        .into_iter()
        .map(|(r, p, q)| HolderTriple::new(exp(r), exp(p), exp(q)).expect("valid grid triple"))
        .collect()
}

fn ternary_vectors(n: usize) -> Vec<Vec<f64>> {
    (0..3usize.pow(n as u32))
        .map(|mut code| {
            (0..n)
                .map(|_| {
                    let d = code % 3;
                    code /= 3;
                    d as f64 - 1.0
                })
                .collect()
        })
        .collect()
}

/// `|(Θ_x − n⁻¹1xᵀ)y| ≺_w |x|↓|y|↓` for every pair in `{−1, 0, 1}ⁿ`.
pub fn exhaustive_majorization(max_n: usize, tol: f64) -> Result<Vec<VerificationReport>> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        let vs = ternary_vectors(n);
        let batch: Vec<Result<Vec<VerificationReport>>> = vs
            .par_iter()
            .map(|x| vs.iter().map(|y| check_deflated_majorization(x, y, tol)).collect())
            .collect();
        for b in batch {
            out.extend(b?);
        }
    }
    Ok(out)
}

fn majorization(cfg: &SuiteConfig) -> Result<Vec<VerificationReport>> {
    let tol = cfg.ident_tol(IDENTITY_TOLERANCE);
    let htol = cfg.ineq_tol();
    let grid = holder_grid();
    let mut out = run_random(SuiteKind::Majorization, cfg, |rng| {
        let n = atoms(rng, cfg.n);
        let x = scaled_vec(rng, n, 3.0);
        let y = scaled_vec(rng, n, 3.0);
        let mut rs = vec![check_deflated_majorization(&x, &y, tol)?];
        for t in &grid {
            rs.push(check_holder_theta(&x, &y, *t, htol)?);
        }
        Ok(rs)
    })?;
    out.extend(exhaustive_majorization(4, tol)?);
    Ok(out)
}

/// Symmetric, zero row sums, non-negative off-diagonal; about a third of
/// the edges are absent.
pub fn random_laplacian(rng: &mut ChaCha8Rng, n: usize) -> LaplacianMatrix {
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let w = if rng.random_bool(1.0 / 3.0) { 0.0 } else { rng.random_range(0.0..=2.0) };
            m[(i, j)] = w;
            m[(j, i)] = w;
        }
    }
    for i in 0..n {
        m[(i, i)] = -m.row(i).iter().sum::<f64>();
    }
    LaplacianMatrix::new(m).expect("constructed as a Laplacian")
}

fn mean_zero(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let x = scaled_vec(rng, n, 3.0);
    let m = x.iter().sum::<f64>() / n as f64;
    x.iter().map(|v| v - m).collect()
}

fn distinct_nodes(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let x = uniform_vec(rng, n, 1.0);
        let mut s = x.clone();
        s.sort_by(f64::total_cmp);
        if s.windows(2).all(|w| w[1] - w[0] > 1e-3) {
            return x;
        }
    }
}

/// Divided-difference Laplacian of a random increasing map: either
/// piecewise linear or one of a few smooth increasing functions.
fn monotone_divided_difference(rng: &mut ChaCha8Rng, n: usize) -> Result<LaplacianMatrix> {
    let x = distinct_nodes(rng, n);
    let dd = match rng.random_range(0..4) {
        0 => {
            let phi = loop {
                let phi = random_phi(rng, true);
                if phi.monotonicity() == Monotonicity::Increasing {
                    break phi;
                }
            };
            divided_difference_matrix(&x, &phi)?
        }
        c => {
            let a = rng.random_range(0.2..=3.0);
            let v: Vec<f64> = x
                .iter()
                .map(|t| match c {
                    1 => (a * t).tanh(),
                    2 => (a * t).exp(),
                    _ => t * t * t + a * t,
                })
                .collect();
            divided_difference_from_values(&x, &v, Monotonicity::Increasing)?
        }
    };
    dd.as_laplacian()
}

fn laplacian(cfg: &SuiteConfig) -> Result<Vec<VerificationReport>> {
    let tol = cfg.ineq_tol();
    run_random(SuiteKind::Laplacian, cfg, |rng| {
        let n = atoms(rng, cfg.n);
        let l = if rng.random_bool(0.5) {
            random_laplacian(rng, n)
        } else {
            monotone_divided_difference(rng, n)?
        };
        let x = mean_zero(rng, n);
        let mut rs = Vec::new();
        for norm in standard_norm_family(n) {
            rs.push(laplacian_conditional_bound(&l, &x, norm.as_ref(), tol)?);
        }
        let (col, row) = lhat_row_col_bounds(&l);
        let bound = n as f64 * l.max_off_diagonal();
        rs.push(
            VerificationReport::inequality(
                "lhat_row_col_bounds",
                col.max(row),
                bound,
                tol,
                Instance::new(&x).matrix(crate::operators::row_major(l.entries())),
            )
            .with_detail("column", col)
            .with_detail("row", row),
        );
        Ok(rs)
    })
}

fn chain_rule(cfg: &SuiteConfig) -> Result<Vec<VerificationReport>> {
    let tol = cfg.ineq_tol();
    run_random(SuiteKind::ChainRule, cfg, |rng| {
        let n = atoms(rng, cfg.n);
        let mu = random_measure(rng, n);
        let f = scaled_vec(rng, n, 2.0);
        let phi = random_phi(rng, true);
        let p = exp(pick(rng, &P_GRID));
        Ok(vec![check_chain_rule(&mu, &f, &phi, p, tol)?])
    })
}

fn markov(cfg: &SuiteConfig) -> Result<Vec<VerificationReport>> {
    let tol = cfg.ineq_tol();
    run_random(SuiteKind::Markov, cfg, |rng| {
        let n = atoms(rng, cfg.n);
        let mu = random_measure(rng, n);
        let f = scaled_vec(rng, n, 2.0);
        let phi = random_phi(rng, false);
        Ok(vec![check_markov_variance(&mu, &f, &phi, tol)?])
    })
}

fn square(cfg: &SuiteConfig) -> Result<Vec<VerificationReport>> {
    let tol = cfg.ineq_tol();
    run_random(SuiteKind::Square, cfg, |rng| {
        let n = atoms(rng, cfg.n);
        let mu = random_measure(rng, n);
        let f = scaled_vec(rng, n, 3.0);
        let p = exp(pick(rng, &P_GRID));
        Ok(vec![check_square_bound(&mu, &f, p, tol)?])
    })
}

/// Marked counterexamples, then a random sweep at `cfg.p` whose reports are
/// kept apart because the statement is only conjectured there.
fn strong_leibniz(cfg: &SuiteConfig) -> Result<SuiteOutcome> {
    let tol = cfg.ineq_tol();
    let reports = vec![
        fixtures::strong_leibniz_example().report,
        fixtures::strong_leibniz_printed_example().report,
    ];
    let open_reports = run_random(SuiteKind::StrongLeibniz, cfg, |rng| {
        let n = atoms(rng, cfg.n);
        let mu = random_measure(rng, n);
        let f: Vec<f64> = (0..n)
            .map(|_| {
                let a = rng.random_range(0.05..=1.0);
                if rng.random_bool(0.5) { a } else { -a }
            })
            .collect();
        Ok(vec![check_strong_leibniz(&mu, &f, cfg.p, tol)?])
    })?;
    Ok(SuiteOutcome { suite: SuiteKind::StrongLeibniz.name().into(), reports, open_reports })
}

fn identities(cfg: &SuiteConfig) -> Result<Vec<VerificationReport>> {
    let tol = cfg.ident_tol(IDENTITY_TOLERANCE);
    run_random(SuiteKind::Identities, cfg, |rng| {
        let n = atoms(rng, cfg.n);
        let x = distinct_nodes(rng, n);
        let monotone = rng.random_bool(0.5);
        let phi = random_phi(rng, monotone);
        let mut a = centering_identity_check(&x, &phi)?;
        a.tolerance = tol;
        a.pass = a.slack >= -tol;
        let f = scaled_vec(rng, n, 2.0);
        let g = scaled_vec(rng, n, 2.0);
        let mut b = derivation_checks(&f, &g)?;
        b.tolerance = tol;
        b.pass = b.slack >= -tol;
        Ok(vec![a, b])
    })
}

fn dual_norm(cfg: &SuiteConfig) -> Result<Vec<VerificationReport>> {
    let tol = cfg.ident_tol(INEQUALITY_TOLERANCE);
    run_random(SuiteKind::DualNorm, cfg, |rng| {
        let n = rng.random_range(1..=cfg.n.clamp(1, crate::knorms::ENUMERATION_CAP));
        let x = scaled_vec(rng, n, 3.0);
        let mut w: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..=2.0)).collect();
        w.sort_by(|a, b| b.total_cmp(a));
        let w = WeightVector::new(w)?;
        (1..=n)
            .map(|k| {
                let formula = dual_weighted_k_norm(&x, &w, k)?;
                let brute = dual_norm_bruteforce(&x, &w, k)?;
                Ok(VerificationReport::identity(
                    "dual_weighted_k_norm",
                    (formula - brute).abs(),
                    tol,
                    Instance::new(&x).g(w.as_slice()).norm(format!("dual_weighted_{k}")),
                )
                .with_detail("formula", formula)
                .with_detail("bruteforce", brute))
            })
            .collect()
    })
}

fn replication(cfg: &SuiteConfig) -> Result<Vec<VerificationReport>> {
    let tol = cfg.ident_tol(REPLICATION_TOLERANCE);
    run_random(SuiteKind::Replication, cfg, |rng| {
        let n = atoms(rng, cfg.n);
        let m_max = rng.random_range(n as u64..=1000);
        let mut nums: Vec<u64> = vec![1; n];
        for _ in n as u64..m_max {
            nums[rng.random_range(0..n)] += 1;
        }
        let rational = RationalProbVector::new(nums)?;
        let mu = rational.to_prob_vector();
        let x = uniform_vec(rng, n, 2.0);
        let y = uniform_vec(rng, n, 2.0);
        let (px, py) = (replicate(&x, &rational)?, replicate(&y, &rational)?);
        let xy: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a * b).collect();
        let pxy: Vec<f64> = px.iter().zip(&py).map(|(a, b)| a * b).collect();
        let (mut norm_dev, mut product_dev) = (0.0_f64, 0.0_f64);
        for &p in &P_GRID {
            let p = exp(p);
            norm_dev = norm_dev.max((lp_norm(&x, &mu, p)? - lp_norm_uniform(&px, p)).abs());
            let lhs = crate::measure::centered_lp_norm(&xy, &mu, p)?;
            let m = pxy.iter().sum::<f64>() / pxy.len() as f64;
            let centered: Vec<f64> = pxy.iter().map(|v| v - m).collect();
            product_dev = product_dev.max((lhs - lp_norm_uniform(&centered, p)).abs());
        }
        Ok(vec![VerificationReport::identity(
            "replication",
            norm_dev.max(product_dev),
            tol,
            Instance::new(&x).mu(mu.weights()).g(&y),
        )
        .with_detail("norm", norm_dev)
        .with_detail("centered_product", product_dev)
        .with_detail("m", rational.denominator() as f64)])
    })
}

pub fn run_suite(kind: SuiteKind, cfg: &SuiteConfig) -> Result<SuiteOutcome> {
    if cfg.n < 2 {
        return Err(LabError::InvalidConfig(format!("n must be at least 2, got {}", cfg.n)));
    }
    let reports = match kind {
        SuiteKind::StrongLeibniz => return strong_leibniz(cfg),
        SuiteKind::Leibniz => leibniz(cfg)?,
        SuiteKind::Decomposition => decomposition(cfg)?,
        SuiteKind::Majorization => majorization(cfg)?,
        SuiteKind::Laplacian => laplacian(cfg)?,
        SuiteKind::ChainRule => chain_rule(cfg)?,
        SuiteKind::Markov => markov(cfg)?,
        SuiteKind::Square => square(cfg)?,
        SuiteKind::Identities => identities(cfg)?,
        SuiteKind::DualNorm => dual_norm(cfg)?,
        SuiteKind::Replication => replication(cfg)?,
    };
    Ok(SuiteOutcome { suite: kind.name().into(), reports, open_reports: Vec::new() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(kind: SuiteKind) -> SuiteOutcome {
        let mut cfg = SuiteConfig::for_suite(kind, 11);
        cfg.trials = 50;
        run_suite(kind, &cfg).unwrap()
    }

    #[test]
    fn every_suite_passes_small_runs() {
        for kind in SuiteKind::ALL {
            let out = small(kind);
            assert!(out.ok(), "{}: {} failures", kind.name(), out.failures());
            assert!(!out.reports.is_empty());
        }
    }

    #[test]
    fn aliases_parse() {
        assert_eq!(SuiteKind::parse("theorem1"), Some(SuiteKind::Leibniz));
        assert_eq!(SuiteKind::parse("Strong_Leibniz"), Some(SuiteKind::StrongLeibniz));
        assert_eq!(SuiteKind::parse("nope"), None);
        for k in SuiteKind::ALL {
            assert_eq!(SuiteKind::parse(k.name()), Some(k));
        }
    }

    #[test]
    fn reports_are_sorted_and_reproducible() {
        let a = small(SuiteKind::Leibniz);
        let b = small(SuiteKind::Leibniz);
        assert_eq!(a, b);
        assert!(a.reports.windows(2).all(|w| w[0].seed <= w[1].seed));
    }

    #[test]
    fn ternary_enumeration_covers_all_patterns() {
        let v = ternary_vectors(3);
        assert_eq!(v.len(), 27);
        let mut dedup = v.clone();
        dedup.sort_by(|a, b| a.partial_cmp(b).unwrap());
        dedup.dedup();
        assert_eq!(dedup.len(), 27);
    }
}
