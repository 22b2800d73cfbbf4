//! Seeded random sampling plus coordinate hill climbing on the violation
//! `lhs − rhs` of one inequality. Positive values are counterexamples.
//!
//! Every trial derives its own seed from the config seed and its index, so
//! results do not depend on how rayon schedules the trials.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::measure::{centered_norm, max_abs, weighted_norm, Exponent, HolderTriple, ProbVector};
use crate::operators::PiecewiseLinearFn;
use crate::report::{VerificationReport, INEQUALITY_TOLERANCE};
use crate::verify::{
    check_chain_rule, check_leibniz, check_markov_variance, check_square_bound,
    check_strong_leibniz,
};

pub const MAX_ATOMS: usize = 16;
pub const MAX_BREAKPOINTS: usize = 8;
pub const MASS_FLOOR: f64 = 1e-3;
pub const STEP_SIZES: [f64; 3] = [0.1, 0.01, 0.001];
/// Smallest `|f_i|` sampled or reached when inverting `f`.
pub const INVERSE_FLOOR: f64 = 0.05;
/// Breakpoints stay at least this far apart.
pub const BREAKPOINT_GAP: f64 = 1e-6;
/// Largest disagreement tolerated between a witness and its replay.
pub const REPLAY_TOLERANCE: f64 = 1e-9;

/// Inequality whose violation is maximized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    ChainRule,
    StrongLeibniz,
    Leibniz,
    SquareBound,
    MarkovVariance,
}

impl Target {
    pub fn uses_phi(self) -> bool {
        matches!(self, Target::ChainRule | Target::MarkovVariance)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Target::ChainRule => "chain_rule",
            Target::StrongLeibniz => "strong_leibniz",
            Target::Leibniz => "leibniz",
            Target::SquareBound => "square_bound",
            Target::MarkovVariance => "markov_variance",
        }
    }
}

impl std::str::FromStr for Target {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.replace('-', "_")))
            .map_err(|_| LabError::InvalidConfig(format!("unknown target `{s}`")))
    }
}

/// Piecewise-linear maps with at most `max_breakpoints` kinks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhiClass {
    #[serde(default = "default_breakpoints")]
    pub max_breakpoints: usize,
    #[serde(default)]
    pub monotone: bool,
}

fn default_breakpoints() -> usize {
    3
}

impl Default for PhiClass {
    fn default() -> Self {
        Self { max_breakpoints: default_breakpoints(), monotone: false }
    }
}

/// `n` is the largest number of atoms; each trial draws its own size
/// uniformly from `2..=n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchConfig {
    pub target: Target,
    pub n: usize,
    pub p_grid: Vec<Exponent>,
    pub trials: u64,
    #[serde(default = "default_refine_steps")]
    pub refine_steps: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub phi_class: PhiClass,
}

fn default_refine_steps() -> usize {
    8
}

impl SearchConfig {
    pub fn new(target: Target, n: usize, p_grid: Vec<Exponent>, trials: u64, seed: u64) -> Self {
        Self {
            target,
            n,
            p_grid,
            trials,
            refine_steps: default_refine_steps(),
            seed,
            phi_class: PhiClass::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(LabError::InvalidConfig(m));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if !(2..=MAX_ATOMS).contains(&self.n) {
            return bad(format!("n must lie in 2..={MAX_ATOMS}, got {}", self.n));
        }
        if self.p_grid.is_empty() {
            return bad("p_grid is empty".into());
        }
        if self.phi_class.max_breakpoints > MAX_BREAKPOINTS {
            return bad(format!(
                "at most {MAX_BREAKPOINTS} breakpoints, got {}",
                self.phi_class.max_breakpoints
            ));
        }
        Ok(())
    }
}

/// One candidate counterexample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchInstance {
    pub mu: Vec<f64>,
    pub f: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<PiecewiseLinearFn>,
    pub p: Exponent,
    /// Fractions of `1/r` given to `1/p1` and `1/p2` (Leibniz only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shares: Option<[f64; 2]>,
}

impl SearchInstance {
    pub fn triples(&self) -> Result<Option<(HolderTriple, HolderTriple)>> {
        match self.shares {
            None => Ok(None),
            Some([a, b]) => Ok(Some((HolderTriple::split(self.p, a)?, HolderTriple::split(self.p, b)?))),
        }
    }
}

/// Point where the running best violation improved.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistoryPoint {
    pub trial: u64,
    pub best_violation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub p: Exponent,
    pub best_violation: f64,
    pub best_trial: u64,
    pub witness: SearchInstance,
    /// Running best over trials, stored at its change points.
    pub history: Vec<HistoryPoint>,
    pub verdict: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub target: Target,
    pub best_violation: f64,
    pub witness: SearchInstance,
    /// The witness checked again through the plain checker.
    pub replay: VerificationReport,
    pub sweep: Vec<SweepEntry>,
    pub verdict: String,
}

impl SearchResult {
    pub fn found_violation(&self) -> bool {
        self.best_violation > INEQUALITY_TOLERANCE
    }
}

fn verdict(best: f64, trials: u64) -> String {
    if best > INEQUALITY_TOLERANCE {
        format!("violation found: {best:.6e}")
    } else {
        format!("no violation found (budget {trials} trials with refinement)")
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `trial` in sweep `sweep` of a search seeded with `seed`.
pub fn trial_seed(seed: u64, sweep: usize, trial: u64) -> u64 {
    splitmix64(splitmix64(seed ^ splitmix64(sweep as u64)) ^ trial)
}

/// Mutable, flat view of an instance used inside the hot loop.
#[derive(Debug, Clone)]
struct Work {
    mu: Vec<f64>,
    f: Vec<f64>,
    g: Vec<f64>,
    bps: Vec<f64>,
    slopes: Vec<f64>,
    p: Exponent,
    shares: Option<[f64; 2]>,
    triples: Option<(HolderTriple, HolderTriple)>,
}

impl Work {
    fn from_instance(inst: &SearchInstance) -> Result<Self> {
        let (bps, slopes) = match &inst.phi {
            Some(phi) => (phi.breakpoints().to_vec(), phi.slopes().to_vec()),
            None => (Vec::new(), Vec::new()),
        };
        Ok(Self {
            mu: inst.mu.clone(),
            f: inst.f.clone(),
            g: inst.g.clone().unwrap_or_default(),
            bps,
            slopes,
            p: inst.p,
            shares: inst.shares,
            triples: inst.triples()?,
        })
    }

    fn to_instance(&self, target: Target) -> SearchInstance {
        SearchInstance {
            mu: self.mu.clone(),
            f: self.f.clone(),
            g: (target == Target::Leibniz).then(|| self.g.clone()),
            phi: target.uses_phi().then(|| {
                PiecewiseLinearFn::new(self.bps.clone(), self.slopes.clone(), 0.0)
                    .expect("search keeps φ valid")
            }),
            p: self.p,
            shares: self.shares,
        }
    }

    /// Same arithmetic as `PiecewiseLinearFn::eval` with anchor 0.
    fn phi(&self, x: f64) -> f64 {
        let b = &self.bps;
        if b.is_empty() {
            return self.slopes[0] * x;
        }
        let j = b.partition_point(|v| *v <= x);
        if j == 0 {
            return self.slopes[0] * (x - b[0]);
        }
        let mut knot = 0.0;
        for k in 1..j {
            knot += self.slopes[k] * (b[k] - b[k - 1]);
        }
        knot + self.slopes[j] * (x - b[j - 1])
    }

    fn lipschitz(&self) -> f64 {
        self.slopes.iter().fold(0.0_f64, |m, s| m.max(s.abs()))
    }

    fn violation(&self, target: Target) -> f64 {
        let n = self.f.len();
        let (w, f, p) = (&self.mu[..], &self.f[..], self.p);
        let mut buf = [0.0_f64; MAX_ATOMS];
        let buf = &mut buf[..n];
        match target {
            Target::ChainRule => {
                for (b, &x) in buf.iter_mut().zip(f) {
                    *b = self.phi(x);
                }
                centered_norm(buf, w, p) - self.lipschitz() * centered_norm(f, w, p)
            }
            Target::StrongLeibniz => {
                for (b, &x) in buf.iter_mut().zip(f) {
                    *b = 1.0 / x;
                }
                let sup = max_abs(buf);
                centered_norm(buf, w, p) - sup * sup * centered_norm(f, w, p)
            }
            Target::Leibniz => {
                let (t1, t2) = self.triples.expect("leibniz instances carry shares");
                let g = &self.g[..];
                for ((b, &x), &y) in buf.iter_mut().zip(f).zip(g) {
                    *b = x * y;
                }
                let first = weighted_norm(f, w, t1.p()) * centered_norm(g, w, t1.q());
                let second = weighted_norm(g, w, t2.p()) * centered_norm(f, w, t2.q());
                centered_norm(buf, w, t1.r()) - (first + second)
            }
            Target::SquareBound => {
                for (b, &x) in buf.iter_mut().zip(f) {
                    *b = x * x;
                }
                centered_norm(buf, w, p) - 2.0 * max_abs(f) * centered_norm(f, w, p)
            }
            Target::MarkovVariance => {
                for (b, &x) in buf.iter_mut().zip(f) {
                    *b = self.phi(x);
                }
                let lip = self.lipschitz();
                var(buf, w) - lip * lip * var(f, w)
            }
        }
    }
}

fn var(x: &[f64], w: &[f64]) -> f64 {
    let mean: f64 = x.iter().zip(w).map(|(a, m)| a * m).sum();
    x.iter().map(|v| v - mean).zip(w).map(|(c, m)| m * c * c).sum()
}

fn f_feasible(target: Target, v: f64) -> bool {
    let a = v.abs();
    a <= 1.0 && (target != Target::StrongLeibniz || a >= INVERSE_FLOOR)
}

/// Dirichlet(1, …, 1) draw lifted onto the simplex with mass floor.
fn sample_measure(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let s: f64 = e.iter().sum();
    let free = 1.0 - n as f64 * MASS_FLOOR;
    e.iter().map(|v| MASS_FLOOR + free * v / s).collect()
}

fn sample_phi(rng: &mut ChaCha8Rng, class: PhiClass) -> (Vec<f64>, Vec<f64>) {
    let k = rng.random_range(0..=class.max_breakpoints);
    let mut bps: Vec<f64> = (0..k).map(|_| rng.random_range(-1.0..1.0)).collect();
    bps.sort_by(f64::total_cmp);
    bps.dedup_by(|a, b| *a - *b < BREAKPOINT_GAP);
    let lo = if class.monotone { 0.0 } else { -1.0 };
    let mut slopes: Vec<f64> = (0..=bps.len()).map(|_| rng.random_range(lo..=1.0)).collect();
    if !normalize_slopes(&mut slopes) {
        slopes[0] = 1.0;
    }
    (bps, slopes)
}

/// Rescales to `max |slope| = 1`; false when all slopes vanish.
fn normalize_slopes(slopes: &mut [f64]) -> bool {
    let m = slopes.iter().fold(0.0_f64, |a, s| a.max(s.abs()));
    if m == 0.0 || !m.is_finite() {
        return false;
    }
    slopes.iter_mut().for_each(|s| *s /= m);
    true
}

/// Deterministic function of `(config, p, trial_seed)`.
pub fn random_instance(config: &SearchConfig, p: Exponent, trial_seed: u64) -> SearchInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
    let n = rng.random_range(2..=config.n.clamp(2, MAX_ATOMS));
    let mu = sample_measure(&mut rng, n);
    let f: Vec<f64> = match config.target {
        Target::StrongLeibniz => (0..n)
            .map(|_| {
                let a = rng.random_range(INVERSE_FLOOR..=1.0);
                if rng.random_bool(0.5) { a } else { -a }
            })
            .collect(),
        _ => (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect(),
    };
    let mut inst = SearchInstance { mu, f, g: None, phi: None, p, shares: None };
    match config.target {
        Target::Leibniz => {
            inst.g = Some((0..n).map(|_| rng.random_range(-1.0..=1.0)).collect());
            inst.shares = Some([rng.random_range(0.0..=1.0), rng.random_range(0.0..=1.0)]);
        }
        Target::ChainRule | Target::MarkovVariance => {
            let (bps, slopes) = sample_phi(&mut rng, config.phi_class);
            inst.phi = Some(PiecewiseLinearFn::new(bps, slopes, 0.0).expect("sampled φ is valid"));
        }
        _ => {}
    }
    inst
}

/// `lhs − rhs` of the target inequality on `inst`.
pub fn violation(inst: &SearchInstance, target: Target) -> Result<f64> {
    let w = Work::from_instance(inst)?;
    if target.uses_phi() && w.slopes.is_empty() {
        return Err(LabError::InvalidConfig("instance has no φ".into()));
    }
    if target == Target::Leibniz && (w.triples.is_none() || w.g.len() != w.f.len()) {
        return Err(LabError::InvalidConfig("leibniz instance needs g and shares".into()));
    }
    Ok(w.violation(target))
}

/// Moves `μ` by `delta` on atom `i` in the floored simplex.
fn move_mass(mu: &mut [f64], i: usize, delta: f64) -> bool {
    let n = mu.len();
    let free = 1.0 - n as f64 * MASS_FLOOR;
    let mut z = [0.0_f64; MAX_ATOMS];
    for (zj, m) in z.iter_mut().zip(mu.iter()) {
        *zj = ((m - MASS_FLOOR) / free).max(0.0);
    }
    z[i] = (z[i] + delta).max(0.0);
    let s: f64 = z[..n].iter().sum();
    if s <= 0.0 {
        return false;
    }
    for (m, zj) in mu.iter_mut().zip(&z[..n]) {
        *m = MASS_FLOOR + free * zj / s;
    }
    true
}

/// Applies move `c` of size `h`, or returns false if it leaves the
/// feasible region. The caller restores the previous state on rejection.
fn propose(w: &mut Work, target: Target, monotone: bool, c: usize, h: f64) -> bool {
    let n = w.f.len();
    let mut c = c;
    if c < n {
        return move_mass(&mut w.mu, c, h);
    }
    c -= n;
    if c < n {
        let v = w.f[c] + h;
        if !f_feasible(target, v) {
            return false;
        }
        w.f[c] = v;
        return true;
    }
    c -= n;
    if target == Target::Leibniz {
        let v = w.g[c] + h;
        if v.abs() > 1.0 {
            return false;
        }
        w.g[c] = v;
        return true;
    }
    if c < w.slopes.len() {
        let v = w.slopes[c] + h;
        if monotone && v < 0.0 {
            return false;
        }
        w.slopes[c] = v;
        return normalize_slopes(&mut w.slopes);
    }
    c -= w.slopes.len();
    let v = w.bps[c] + h;
    let left_ok = c == 0 || v - w.bps[c - 1] >= BREAKPOINT_GAP;
    let right_ok = c + 1 == w.bps.len() || w.bps[c + 1] - v >= BREAKPOINT_GAP;
    if !(left_ok && right_ok && v.is_finite()) {
        return false;
    }
    w.bps[c] = v;
    true
}

fn coordinate_count(w: &Work, target: Target) -> usize {
    let n = w.f.len();
    match target {
        Target::Leibniz => 3 * n,
        t if t.uses_phi() => 2 * n + w.slopes.len() + w.bps.len(),
        _ => 2 * n,
    }
}

fn climb(w: &mut Work, target: Target, monotone: bool, steps: usize) -> f64 {
    let mut best = w.violation(target);
    if steps == 0 {
        return best;
    }
    let mut saved = w.clone();
    for &h in &STEP_SIZES {
        for _ in 0..steps {
            let mut improved = false;
            for c in 0..coordinate_count(w, target) {
                for dir in [h, -h] {
                    if propose(w, target, monotone, c, dir) {
                        let v = w.violation(target);
                        if v > best {
                            best = v;
                            saved.clone_from(w);
                            improved = true;
                            break;
                        }
                    }
                    w.clone_from(&saved);
                }
            }
            if !improved {
                break;
            }
        }
    }
    best
}

/// Greedy coordinate ascent over `μ`, `f`, `g` and the slopes and
/// breakpoints of `φ`, with step sizes shrinking over three epochs. `steps`
/// bounds the sweeps per epoch. The result never has a smaller violation
/// than the input.
pub fn refine(inst: &SearchInstance, target: Target, steps: usize) -> Result<SearchInstance> {
    violation(inst, target)?;
    let mut w = Work::from_instance(inst)?;
    let monotone = w.slopes.iter().all(|s| *s >= 0.0);
    climb(&mut w, target, monotone, steps);
    if steps == 0 {
        return Ok(inst.clone());
    }
    Ok(w.to_instance(target))
}

fn run_trial(config: &SearchConfig, p: Exponent, seed: u64) -> (f64, Work) {
    let inst = random_instance(config, p, seed);
    let mut w = Work::from_instance(&inst).expect("sampled shares are valid");
    let v = climb(&mut w, config.target, config.phi_class.monotone, config.refine_steps);
    (v, w)
}

/// Checks `inst` through the ordinary checker for `target`.
pub fn replay(inst: &SearchInstance, target: Target, tol: f64) -> Result<VerificationReport> {
    let mu = ProbVector::new(inst.mu.clone())?;
    let phi = || {
        inst.phi
            .as_ref()
            .ok_or_else(|| LabError::InvalidConfig("instance has no φ".into()))
    };
    match target {
        Target::ChainRule => check_chain_rule(&mu, &inst.f, phi()?, inst.p, tol),
        Target::StrongLeibniz => check_strong_leibniz(&mu, &inst.f, inst.p, tol),
        Target::SquareBound => check_square_bound(&mu, &inst.f, inst.p, tol),
        Target::MarkovVariance => check_markov_variance(&mu, &inst.f, phi()?, tol),
        Target::Leibniz => {
            let g = inst
                .g
                .as_ref()
                .ok_or_else(|| LabError::InvalidConfig("leibniz instance needs g".into()))?;
            let (t1, t2) = inst
                .triples()?
                .ok_or_else(|| LabError::InvalidConfig("leibniz instance needs shares".into()))?;
            check_leibniz(&mu, &inst.f, g, t1, t2, tol)
        }
    }
}

/// Runs `trials` refined trials for every exponent in the grid.
pub fn search(config: &SearchConfig) -> Result<SearchResult> {
    config.validate()?;
    let mut sweep = Vec::with_capacity(config.p_grid.len());
    for (k, &p) in config.p_grid.iter().enumerate() {
        let scores: Vec<f64> = (0..config.trials)
            .into_par_iter()
            .map(|t| run_trial(config, p, trial_seed(config.seed, k, t)).0)
            .collect();
        let mut history = Vec::new();
        let (mut best, mut best_trial) = (f64::NEG_INFINITY, 0);
        for (t, &v) in scores.iter().enumerate() {
            if v > best {
                best = v;
                best_trial = t as u64;
                history.push(HistoryPoint { trial: t as u64, best_violation: v });
            }
        }
        let (v, w) = run_trial(config, p, trial_seed(config.seed, k, best_trial));
        debug_assert_eq!(v.to_bits(), best.to_bits());
        sweep.push(SweepEntry {
            p,
            best_violation: best,
            best_trial,
            witness: w.to_instance(config.target),
            history,
            verdict: verdict(best, config.trials),
        });
    }
    let top = sweep
        .iter()
        .enumerate()
        .fold(0, |b, (i, e)| if e.best_violation > sweep[b].best_violation { i } else { b });
    let witness = sweep[top].witness.clone();
    let best_violation = sweep[top].best_violation;
    let replay = replay(&witness, config.target, INEQUALITY_TOLERANCE)?;
    Ok(SearchResult {
        target: config.target,
        best_violation,
        witness,
        replay,
        sweep,
        verdict: verdict(best_violation, config.trials),
    })
}
