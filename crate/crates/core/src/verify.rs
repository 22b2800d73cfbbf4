//! One checker per inequality or identity, each returning a
//! [`VerificationReport`], plus the replication map that turns a rational
//! measure into a uniform one.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_len, LabError, Result};
use crate::measure::{
    abs_rearranged, centered_lp_norm, lp_norm, lp_norm_uniform, majorization_gap, max_abs,
    variance, Exponent, HolderTriple, ProbVector,
};
use crate::operators::{deflated_theta, theta_matrix, PiecewiseLinearFn};
use crate::report::{max_abs_diff, Instance, VerificationReport};

pub use crate::report::{IDENTITY_TOLERANCE, INEQUALITY_TOLERANCE};

/// Entries with smaller magnitude are treated as non-invertible.
pub const INVERTIBILITY_FLOOR: f64 = 1e-6;
/// Largest replicated length `m`.
pub const REPLICATION_CAP: u64 = 100_000;

fn uniform_mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn hadamard(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

/// `fg − E(fg) = −Θ_f(g − Eg) − Θ_g(f − Ef)` under the uniform measure; the
/// uncentered form `−Θ_f g − Θ_g f` is checked as well.
pub fn check_decomposition(f: &[f64], g: &[f64], tol: f64) -> Result<VerificationReport> {
    ensure_len(f.len(), g.len())?;
    if f.is_empty() {
        return Err(LabError::Empty);
    }
    let fg = hadamard(f, g);
    let m = uniform_mean(&fg);
    let lhs: Vec<f64> = fg.iter().map(|v| v - m).collect();

    let (tf, tg) = (theta_matrix(f), theta_matrix(g));
    let (mf, mg) = (uniform_mean(f), uniform_mean(g));
    let fc: Vec<f64> = f.iter().map(|v| v - mf).collect();
    let gc: Vec<f64> = g.iter().map(|v| v - mg).collect();
    let a = tf.apply(&gc)?;
    let b = tg.apply(&fc)?;
    let centered: Vec<f64> = a.iter().zip(&b).map(|(x, y)| -x - y).collect();
    let a = tf.apply(g)?;
    let b = tg.apply(f)?;
    let plain: Vec<f64> = a.iter().zip(&b).map(|(x, y)| -x - y).collect();

    let dev_centered = max_abs_diff(&lhs, &centered);
    let dev_plain = max_abs_diff(&lhs, &plain);
    Ok(VerificationReport::identity(
        "decomposition",
        dev_centered.max(dev_plain),
        tol,
        Instance::new(f).g(g),
    )
    .with_detail("centered_form", dev_centered)
    .with_detail("plain_form", dev_plain))
}

/// `‖Θ_x(y − Ey)‖_r ≤ ‖x‖_p ‖y − Ey‖_q`, norms under the uniform measure.
pub fn check_holder_theta(
    x: &[f64],
    y: &[f64],
    triple: HolderTriple,
    tol: f64,
) -> Result<VerificationReport> {
    ensure_len(x.len(), y.len())?;
    if x.is_empty() {
        return Err(LabError::Empty);
    }
    let my = uniform_mean(y);
    let yc: Vec<f64> = y.iter().map(|v| v - my).collect();
    let image = theta_matrix(x).apply(&yc)?;
    let lhs = lp_norm_uniform(&image, triple.r());
    let rhs = lp_norm_uniform(x, triple.p()) * lp_norm_uniform(&yc, triple.q());
    Ok(VerificationReport::inequality(
        "holder_theta",
        lhs,
        rhs,
        tol,
        Instance::new(x)
            .g(y)
            .exponent("r", triple.r())
            .exponent("p", triple.p())
            .exponent("q", triple.q()),
    ))
}

/// `|(Θ_x − n⁻¹ 1 xᵀ) y| ≺_w |x|↓·|y|↓`. `lhs` is the largest partial-sum
/// excess, so the report passes iff the excess is at most `tol`.
pub fn check_deflated_majorization(x: &[f64], y: &[f64], tol: f64) -> Result<VerificationReport> {
    ensure_len(x.len(), y.len())?;
    if x.is_empty() {
        return Err(LabError::Empty);
    }
    let image: Vec<f64> = crate::operators::mat_vec(&deflated_theta(x), y)
        .into_iter()
        .map(f64::abs)
        .collect();
    let bound = hadamard(&abs_rearranged(x), &abs_rearranged(y));
    let gap = majorization_gap(&bound, &image)?;
    Ok(VerificationReport::identity(
        "deflated_theta_majorization",
        gap.max(0.0),
        tol,
        Instance::new(x).g(y),
    )
    .with_detail("max_partial_sum_excess", gap))
}

/// `‖fg − E(fg)‖_r ≤ ‖f‖_{p1}‖g − Eg‖_{q1} + ‖g‖_{p2}‖f − Ef‖_{q2}`.
pub fn check_leibniz(
    mu: &ProbVector,
    f: &[f64],
    g: &[f64],
    t1: HolderTriple,
    t2: HolderTriple,
    tol: f64,
) -> Result<VerificationReport> {
    if t1.r() != t2.r() {
        return Err(LabError::MismatchedR(t1.r().value(), t2.r().value()));
    }
    ensure_len(mu.len(), f.len())?;
    ensure_len(mu.len(), g.len())?;
    let fg = hadamard(f, g);
    let lhs = centered_lp_norm(&fg, mu, t1.r())?;
    let first = lp_norm(f, mu, t1.p())? * centered_lp_norm(g, mu, t1.q())?;
    let second = lp_norm(g, mu, t2.p())? * centered_lp_norm(f, mu, t2.q())?;
    Ok(VerificationReport::inequality(
        "leibniz",
        lhs,
        first + second,
        tol,
        Instance::new(f)
            .mu(mu.weights())
            .g(g)
            .exponent("r", t1.r())
            .exponent("p1", t1.p())
            .exponent("q1", t1.q())
            .exponent("p2", t2.p())
            .exponent("q2", t2.q()),
    )
    .with_detail("f_times_spread_g", first)
    .with_detail("g_times_spread_f", second))
}

/// `‖φ(f) − Eφ(f)‖_p ≤ Lip(φ)‖f − Ef‖_p`. Monotonicity of `φ` is recorded
/// but not required.
pub fn check_chain_rule(
    mu: &ProbVector,
    f: &[f64],
    phi: &PiecewiseLinearFn,
    p: Exponent,
    tol: f64,
) -> Result<VerificationReport> {
    ensure_len(mu.len(), f.len())?;
    let lip = phi.lipschitz();
    let image = phi.apply(f);
    let lhs = centered_lp_norm(&image, mu, p)?;
    let spread = centered_lp_norm(f, mu, p)?;
    Ok(VerificationReport::inequality(
        "chain_rule",
        lhs,
        lip * spread,
        tol,
        Instance::new(f).mu(mu.weights()).phi(phi).exponent("p", p),
    )
    .with_detail("lipschitz", lip)
    .with_detail("spread_f", spread)
    .with_detail("monotone", if phi.is_monotone() { 1.0 } else { 0.0 }))
}

/// `L(f⁻¹) ≤ ‖f⁻¹‖∞² L(f)` with `L(h) = ‖h − Eh‖_p`.
pub fn check_strong_leibniz(
    mu: &ProbVector,
    f: &[f64],
    p: Exponent,
    tol: f64,
) -> Result<VerificationReport> {
    ensure_len(mu.len(), f.len())?;
    if let Some(index) = f.iter().position(|v| v.abs() < INVERTIBILITY_FLOOR) {
        return Err(LabError::NotInvertible { index, value: f[index] });
    }
    let inv: Vec<f64> = f.iter().map(|v| 1.0 / v).collect();
    let lhs = centered_lp_norm(&inv, mu, p)?;
    let sup = max_abs(&inv);
    let spread = centered_lp_norm(f, mu, p)?;
    Ok(VerificationReport::inequality(
        "strong_leibniz",
        lhs,
        sup * sup * spread,
        tol,
        Instance::new(f).mu(mu.weights()).exponent("p", p),
    )
    .with_detail("inverse_sup_squared", sup * sup)
    .with_detail("spread_f", spread))
}

/// `Var_μ(φ(f)) ≤ Lip(φ)² Var_μ(f)`, any Lipschitz `φ`.
pub fn check_markov_variance(
    mu: &ProbVector,
    f: &[f64],
    phi: &PiecewiseLinearFn,
    tol: f64,
) -> Result<VerificationReport> {
    ensure_len(mu.len(), f.len())?;
    let lip = phi.lipschitz();
    let lhs = variance(&phi.apply(f), mu)?;
    let rhs = lip * lip * variance(f, mu)?;
    Ok(VerificationReport::inequality(
        "markov_variance",
        lhs,
        rhs,
        tol,
        Instance::new(f).mu(mu.weights()).phi(phi),
    )
    .with_detail("lipschitz", lip))
}

/// `‖f² − Ef²‖_p ≤ 2‖f‖_∞ ‖f − Ef‖_p`.
pub fn check_square_bound(
    mu: &ProbVector,
    f: &[f64],
    p: Exponent,
    tol: f64,
) -> Result<VerificationReport> {
    ensure_len(mu.len(), f.len())?;
    let sq = hadamard(f, f);
    let lhs = centered_lp_norm(&sq, mu, p)?;
    let rhs = 2.0 * max_abs(f) * centered_lp_norm(f, mu, p)?;
    Ok(VerificationReport::inequality(
        "square_bound",
        lhs,
        rhs,
        tol,
        Instance::new(f).mu(mu.weights()).exponent("p", p),
    ))
}

/// Probability vector `r_i / m` with positive integer numerators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalProbVector {
    numerators: Vec<u64>,
    denominator: u64,
}

impl RationalProbVector {
    pub fn new(numerators: Vec<u64>) -> Result<Self> {
        if numerators.is_empty() {
            return Err(LabError::Empty);
        }
        if numerators.contains(&0) {
            return Err(LabError::InvalidProbability("zero numerator".into()));
        }
        let denominator: u64 = numerators.iter().sum();
        if denominator > REPLICATION_CAP {
            return Err(LabError::ReplicationCap { m: denominator, cap: REPLICATION_CAP });
        }
        Ok(Self { numerators, denominator })
    }

    pub fn numerators(&self) -> &[u64] {
        &self.numerators
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    pub fn len(&self) -> usize {
        self.numerators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.numerators.is_empty()
    }

    pub fn to_prob_vector(&self) -> ProbVector {
        let m = self.denominator as f64;
        ProbVector::from_masses(&self.numerators.iter().map(|&r| r as f64 / m).collect::<Vec<_>>())
            .expect("positive numerators")
    }
}

/// Repeats `x_i` exactly `r_i` times, giving a vector of length `m`.
pub fn replicate(x: &[f64], mu: &RationalProbVector) -> Result<Vec<f64>> {
    ensure_len(mu.len(), x.len())?;
    if mu.denominator > REPLICATION_CAP {
        return Err(LabError::ReplicationCap { m: mu.denominator, cap: REPLICATION_CAP });
    }
    let mut out = Vec::with_capacity(mu.denominator as usize);
    for (&v, &r) in x.iter().zip(&mu.numerators) {
        out.extend(std::iter::repeat(v).take(r as usize));
    }
    Ok(out)
}

/// Rational approximation with denominator at most `max_denominator`.
///
/// Returns the exact representation when some `m ≤ max_denominator` makes
/// every `μ_i·m` an integer; otherwise apportions `m = max_denominator` by
/// largest remainders, so each atom is off by less than `1/m`.
pub fn rationalize(mu: &ProbVector, max_denominator: u64) -> Result<RationalProbVector> {
    let n = mu.len() as u64;
    if max_denominator < n {
        return Err(LabError::Rationalize(format!(
            "cap {max_denominator} cannot give {n} atoms positive mass"
        )));
    }
    if max_denominator > REPLICATION_CAP {
        return Err(LabError::ReplicationCap { m: max_denominator, cap: REPLICATION_CAP });
    }
    let w = mu.weights();
    for m in n..=max_denominator {
        let mf = m as f64;
        let r: Vec<u64> = w.iter().map(|v| (v * mf).round() as u64).collect();
        if r.iter().sum::<u64>() == m
            && r.iter().all(|&v| v > 0)
            && w.iter().zip(&r).all(|(v, &ri)| (v - ri as f64 / mf).abs() <= 1e-12)
        {
            return RationalProbVector::new(r);
        }
    }

    let m = max_denominator;
    let mf = m as f64;
    let mut r: Vec<u64> = w.iter().map(|v| (v * mf).floor() as u64).collect();
    let assigned: u64 = r.iter().sum();
    let mut order: Vec<usize> = (0..w.len()).collect();
    // Largest remainder first; ties go to the lower index.
    order.sort_by(|&a, &b| {
        let ra = w[a] * mf - r[a] as f64;
        let rb = w[b] * mf - r[b] as f64;
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &i in order.iter().take((m - assigned) as usize) {
        r[i] += 1;
    }
    // Atoms below 1/m borrow a unit from the most over-allocated atom.
    while let Some(zero) = r.iter().position(|&v| v == 0) {
        let donor = (0..r.len())
            .filter(|&i| r[i] >= 2)
            .max_by(|&a, &b| {
                let da = r[a] as f64 / mf - w[a];
                let db = r[b] as f64 / mf - w[b];
                da.total_cmp(&db).then(b.cmp(&a))
            })
            .ok_or_else(|| LabError::Rationalize("no atom can donate mass".into()))?;
        r[donor] -= 1;
        r[zero] = 1;
    }
    let worst = w
        .iter()
        .zip(&r)
        .map(|(v, &ri)| (v - ri as f64 / mf).abs())
        .fold(0.0, f64::max);
    if worst > 1.0 / mf {
        return Err(LabError::Rationalize(format!(
            "per-atom error {worst:e} exceeds 1/{m}"
        )));
    }
    RationalProbVector::new(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{center, expectation};

    fn mu(w: &[f64]) -> ProbVector {
        ProbVector::new(w.to_vec()).unwrap()
    }

    fn e(v: f64) -> Exponent {
        Exponent::new(v).unwrap()
    }

    #[test]
    fn decomposition_trivial_cases() {
        let r = check_decomposition(&[0.0; 3], &[0.0; 3], IDENTITY_TOLERANCE).unwrap();
        assert!(r.pass && r.lhs == 0.0);
        let r = check_decomposition(&[2.0; 4], &[0.3, -1.0, 0.5, 0.9], IDENTITY_TOLERANCE).unwrap();
        assert!(r.pass && r.lhs < 1e-15);
        assert!(check_decomposition(&[1.0], &[1.0, 2.0], 1e-10).is_err());
    }

    #[test]
    fn holder_theta_trivial_cases() {
        let t = HolderTriple::from_pq(e(2.0), e(2.0)).unwrap();
        let r = check_holder_theta(&[0.5, -1.0, 2.0], &[3.0; 3], t, 1e-9).unwrap();
        assert!(r.pass && r.lhs.abs() < 1e-15);
        let r = check_holder_theta(&[0.0; 3], &[0.1, 0.2, 0.3], t, 1e-9).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
    }

    #[test]
    fn leibniz_mismatched_r_is_rejected() {
        let m = mu(&[0.5, 0.5]);
        let t1 = HolderTriple::from_pq(e(2.0), e(2.0)).unwrap();
        let t2 = HolderTriple::from_pq(e(4.0), e(4.0)).unwrap();
        let err = check_leibniz(&m, &[1.0, 2.0], &[0.0, 1.0], t1, t2, 1e-9).unwrap_err();
        assert!(matches!(err, LabError::MismatchedR(..)));
    }

    #[test]
    fn leibniz_constant_f_and_endpoint_case() {
        let m = mu(&[0.2, 0.3, 0.5]);
        let g = [0.4, -0.9, 1.3];
        let t = HolderTriple::from_pq(Exponent::INFINITY, e(2.0)).unwrap();
        let r = check_leibniz(&m, &[-1.5; 3], &g, t, t, 1e-9).unwrap();
        assert!(r.pass);
        let spread = lp_norm(&center(&g, &m).unwrap(), &m, e(2.0)).unwrap();
        assert!((r.lhs - 1.5 * spread).abs() < 1e-14);
        assert!(r.details.contains_key("f_times_spread_g"));
    }

    #[test]
    fn chain_rule_identity_is_equality() {
        let m = mu(&[0.1, 0.6, 0.3]);
        let r = check_chain_rule(&m, &[0.3, -0.2, 0.9], &PiecewiseLinearFn::identity(), e(1.5), 1e-9)
            .unwrap();
        assert!(r.pass && (r.lhs - r.rhs).abs() < 1e-15);
    }

    #[test]
    fn strong_leibniz_needs_invertible_entries() {
        let m = mu(&[0.5, 0.5]);
        let err = check_strong_leibniz(&m, &[1.0, 1e-8], Exponent::ONE, 1e-9).unwrap_err();
        assert!(matches!(err, LabError::NotInvertible { index: 1, .. }));
        let r = check_strong_leibniz(&m, &[0.7, 0.7], Exponent::ONE, 1e-9).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
    }

    #[test]
    fn square_bound_trivial_cases() {
        let half = mu(&[0.5, 0.5]);
        for p in [Exponent::ONE, e(3.0), Exponent::INFINITY] {
            let r = check_square_bound(&half, &[1.0, -1.0], p, 1e-9).unwrap();
            assert!(r.pass && r.lhs == 0.0);
            let r = check_square_bound(&half, &[0.4, 0.4], p, 1e-9).unwrap();
            assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
        }
    }

    #[test]
    fn markov_identity_equality() {
        let m = mu(&[0.3, 0.7]);
        let r = check_markov_variance(&m, &[1.0, -2.0], &PiecewiseLinearFn::identity(), 1e-9).unwrap();
        assert!(r.pass && (r.lhs - r.rhs).abs() < 1e-14);
    }

    #[test]
    fn replicate_examples() {
        let ones = RationalProbVector::new(vec![1, 1, 1]).unwrap();
        assert_eq!(replicate(&[4.0, 5.0, 6.0], &ones).unwrap(), vec![4.0, 5.0, 6.0]);
        let thirds = RationalProbVector::new(vec![1, 2]).unwrap();
        assert_eq!(replicate(&[1.5, -2.0], &thirds).unwrap(), vec![1.5, -2.0, -2.0]);
        let m = thirds.to_prob_vector();
        let e_mu = expectation(&[1.5, -2.0], &m).unwrap();
        assert!((e_mu - uniform_mean(&[1.5, -2.0, -2.0])).abs() < 1e-15);
        assert!(RationalProbVector::new(vec![REPLICATION_CAP, 1]).is_err());
        assert!(RationalProbVector::new(vec![1, 0]).is_err());
    }

    #[test]
    fn rationalize_examples() {
        let r = rationalize(&mu(&[1.0 / 3.0, 2.0 / 3.0]), 3).unwrap();
        assert_eq!((r.numerators(), r.denominator()), (&[1u64, 2][..], 3));
        let r = rationalize(&mu(&[0.25, 0.5, 0.25]), 1000).unwrap();
        assert_eq!((r.numerators(), r.denominator()), (&[1u64, 2, 1][..], 4));
        assert!(rationalize(&mu(&[0.25, 0.5, 0.25]), 2).is_err());
        let w = [0.123456789, 0.2, 0.676543211];
        let r = rationalize(&mu(&w), 10_000).unwrap();
        assert_eq!(r.denominator(), 10_000);
        for (v, &ri) in w.iter().zip(r.numerators()) {
            assert!((v - ri as f64 / 1e4).abs() <= 1e-4);
        }
    }

    #[test]
    fn rationalize_lifts_tiny_atoms() {
        let r = rationalize(&mu(&[0.001, 0.499, 0.5]), 10).unwrap();
        assert!(r.numerators().iter().all(|&v| v > 0));
        assert_eq!(r.denominator(), 10);
    }
}
