//! Library results against straightforward reimplementations.

use leibniz_core::knorms::{k_norm, weighted_k_norm, WeightVector};
use leibniz_core::measure::{center, expectation, lp_norm, variance, Exponent, ProbVector};
use leibniz_core::operators::{divided_difference_matrix, theta_matrix, PiecewiseLinearFn};
use leibniz_core::verify::{rationalize, replicate, RationalProbVector};
use leibniz_core::{fixtures, search};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn naive_norm(x: &[f64], mu: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        return x.iter().map(|v| v.abs()).fold(0.0, f64::max);
    }
    x.iter().zip(mu).map(|(v, m)| m * v.abs().powf(p)).sum::<f64>().powf(1.0 / p)
}

fn naive_centered(x: &[f64], mu: &[f64], p: f64) -> f64 {
    let mean: f64 = x.iter().zip(mu).map(|(a, b)| a * b).sum();
    let c: Vec<f64> = x.iter().map(|v| v - mean).collect();
    naive_norm(&c, mu, p)
}

fn random_mu(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..1.0)).collect();
    let s: f64 = raw.iter().sum();
    raw.iter().map(|v| v / s).collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

#[test]
fn weighted_norms_match_direct_sums() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..500 {
        let n = rng.random_range(1..=8);
        let w = random_mu(&mut rng, n);
        let mu = ProbVector::new(w.clone()).unwrap();
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        for p in [1.0, 1.5, 2.0, 3.0, 7.0, f64::INFINITY] {
            let e = Exponent::new(p).unwrap();
            let got = lp_norm(&x, &mu, e).unwrap();
            let want = naive_norm(&x, &w, p);
            assert!((got - want).abs() <= 1e-12 * want.max(1.0), "p={p}: {got} vs {want}");
            let c = lp_norm(&center(&x, &mu).unwrap(), &mu, e).unwrap();
            assert!((c - naive_centered(&x, &w, p)).abs() <= 1e-12 * c.max(1.0));
        }
        let v = variance(&x, &mu).unwrap();
        assert!((v - naive_centered(&x, &w, 2.0).powi(2)).abs() < 1e-12 * v.max(1.0));
    }
}

#[test]
fn k_norms_match_subset_and_permutation_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let n = rng.random_range(1..=5);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let mut w: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..2.0)).collect();
        w.sort_by(|a, b| b.total_cmp(a));
        let wv = WeightVector::new(w.clone()).unwrap();
        for k in 1..=n {
            let best_subset = (0u32..1 << n)
                .filter(|m| m.count_ones() as usize == k)
                .map(|m| (0..n).filter(|i| m & (1 << i) != 0).map(|i| x[i].abs()).sum::<f64>())
                .fold(0.0, f64::max);
            assert!((k_norm(&x, k).unwrap() - best_subset).abs() < 1e-12);
            let best_perm = permutations(n)
                .iter()
                .map(|s| (0..k).map(|i| w[i] * x[s[i]].abs()).sum::<f64>())
                .fold(0.0, f64::max);
            assert!((weighted_k_norm(&x, &wv, k).unwrap() - best_perm).abs() < 1e-12);
        }
    }
}

#[test]
fn theta_and_divided_differences_match_entry_formulas() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let n = rng.random_range(2..=7);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let t = theta_matrix(&x).entries;
        let phi = PiecewiseLinearFn::new(vec![-0.2, 0.4], vec![0.5, -1.0, 2.0], 0.3).unwrap();
        let dd = divided_difference_matrix(&x, &phi).unwrap().entries;
        for i in 0..n {
            let mut t_row = 0.0;
            let mut d_row = 0.0;
            for j in 0..n {
                if i != j {
                    let te = (x[i] + x[j]) / (2.0 * n as f64);
                    assert!((t[(i, j)] - te).abs() < 1e-15);
                    let de = (phi.eval(x[i]) - phi.eval(x[j])) / (x[i] - x[j]);
                    assert!((dd[(i, j)] - de).abs() < 1e-12 * de.abs().max(1.0));
                    t_row += te;
                    d_row += de;
                }
            }
            assert!((t[(i, i)] + t_row).abs() < 1e-14);
            assert!((dd[(i, i)] + d_row).abs() < 1e-10);
        }
    }
}

#[test]
fn strong_leibniz_reference_from_exact_fractions() {
    // μ = (1/36, 27/36, 8/36), f = (−9/25, 7/25, 19/50).
    let mu = [1.0 / 36.0, 27.0 / 36.0, 8.0 / 36.0];
    let f = [-9.0 / 25.0, 7.0 / 25.0, 19.0 / 50.0];
    let inv: Vec<f64> = f.iter().map(|v| 1.0 / v).collect();
    let lhs = naive_centered(&inv, &mu, 1.0);
    let sup = inv.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let rhs = sup * sup * naive_centered(&f, &mu, 1.0);
    let ex = fixtures::strong_leibniz_example();
    assert!((ex.report.lhs - lhs).abs() < 1e-14);
    assert!((ex.report.rhs - rhs).abs() < 1e-14);
    assert!((lhs - 0.57783).abs() < 5e-4 && (rhs - 0.5417).abs() < 5e-4);
}

#[test]
fn chain_rule_reference_from_exact_fractions() {
    // E f = −11/90 + 1/20 + 13/180 = 0, so the ℓ¹ spread is Σ μ_i |f_i|
    // = 11/90 + 1/20 + 13/180 = 11/45.
    let ex = fixtures::chain_rule_example();
    assert!((ex.report.details["spread_f"] - 11.0 / 45.0).abs() < 1e-15);
    // φ(f) = (0, −4/5, −8/25), mean −0.64, ℓ¹ spread 0.26.
    assert!((ex.report.lhs - 0.26).abs() < 1e-15);
    assert_eq!(ex.report.details["lipschitz"], 1.0);
    assert!(!ex.report.pass);
}

#[test]
fn replication_repeats_atoms_in_order() {
    let mu = RationalProbVector::new(vec![1, 2]).unwrap();
    assert_eq!(replicate(&[4.0, -1.0], &mu).unwrap(), vec![4.0, -1.0, -1.0]);
    let id = RationalProbVector::new(vec![1, 1, 1]).unwrap();
    assert_eq!(replicate(&[1.0, 2.0, 3.0], &id).unwrap(), vec![1.0, 2.0, 3.0]);
    let third = ProbVector::new(vec![1.0 / 3.0, 2.0 / 3.0]).unwrap();
    let r = rationalize(&third, 3).unwrap();
    assert_eq!((r.numerators(), r.denominator()), (&[1u64, 2][..], 3));
    let e_mu = expectation(&[4.0, -1.0], &third).unwrap();
    let rep = replicate(&[4.0, -1.0], &r).unwrap();
    assert!((e_mu - rep.iter().sum::<f64>() / 3.0).abs() < 1e-15);
}

#[test]
fn rationalized_measures_are_close_and_keep_leibniz_values() {
    use leibniz_core::verify::check_leibniz;
    use leibniz_core::HolderTriple;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let n = rng.random_range(2..=8);
        let mu = ProbVector::new(random_mu(&mut rng, n)).unwrap();
        let r = rationalize(&mu, 10_000).unwrap();
        assert!(r.denominator() <= 10_000);
        let approx = r.to_prob_vector();
        for (a, b) in mu.weights().iter().zip(approx.weights()) {
            assert!((a - b).abs() <= 1e-4);
        }
        let f: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let g: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let t = HolderTriple::from_pq(Exponent::INFINITY, Exponent::TWO).unwrap();
        let a = check_leibniz(&mu, &f, &g, t, t, 1e-9).unwrap();
        let b = check_leibniz(&approx, &f, &g, t, t, 1e-9).unwrap();
        let bound = 10.0 * n as f64 * 1e-4;
        assert!((a.lhs - b.lhs).abs() <= bound && (a.rhs - b.rhs).abs() <= bound);
    }
}

#[test]
fn search_sampler_respects_support() {
    let cfg = search::SearchConfig::new(search::Target::ChainRule, 6, vec![Exponent::ONE], 1, 0);
    for s in 0..500 {
        let inst = search::random_instance(&cfg, Exponent::ONE, s);
        assert!(ProbVector::new(inst.mu.clone()).is_ok());
        assert!(inst.mu.iter().all(|m| *m >= search::MASS_FLOOR));
        assert!(inst.f.iter().all(|v| v.abs() <= 1.0));
        let phi = inst.phi.unwrap();
        assert!((phi.lipschitz() - 1.0).abs() < 1e-15);
        assert!(phi.breakpoints().len() <= search::MAX_BREAKPOINTS);
    }
}
