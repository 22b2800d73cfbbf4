//! Finite-measure Leibniz, chain-rule and majorization inequalities.
//!
//! Vectors live on `n` atoms carrying a strictly positive probability
//! vector `μ`. The crate provides weighted `ℓ^p(μ)` norms, Ky Fan and
//! weighted k-norms with their duals, the `Θ` and divided-difference
//! matrices, one checker per inequality, and a seeded randomized search for
//! counterexamples.
//!
//! ```
//! use leibniz_core::{check_leibniz, Exponent, HolderTriple, ProbVector};
//!
//! let mu = ProbVector::uniform(3).unwrap();
//! let t = HolderTriple::from_pq(Exponent::INFINITY, Exponent::TWO).unwrap();
//! let r = check_leibniz(&mu, &[1.0, -2.0, 0.5], &[0.3, 0.1, -0.7], t, t, 1e-9).unwrap();
//! assert!(r.pass);
//! ```

pub mod error;
pub mod fixtures;
pub mod knorms;
pub mod measure;
pub mod operators;
pub mod report;
pub mod search;
pub mod suites;
pub mod verify;

pub use error::{LabError, Result};
pub use knorms::{
    dual_norm_bruteforce, dual_weighted_k_norm, k_norm, weighted_k_norm, SymmetricNorm,
    WeightVector,
};
pub use measure::{center, expectation, lp_norm, Exponent, HolderTriple, ProbVector};
pub use operators::PiecewiseLinearFn;
pub use report::{Instance, VerificationReport};
pub use search::{search, SearchConfig, SearchResult, Target};
pub use verify::{
    check_chain_rule, check_decomposition, check_holder_theta, check_leibniz,
    check_markov_variance, check_square_bound, check_strong_leibniz, rationalize, replicate,
    RationalProbVector,
};
