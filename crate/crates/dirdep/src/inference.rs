//! Permutation-bootstrap calibration, p-values, and seeded reproducibility.
//!
//! The test keeps the first sample fixed and relabels the second by a uniform
//! random permutation, so everything that depends only on one marginal is
//! computed once. The p-value convention is `(1 + exceed) / (B + 1)` with
//! ties counted as exceedances, which makes the permutation test exactly
//! valid and keeps p-values strictly positive.
//!
//! Reproducibility scheme: all randomness derives from a 64-bit master seed
//! through the counter-based split `split_seed(master, index) =
//! splitmix64(master ^ splitmix64(index))`. Bootstrap cycle `b` draws its
//! permutation from a fresh generator seeded with `split_seed(seed, b)`, so
//! results are independent of evaluation order and thread count.

use crate::error::{Error, Result};
use crate::kernels::GramMatrix;
use crate::matrix::SquareMatrix;
use crate::statistics::{prepare_statistic, PermutableStat, PreparedDcor, StatSpec, TestData};
use rand::seq::SliceRandom;
use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Default number of bootstrap cycles.
pub const DEFAULT_BOOTSTRAP: u32 = 1000;

/// Outcome of a permutation test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestResult {
    /// Canonical identifier of the statistic.
    pub statistic_name: String,
    /// Observed value of the statistic.
    pub statistic: f64,
    /// `(1 + exceed_count) / (bootstrap + 1)`; always in `(0, 1]`.
    pub p_value: f64,
    /// Number of permuted statistics `>=` the observed one.
    pub exceed_count: u32,
    /// Number of bootstrap cycles `B`.
    pub bootstrap: u32,
    /// Length of the permuted index set (the sample size; pooled size for
    /// two-sample statistics).
    pub n: usize,
    /// Master seed the permutation streams were derived from.
    pub seed: u64,
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent child seed from a master seed and a counter.
#[inline]
pub fn split_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index))
}

/// Uniform random permutation of `0..n` (Fisher-Yates).
pub fn random_permutation(n: usize, rng: &mut dyn RngCore) -> Vec<usize> {
    let mut sigma: Vec<usize> = (0..n).collect();
    sigma.shuffle(rng);
    sigma
}

/// Checks that `sigma` is a bijection on `0..sigma.len()`.
pub fn is_permutation(sigma: &[usize]) -> bool {
    let n = sigma.len();
    let mut seen = vec![false; n];
    for &s in sigma {
        if s >= n || seen[s] {
            return false;
        }
        seen[s] = true;
    }
    true
}

/// Number of permuted values at or above the observed one. Ties count.
pub fn exceed_count(observed: f64, permuted: &[f64]) -> u32 {
    permuted.iter().filter(|&&t| t >= observed).count() as u32
}

/// The `(1 + exceed) / (B + 1)` p-value convention.
pub fn p_value_from_exceed(exceed: u32, bootstrap: u32) -> f64 {
    f64::from(1 + exceed) / f64::from(bootstrap + 1)
}

/// Runs a permutation test for any prepared statistic. Rejection at level
/// `alpha` corresponds to `p_value <= alpha` (upper tail; two-sided
/// statistics fold their sign into [`PermutableStat::permuted`]).
///
/// The bootstrap cycles are evaluated in parallel; the result is identical
/// for every thread count because cycle `b` depends only on
/// `split_seed(seed, b)` and the exceed count is an order-independent sum.
pub fn permutation_test(stat: &dyn PermutableStat, bootstrap: u32, seed: u64) -> Result<TestResult> {
    if bootstrap < 1 {
        return Err(Error::Config("bootstrap count must be at least 1".into()));
    }
    let n = stat.sample_len();
    let observed = stat.observed();
    let exceed: u32 = (1..=bootstrap)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(split_seed(seed, u64::from(b)));
            let sigma = random_permutation(n, &mut rng);
            u32::from(stat.permuted(&sigma) >= observed)
        })
        .sum();
    Ok(TestResult {
        statistic_name: stat.name().to_string(),
        statistic: observed,
        p_value: p_value_from_exceed(exceed, bootstrap),
        exceed_count: exceed,
        bootstrap,
        n,
        seed,
    })
}

/// Permutation test of independence for two precomputed Gram matrices under
/// the distance-correlation statistic. The Grams are built once by the
/// caller; permutations act purely by index relabeling.
pub fn permutation_test_dcor(
    a: &GramMatrix,
    b_gram: &GramMatrix,
    bootstrap: u32,
    seed: u64,
) -> Result<TestResult> {
    let prepared = PreparedDcor::new(a, b_gram)?;
    permutation_test(&prepared, bootstrap, seed)
}

/// Prepares the statistic named by `spec` on `data` and runs the permutation
/// test. This is the single entry point the CLI uses for user data.
pub fn run_test(data: &TestData, spec: &StatSpec, bootstrap: u32, seed: u64) -> Result<TestResult> {
    let stat = prepare_statistic(spec, data)?;
    permutation_test(stat.as_ref(), bootstrap, seed)
}

/// Materializes the relabeled Gram matrix `out[i][j] = g[sigma(i)][sigma(j)]`.
///
/// The bootstrap itself never calls this (it works through index
/// indirection); it exists as a checkable specification of what relabeling
/// means and for callers that want the permuted object itself.
pub fn permute_gram(g: &GramMatrix, sigma: &[usize]) -> Result<GramMatrix> {
    if sigma.len() != g.n() || !is_permutation(sigma) {
        return Err(Error::Input(format!(
            "not a permutation of 0..{}: {sigma:?}",
            g.n()
        )));
    }
    let values = SquareMatrix::from_fn(g.n(), |i, j| g.get(sigma[i], sigma[j]));
    GramMatrix::from_parts(values, g.kernel())
}

/// Exhaustive permutation p-value, enumerating all `n!` relabelings
/// (identity included, so the p-value is never zero). A test oracle for the
/// sampled bootstrap; guarded to `n <= 8`.
pub fn exhaustive_permutation_test(stat: &dyn PermutableStat) -> Result<(f64, u64, u64)> {
    let n = stat.sample_len();
    if n > 8 {
        return Err(Error::Config(format!(
            "exhaustive enumeration is limited to n <= 8, got {n}"
        )));
    }
    let observed = stat.observed();
    let mut sigma: Vec<usize> = (0..n).collect();
    let mut exceed: u64 = 0;
    let mut total: u64 = 0;
    // Heap's algorithm
    let mut c = vec![0usize; n];
    let visit = |s: &[usize], exceed: &mut u64, total: &mut u64| {
        *total += 1;
        if stat.permuted(s) >= observed {
            *exceed += 1;
        }
    };
    visit(&sigma, &mut exceed, &mut total);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                sigma.swap(0, i);
            } else {
                sigma.swap(c[i], i);
            }
            visit(&sigma, &mut exceed, &mut total);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok((exceed as f64 / total as f64, exceed, total))
}
