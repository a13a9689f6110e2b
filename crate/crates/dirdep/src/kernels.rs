//! Strongly negative definite kernels of the Euclidean distance and
//! Gram-matrix construction.
//!
//! Three families are supported, all scalar functions of the chord distance:
//! the generalized energy kernel `d^a` with `a` strictly inside `(0, 2)`, the
//! bounded ratio kernel `d / (1 + d)`, and the logarithmic kernel
//! `ln(1 + d^2)`. Gram matrices are stored dense; sample sizes in every
//! supported workflow are at most a few hundred, and the permutation test
//! reuses one Gram across all bootstrap cycles.

use crate::error::{Error, Result};
use crate::geometry::{pairwise_distances, DirectionalSample};
use crate::matrix::SquareMatrix;
use std::sync::atomic::{AtomicU64, Ordering};

/// Default energy-kernel exponent.
pub const DEFAULT_ENERGY_EXPONENT: f64 = 1.0;

static GRAM_BUILDS: AtomicU64 = AtomicU64::new(0);

/// Number of Gram matrices constructed by this process so far. Lets callers
/// assert that Grams are built once and then reused across permutations.
pub fn gram_builds() -> u64 {
    GRAM_BUILDS.load(Ordering::Relaxed)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kernel {
    /// `d^a` with `a` in `(0, 2)`.
    Energy { exponent: f64 },
    /// `d / (1 + d)`.
    Ratio,
    /// `ln(1 + d^2)`.
    Log,
}

impl Kernel {
    /// Energy kernel with a validated exponent.
    pub fn energy(exponent: f64) -> Result<Self> {
        let k = Kernel::Energy { exponent };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<()> {
        if let Kernel::Energy { exponent } = self {
            if !exponent.is_finite() || *exponent <= 0.0 || *exponent >= 2.0 {
                return Err(Error::Config(format!(
                    "energy exponent must lie strictly in (0, 2), got {exponent}"
                )));
            }
        }
        Ok(())
    }

    /// Evaluates the kernel at a nonnegative distance.
    #[inline]
    pub fn eval(&self, dist: f64) -> f64 {
        match *self {
            Kernel::Energy { exponent } => {
                if exponent == 1.0 {
                    dist
                } else {
                    dist.powf(exponent)
                }
            }
            Kernel::Ratio => dist / (1.0 + dist),
            Kernel::Log => (dist * dist).ln_1p(),
        }
    }

    /// Parses a kernel spec string: `energy:<a>` | `ratio` | `log`.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        match spec {
            "ratio" => return Ok(Kernel::Ratio),
            "log" => return Ok(Kernel::Log),
            "energy" => return Kernel::energy(DEFAULT_ENERGY_EXPONENT),
            _ => {}
        }
        if let Some(rest) = spec.strip_prefix("energy:") {
            let a: f64 = rest
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("cannot parse energy exponent {rest:?}")))?;
            return Kernel::energy(a);
        }
        Err(Error::Config(format!(
            "unknown kernel spec {spec:?} (expected energy:<a>, ratio, or log)"
        )))
    }

    /// Canonical spec string, the inverse of [`Kernel::parse`].
    pub fn spec_string(&self) -> String {
        match self {
            Kernel::Energy { exponent } => format!("energy:{exponent}"),
            Kernel::Ratio => "ratio".into(),
            Kernel::Log => "log".into(),
        }
    }

    /// Short subscript used in table headers: the exponent for energy
    /// kernels, `k` for ratio, `l` for log.
    pub fn short_label(&self) -> String {
        match self {
            Kernel::Energy { exponent } => format!("{exponent}"),
            Kernel::Ratio => "k".into(),
            Kernel::Log => "l".into(),
        }
    }
}

/// A matrix of pairwise kernel values for one sample: symmetric, zero
/// diagonal, nonnegative entries.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    values: SquareMatrix,
    kernel: Kernel,
}

impl GramMatrix {
    /// Wraps an existing matrix after checking the Gram invariants.
    pub fn from_parts(values: SquareMatrix, kernel: Kernel) -> Result<Self> {
        if !values.all_finite() {
            return Err(Error::Input("Gram matrix has non-finite entries".into()));
        }
        if !values.is_symmetric(0.0) {
            return Err(Error::Input("Gram matrix must be symmetric".into()));
        }
        for i in 0..values.n() {
            if values.get(i, i) != 0.0 {
                return Err(Error::Input(format!(
                    "Gram matrix must have a zero diagonal (entry {i},{i} = {})",
                    values.get(i, i)
                )));
            }
        }
        if values.data().iter().any(|&v| v < 0.0) {
            return Err(Error::Input("Gram matrix entries must be nonnegative".into()));
        }
        Ok(GramMatrix { values, kernel })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.values.n()
    }

    #[inline]
    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values.get(i, j)
    }

    #[inline]
    pub fn values(&self) -> &SquareMatrix {
        &self.values
    }
}

/// Builds the Gram matrix of a sample under a kernel.
pub fn gram(kernel: Kernel, sample: &DirectionalSample) -> Result<GramMatrix> {
    let distances = pairwise_distances(sample);
    gram_from_distances(kernel, &distances)
}

/// Builds a Gram matrix from a precomputed pairwise-distance matrix, so one
/// distance matrix can serve several kernels.
pub fn gram_from_distances(kernel: Kernel, distances: &SquareMatrix) -> Result<GramMatrix> {
    kernel.validate()?;
    let n = distances.n();
    let mut values = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = kernel.eval(distances.get(i, j));
            values.set(i, j, v);
            values.set(j, i, v);
        }
    }
    GRAM_BUILDS.fetch_add(1, Ordering::Relaxed);
    Ok(GramMatrix { values, kernel })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::AngleVector;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{PI, TAU};

    fn random_circle_sample(rng: &mut ChaCha8Rng, n: usize) -> DirectionalSample {
        let angles: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * TAU).collect();
        AngleVector::new(angles).unwrap().to_sample()
    }

    #[test]
    fn eval_examples() {
        assert_abs_diff_eq!(
            Kernel::energy(1.0).unwrap().eval(2.0),
            2.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(Kernel::Ratio.eval(1.0), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(Kernel::Log.eval(1.0), 2.0_f64.ln(), epsilon = 1e-15);
        for k in [Kernel::energy(0.25).unwrap(), Kernel::Ratio, Kernel::Log] {
            assert_eq!(k.eval(0.0), 0.0);
        }
    }

    #[test]
    fn energy_exponent_is_validated() {
        assert!(Kernel::energy(0.0).is_err());
        assert!(Kernel::energy(2.0).is_err());
        assert!(Kernel::energy(-0.5).is_err());
        assert!(Kernel::energy(f64::NAN).is_err());
        assert!(Kernel::energy(1.999).is_ok());
    }

    #[test]
    fn parse_round_trips() {
        for spec in ["energy:0.25", "energy:1", "ratio", "log"] {
            let k = Kernel::parse(spec).unwrap();
            assert_eq!(Kernel::parse(&k.spec_string()).unwrap(), k);
        }
        assert!(Kernel::parse("energy:2").is_err());
        assert!(Kernel::parse("gauss").is_err());
    }

    #[test]
    fn gram_trivia() {
        // all points identical -> zero matrix
        let same = DirectionalSample::sphere(vec![1.0, 0.0, 1.0, 0.0, 1.0, 0.0], 2).unwrap();
        let g = gram(Kernel::Ratio, &same).unwrap();
        assert!(g.values().data().iter().all(|&v| v == 0.0));

        // antipodal pair on the circle under energy(1)
        let anti = AngleVector::new(vec![0.0, PI]).unwrap().to_sample();
        let g = gram(Kernel::energy(1.0).unwrap(), &anti).unwrap();
        assert_abs_diff_eq!(g.get(0, 1), 2.0, epsilon = 1e-12);
        assert_eq!(g.get(0, 0), 0.0);
    }

    #[test]
    fn gram_matches_entrywise_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = random_circle_sample(&mut rng, 6);
        for kernel in [Kernel::energy(0.75).unwrap(), Kernel::Ratio, Kernel::Log] {
            let g = gram(kernel, &s).unwrap();
            for i in 0..6 {
                for j in 0..6 {
                    let d = crate::geometry::chord_distance(s.row(i), s.row(j)).unwrap();
                    assert_abs_diff_eq!(g.get(i, j), kernel.eval(d), epsilon = 1e-15);
                }
            }
        }
    }

    #[test]
    fn energy_one_equals_distance_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = random_circle_sample(&mut rng, 8);
        let d = pairwise_distances(&s);
        let g = gram(Kernel::energy(1.0).unwrap(), &s).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                assert_abs_diff_eq!(g.get(i, j), d.get(i, j), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn zero_sum_quadratic_form_is_nonpositive() {
        // negative-definiteness proxy with zero-sum weights
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for trial in 0..200 {
            let n = 2 + (trial % 11);
            let ambient = 2 + (trial % 3);
            let coords: Vec<f64> = (0..n * ambient)
                .map(|_| rng.random::<f64>() - 0.5)
                .collect();
            let s = DirectionalSample::sphere_renormalized(coords, ambient).unwrap();
            let kernel = match trial % 3 {
                0 => Kernel::energy(0.3 + 1.4 * rng.random::<f64>()).unwrap(),
                1 => Kernel::Ratio,
                _ => Kernel::Log,
            };
            let g = gram(kernel, &s).unwrap();
            let mut w: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
            let mean = w.iter().sum::<f64>() / n as f64;
            for v in &mut w {
                *v -= mean;
            }
            let mut quad = 0.0;
            for i in 0..n {
                for j in 0..n {
                    quad += w[i] * w[j] * g.get(i, j);
                }
            }
            assert!(
                quad <= 1e-9,
                "zero-sum quadratic form {quad} > 1e-9 for {kernel:?}, n={n}"
            );
        }
    }

    #[test]
    fn gram_from_parts_checks_invariants() {
        let mut bad = SquareMatrix::zeros(2);
        bad.set(0, 1, 1.0); // asymmetric
        assert!(GramMatrix::from_parts(bad, Kernel::Ratio).is_err());

        let mut diag = SquareMatrix::zeros(2);
        diag.set(0, 0, 0.5);
        assert!(GramMatrix::from_parts(diag, Kernel::Ratio).is_err());
    }

    proptest! {
        #[test]
        fn kernels_nondecreasing_on_0_2(
            a in 0.05..1.95_f64,
            d1 in 0.0..2.0_f64,
            d2 in 0.0..2.0_f64,
        ) {
            let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
            for k in [Kernel::energy(a).unwrap(), Kernel::Ratio, Kernel::Log] {
                prop_assert!(k.eval(lo) <= k.eval(hi) + 1e-15);
            }
        }
    }
}
