//! Points on unit spheres and on the real line, angular coordinates for the
//! circle, and pairwise Euclidean (chord) distances.
//!
//! The canonical representation is Cartesian: a sample is an `n x m` matrix of
//! coordinates, either unit vectors in the ambient space of a sphere or plain
//! scalars for linear data. Angles are an input convenience for the circle and
//! are embedded as `(cos, sin)` pairs immediately, so every downstream
//! computation runs on one distance code path regardless of dimension.

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;
use std::f64::consts::TAU;

/// Tolerance for the unit-norm check on sphere-valued rows.
pub const UNIT_NORM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleKind {
    /// Points on the unit sphere of the given dimension, stored as unit
    /// vectors in the ambient space of dimension `dim + 1`.
    Sphere { dim: usize },
    /// Scalar observations on the real line (one coordinate, no norm
    /// constraint).
    Linear,
}

/// A sample of `n` directional (or linear) observations.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionalSample {
    points: Vec<f64>, // row-major n x m
    n: usize,
    m: usize,
    kind: SampleKind,
}

impl DirectionalSample {
    /// Builds a sphere-valued sample from row-major coordinates in the
    /// ambient dimension. Rows must have unit norm within [`UNIT_NORM_TOL`].
    pub fn sphere(points: Vec<f64>, ambient: usize) -> Result<Self> {
        Self::sphere_impl(points, ambient, false)
    }

    /// Like [`DirectionalSample::sphere`] but renormalizes rows instead of
    /// rejecting them. Rows with norm below `1e-12` are still rejected.
    pub fn sphere_renormalized(points: Vec<f64>, ambient: usize) -> Result<Self> {
        Self::sphere_impl(points, ambient, true)
    }

    fn sphere_impl(mut points: Vec<f64>, ambient: usize, renormalize: bool) -> Result<Self> {
        if ambient < 2 {
            return Err(Error::Input(format!(
                "sphere samples need ambient dimension >= 2, got {ambient}"
            )));
        }
        if points.is_empty() || !points.len().is_multiple_of(ambient) {
            return Err(Error::Input(format!(
                "coordinate count {} is not a positive multiple of the ambient dimension {ambient}",
                points.len()
            )));
        }
        let n = points.len() / ambient;
        for (i, row) in points.chunks_mut(ambient).enumerate() {
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::Input(format!("non-finite coordinate in row {i}")));
            }
            let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
            if renormalize {
                if norm < 1e-12 {
                    return Err(Error::Input(format!(
                        "row {i} has near-zero norm {norm:e}; cannot renormalize"
                    )));
                }
                for v in row.iter_mut() {
                    *v /= norm;
                }
            } else if (norm - 1.0).abs() > UNIT_NORM_TOL {
                return Err(Error::Input(format!(
                    "row {i} has norm {norm} (unit norm required within {UNIT_NORM_TOL:e}); \
                     pass renormalization explicitly to accept it"
                )));
            }
        }
        Ok(DirectionalSample {
            points,
            n,
            m: ambient,
            kind: SampleKind::Sphere { dim: ambient - 1 },
        })
    }

    /// Builds a linear sample (one coordinate per observation).
    pub fn linear(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Input("linear sample must be non-empty".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Input(format!("non-finite value in row {i}")));
        }
        let n = values.len();
        Ok(DirectionalSample {
            points: values,
            n,
            m: 1,
            kind: SampleKind::Linear,
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Ambient coordinate dimension (`d + 1` for a sphere, 1 for linear data).
    #[inline]
    pub fn ambient_dim(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn kind(&self) -> SampleKind {
        self.kind
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.points[i * self.m..(i + 1) * self.m]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.points.chunks(self.m)
    }

    /// Recovers angles in `[0, 2pi)` from a circle-valued sample.
    pub fn to_angles(&self) -> Result<AngleVector> {
        if self.kind != (SampleKind::Sphere { dim: 1 }) {
            return Err(Error::Input(
                "angles are only defined for samples on the unit circle".into(),
            ));
        }
        let angles = self
            .rows()
            .map(|row| row[1].atan2(row[0]))
            .collect::<Vec<_>>();
        AngleVector::new(angles)
    }
}

/// A vector of circular observations in radians, normalized to `[0, 2pi)` on
/// construction.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleVector {
    angles: Vec<f64>,
}

impl AngleVector {
    pub fn new(angles: Vec<f64>) -> Result<Self> {
        if angles.is_empty() {
            return Err(Error::Input("angle vector must be non-empty".into()));
        }
        if let Some(i) = angles.iter().position(|a| !a.is_finite()) {
            return Err(Error::Input(format!("non-finite angle in row {i}")));
        }
        let angles = angles
            .into_iter()
            .map(|a| {
                let r = a.rem_euclid(TAU);
                // rem_euclid can return TAU itself for tiny negative inputs
                if r >= TAU {
                    0.0
                } else {
                    r
                }
            })
            .collect();
        Ok(AngleVector { angles })
    }

    pub fn from_degrees(degrees: &[f64]) -> Result<Self> {
        Self::new(degrees.iter().map(|d| d.to_radians()).collect())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.angles.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.angles
    }

    /// Embeds the angles on the unit circle: row `i` is
    /// `(cos theta_i, sin theta_i)`.
    pub fn to_sample(&self) -> DirectionalSample {
        let mut points = Vec::with_capacity(2 * self.angles.len());
        for &a in &self.angles {
            let (s, c) = a.sin_cos();
            points.push(c);
            points.push(s);
        }
        DirectionalSample {
            n: self.angles.len(),
            m: 2,
            points,
            kind: SampleKind::Sphere { dim: 1 },
        }
    }
}

/// Euclidean distance between two points of the same dimension.
pub fn chord_distance(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Input(format!(
            "dimension mismatch: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    Ok(euclidean(x, y))
}

#[inline]
fn euclidean(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// All pairwise chord distances of a sample: symmetric with zero diagonal.
pub fn pairwise_distances(s: &DirectionalSample) -> SquareMatrix {
    let n = s.n();
    let mut m = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let d = euclidean(s.row(i), s.row(j));
            m.set(i, j, d);
            m.set(j, i, d);
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn angles_embed_on_unit_circle() {
        let a = AngleVector::new(vec![0.0, PI / 2.0, PI]).unwrap();
        let s = a.to_sample();
        assert_eq!(s.kind(), SampleKind::Sphere { dim: 1 });
        assert_abs_diff_eq!(s.row(0)[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.row(0)[1], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.row(1)[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.row(1)[1], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.row(2)[0], -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.row(2)[1], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn angle_vector_normalizes_and_validates() {
        let a = AngleVector::new(vec![-PI / 2.0, 3.0 * TAU + 0.25]).unwrap();
        assert_abs_diff_eq!(a.as_slice()[0], 1.5 * PI, epsilon = 1e-12);
        assert_abs_diff_eq!(a.as_slice()[1], 0.25, epsilon = 1e-12);
        assert!(AngleVector::new(vec![f64::NAN]).is_err());
        assert!(AngleVector::new(vec![]).is_err());
    }

    #[test]
    fn chord_distance_examples() {
        let a = AngleVector::new(vec![0.0, PI, PI / 2.0]).unwrap();
        let s = a.to_sample();
        // antipodal points
        assert_abs_diff_eq!(
            chord_distance(s.row(0), s.row(1)).unwrap(),
            2.0,
            epsilon = 1e-12
        );
        // right angle
        assert_abs_diff_eq!(
            chord_distance(s.row(0), s.row(2)).unwrap(),
            2.0_f64.sqrt(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn chord_distance_rejects_dimension_mismatch() {
        assert!(chord_distance(&[1.0, 0.0], &[1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn circle_chord_matches_half_angle_identity() {
        // 2|sin((alpha-beta)/2)| against the direct Euclidean norm
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let alpha: f64 = rng.random::<f64>() * TAU;
            let beta: f64 = rng.random::<f64>() * TAU;
            let s = AngleVector::new(vec![alpha, beta]).unwrap().to_sample();
            let direct = chord_distance(s.row(0), s.row(1)).unwrap();
            let identity = 2.0 * ((alpha - beta) / 2.0).sin().abs();
            assert_abs_diff_eq!(direct, identity, epsilon = 1e-12);
        }
    }

    #[test]
    fn pairwise_matches_elementwise_recomputation() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let angles: Vec<f64> = (0..5).map(|_| rng.random::<f64>() * TAU).collect();
        let s = AngleVector::new(angles).unwrap().to_sample();
        let d = pairwise_distances(&s);
        for i in 0..5 {
            for j in 0..5 {
                let expected = chord_distance(s.row(i), s.row(j)).unwrap();
                assert_abs_diff_eq!(d.get(i, j), expected, epsilon = 1e-15);
            }
        }
        assert!(d.is_symmetric(0.0));
        for i in 0..5 {
            assert_eq!(d.get(i, i), 0.0);
        }
    }

    #[test]
    fn pairwise_trivia() {
        let single = DirectionalSample::sphere(vec![0.0, 0.0, 1.0], 3).unwrap();
        let d = pairwise_distances(&single);
        assert_eq!(d.n(), 1);
        assert_eq!(d.get(0, 0), 0.0);

        let antipodal =
            DirectionalSample::sphere(vec![0.0, 0.0, 1.0, 0.0, 0.0, -1.0], 3).unwrap();
        let d = pairwise_distances(&antipodal);
        assert_abs_diff_eq!(d.get(0, 1), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn sphere_rows_must_be_unit_norm() {
        let bad = DirectionalSample::sphere(vec![0.5, 0.5], 2);
        assert!(bad.is_err());
        let fixed = DirectionalSample::sphere_renormalized(vec![0.5, 0.5], 2).unwrap();
        let norm: f64 = fixed.row(0).iter().map(|v| v * v).sum::<f64>().sqrt();
        assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-12);
        assert!(DirectionalSample::sphere_renormalized(vec![0.0, 0.0], 2).is_err());
    }

    #[test]
    fn linear_samples_have_no_norm_constraint() {
        let s = DirectionalSample::linear(vec![-3.5, 0.0, 12.0]).unwrap();
        assert_eq!(s.kind(), SampleKind::Linear);
        assert_eq!(s.ambient_dim(), 1);
        assert!(DirectionalSample::linear(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn to_angles_round_trips() {
        let a = AngleVector::new(vec![0.1, 2.0, 4.5, 6.1]).unwrap();
        let back = a.to_sample().to_angles().unwrap();
        for (x, y) in a.as_slice().iter().zip(back.as_slice()) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-12);
        }
        let linear = DirectionalSample::linear(vec![1.0]).unwrap();
        assert!(linear.to_angles().is_err());
    }

    #[test]
    fn triangle_inequality_on_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..200 {
            let coords: Vec<f64> = (0..9).map(|_| rng.random::<f64>() - 0.5).collect();
            let s = DirectionalSample::sphere_renormalized(coords, 3).unwrap();
            let d = pairwise_distances(&s);
            assert!(d.get(0, 2) <= d.get(0, 1) + d.get(1, 2) + 1e-9);
            assert!(d.get(0, 1) <= d.get(0, 2) + d.get(2, 1) + 1e-9);
            assert!(d.get(1, 2) <= d.get(1, 0) + d.get(0, 2) + 1e-9);
        }
    }

    proptest! {
        #[test]
        fn chord_invariant_under_common_rotation(
            alpha in 0.0..TAU,
            beta in 0.0..TAU,
            rot in 0.0..TAU,
        ) {
            let before = AngleVector::new(vec![alpha, beta]).unwrap().to_sample();
            let after = AngleVector::new(vec![alpha + rot, beta + rot]).unwrap().to_sample();
            let d0 = chord_distance(before.row(0), before.row(1)).unwrap();
            let d1 = chord_distance(after.row(0), after.row(1)).unwrap();
            prop_assert!((d0 - d1).abs() <= 1e-9);
        }

        #[test]
        fn chord_invariant_under_axis_rotation_on_s2(
            seed in 0u64..1000,
            rot in 0.0..TAU,
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let coords: Vec<f64> = (0..6).map(|_| rng.random::<f64>() - 0.5).collect();
            let s = DirectionalSample::sphere_renormalized(coords, 3).unwrap();
            let (sin_r, cos_r) = rot.sin_cos();
            let rotate = |p: &[f64]| {
                vec![
                    cos_r * p[0] - sin_r * p[1],
                    sin_r * p[0] + cos_r * p[1],
                    p[2],
                ]
            };
            let r0 = rotate(s.row(0));
            let r1 = rotate(s.row(1));
            let d0 = chord_distance(s.row(0), s.row(1)).unwrap();
            let d1 = chord_distance(&r0, &r1).unwrap();
            prop_assert!((d0 - d1).abs() <= 1e-9);
        }
    }
}
