//! Independence testing for directional data.
//!
//! `dirdep` implements kernel-induced distance-correlation tests for samples
//! on circles, spheres, and hyperspheres, including mixed pairs such as
//! spherical-linear data. Calibration is by permutation bootstrap, with Gram
//! matrices computed once per test and reused across all permutations. The
//! crate also ships competitor statistics for circular data, samplers for a
//! range of bivariate directional models, and a Monte Carlo harness for
//! size/power studies with reproducible, scheduling-independent seeding.
//!
//! Module map:
//! - [`geometry`]: samples on spheres, angular coordinates, chord distances
//! - [`kernels`]: the kernel families and Gram-matrix construction
//! - [`statistics`]: distance covariance/correlation and competitors
//! - [`inference`]: permutation bootstrap, p-values, seeding
//! - [`samplers`]: bivariate directional models for simulation
//! - [`harness`]: Monte Carlo size/power studies and table output
//! - [`datasets`]: small embedded example datasets

pub mod datasets;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod inference;
pub mod kernels;
pub mod matrix;
pub mod samplers;
pub mod statistics;

#[cfg(test)]
pub(crate) mod test_util;

pub use error::{Error, Result};
