//! Sphere-valued sampling: uniform directions and the von Mises-Fisher
//! family in any ambient dimension >= 2.
//!
//! vMF draws use the tangent-normal decomposition: the component along the
//! mean direction comes from a rejection step with a Beta-based envelope, the
//! orthogonal part is an independent uniform tangent direction. Zero
//! concentration short-circuits to a normalized Gaussian vector.

use super::circular::MAX_PROPOSALS;
use crate::error::{Error, Result};
use crate::geometry::{DirectionalSample, UNIT_NORM_TOL};
use rand::Rng;
use rand::RngCore;
use rand_distr::{Beta, Distribution, StandardNormal};

/// A uniformly distributed unit vector in `R^ambient`.
pub fn uniform_unit_vector(ambient: usize, rng: &mut dyn RngCore) -> Vec<f64> {
    loop {
        let g: Vec<f64> = (0..ambient)
            .map(|_| StandardNormal.sample(rng))
            .collect();
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return g.into_iter().map(|v| v / norm).collect();
        }
    }
}

/// Machinery for repeated vMF draws with fixed parameters.
pub(crate) struct VmfSampler {
    mu: Vec<f64>,
    kappa: f64,
    envelope: Option<VmfEnvelope>,
}

struct VmfEnvelope {
    b: f64,
    x0: f64,
    log_c: f64,
    beta: Beta<f64>,
}

impl VmfSampler {
    pub fn new(mu: &[f64], kappa: f64) -> Result<Self> {
        let ambient = mu.len();
        if ambient < 2 {
            return Err(Error::Input(format!(
                "vMF mean direction needs dimension >= 2, got {ambient}"
            )));
        }
        let norm = mu.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::Input(format!(
                "vMF mean direction must have unit norm (within {UNIT_NORM_TOL:e}), got norm {norm}"
            )));
        }
        if !kappa.is_finite() || kappa < 0.0 {
            return Err(Error::Config(format!(
                "vMF concentration must be >= 0, got {kappa}"
            )));
        }
        let envelope = if kappa > 0.0 {
            let d = (ambient - 1) as f64;
            let b = d / (2.0 * kappa + (4.0 * kappa * kappa + d * d).sqrt());
            let x0 = (1.0 - b) / (1.0 + b);
            let log_c = kappa * x0 + d * (1.0 - x0 * x0).ln();
            let beta = Beta::new(d / 2.0, d / 2.0)
                .map_err(|e| Error::Config(format!("Beta envelope: {e}")))?;
            Some(VmfEnvelope { b, x0, log_c, beta })
        } else {
            None
        };
        Ok(VmfSampler {
            mu: mu.to_vec(),
            kappa,
            envelope,
        })
    }

    pub fn draw(&self, rng: &mut dyn RngCore) -> Result<Vec<f64>> {
        let ambient = self.mu.len();
        let env = match &self.envelope {
            None => return Ok(uniform_unit_vector(ambient, rng)),
            Some(env) => env,
        };
        let d = (ambient - 1) as f64;
        let mut along = None;
        for _ in 0..MAX_PROPOSALS {
            let z: f64 = env.beta.sample(rng);
            let u: f64 = rng.random();
            let w = ((1.0 - (1.0 + env.b) * z) / (1.0 - (1.0 - env.b) * z)).clamp(-1.0, 1.0);
            if self.kappa * w + d * (1.0 - env.x0 * w).ln() - env.log_c >= u.ln() {
                along = Some(w);
                break;
            }
        }
        let w = along.ok_or_else(|| {
            Error::Sampler(format!(
                "vMF rejection sampler exceeded {MAX_PROPOSALS} proposals (kappa = {})",
                self.kappa
            ))
        })?;

        // uniform direction in the tangent space at mu
        let tangent = loop {
            let g: Vec<f64> = (0..ambient)
                .map(|_| StandardNormal.sample(rng))
                .collect();
            let dot: f64 = g.iter().zip(&self.mu).map(|(a, b)| a * b).sum();
            let mut t: Vec<f64> = g
                .iter()
                .zip(&self.mu)
                .map(|(gi, mi)| gi - dot * mi)
                .collect();
            let norm = t.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 1e-9 {
                for v in &mut t {
                    *v /= norm;
                }
                break t;
            }
        };

        let sine = (1.0 - w * w).max(0.0).sqrt();
        let mut x: Vec<f64> = self
            .mu
            .iter()
            .zip(&tangent)
            .map(|(mi, ti)| w * mi + sine * ti)
            .collect();
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in &mut x {
            *v /= norm;
        }
        Ok(x)
    }
}

/// `n` i.i.d. von Mises-Fisher draws on the unit sphere of `mu`'s ambient
/// space. `kappa = 0` is the uniform distribution on the sphere.
pub fn sample_vmf(
    mu: &[f64],
    kappa: f64,
    n: usize,
    rng: &mut dyn RngCore,
) -> Result<DirectionalSample> {
    if n == 0 {
        return Err(Error::Config("sample size must be at least 1".into()));
    }
    let sampler = VmfSampler::new(mu, kappa)?;
    let ambient = mu.len();
    let mut points = Vec::with_capacity(n * ambient);
    for _ in 0..n {
        points.extend(sampler.draw(rng)?);
    }
    DirectionalSample::sphere(points, ambient)
}
