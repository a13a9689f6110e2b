//! Univariate circular marginals: von Mises, wrapped Cauchy, and uniform.
//!
//! Von Mises draws use the Best-Fisher wrapped-Cauchy envelope rejection
//! scheme. Wrapped Cauchy draws, CDFs and quantiles are closed-form. The von
//! Mises CDF has no closed form; it is tabulated once per parameter set on a
//! fixed Simpson grid and inverted by a bracketed Newton iteration, so the
//! cost of repeated quantile evaluations inside bivariate samplers stays
//! negligible.

use crate::error::{Error, Result};
use crate::geometry::AngleVector;
use rand::Rng;
use rand::RngCore;
use std::f64::consts::{PI, TAU};

/// Proposal budget for every rejection loop in this crate.
pub(crate) const MAX_PROPOSALS: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CircularMarginal {
    VonMises { mu: f64, kappa: f64 },
    WrappedCauchy { mu: f64, rho: f64 },
    Uniform,
}

impl CircularMarginal {
    pub fn validate(&self) -> Result<()> {
        match *self {
            CircularMarginal::VonMises { mu, kappa } => {
                if !mu.is_finite() {
                    return Err(Error::Config(format!("VM location must be finite, got {mu}")));
                }
                if !kappa.is_finite() || kappa < 0.0 {
                    return Err(Error::Config(format!(
                        "VM concentration must be >= 0, got {kappa}"
                    )));
                }
            }
            CircularMarginal::WrappedCauchy { mu, rho } => {
                if !mu.is_finite() {
                    return Err(Error::Config(format!("WC location must be finite, got {mu}")));
                }
                if !rho.is_finite() || !(0.0..1.0).contains(&rho) {
                    return Err(Error::Config(format!(
                        "WC concentration must lie in [0, 1), got {rho}"
                    )));
                }
            }
            CircularMarginal::Uniform => {}
        }
        Ok(())
    }

    /// One draw in `[0, 2pi)`.
    pub fn draw(&self, rng: &mut dyn RngCore) -> Result<f64> {
        match *self {
            CircularMarginal::VonMises { mu, kappa } => draw_von_mises(mu, kappa, rng),
            CircularMarginal::WrappedCauchy { mu, rho } => Ok(draw_wrapped_cauchy(mu, rho, rng)),
            CircularMarginal::Uniform => Ok(TAU * rng.random::<f64>()),
        }
    }

    pub fn spec_string(&self) -> String {
        match *self {
            CircularMarginal::VonMises { mu, kappa } => format!("VM({mu},{kappa})"),
            CircularMarginal::WrappedCauchy { mu, rho } => format!("WC({mu},{rho})"),
            CircularMarginal::Uniform => "Unif".into(),
        }
    }
}

/// `n` i.i.d. draws from a circular marginal.
pub fn sample_circular(
    marginal: CircularMarginal,
    n: usize,
    rng: &mut dyn RngCore,
) -> Result<AngleVector> {
    marginal.validate()?;
    if n == 0 {
        return Err(Error::Config("sample size must be at least 1".into()));
    }
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push(marginal.draw(rng)?);
    }
    AngleVector::new(out)
}

/// Best-Fisher rejection sampler for the von Mises distribution.
fn draw_von_mises(mu: f64, kappa: f64, rng: &mut dyn RngCore) -> Result<f64> {
    if kappa < 1e-12 {
        return Ok(TAU * rng.random::<f64>());
    }
    let tau = 1.0 + (1.0 + 4.0 * kappa * kappa).sqrt();
    let rho = (tau - (2.0 * tau).sqrt()) / (2.0 * kappa);
    let r = (1.0 + rho * rho) / (2.0 * rho);
    for _ in 0..MAX_PROPOSALS {
        let u1: f64 = rng.random();
        let z = (PI * u1).cos();
        let f = ((1.0 + r * z) / (r + z)).clamp(-1.0, 1.0);
        let c = kappa * (r - f);
        let u2: f64 = rng.random();
        if c * (2.0 - c) - u2 > 0.0 || (c / u2).ln() + 1.0 - c >= 0.0 {
            let u3: f64 = rng.random();
            let angle = if u3 < 0.5 { -f.acos() } else { f.acos() };
            return Ok((mu + angle).rem_euclid(TAU));
        }
    }
    Err(Error::Sampler(format!(
        "von Mises rejection sampler exceeded {MAX_PROPOSALS} proposals (kappa = {kappa})"
    )))
}

/// Closed-form inverse-CDF draw from the wrapped Cauchy distribution.
fn draw_wrapped_cauchy(mu: f64, rho: f64, rng: &mut dyn RngCore) -> f64 {
    let u: f64 = rng.random();
    (mu + wc_quantile_centered(rho, u)).rem_euclid(TAU)
}

/// CDF of the centered wrapped Cauchy on `[0, 2pi)`.
pub(crate) fn wc_cdf_centered(rho: f64, theta: f64) -> f64 {
    if rho == 0.0 {
        return theta / TAU;
    }
    let a = (1.0 + rho) / (1.0 - rho);
    if theta <= PI {
        (a * (theta / 2.0).tan()).atan() / PI
    } else {
        1.0 - (a * ((TAU - theta) / 2.0).tan()).atan() / PI
    }
}

/// Quantile of the centered wrapped Cauchy, mapping `[0, 1)` onto `[0, 2pi)`.
pub(crate) fn wc_quantile_centered(rho: f64, u: f64) -> f64 {
    if rho == 0.0 {
        return (u * TAU).rem_euclid(TAU);
    }
    let b = (1.0 - rho) / (1.0 + rho);
    let theta = if u <= 0.5 {
        2.0 * (b * (PI * u).tan()).atan()
    } else {
        TAU - 2.0 * (b * (PI * (1.0 - u)).tan()).atan()
    };
    theta.rem_euclid(TAU)
}

const VM_GRID: usize = 4096;

/// Tabulated CDF of a von Mises distribution over one period, built by
/// per-cell Simpson integration of the unnormalized density.
#[derive(Debug, Clone)]
pub(crate) struct VonMisesCdf {
    mu: f64,
    kappa: f64,
    step: f64,
    /// `prefix[k]` = unnormalized integral over `[0, k * step]`.
    prefix: Vec<f64>,
    total: f64,
}

impl VonMisesCdf {
    pub fn new(mu: f64, kappa: f64) -> Self {
        let step = TAU / VM_GRID as f64;
        let density = |t: f64| (kappa * (t - mu).cos()).exp();
        let mut prefix = Vec::with_capacity(VM_GRID + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for k in 0..VM_GRID {
            let a = k as f64 * step;
            acc += simpson_cell(&density, a, step);
            prefix.push(acc);
        }
        VonMisesCdf {
            mu,
            kappa,
            step,
            total: acc,
            prefix,
        }
    }

    #[inline]
    fn density(&self, t: f64) -> f64 {
        (self.kappa * (t - self.mu).cos()).exp()
    }

    pub fn cdf(&self, theta: f64) -> f64 {
        let t = theta.rem_euclid(TAU);
        let k = ((t / self.step) as usize).min(VM_GRID - 1);
        let a = k as f64 * self.step;
        let w = t - a;
        let partial = if w > 0.0 {
            simpson_cell(&|x| self.density(x), a, w)
        } else {
            0.0
        };
        ((self.prefix[k] + partial) / self.total).clamp(0.0, 1.0)
    }

    /// Inverse CDF by cell lookup plus a bracketed Newton iteration; the
    /// bracket is shrunk below 1e-12 before returning.
    pub fn quantile(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        let target = u * self.total;
        let k = self
            .prefix
            .partition_point(|&p| p <= target)
            .saturating_sub(1)
            .min(VM_GRID - 1);
        let mut lo = k as f64 * self.step;
        let mut hi = lo + self.step;
        let base = self.prefix[k];
        let cell_mass = self.prefix[k + 1] - base;
        let mut t = if cell_mass > 0.0 {
            lo + self.step * ((target - base) / cell_mass).clamp(0.0, 1.0)
        } else {
            lo + 0.5 * self.step
        };
        for _ in 0..64 {
            if hi - lo < 1e-12 {
                break;
            }
            let g = base + simpson_cell(&|x| self.density(x), lo_of(k, self.step), t - lo_of(k, self.step)) - target;
            if g > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let d = self.density(t);
            let newton = t - g / d;
            t = if newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
        }
        t.rem_euclid(TAU)
    }
}

#[inline]
fn lo_of(k: usize, step: f64) -> f64 {
    k as f64 * step
}

/// Simpson's rule over `[a, a + w]`.
#[inline]
fn simpson_cell(f: &dyn Fn(f64) -> f64, a: f64, w: f64) -> f64 {
    if w <= 0.0 {
        return 0.0;
    }
    (f(a) + 4.0 * f(a + 0.5 * w) + f(a + w)) * w / 6.0
}

/// The CDF/quantile pair of a centered marginal, used by the bivariate
/// binding constructions.
#[derive(Debug, Clone)]
pub(crate) enum MarginalCdf {
    Uniform,
    WrappedCauchy { rho: f64 },
    VonMises(Box<VonMisesCdf>),
}

impl MarginalCdf {
    /// Builds the CDF machinery for a marginal. Only centered (`mu = 0`)
    /// von Mises / wrapped Cauchy marginals appear in the supported
    /// constructions; the von Mises table handles any location regardless.
    pub fn new(marginal: &CircularMarginal) -> Result<Self> {
        marginal.validate()?;
        Ok(match *marginal {
            CircularMarginal::Uniform => MarginalCdf::Uniform,
            CircularMarginal::WrappedCauchy { mu, rho } => {
                if mu != 0.0 {
                    return Err(Error::Config(
                        "wrapped Cauchy CDF is only supported for centered marginals".into(),
                    ));
                }
                MarginalCdf::WrappedCauchy { rho }
            }
            CircularMarginal::VonMises { mu, kappa } => {
                MarginalCdf::VonMises(Box::new(VonMisesCdf::new(mu, kappa)))
            }
        })
    }

    pub fn cdf(&self, theta: f64) -> f64 {
        let t = theta.rem_euclid(TAU);
        match self {
            MarginalCdf::Uniform => t / TAU,
            MarginalCdf::WrappedCauchy { rho } => wc_cdf_centered(*rho, t),
            MarginalCdf::VonMises(vm) => vm.cdf(t),
        }
    }

    pub fn quantile(&self, u: f64) -> f64 {
        match self {
            MarginalCdf::Uniform => (u.clamp(0.0, 1.0) * TAU).rem_euclid(TAU),
            MarginalCdf::WrappedCauchy { rho } => wc_quantile_centered(*rho, u.clamp(0.0, 1.0)),
            MarginalCdf::VonMises(vm) => vm.quantile(u),
        }
    }
}
