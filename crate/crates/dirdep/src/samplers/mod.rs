//! Random generation for the bivariate directional models used in the
//! size/power studies: circular-circular pairs, spherical pairs, and
//! circular-linear pairs.
//!
//! Every model is described by a [`ModelSpec`], parseable from a compact
//! string grammar (see [`ModelSpec::parse`]). Specs compile once into a
//! [`PairSampler`] so per-scenario setup work (CDF tables, Cholesky factors,
//! envelope constants) is not repeated across Monte Carlo replicates. All
//! sampling is driven by a caller-provided RNG; identical spec, size, and
//! generator state produce identical samples.

mod circular;
mod sphere;

pub use circular::{sample_circular, CircularMarginal};
pub use sphere::{sample_vmf, uniform_unit_vector};

use crate::error::{Error, Result};
use crate::geometry::{AngleVector, DirectionalSample};
use circular::{MarginalCdf, MAX_PROPOSALS};
use rand::Rng;
use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};
use sphere::VmfSampler;
use std::f64::consts::{PI, TAU};

/// A paired sample of equal size.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedSample {
    pub x: DirectionalSample,
    pub y: DirectionalSample,
}

impl PairedSample {
    pub fn n(&self) -> usize {
        self.x.n()
    }
}

/// Declarative description of a bivariate model.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    /// Independent circular marginals.
    Product {
        f: CircularMarginal,
        g: CircularMarginal,
    },
    /// Parabolic dependence: with `V, W ~ Unif[0, 1)` independent,
    /// `theta1 = 2 pi V` and `theta2 = 2 pi (p V^2 + (1-p) W^2)`, so `p = 1`
    /// places the pairs exactly on a parabola and `p = 0` is independence.
    Parabolic { p: f64 },
    /// Centered bivariate von Mises: von Mises marginals bound by a von
    /// Mises density on the CDF difference.
    BivariateVonMises {
        kappa1: f64,
        kappa2: f64,
        mu_g: f64,
        kappa_g: f64,
    },
    /// Centered bivariate wrapped Cauchy: wrapped Cauchy marginals bound by
    /// a wrapped Cauchy density on the CDF difference.
    BivariateWrappedCauchy { rho1: f64, rho2: f64, rho: f64 },
    /// Cosine-interaction bivariate von Mises, density proportional to
    /// `exp(k1 cos t1 + k2 cos t2 + k3 cos(t1 - t2))`.
    CosineVonMises { kappa1: f64, kappa2: f64, kappa3: f64 },
    /// `theta1 ~ F`; `theta2 = theta1` with probability `p`, otherwise an
    /// independent draw from `G`.
    Mixture {
        f: CircularMarginal,
        g: CircularMarginal,
        p: f64,
    },
    /// Spherical pair: `X ~ vMF(e1, base_kappa)`; `Y = X` with probability
    /// `mix_p`, otherwise an independent `vMF(e1, mix_kappa)` draw.
    VmfMix {
        ambient: usize,
        base_kappa: f64,
        mix_kappa: f64,
        mix_p: f64,
    },
    /// Projected normal: `(X1, X2, Z)` trivariate normal with unit variances
    /// and the given correlations; output `((X1, X2)/|X|, Z)`.
    ProjectedNormal {
        dim: usize,
        s12: f64,
        s13: f64,
        s23: f64,
    },
    /// Von Mises copula with uniform marginals: circular `theta = 2 pi u`,
    /// linear `z = (u - omega / 2pi) mod 1` with `omega ~ VM(0, kappa)`.
    VonMisesCopula { kappa: f64 },
}

impl ModelSpec {
    /// Table shorthand `BvM(x)`: unit-concentration marginals, centered
    /// binding with concentration `x`.
    pub fn bvm_preset(kappa_g: f64) -> Self {
        ModelSpec::BivariateVonMises {
            kappa1: 1.0,
            kappa2: 1.0,
            mu_g: 0.0,
            kappa_g,
        }
    }

    /// Table shorthand `BWC(x)`: marginals with concentration `exp(-1)`,
    /// binding concentration `|x|`.
    pub fn bwc_preset(rho: f64) -> Self {
        ModelSpec::BivariateWrappedCauchy {
            rho1: (-1.0_f64).exp(),
            rho2: (-1.0_f64).exp(),
            rho,
        }
    }

    /// Table shorthand `BCvM(x)`: unit concentrations, interaction `x`.
    pub fn bcvm_preset(kappa3: f64) -> Self {
        ModelSpec::CosineVonMises {
            kappa1: 1.0,
            kappa2: 1.0,
            kappa3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be finite, got {v}")))
            }
        };
        let prob = |name: &str, v: f64| {
            if v.is_finite() && (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must lie in [0, 1], got {v}")))
            }
        };
        let conc = |name: &str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be >= 0, got {v}")))
            }
        };
        match self {
            ModelSpec::Product { f, g } => {
                f.validate()?;
                g.validate()
            }
            ModelSpec::Parabolic { p } => prob("PB mixing weight", *p),
            ModelSpec::BivariateVonMises {
                kappa1,
                kappa2,
                mu_g,
                kappa_g,
            } => {
                conc("BvM kappa1", *kappa1)?;
                conc("BvM kappa2", *kappa2)?;
                finite("BvM binding location", *mu_g)?;
                conc("BvM binding concentration", *kappa_g)
            }
            ModelSpec::BivariateWrappedCauchy { rho1, rho2, rho } => {
                let marg = |name: &str, v: f64| {
                    if v.is_finite() && (0.0..1.0).contains(&v) {
                        Ok(())
                    } else {
                        Err(Error::Config(format!("{name} must lie in [0, 1), got {v}")))
                    }
                };
                marg("BWC rho1", *rho1)?;
                marg("BWC rho2", *rho2)?;
                if rho.is_finite() && rho.abs() < 1.0 {
                    Ok(())
                } else {
                    Err(Error::Config(format!(
                        "BWC dependence parameter must lie in (-1, 1), got {rho}"
                    )))
                }
            }
            ModelSpec::CosineVonMises {
                kappa1,
                kappa2,
                kappa3,
            } => {
                conc("BCvM kappa1", *kappa1)?;
                conc("BCvM kappa2", *kappa2)?;
                finite("BCvM interaction", *kappa3)
            }
            ModelSpec::Mixture { f, g, p } => {
                f.validate()?;
                g.validate()?;
                prob("Mix probability", *p)
            }
            ModelSpec::VmfMix {
                ambient,
                base_kappa,
                mix_kappa,
                mix_p,
            } => {
                if *ambient < 2 {
                    return Err(Error::Config(format!(
                        "vMFmix ambient dimension must be >= 2, got {ambient}"
                    )));
                }
                conc("vMFmix base concentration", *base_kappa)?;
                conc("vMFmix component concentration", *mix_kappa)?;
                prob("vMFmix probability", *mix_p)
            }
            ModelSpec::ProjectedNormal { dim, s12, s13, s23 } => {
                if *dim != 2 {
                    return Err(Error::Config(format!(
                        "PN supports dim = 2 (three correlation parameters), got {dim}"
                    )));
                }
                finite("PN sigma12", *s12)?;
                finite("PN sigma13", *s13)?;
                finite("PN sigma23", *s23)
            }
            ModelSpec::VonMisesCopula { kappa } => conc("VMC concentration", *kappa),
        }
    }

    /// Parses the model grammar used in scenario configs:
    ///
    /// ```text
    /// marginal := Unif | VM(<num>,<num>) | WC(<num>,<num>)
    /// num      := float | pi | -pi | exp(<float>) | -exp(<float>)
    /// model    := <marginal>x<marginal> | product(<marginal>,<marginal>)
    ///           | PB(<num>)
    ///           | BvM(<num>) | BvM(<num>,<num>,<num>,<num>)
    ///           | BWC(<num>) | BWC(<num>,<num>,<num>)
    ///           | BCvM(<num>) | BCvM(<num>,<num>,<num>)
    ///           | Mix(<marginal>,<marginal>,<num>)
    ///           | vMFmix(<int>;<num>,<num>)          # ambient; mix kappa, mix p
    ///           | vMFmix(<int>;<num>,<num>,<num>)    # ambient; base kappa, mix kappa, mix p
    ///           | PN(<int>;<num>,<num>,<num>)        # dim; sigma12, sigma13, sigma23
    ///           | VMC(<num>)
    /// ```
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let spec =
            Self::parse_inner(s).map_err(|e| Error::Config(format!("model {s:?}: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    fn parse_inner(s: &str) -> std::result::Result<Self, String> {
        if let Some(args) = call_args(s, "PB") {
            let nums = parse_numbers(args)?;
            if nums.len() != 1 {
                return Err("PB takes one parameter".into());
            }
            return Ok(ModelSpec::Parabolic { p: nums[0] });
        }
        if let Some(args) = call_args(s, "BvM") {
            let nums = parse_numbers(args)?;
            return match nums.as_slice() {
                [x] => Ok(ModelSpec::bvm_preset(*x)),
                [k1, k2, mu_g, k_g] => Ok(ModelSpec::BivariateVonMises {
                    kappa1: *k1,
                    kappa2: *k2,
                    mu_g: *mu_g,
                    kappa_g: *k_g,
                }),
                _ => Err("BvM takes 1 or 4 parameters".into()),
            };
        }
        if let Some(args) = call_args(s, "BWC") {
            let nums = parse_numbers(args)?;
            return match nums.as_slice() {
                [x] => Ok(ModelSpec::bwc_preset(*x)),
                [r1, r2, rho] => Ok(ModelSpec::BivariateWrappedCauchy {
                    rho1: *r1,
                    rho2: *r2,
                    rho: *rho,
                }),
                _ => Err("BWC takes 1 or 3 parameters".into()),
            };
        }
        if let Some(args) = call_args(s, "BCvM") {
            let nums = parse_numbers(args)?;
            return match nums.as_slice() {
                [x] => Ok(ModelSpec::bcvm_preset(*x)),
                [k1, k2, k3] => Ok(ModelSpec::CosineVonMises {
                    kappa1: *k1,
                    kappa2: *k2,
                    kappa3: *k3,
                }),
                _ => Err("BCvM takes 1 or 3 parameters".into()),
            };
        }
        if let Some(args) = call_args(s, "Mix") {
            let parts = split_top_level(args, ',');
            if parts.len() != 3 {
                return Err("Mix takes (marginal, marginal, probability)".into());
            }
            return Ok(ModelSpec::Mixture {
                f: parse_marginal(parts[0])?,
                g: parse_marginal(parts[1])?,
                p: parse_number(parts[2])?,
            });
        }
        if let Some(args) = call_args(s, "vMFmix") {
            let (head, tail) = split_head(args)?;
            let nums = parse_numbers(tail)?;
            return match nums.as_slice() {
                [mix_kappa, mix_p] => Ok(ModelSpec::VmfMix {
                    ambient: head,
                    base_kappa: 0.0,
                    mix_kappa: *mix_kappa,
                    mix_p: *mix_p,
                }),
                [base, mix_kappa, mix_p] => Ok(ModelSpec::VmfMix {
                    ambient: head,
                    base_kappa: *base,
                    mix_kappa: *mix_kappa,
                    mix_p: *mix_p,
                }),
                _ => Err(
                    "vMFmix takes (ambient; mix kappa, mix p) or (ambient; base, mix kappa, mix p)"
                        .into(),
                ),
            };
        }
        if let Some(args) = call_args(s, "PN") {
            let (head, tail) = split_head(args)?;
            let nums = parse_numbers(tail)?;
            return match nums.as_slice() {
                [s12, s13, s23] => Ok(ModelSpec::ProjectedNormal {
                    dim: head,
                    s12: *s12,
                    s13: *s13,
                    s23: *s23,
                }),
                _ => Err("PN takes (dim; sigma12, sigma13, sigma23)".into()),
            };
        }
        if let Some(args) = call_args(s, "VMC") {
            let nums = parse_numbers(args)?;
            if nums.len() != 1 {
                return Err("VMC takes one parameter".into());
            }
            return Ok(ModelSpec::VonMisesCopula { kappa: nums[0] });
        }
        if let Some(args) = call_args(s, "product") {
            let parts = split_top_level(args, ',');
            if parts.len() != 2 {
                return Err("product takes (marginal, marginal)".into());
            }
            return Ok(ModelSpec::Product {
                f: parse_marginal(parts[0])?,
                g: parse_marginal(parts[1])?,
            });
        }
        // product written as <marginal>x<marginal>
        let mut depth = 0usize;
        for (idx, c) in s.char_indices() {
            match c {
                '(' => depth += 1,
                ')' => depth = depth.saturating_sub(1),
                'x' if depth == 0 => {
                    let (left, right) = (&s[..idx], &s[idx + 1..]);
                    if let (Ok(f), Ok(g)) = (parse_marginal(left), parse_marginal(right)) {
                        return Ok(ModelSpec::Product { f, g });
                    }
                }
                _ => {}
            }
        }
        Err("unrecognized model (see the grammar in the config documentation)".into())
    }

    /// Canonical rendering of the spec.
    pub fn spec_string(&self) -> String {
        match self {
            ModelSpec::Product { f, g } => format!("{}x{}", f.spec_string(), g.spec_string()),
            ModelSpec::Parabolic { p } => format!("PB({p})"),
            ModelSpec::BivariateVonMises {
                kappa1,
                kappa2,
                mu_g,
                kappa_g,
            } => format!("BvM({kappa1},{kappa2},{mu_g},{kappa_g})"),
            ModelSpec::BivariateWrappedCauchy { rho1, rho2, rho } => {
                format!("BWC({rho1},{rho2},{rho})")
            }
            ModelSpec::CosineVonMises {
                kappa1,
                kappa2,
                kappa3,
            } => format!("BCvM({kappa1},{kappa2},{kappa3})"),
            ModelSpec::Mixture { f, g, p } => {
                format!("Mix({},{},{p})", f.spec_string(), g.spec_string())
            }
            ModelSpec::VmfMix {
                ambient,
                base_kappa,
                mix_kappa,
                mix_p,
            } => format!("vMFmix({ambient};{base_kappa},{mix_kappa},{mix_p})"),
            ModelSpec::ProjectedNormal { dim, s12, s13, s23 } => {
                format!("PN({dim};{s12},{s13},{s23})")
            }
            ModelSpec::VonMisesCopula { kappa } => format!("VMC({kappa})"),
        }
    }
}

/// If `s` is exactly `name(...)`, returns the argument text.
fn call_args<'a>(s: &'a str, name: &str) -> Option<&'a str> {
    let rest = s.strip_prefix(name)?;
    let inner = rest.strip_prefix('(')?.strip_suffix(')')?;
    // the opening paren must match the final one
    let mut depth = 1usize;
    for c in inner.chars() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth = depth.checked_sub(1)?;
                if depth == 0 {
                    return None;
                }
            }
            _ => {}
        }
    }
    Some(inner)
}

fn split_top_level(s: &str, sep: char) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (idx, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            c if c == sep && depth == 0 => {
                parts.push(s[start..idx].trim());
                start = idx + 1;
            }
            _ => {}
        }
    }
    parts.push(s[start..].trim());
    parts
}

/// `<int> ; <rest>` heads used by vMFmix and PN.
fn split_head(args: &str) -> std::result::Result<(usize, &str), String> {
    let parts = split_top_level(args, ';');
    if parts.len() != 2 {
        return Err("expected '<int>; <parameters>'".into());
    }
    let head: usize = parts[0]
        .parse()
        .map_err(|_| format!("cannot parse dimension {:?}", parts[0]))?;
    Ok((head, parts[1]))
}

fn parse_numbers(args: &str) -> std::result::Result<Vec<f64>, String> {
    split_top_level(args, ',')
        .iter()
        .map(|p| parse_number(p))
        .collect()
}

/// Numeric literals in model specs: floats plus `pi` and `exp(<float>)`,
/// optionally negated.
fn parse_number(s: &str) -> std::result::Result<f64, String> {
    let s = s.trim();
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1.0, rest.trim()),
        None => (1.0, s),
    };
    if body == "pi" {
        return Ok(sign * PI);
    }
    if let Some(inner) = body.strip_prefix("exp(").and_then(|r| r.strip_suffix(')')) {
        let v: f64 = inner
            .trim()
            .parse()
            .map_err(|_| format!("cannot parse exponent {inner:?}"))?;
        return Ok(sign * v.exp());
    }
    body.parse::<f64>()
        .map(|v| sign * v)
        .map_err(|_| format!("cannot parse number {s:?}"))
}

fn parse_marginal(s: &str) -> std::result::Result<CircularMarginal, String> {
    let s = s.trim();
    if s == "Unif" {
        return Ok(CircularMarginal::Uniform);
    }
    if let Some(args) = call_args(s, "VM") {
        let nums = parse_numbers(args)?;
        if let [mu, kappa] = nums.as_slice() {
            return Ok(CircularMarginal::VonMises {
                mu: *mu,
                kappa: *kappa,
            });
        }
        return Err("VM takes (location, concentration)".into());
    }
    if let Some(args) = call_args(s, "WC") {
        let nums = parse_numbers(args)?;
        if let [mu, rho] = nums.as_slice() {
            return Ok(CircularMarginal::WrappedCauchy { mu: *mu, rho: *rho });
        }
        return Err("WC takes (location, concentration)".into());
    }
    Err(format!(
        "unrecognized marginal {s:?} (expected Unif, VM(..), WC(..))"
    ))
}

/// A compiled bivariate sampler. Compilation performs all per-model setup
/// (CDF tables, Cholesky factors, envelope constants) once.
pub trait PairSampler: Send + Sync {
    fn draw(&self, n: usize, rng: &mut dyn RngCore) -> Result<PairedSample>;
}

/// Compiles a model spec into a reusable sampler.
pub fn compile(spec: &ModelSpec) -> Result<Box<dyn PairSampler>> {
    spec.validate()?;
    Ok(match spec {
        ModelSpec::Product { f, g } => Box::new(ProductSampler { f: *f, g: *g }),
        ModelSpec::Parabolic { p } => Box::new(ParabolicSampler { p: *p }),
        ModelSpec::BivariateVonMises {
            kappa1,
            kappa2,
            mu_g,
            kappa_g,
        } => {
            let f1 = CircularMarginal::VonMises {
                mu: 0.0,
                kappa: *kappa1,
            };
            let f2 = CircularMarginal::VonMises {
                mu: 0.0,
                kappa: *kappa2,
            };
            Box::new(WehrlyJohnsonSampler {
                f1,
                binding: CircularMarginal::VonMises {
                    mu: *mu_g,
                    kappa: *kappa_g,
                },
                cdf1: MarginalCdf::new(&f1)?,
                quantile2: MarginalCdf::new(&f2)?,
            })
        }
        ModelSpec::BivariateWrappedCauchy { rho1, rho2, rho } => {
            let f1 = CircularMarginal::WrappedCauchy {
                mu: 0.0,
                rho: *rho1,
            };
            let f2 = CircularMarginal::WrappedCauchy {
                mu: 0.0,
                rho: *rho2,
            };
            Box::new(WehrlyJohnsonSampler {
                f1,
                binding: CircularMarginal::WrappedCauchy {
                    mu: 0.0,
                    rho: rho.abs(),
                },
                cdf1: MarginalCdf::new(&f1)?,
                quantile2: MarginalCdf::new(&f2)?,
            })
        }
        ModelSpec::CosineVonMises {
            kappa1,
            kappa2,
            kappa3,
        } => Box::new(CosineInteractionSampler {
            kappa1: *kappa1,
            kappa2: *kappa2,
            kappa3: *kappa3,
            log_envelope: kappa1 + kappa2 + kappa3.abs(),
        }),
        ModelSpec::Mixture { f, g, p } => Box::new(MixtureSampler {
            f: *f,
            g: *g,
            p: *p,
        }),
        ModelSpec::VmfMix {
            ambient,
            base_kappa,
            mix_kappa,
            mix_p,
        } => {
            let mut e1 = vec![0.0; *ambient];
            e1[0] = 1.0;
            Box::new(VmfMixSampler {
                x_sampler: VmfSampler::new(&e1, *base_kappa)?,
                y_sampler: VmfSampler::new(&e1, *mix_kappa)?,
                mix_p: *mix_p,
                ambient: *ambient,
            })
        }
        ModelSpec::ProjectedNormal { s12, s13, s23, .. } => {
            Box::new(ProjectedNormalSampler::new(*s12, *s13, *s23)?)
        }
        ModelSpec::VonMisesCopula { kappa } => Box::new(CopulaSampler {
            binding: CircularMarginal::VonMises {
                mu: 0.0,
                kappa: *kappa,
            },
        }),
    })
}

/// Draws `n` i.i.d. pairs from a model. Convenience wrapper over
/// [`compile`]; callers running many replicates should compile once.
pub fn sample_joint(spec: &ModelSpec, n: usize, rng: &mut dyn RngCore) -> Result<PairedSample> {
    compile(spec)?.draw(n, rng)
}

fn circular_pair(theta1: Vec<f64>, theta2: Vec<f64>) -> Result<PairedSample> {
    let x = AngleVector::new(theta1)?.to_sample();
    let y = AngleVector::new(theta2)?.to_sample();
    Ok(PairedSample { x, y })
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Config("sample size must be at least 1".into()));
    }
    Ok(())
}

struct ProductSampler {
    f: CircularMarginal,
    g: CircularMarginal,
}

impl PairSampler for ProductSampler {
    fn draw(&self, n: usize, rng: &mut dyn RngCore) -> Result<PairedSample> {
        check_n(n)?;
        let mut t1 = Vec::with_capacity(n);
        let mut t2 = Vec::with_capacity(n);
        for _ in 0..n {
            t1.push(self.f.draw(rng)?);
            t2.push(self.g.draw(rng)?);
        }
        circular_pair(t1, t2)
    }
}

struct ParabolicSampler {
    p: f64,
}

impl PairSampler for ParabolicSampler {
    fn draw(&self, n: usize, rng: &mut dyn RngCore) -> Result<PairedSample> {
        check_n(n)?;
        let mut t1 = Vec::with_capacity(n);
        let mut t2 = Vec::with_capacity(n);
        for _ in 0..n {
            let v: f64 = rng.random();
            let w: f64 = rng.random();
            t1.push(TAU * v);
            t2.push((TAU * (self.p * v * v + (1.0 - self.p) * w * w)).rem_euclid(TAU));
        }
        circular_pair(t1, t2)
    }
}

/// Binding-density construction shared by the bivariate von Mises and
/// bivariate wrapped Cauchy families: draw the first angle from its
/// marginal, draw the binding variable, and map through the second
/// marginal's quantile so both marginals are exact.
struct WehrlyJohnsonSampler {
    f1: CircularMarginal,
    binding: CircularMarginal,
    cdf1: MarginalCdf,
    quantile2: MarginalCdf,
}

impl PairSampler for WehrlyJohnsonSampler {
    fn draw(&self, n: usize, rng: &mut dyn RngCore) -> Result<PairedSample> {
        check_n(n)?;
        let mut t1 = Vec::with_capacity(n);
        let mut t2 = Vec::with_capacity(n);
        for _ in 0..n {
            let a = self.f1.draw(rng)?;
            let omega = self.binding.draw(rng)?;
            let v = (self.cdf1.cdf(a) - omega / TAU).rem_euclid(1.0);
            t1.push(a);
            t2.push(self.quantile2.quantile(v));
        }
        circular_pair(t1, t2)
    }
}

struct CosineInteractionSampler {
    kappa1: f64,
    kappa2: f64,
    kappa3: f64,
    log_envelope: f64,
}

impl CosineInteractionSampler {
    /// One accepted pair plus the number of uniform proposals it consumed.
    fn draw_one(&self, rng: &mut dyn RngCore, proposals: &mut u64) -> Result<(f64, f64)> {
        for _ in 0..MAX_PROPOSALS {
            *proposals += 1;
            let a = TAU * rng.random::<f64>();
            let b = TAU * rng.random::<f64>();
            let exponent =
                self.kappa1 * a.cos() + self.kappa2 * b.cos() + self.kappa3 * (a - b).cos();
            let u: f64 = rng.random();
            if u.ln() < exponent - self.log_envelope {
                return Ok((a, b));
            }
        }
        Err(Error::Sampler(format!(
            "cosine-interaction rejection sampler exceeded {MAX_PROPOSALS} proposals"
        )))
    }
}

impl PairSampler for CosineInteractionSampler {
    fn draw(&self, n: usize, rng: &mut dyn RngCore) -> Result<PairedSample> {
        check_n(n)?;
        let mut proposals = 0;
        let mut t1 = Vec::with_capacity(n);
        let mut t2 = Vec::with_capacity(n);
        for _ in 0..n {
            let (a, b) = self.draw_one(rng, &mut proposals)?;
            t1.push(a);
            t2.push(b);
        }
        circular_pair(t1, t2)
    }
}

struct MixtureSampler {
    f: CircularMarginal,
    g: CircularMarginal,
    p: f64,
}

impl PairSampler for MixtureSampler {
    fn draw(&self, n: usize, rng: &mut dyn RngCore) -> Result<PairedSample> {
        check_n(n)?;
        let mut t1 = Vec::with_capacity(n);
        let mut t2 = Vec::with_capacity(n);
        for _ in 0..n {
            let a = self.f.draw(rng)?;
            let copy = rng.random::<f64>() < self.p;
            let b = if copy { a } else { self.g.draw(rng)? };
            t1.push(a);
            t2.push(b);
        }
        circular_pair(t1, t2)
    }
}

struct VmfMixSampler {
    x_sampler: VmfSampler,
    y_sampler: VmfSampler,
    mix_p: f64,
    ambient: usize,
}

impl PairSampler for VmfMixSampler {
    fn draw(&self, n: usize, rng: &mut dyn RngCore) -> Result<PairedSample> {
        check_n(n)?;
        let mut xs = Vec::with_capacity(n * self.ambient);
        let mut ys = Vec::with_capacity(n * self.ambient);
        for _ in 0..n {
            let x = self.x_sampler.draw(rng)?;
            let copy = rng.random::<f64>() < self.mix_p;
            let y = if copy {
                x.clone()
            } else {
                self.y_sampler.draw(rng)?
            };
            xs.extend(x);
            ys.extend(y);
        }
        Ok(PairedSample {
            x: DirectionalSample::sphere(xs, self.ambient)?,
            y: DirectionalSample::sphere(ys, self.ambient)?,
        })
    }
}

struct ProjectedNormalSampler {
    /// Lower-triangular Cholesky factor of the 3x3 correlation matrix,
    /// row-major.
    chol: [f64; 9],
}

impl ProjectedNormalSampler {
    fn new(s12: f64, s13: f64, s23: f64) -> Result<Self> {
        let sigma = nalgebra::Matrix3::new(1.0, s12, s13, s12, 1.0, s23, s13, s23, 1.0);
        let chol = nalgebra::Cholesky::new(sigma).ok_or_else(|| {
            Error::Config(format!(
                "PN covariance with correlations ({s12}, {s13}, {s23}) is not positive definite"
            ))
        })?;
        let l = chol.l();
        let mut out = [0.0; 9];
        for i in 0..3 {
            for j in 0..3 {
                out[3 * i + j] = l[(i, j)];
            }
        }
        Ok(ProjectedNormalSampler { chol: out })
    }
}

impl PairSampler for ProjectedNormalSampler {
    fn draw(&self, n: usize, rng: &mut dyn RngCore) -> Result<PairedSample> {
        check_n(n)?;
        let mut xs = Vec::with_capacity(2 * n);
        let mut zs = Vec::with_capacity(n);
        for _ in 0..n {
            let mut budget = MAX_PROPOSALS;
            loop {
                let g: [f64; 3] = [
                    StandardNormal.sample(rng),
                    StandardNormal.sample(rng),
                    StandardNormal.sample(rng),
                ];
                let mut y = [0.0; 3];
                for (i, yi) in y.iter_mut().enumerate() {
                    for (j, gj) in g.iter().enumerate().take(i + 1) {
                        *yi += self.chol[3 * i + j] * gj;
                    }
                }
                let norm = (y[0] * y[0] + y[1] * y[1]).sqrt();
                if norm > 1e-12 {
                    xs.push(y[0] / norm);
                    xs.push(y[1] / norm);
                    zs.push(y[2]);
                    break;
                }
                budget -= 1;
                if budget == 0 {
                    return Err(Error::Sampler(
                        "projected-normal draws degenerate at the origin".into(),
                    ));
                }
            }
        }
        Ok(PairedSample {
            x: DirectionalSample::sphere(xs, 2)?,
            y: DirectionalSample::linear(zs)?,
        })
    }
}

struct CopulaSampler {
    binding: CircularMarginal,
}

impl PairSampler for CopulaSampler {
    fn draw(&self, n: usize, rng: &mut dyn RngCore) -> Result<PairedSample> {
        check_n(n)?;
        let mut theta = Vec::with_capacity(n);
        let mut z = Vec::with_capacity(n);
        for _ in 0..n {
            let u: f64 = rng.random();
            let omega = self.binding.draw(rng)?;
            theta.push(TAU * u);
            z.push((u - omega / TAU).rem_euclid(1.0));
        }
        Ok(PairedSample {
            x: AngleVector::new(theta)?.to_sample(),
            y: DirectionalSample::linear(z)?,
        })
    }
}
