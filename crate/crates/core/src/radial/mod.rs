//! Radial laws `f(r)` and exact samplers for the distance proposals
//! `g(r) ∝ f(r)·(shape factor)`.

mod logconcave;
mod truncated;

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

use crate::manifold::GeometrySpec;
use crate::numkern::log_sinh_ratio;

pub use logconcave::LogConcaveSampler;
pub use truncated::{truncated_power_from_uniform, InverseCdfTable};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RadialError {
    #[error("the radial law is not flagged log-concave")]
    NotLogConcave,
    #[error("log g is not integrable (no decrease before r = {0:e})")]
    NotIntegrable(f64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid parameter: {0}")]
    Invalid(String),
}

pub type LogDensityFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// The radial profile `f(r)` of a target density.
#[derive(Clone)]
pub enum RadialLaw {
    /// `log f(r) = −r^α / (2σ²)`.
    GeneralizedGaussian { alpha: f64, sigma: f64 },
    /// `f ≡ 1`.
    Uniform,
    /// User-supplied `log f`, with a flag declaring it concave.
    Custom { log_f: LogDensityFn, log_concave: bool },
}

impl fmt::Debug for RadialLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::GeneralizedGaussian { alpha, sigma } => f
                .debug_struct("GeneralizedGaussian")
                .field("alpha", alpha)
                .field("sigma", sigma)
                .finish(),
            Self::Uniform => f.write_str("Uniform"),
            Self::Custom { log_concave, .. } => f
                .debug_struct("Custom")
                .field("log_concave", log_concave)
                .finish_non_exhaustive(),
        }
    }
}

impl RadialLaw {
    pub fn generalized_gaussian(alpha: f64, sigma: f64) -> Result<Self, RadialError> {
        if !(alpha > 1.0) || !alpha.is_finite() {
            return Err(RadialError::Invalid(format!("α must exceed 1, got {alpha}")));
        }
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(RadialError::Invalid(format!("σ must be positive, got {sigma}")));
        }
        Ok(Self::GeneralizedGaussian { alpha, sigma })
    }

    pub fn gaussian(sigma: f64) -> Result<Self, RadialError> {
        Self::generalized_gaussian(2.0, sigma)
    }

    pub fn custom(log_f: impl Fn(f64) -> f64 + Send + Sync + 'static, log_concave: bool) -> Self {
        Self::Custom { log_f: Arc::new(log_f), log_concave }
    }

    pub fn log_f(&self, r: f64) -> f64 {
        match self {
            Self::GeneralizedGaussian { alpha, sigma } => {
                let p = if *alpha == 2.0 { r * r } else { r.powf(*alpha) };
                -p / (2.0 * sigma * sigma)
            }
            Self::Uniform => 0.0,
            Self::Custom { log_f, .. } => log_f(r),
        }
    }

    pub fn is_log_concave(&self) -> bool {
        match self {
            Self::GeneralizedGaussian { .. } | Self::Uniform => true,
            Self::Custom { log_concave, .. } => *log_concave,
        }
    }

    pub fn is_uniform(&self) -> bool {
        matches!(self, Self::Uniform)
    }

    /// `σ` of a Gaussian (`α = 2`) law.
    pub fn gaussian_sigma(&self) -> Option<f64> {
        match self {
            Self::GeneralizedGaussian { alpha, sigma } if *alpha == 2.0 => Some(*sigma),
            _ => None,
        }
    }
}

/// The geometric factor multiplying `f` in a proposal.
#[derive(Clone, Debug, PartialEq)]
pub enum Shape {
    /// `Σ power·ln(sinh(rate·r)/rate)` over the pairs; rate 0 is `power·ln r`.
    Hyperbolic { pairs: Vec<(f64, f64)> },
    /// `power·ln r` on `(0, truncation)`.
    PowerLaw { power: f64, truncation: f64 },
}

impl Shape {
    /// No geometric factor: `g = f`.
    pub fn trivial() -> Self {
        Self::Hyperbolic { pairs: Vec::new() }
    }
}

/// Unnormalized radial proposal density `g(r)`.
#[derive(Clone, Debug)]
pub struct RadialProposal {
    pub law: RadialLaw,
    pub shape: Shape,
}

impl RadialProposal {
    pub fn new(law: RadialLaw, shape: Shape) -> Result<Self, RadialError> {
        match &shape {
            Shape::Hyperbolic { pairs } => {
                if pairs.iter().any(|&(rate, power)| !(rate >= 0.0) || !(power >= 0.0)) {
                    return Err(RadialError::Invalid(
                        "hyperbolic pairs need non-negative rate and power".into(),
                    ));
                }
            }
            Shape::PowerLaw { power, truncation } => {
                if !(*power >= 0.0) || !(*truncation > 0.0) || !truncation.is_finite() {
                    return Err(RadialError::Invalid(format!(
                        "power law needs power ≥ 0 and finite truncation > 0, got {power}, {truncation}"
                    )));
                }
            }
        }
        Ok(Self { law, shape })
    }

    /// `f(r)·(sinh(κr)/κ)^{d−1}`, the comparison-space proposal.
    pub fn general(geom: &GeometrySpec, law: RadialLaw) -> Self {
        let d = geom.dim() as f64;
        Self { law, shape: Shape::Hyperbolic { pairs: vec![(geom.kappa(), d - 1.0)] } }
    }

    /// `f(r)·r^{N−1}·(sinh(κr)/κ)^{d−N}`, which keeps the `N − 1` flat
    /// directions of a maximal flat out of the hyperbolic factor.
    pub fn sharp(geom: &GeometrySpec, law: RadialLaw) -> Self {
        let n = geom.rank() as f64;
        let d = geom.dim() as f64;
        Self {
            law,
            shape: Shape::Hyperbolic { pairs: vec![(0.0, n - 1.0), (geom.kappa(), d - n)] },
        }
    }

    /// `f(r)·r^{d−1}` on `(0, diameter)`.
    pub fn truncated_flat(geom: &GeometrySpec, law: RadialLaw) -> Result<Self, RadialError> {
        Self::new(
            law,
            Shape::PowerLaw { power: geom.dim() as f64 - 1.0, truncation: geom.diameter() },
        )
    }

    pub fn truncation(&self) -> Option<f64> {
        match self.shape {
            Shape::PowerLaw { truncation, .. } => Some(truncation),
            Shape::Hyperbolic { .. } => None,
        }
    }

    /// `ln g(r)` up to its normalizing constant.
    pub fn log_g(&self, r: f64) -> Result<f64, RadialError> {
        if !(r > 0.0) {
            return Err(RadialError::Domain(format!("r must be positive, got {r}")));
        }
        Ok(self.log_g_unchecked(r))
    }

    /// `ln g` on the untruncated support, for `r > 0`.
    pub(crate) fn log_g_unchecked(&self, r: f64) -> f64 {
        let geometric = match &self.shape {
            Shape::Hyperbolic { pairs } => pairs
                .iter()
                .map(|&(rate, power)| if power == 0.0 { 0.0 } else { power * log_sinh_ratio(rate, r) })
                .sum(),
            Shape::PowerLaw { power, .. } => {
                if *power == 0.0 {
                    0.0
                } else {
                    power * r.ln()
                }
            }
        };
        self.law.log_f(r) + geometric
    }
}

/// An exact sampler for a proposal, with its setup cached.
#[derive(Clone, Debug)]
pub enum RadialSampler {
    LogConcave(LogConcaveSampler),
    TruncatedPower { power: f64, delta: f64 },
    TruncatedRejection { inner: LogConcaveSampler, delta: f64 },
    TruncatedTable(InverseCdfTable),
}

impl RadialSampler {
    pub fn new(proposal: &RadialProposal) -> Result<Self, RadialError> {
        match proposal.shape {
            Shape::Hyperbolic { .. } => Ok(Self::LogConcave(LogConcaveSampler::new(proposal)?)),
            Shape::PowerLaw { .. } => truncated::build(proposal),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Self::LogConcave(s) => s.sample(rng),
            Self::TruncatedPower { power, delta } => sample_truncated_power(*power, *delta, rng),
            Self::TruncatedRejection { inner, delta } => loop {
                let r = inner.sample(rng);
                if r < *delta {
                    return r;
                }
            },
            Self::TruncatedTable(t) => t.sample(rng),
        }
    }
}

/// One exact draw from a log-concave untruncated proposal.
pub fn sample_log_concave<R: Rng + ?Sized>(
    proposal: &RadialProposal,
    rng: &mut R,
) -> Result<f64, RadialError> {
    Ok(LogConcaveSampler::new(proposal)?.sample(rng))
}

/// `r = Δ·U^{1/power}`: exact draw from `∝ r^{power−1}` on `(0, Δ)`.
pub fn sample_truncated_power<R: Rng + ?Sized>(power: f64, delta: f64, rng: &mut R) -> f64 {
    truncated_power_from_uniform(power, delta, crate::rng::open_unit(rng))
}

/// One exact draw from a truncated proposal.
pub fn sample_truncated_general<R: Rng + ?Sized>(
    proposal: &RadialProposal,
    rng: &mut R,
) -> Result<f64, RadialError> {
    if proposal.truncation().is_none() {
        return Err(RadialError::Invalid("proposal has no truncation".into()));
    }
    Ok(RadialSampler::new(proposal)?.sample(rng))
}
