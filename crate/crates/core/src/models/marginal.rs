//! Marginal distribution zoo: quantile functions for simulation and CDFs
//! for the mixture inverter.
//!
//! The Pareto variant is the Lomax form with support (0, inf):
//! F(x) = 1 - (1 + x/scale)^(-shape), so quantile(p) =
//! scale * ((1-p)^(-1/shape) - 1). Rank-based statistics downstream are
//! shift-invariant, so this choice only moves the raw scatter axis.

use crate::error::{Error, Result};
use crate::models::numeric::{normal_cdf, normal_quantile, student_t_cdf, student_t_quantile};

#[derive(Debug, Clone, PartialEq)]
pub enum MarginalModel {
    Uniform { a: f64, b: f64 },
    Kumaraswamy { a: f64, b: f64 },
    StudentT { location: f64, scale: f64, df: f64 },
    Pareto { shape: f64, scale: f64 },
    Normal { mu: f64, sigma: f64 },
    /// Finite mixture with positive weights (normalized on construction).
    PointMixture { components: Vec<(f64, MarginalModel)> },
}

impl MarginalModel {
    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(Error::InvalidParameter(format!("uniform({a}, {b})")));
        }
        Ok(MarginalModel::Uniform { a, b })
    }

    pub fn kumaraswamy(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidParameter(format!("kumaraswamy({a}, {b})")));
        }
        Ok(MarginalModel::Kumaraswamy { a, b })
    }

    pub fn student_t(location: f64, scale: f64, df: f64) -> Result<Self> {
        if !(scale > 0.0 && df > 0.0 && location.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "student_t({location}, {scale}, {df})"
            )));
        }
        Ok(MarginalModel::StudentT {
            location,
            scale,
            df,
        })
    }

    pub fn pareto(shape: f64, scale: f64) -> Result<Self> {
        if !(shape > 0.0 && scale > 0.0) {
            return Err(Error::InvalidParameter(format!("pareto({shape}, {scale})")));
        }
        Ok(MarginalModel::Pareto { shape, scale })
    }

    pub fn normal(mu: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && mu.is_finite()) {
            return Err(Error::InvalidParameter(format!("normal({mu}, {sigma})")));
        }
        Ok(MarginalModel::Normal { mu, sigma })
    }

    pub fn point_mixture(components: Vec<(f64, MarginalModel)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidParameter("empty mixture".to_string()));
        }
        let total: f64 = components.iter().map(|(w, _)| w).sum();
        if !(total > 0.0) || components.iter().any(|(w, _)| !(*w > 0.0)) {
            return Err(Error::InvalidParameter(
                "mixture weights must be positive".to_string(),
            ));
        }
        let components = components
            .into_iter()
            .map(|(w, m)| (w / total, m))
            .collect();
        Ok(MarginalModel::PointMixture { components })
    }

    /// CDF, defined on the whole real line.
    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            MarginalModel::Uniform { a, b } => ((x - a) / (b - a)).clamp(0.0, 1.0),
            MarginalModel::Kumaraswamy { a, b } => {
                if x <= 0.0 {
                    0.0
                } else if x >= 1.0 {
                    1.0
                } else {
                    1.0 - (1.0 - x.powf(*a)).powf(*b)
                }
            }
            MarginalModel::StudentT {
                location,
                scale,
                df,
            } => student_t_cdf((x - location) / scale, *df),
            MarginalModel::Pareto { shape, scale } => {
                if x <= 0.0 {
                    0.0
                } else {
                    1.0 - (1.0 + x / scale).powf(-shape)
                }
            }
            MarginalModel::Normal { mu, sigma } => normal_cdf((x - mu) / sigma),
            MarginalModel::PointMixture { components } => components
                .iter()
                .map(|(w, m)| w * m.cdf(x))
                .sum::<f64>()
                .clamp(0.0, 1.0),
        }
    }

    /// Quantile function on p in (0, 1). Closed forms everywhere except
    /// the mixture, which is inverted by bisection to ~1e-12.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::ArgumentOutOfRange {
                what: "quantile level p",
                value: p,
            });
        }
        Ok(match self {
            MarginalModel::Uniform { a, b } => a + (b - a) * p,
            MarginalModel::Kumaraswamy { a, b } => {
                (1.0 - (1.0 - p).powf(1.0 / b)).powf(1.0 / a)
            }
            MarginalModel::StudentT {
                location,
                scale,
                df,
            } => location + scale * student_t_quantile(p, *df),
            MarginalModel::Pareto { shape, scale } => {
                scale * ((1.0 - p).powf(-1.0 / shape) - 1.0)
            }
            MarginalModel::Normal { mu, sigma } => mu + sigma * normal_quantile(p),
            MarginalModel::PointMixture { components } => {
                // Bracket: the mixture quantile lies between the extreme
                // component quantiles at the same level.
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for (_, m) in components {
                    let q = m.quantile(p)?;
                    lo = lo.min(q);
                    hi = hi.max(q);
                }
                if lo == hi {
                    return Ok(lo);
                }
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if self.cdf(mid) < p {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if (hi - lo) <= 1e-13 * hi.abs().max(lo.abs()).max(1.0) {
                        break;
                    }
                }
                0.5 * (lo + hi)
            }
        })
    }
}
