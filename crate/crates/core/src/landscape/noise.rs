//! Distortion distributions and their samplers.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// The distribution each search point's distortion is drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum NoiseModel {
    None,
    /// Zero-mean normal with variance `sigma2`.
    Normal {
        sigma2: f64,
    },
    /// Trials to first success, support `{1, 2, ...}`.
    Geometric {
        p: f64,
    },
}

impl NoiseModel {
    pub fn normal(sigma2: f64) -> Result<Self> {
        check_sigma2(sigma2)?;
        Ok(NoiseModel::Normal { sigma2 })
    }

    pub fn geometric(p: f64) -> Result<Self> {
        check_p(p)?;
        Ok(NoiseModel::Geometric { p })
    }

    /// Geometric model whose variance `(1-p)/p^2` equals `variance`.
    pub fn geometric_with_variance(variance: f64) -> Result<Self> {
        Self::geometric(geometric_p_for_variance(variance)?)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseModel::None => Ok(()),
            NoiseModel::Normal { sigma2 } => check_sigma2(sigma2),
            NoiseModel::Geometric { p } => check_p(p),
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            NoiseModel::None | NoiseModel::Normal { .. } => 0.0,
            NoiseModel::Geometric { p } => 1.0 / p,
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            NoiseModel::None => 0.0,
            NoiseModel::Normal { sigma2 } => sigma2,
            NoiseModel::Geometric { p } => (1.0 - p) / (p * p),
        }
    }

    /// `P(D <= x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            NoiseModel::None => {
                if x >= 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            NoiseModel::Normal { sigma2 } => 0.5 * erfc(-x / (2.0 * sigma2).sqrt()),
            NoiseModel::Geometric { p } => {
                if x < 1.0 {
                    0.0
                } else {
                    1.0 - (1.0 - p).powf(x.floor())
                }
            }
        }
    }

    /// One draw. Consumes randomness only for noisy models.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            NoiseModel::None => 0.0,
            NoiseModel::Normal { sigma2 } => draw_normal(sigma2, rng),
            NoiseModel::Geometric { p } => draw_geometric(p, rng) as f64,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            NoiseModel::None => "none",
            NoiseModel::Normal { .. } => "normal",
            NoiseModel::Geometric { .. } => "geometric",
        }
    }
}

impl fmt::Display for NoiseModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            NoiseModel::None => f.write_str("none"),
            NoiseModel::Normal { sigma2 } => write!(f, "normal(sigma2={sigma2})"),
            NoiseModel::Geometric { p } => write!(f, "geometric(p={p})"),
        }
    }
}

fn check_sigma2(sigma2: f64) -> Result<()> {
    if sigma2.is_finite() && sigma2 > 0.0 {
        Ok(())
    } else {
        Err(Error::config(format!(
            "normal noise needs sigma2 > 0, got {sigma2}"
        )))
    }
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::config(format!(
            "geometric noise needs 0 < p < 1, got {p}"
        )))
    }
}

/// Normal sample with mean 0 and variance `sigma2` (Marsaglia polar method).
pub fn sample_normal<R: Rng + ?Sized>(sigma2: f64, rng: &mut R) -> Result<f64> {
    check_sigma2(sigma2)?;
    Ok(draw_normal(sigma2, rng))
}

/// Geometric sample on `{1, 2, ...}` with `P(D >= k) = (1-p)^(k-1)`.
pub fn sample_geometric<R: Rng + ?Sized>(p: f64, rng: &mut R) -> Result<u64> {
    check_p(p)?;
    Ok(draw_geometric(p, rng))
}

// Polar method. The second variate of each accepted pair is discarded so a
// draw is a function of the generator state alone.
#[inline]
fn draw_normal<R: Rng + ?Sized>(sigma2: f64, rng: &mut R) -> f64 {
    loop {
        let u = 2.0 * rng.random::<f64>() - 1.0;
        let v = 2.0 * rng.random::<f64>() - 1.0;
        let s = u * u + v * v;
        if s > 0.0 && s < 1.0 {
            return u * (-2.0 * s.ln() / s).sqrt() * sigma2.sqrt();
        }
    }
}

// Inverse transform: D = 1 + floor(ln U / ln(1-p)) with U uniform on (0, 1].
#[inline]
fn draw_geometric<R: Rng + ?Sized>(p: f64, rng: &mut R) -> u64 {
    let u = 1.0 - rng.random::<f64>();
    let k = (u.ln() / (-p).ln_1p()).floor();
    if k.is_finite() && k >= 0.0 {
        1 + k as u64
    } else {
        1
    }
}

/// The unique `p` in `(0, 1)` with `(1-p)/p^2 = variance`.
pub fn geometric_p_for_variance(variance: f64) -> Result<f64> {
    if !(variance.is_finite() && variance > 0.0) {
        return Err(Error::config(format!(
            "variance must be > 0, got {variance}"
        )));
    }
    Ok(((1.0 + 4.0 * variance).sqrt() - 1.0) / (2.0 * variance))
}
