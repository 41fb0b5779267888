//! Random blurring of exact points into interval observations.

use std::collections::BTreeMap;

use rand::Rng;

use crate::linarith::{Assignment, Variable};
use crate::rational::{snap_f64, to_f64, Rational};

use super::interval::{Interval, PartialInterval};
use super::PacError;

/// Noisy values and interval ends are rounded to multiples of `2^-GRID_BITS`.
pub const GRID_BITS: u32 = 32;

#[derive(Debug, Clone)]
pub struct BlurConfig {
    /// Per-variable `[lo, hi]` box that noise and intervals are clipped to.
    pub domain: BTreeMap<Variable, (Rational, Rational)>,
    /// Probability of hiding a variable entirely.
    pub mask_probability: f64,
    /// Standard deviation of the additive Gaussian noise.
    pub sigma: f64,
}

impl BlurConfig {
    pub fn exact(domain: BTreeMap<Variable, (Rational, Rational)>) -> Self {
        Self {
            domain,
            mask_probability: 0.0,
            sigma: 0.0,
        }
    }

    fn validate(&self) -> Result<(), PacError> {
        if !(0.0..=1.0).contains(&self.mask_probability) {
            return Err(PacError::InvalidConfig(format!(
                "mask probability {} outside [0, 1]",
                self.mask_probability
            )));
        }
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(PacError::InvalidConfig(format!(
                "noise std {} must be >= 0",
                self.sigma
            )));
        }
        for (v, (lo, hi)) in &self.domain {
            if lo > hi {
                return Err(PacError::InvalidConfig(format!("empty domain for `{v}`")));
            }
        }
        Ok(())
    }
}

/// Total width of the interval placed around a noisy value in `dims`
/// dimensions: `4·ln(dims)·σ`, floored at `4σ` when `dims ≤ 2`.
pub fn noise_interval_width(dims: usize, sigma: f64) -> f64 {
    let factor = if dims <= 2 { 4.0 } else { 4.0 * (dims as f64).ln() };
    factor * sigma
}

/// One standard normal deviate by the Marsaglia polar method. The second
/// deviate of each accepted pair is discarded so every call consumes a
/// self-contained block of the stream.
pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random::<f64>() * 2.0 - 1.0;
        let v: f64 = rng.random::<f64>() * 2.0 - 1.0;
        let s = u * u + v * v;
        if s > 0.0 && s < 1.0 {
            return u * (-2.0 * s.ln() / s).sqrt();
        }
    }
}

fn clamp(x: Rational, lo: &Rational, hi: &Rational) -> Rational {
    if &x < lo {
        lo.clone()
    } else if &x > hi {
        hi.clone()
    } else {
        x
    }
}

/// Blurs `point` independently per variable: masked with probability
/// `mask_probability`, otherwise an interval of width
/// [`noise_interval_width`] centred on a Gaussian-perturbed value, both
/// clipped to the domain box. With `sigma = 0` the result is the exact point.
pub fn blur<R: Rng + ?Sized>(
    point: &Assignment,
    config: &BlurConfig,
    rng: &mut R,
) -> Result<PartialInterval, PacError> {
    config.validate()?;
    let dims = point.len();
    let half = noise_interval_width(dims, config.sigma) / 2.0;
    let mut out = PartialInterval::new();
    for (var, value) in point {
        let (lo, hi) = config
            .domain
            .get(var)
            .ok_or_else(|| PacError::InvalidConfig(format!("no domain for `{var}`")))?;
        let masked = config.mask_probability > 0.0 && rng.random::<f64>() < config.mask_probability;
        if masked {
            out.set(var, Interval::unbounded());
            continue;
        }
        if config.sigma == 0.0 {
            out.set(var, Interval::point(value.clone()));
            continue;
        }
        let noisy = to_f64(value) + config.sigma * standard_normal(rng);
        let noisy = clamp(snap_f64(noisy, GRID_BITS), lo, hi);
        let centre = to_f64(&noisy);
        let lower = clamp(snap_f64(centre - half, GRID_BITS), lo, &noisy);
        let upper = clamp(snap_f64(centre + half, GRID_BITS), &noisy, hi);
        out.set(var, Interval::closed(lower, upper)?);
    }
    Ok(out)
}
