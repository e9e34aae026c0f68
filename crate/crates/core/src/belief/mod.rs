//! Per-area Bayesian belief over the exponential interarrival scale θ.
//!
//! The prior is the reparametrized inverse-gamma density
//!
//! ```text
//! π(θ | a, b) = b^{a-1} exp(-b/θ) / (Γ(a-1) θ^a),   θ > 0
//! ```
//!
//! where `a` counts events and `b` sums interarrival ticks. Observing `n`
//! samples adds `n` to `a` and their sum to `b`.
//!
//! A model carries two views of the evidence. The cumulative pair grows with
//! every observation and is what robots share. The windowed posterior only
//! keeps the last `K` samples on top of a base pair and drives behaviour
//! (credible intervals, observation and dissemination times). The base pair is
//! the prior until a shared-belief merge rebases it.

pub mod gamma;

use std::collections::VecDeque;

use crate::{Error, Result};

pub use gamma::{inv_reg_upper_gamma_q, ln_gamma, reg_upper_gamma_q};

/// Equal-tailed credible interval for θ, in ticks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CredibleInterval {
    pub lo: f64,
    pub hi: f64,
    pub level: f64,
}

impl CredibleInterval {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Default prior shape.
pub const DEFAULT_PRIOR_A: f64 = 2.0;
/// Default prior scale, in ticks.
pub const DEFAULT_PRIOR_B: f64 = 4_000.0;
/// Prior scale of the high-prior variant, in ticks.
pub const HIGH_PRIOR_B: f64 = 80_000.0;

#[derive(Debug, Clone, PartialEq)]
pub struct BeliefModel {
    a0: f64,
    b0: f64,
    a: f64,
    b: f64,
    base_a: f64,
    base_b: f64,
    window: VecDeque<f64>,
    window_sum: f64,
    capacity: usize,
    scale: f64,
}

impl BeliefModel {
    pub fn new(a0: f64, b0: f64, capacity: usize, scale: f64) -> Result<Self> {
        if !(a0 > 1.0 && a0.is_finite()) {
            return Err(Error::InvalidPrior(format!("a0 must exceed 1, got {a0}")));
        }
        if !(b0 > 0.0 && b0.is_finite()) {
            return Err(Error::InvalidPrior(format!("b0 must be positive, got {b0}")));
        }
        if capacity == 0 {
            return Err(Error::InvalidPrior("window capacity must be at least 1".into()));
        }
        if !(scale >= 1.0 && scale.is_finite()) {
            return Err(Error::InvalidPrior(format!("scale divisor must be >= 1, got {scale}")));
        }
        Ok(Self {
            a0,
            b0,
            a: a0,
            b: b0,
            base_a: a0,
            base_b: b0,
            window: VecDeque::with_capacity(capacity),
            window_sum: 0.0,
            capacity,
            scale,
        })
    }

    pub fn prior(&self) -> (f64, f64) {
        (self.a0, self.b0)
    }

    /// Cumulative `(a, b)`: every observation plus any merges.
    pub fn cumulative(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn window(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        self.window.iter().copied()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn observe(&mut self, x: f64) -> Result<()> {
        if !(x > 0.0 && x.is_finite()) {
            return Err(Error::InvalidSample(x));
        }
        self.a += 1.0;
        self.b += x;
        if self.window.len() == self.capacity {
            if let Some(old) = self.window.pop_front() {
                self.window_sum -= old;
            }
        }
        self.window.push_back(x);
        // recompute rather than accumulate rounding drift
        self.window_sum = self.window.iter().sum();
        Ok(())
    }

    /// One conjugate update with `n = xs.len()` samples: `a += n`,
    /// `b += Σ xs`. Nothing changes if any sample is invalid.
    pub fn observe_batch(&mut self, xs: &[f64]) -> Result<()> {
        if let Some(&bad) = xs.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
            return Err(Error::InvalidSample(bad));
        }
        self.a += xs.len() as f64;
        self.b += xs.iter().sum::<f64>();
        let keep = xs.len().min(self.capacity);
        for &x in &xs[xs.len() - keep..] {
            if self.window.len() == self.capacity {
                self.window.pop_front();
            }
            self.window.push_back(x);
        }
        self.window_sum = self.window.iter().sum();
        Ok(())
    }

    /// Windowed posterior `(base_a + |window|, base_b + Σ window)`.
    pub fn posterior_params(&self) -> (f64, f64) {
        (
            self.base_a + self.window.len() as f64,
            self.base_b + self.window_sum,
        )
    }

    /// Mode estimate `b / (a + 1)` of the windowed posterior.
    pub fn mode(&self) -> f64 {
        let (a, b) = self.posterior_params();
        b / (a + 1.0)
    }

    pub fn credible_interval(&self, level: f64) -> Result<CredibleInterval> {
        let (a, b) = self.posterior_params();
        credible_interval(a, b, level)
    }

    /// Averages received `(a, b)` pairs into the cumulative parameters.
    ///
    /// With `ā`, `b̄` the means of the received values the cumulative pair
    /// becomes `((a + ā)/2, (b + b̄)/2)`. The merged pair then replaces the
    /// base of the windowed posterior and the window restarts empty, so the
    /// shared evidence drives the intervals until fresh samples arrive.
    /// An empty `received` leaves the model untouched.
    pub fn merge_shared(&mut self, received: &[(f64, f64)]) -> Result<()> {
        if received.is_empty() {
            return Ok(());
        }
        for &(a, b) in received {
            if !(a > 1.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
                return Err(Error::InvalidSharedBelief { a, b });
            }
        }
        let n = received.len() as f64;
        let a_bar = received.iter().map(|p| p.0).sum::<f64>() / n;
        let b_bar = received.iter().map(|p| p.1).sum::<f64>() / n;
        self.a = 0.5 * (self.a + a_bar);
        self.b = 0.5 * (self.b + b_bar);
        self.base_a = self.a;
        self.base_b = self.b;
        self.window.clear();
        self.window_sum = 0.0;
        Ok(())
    }
}

/// Mode `b / (a + 1)`.
pub fn mode(a: f64, b: f64) -> Result<f64> {
    check_params(a, b)?;
    Ok(b / (a + 1.0))
}

fn check_params(a: f64, b: f64) -> Result<()> {
    if a > 1.0 && b > 0.0 && a.is_finite() && b.is_finite() {
        Ok(())
    } else {
        Err(Error::Numerics(format!("need a > 1 and b > 0, got ({a}, {b})")))
    }
}

/// Equal-tailed interval of the inverse-gamma posterior with shape `a - 1`
/// and scale `b`; its distribution function is `F(t) = Q(a - 1, b / t)`.
pub fn credible_interval(a: f64, b: f64, level: f64) -> Result<CredibleInterval> {
    check_params(a, b)?;
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::Numerics(format!("level must lie in (0, 1), got {level}")));
    }
    let alpha = a - 1.0;
    let lo = b / inv_reg_upper_gamma_q(alpha, 0.5 * (1.0 - level))?;
    let hi = b / inv_reg_upper_gamma_q(alpha, 0.5 * (1.0 + level))?;
    Ok(CredibleInterval { lo, hi, level })
}

/// Inverse-gamma distribution function `F(t) = Q(a - 1, b / t)`.
pub fn posterior_cdf(a: f64, b: f64, t: f64) -> Result<f64> {
    check_params(a, b)?;
    if t <= 0.0 {
        return Ok(0.0);
    }
    reg_upper_gamma_q(a - 1.0, b / t)
}
