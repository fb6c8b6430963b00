//! Payoff family and the two antiderivatives the transformed estimators need.
//!
//! Payoffs are nonnegative weighted sums of calls `(s - K)_+` and digitals
//! `1_{s > L}` (strict at the jump), optionally plus a user function of
//! polynomial growth. Alongside the payoff `f` itself the estimators consume
//!
//! ```text
//! F(x) = int_0^x f(z) dz          (price antiderivative)
//! G(y) = int_0^y f(e^z) dz        (log-price antiderivative)
//! ```
//!
//! both in closed form for the built-in family and by adaptive quadrature for
//! the custom part.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::numeric::adaptive_simpson;

/// Relative tolerance for the custom-payoff quadrature fallback.
const QUAD_REL_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum PayoffError {
    #[error("payoff evaluated at negative price {0}")]
    NegativePrice(f64),
    #[error("invalid payoff term: {0}")]
    InvalidTerm(String),
    #[error("quadrature for the custom payoff did not converge")]
    QuadratureDidNotConverge,
}

#[derive(Clone)]
struct CustomPayoff {
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    /// Claimed polynomial growth exponent, `f(s) <= C (1 + s^p)`.
    growth_p: f64,
}

/// Weighted sum of calls and digitals, optionally plus a custom function.
#[derive(Clone, Default)]
pub struct PayoffSpec {
    /// `(weight, strike)` pairs, weight >= 0, strike > 0.
    calls: Vec<(f64, f64)>,
    /// `(weight, level)` pairs, weight >= 0, level > 0.
    digitals: Vec<(f64, f64)>,
    custom: Option<CustomPayoff>,
}

impl PayoffSpec {
    pub fn new(calls: Vec<(f64, f64)>, digitals: Vec<(f64, f64)>) -> Result<Self, PayoffError> {
        for &(w, k) in &calls {
            if w.is_nan() || w < 0.0 || !k.is_finite() {
                return Err(PayoffError::InvalidTerm(format!(
                    "call weight must be >= 0 and strike finite, got ({w}, {k})"
                )));
            }
            if k <= 0.0 {
                return Err(PayoffError::InvalidTerm(format!(
                    "call strike must be positive, got {k}"
                )));
            }
        }
        for &(w, l) in &digitals {
            if w.is_nan() || w < 0.0 || l.is_nan() || l <= 0.0 {
                return Err(PayoffError::InvalidTerm(format!(
                    "digital weight must be >= 0 and level positive, got ({w}, {l})"
                )));
            }
        }
        if calls.is_empty() && digitals.is_empty() {
            return Err(PayoffError::InvalidTerm(
                "payoff needs at least one call or digital term".to_string(),
            ));
        }
        Ok(Self {
            calls,
            digitals,
            custom: None,
        })
    }

    /// Attach a custom nonnegative payoff component of polynomial growth.
    /// Local Riemann integrability is the caller's contract; it is not
    /// verified here.
    pub fn with_custom(
        mut self,
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        growth_p: f64,
    ) -> Self {
        self.custom = Some(CustomPayoff { f, growth_p });
        self
    }

    /// Payoff used throughout the benchmark tables: one unit call plus one
    /// unit digital at the same strike/level.
    pub fn call_plus_digital(strike: f64, level: f64) -> Result<Self, PayoffError> {
        Self::new(vec![(1.0, strike)], vec![(1.0, level)])
    }

    pub fn calls(&self) -> &[(f64, f64)] {
        &self.calls
    }

    pub fn digitals(&self) -> &[(f64, f64)] {
        &self.digitals
    }

    pub fn has_custom(&self) -> bool {
        self.custom.is_some()
    }

    /// Claimed growth exponent: 1 for the call/digital family, the maximum of
    /// 1 and the custom exponent otherwise.
    pub fn growth_exponent(&self) -> f64 {
        match &self.custom {
            Some(c) => c.growth_p.max(1.0),
            None => 1.0,
        }
    }

    #[inline]
    pub(crate) fn value_unchecked(&self, s: f64) -> f64 {
        let mut acc = 0.0;
        for &(w, k) in &self.calls {
            if s > k {
                acc += w * (s - k);
            }
        }
        for &(w, l) in &self.digitals {
            if s > l {
                acc += w;
            }
        }
        if let Some(c) = &self.custom {
            acc += (c.f)(s);
        }
        acc
    }

    /// Payoff value `f(s)`; the digital jump is strict, `1_{s > L}`.
    pub fn value(&self, s: f64) -> Result<f64, PayoffError> {
        if s < 0.0 || s.is_nan() {
            return Err(PayoffError::NegativePrice(s));
        }
        Ok(self.value_unchecked(s))
    }

    /// `F(x) = int_0^x f(z) dz` for `x >= 0`.
    pub fn integral(&self, x: f64) -> Result<f64, PayoffError> {
        if x < 0.0 || x.is_nan() {
            return Err(PayoffError::NegativePrice(x));
        }
        let mut acc = 0.0;
        for &(w, k) in &self.calls {
            let excess = (x - k).max(0.0);
            acc += 0.5 * w * excess * excess;
        }
        for &(w, l) in &self.digitals {
            acc += w * (x - l).max(0.0);
        }
        if let Some(c) = &self.custom {
            acc += adaptive_simpson(&|z| (c.f)(z), 0.0, x, QUAD_REL_TOL)
                .ok_or(PayoffError::QuadratureDidNotConverge)?;
        }
        Ok(acc)
    }

    /// `G(y) = int_0^y f(e^z) dz` for any real `y` (negative `y` integrates
    /// backwards, so `G(y) <= 0` there).
    pub fn log_integral(&self, y: f64) -> Result<f64, PayoffError> {
        if y.is_nan() {
            return Err(PayoffError::NegativePrice(y));
        }
        let mut acc = 0.0;
        for &(w, k) in &self.calls {
            acc += w * (call_log_primitive(y, k) - call_log_primitive(0.0, k));
        }
        for &(w, l) in &self.digitals {
            let a = l.ln();
            acc += w * ((y - a).max(0.0) - (-a).max(0.0));
        }
        if let Some(c) = &self.custom {
            acc += adaptive_simpson(&|z: f64| (c.f)(z.exp()), 0.0, y, QUAD_REL_TOL)
                .ok_or(PayoffError::QuadratureDidNotConverge)?;
        }
        Ok(acc)
    }
}

/// `int_{-inf}^y (e^z - K)_+ dz = e^y - K (1 + y - ln K)` for `y > ln K`.
#[inline]
fn call_log_primitive(y: f64, strike: f64) -> f64 {
    let a = strike.ln();
    if y > a {
        y.exp() - strike * (1.0 + y - a)
    } else {
        0.0
    }
}

impl fmt::Debug for PayoffSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PayoffSpec")
            .field("calls", &self.calls)
            .field("digitals", &self.digitals)
            .field("custom", &self.custom.is_some())
            .finish()
    }
}
