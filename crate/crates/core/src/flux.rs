//! Flux functions v for the quasilinear equation u_t = (v(u_x))_x.
//!
//! The admissible family is v smooth on (-1, 1) with v' > 0. Two members are
//! built in:
//!
//! - `Mcf`:  v(s) = artanh(s), giving u_t = u_xx / (1 - u_x²), the mean
//!   curvature flow of a spacelike graph in the Lorentz-Minkowski plane;
//! - `Heat`: v(s) = s, the linear heat flow.
//!
//! Custom fluxes supply evaluators for v, v' and v''. All evaluations are
//! guarded by a domain margin δ: slopes are only accepted for |s| <= 1 - δ,
//! and a violation is surfaced as an error rather than clamped, since |u_x|
//! reaching 1 is a genuine breakdown (the graph stops being spacelike and
//! the curvature blows up).

use std::fmt;
use std::sync::Arc;

use crate::error::{Result, SolverError};

/// Default domain margin δ.
pub const DEFAULT_DOMAIN_MARGIN: f64 = 1e-9;

/// Bisection tolerance for the numeric inverse of custom fluxes.
const INVERSE_TOL: f64 = 1e-12;
/// Iteration cap for the numeric inverse.
const INVERSE_MAX_ITER: usize = 200;

type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A user-supplied flux given by closures for v, v' and v''.
#[derive(Clone)]
pub struct CustomFlux {
    pub name: String,
    v: Evaluator,
    v_prime: Evaluator,
    v_second: Evaluator,
}

impl fmt::Debug for CustomFlux {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomFlux").field("name", &self.name).finish()
    }
}

/// Which flux is in play.
#[derive(Debug, Clone)]
pub enum FluxKind {
    Mcf,
    Heat,
    Custom(CustomFlux),
}

/// The nonlinearity v together with its derivatives, numeric inverse and
/// domain guard. Immutable after construction; safe to share across threads.
#[derive(Debug, Clone)]
pub struct FluxFunction {
    kind: FluxKind,
    domain_margin: f64,
}

impl FluxFunction {
    /// Mean curvature flow flux v(s) = artanh(s).
    pub fn mcf() -> Self {
        Self { kind: FluxKind::Mcf, domain_margin: DEFAULT_DOMAIN_MARGIN }
    }

    /// Heat flow flux v(s) = s.
    pub fn heat() -> Self {
        Self { kind: FluxKind::Heat, domain_margin: DEFAULT_DOMAIN_MARGIN }
    }

    /// Custom flux from evaluators for v, v' and v''. v'' is required by the
    /// semi-implicit stepper's error analysis and by diagnostics; v' > 0 on
    /// the sampled domain is checked by [`FluxFunction::validate`].
    pub fn custom<F, G, H>(name: impl Into<String>, v: F, v_prime: G, v_second: H) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
        H: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            kind: FluxKind::Custom(CustomFlux {
                name: name.into(),
                v: Arc::new(v),
                v_prime: Arc::new(v_prime),
                v_second: Arc::new(v_second),
            }),
            domain_margin: DEFAULT_DOMAIN_MARGIN,
        }
    }

    /// The cubic flux v(s) = s + s³/3 (v' = 1 + s² > 0), used as the stock
    /// custom flux in tests and available by name from configs.
    pub fn cubic() -> Self {
        Self::custom(
            "cubic",
            |s| s + s * s * s / 3.0,
            |s| 1.0 + s * s,
            |s| 2.0 * s,
        )
    }

    /// Replace the domain margin δ (must lie in (0, 1)).
    pub fn with_margin(mut self, margin: f64) -> Result<Self> {
        if !(margin > 0.0 && margin < 1.0) || !margin.is_finite() {
            return Err(SolverError::Validation(format!(
                "domain margin must lie in (0, 1), got {margin}"
            )));
        }
        self.domain_margin = margin;
        Ok(self)
    }

    pub fn kind(&self) -> &FluxKind {
        &self.kind
    }

    pub fn domain_margin(&self) -> f64 {
        self.domain_margin
    }

    /// Largest admissible |slope|, 1 - δ.
    pub fn limit(&self) -> f64 {
        1.0 - self.domain_margin
    }

    fn check_domain(&self, s: f64) -> Result<()> {
        if !s.is_finite() || s.abs() > self.limit() {
            return Err(SolverError::DomainViolation { slope: s, limit: self.limit() });
        }
        Ok(())
    }

    /// v(s). For MCF this is artanh(s) = ln((1+s)/(1-s))/2.
    pub fn eval(&self, s: f64) -> Result<f64> {
        self.check_domain(s)?;
        Ok(match &self.kind {
            FluxKind::Mcf => s.atanh(),
            FluxKind::Heat => s,
            FluxKind::Custom(c) => (c.v)(s),
        })
    }

    /// v'(s). For MCF this is 1/(1 - s²).
    pub fn prime(&self, s: f64) -> Result<f64> {
        self.check_domain(s)?;
        Ok(match &self.kind {
            FluxKind::Mcf => 1.0 / (1.0 - s * s),
            FluxKind::Heat => 1.0,
            FluxKind::Custom(c) => (c.v_prime)(s),
        })
    }

    /// v''(s). For MCF this is 2s/(1 - s²)².
    pub fn second(&self, s: f64) -> Result<f64> {
        self.check_domain(s)?;
        Ok(match &self.kind {
            FluxKind::Mcf => {
                let q = 1.0 - s * s;
                2.0 * s / (q * q)
            }
            FluxKind::Heat => 0.0,
            FluxKind::Custom(c) => (c.v_second)(s),
        })
    }

    /// Attainable range [v(-1+δ), v(1-δ)] of the flux on its guarded domain.
    pub fn range(&self) -> (f64, f64) {
        let lim = self.limit();
        let lo = match &self.kind {
            FluxKind::Mcf => (-lim).atanh(),
            FluxKind::Heat => -lim,
            FluxKind::Custom(c) => (c.v)(-lim),
        };
        let hi = match &self.kind {
            FluxKind::Mcf => lim.atanh(),
            FluxKind::Heat => lim,
            FluxKind::Custom(c) => (c.v)(lim),
        };
        (lo, hi)
    }

    /// Solve v(s) = y for s. MCF and Heat use closed forms (tanh, identity);
    /// custom fluxes fall back to bisection, which needs only the
    /// monotonicity v' > 0.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        let (lo, hi) = self.range();
        if !y.is_finite() || y < lo || y > hi {
            return Err(SolverError::RangeViolation { value: y, min: lo, max: hi });
        }
        Ok(match &self.kind {
            FluxKind::Mcf => y.tanh(),
            FluxKind::Heat => y,
            FluxKind::Custom(c) => {
                let mut a = -self.limit();
                let mut b = self.limit();
                for _ in 0..INVERSE_MAX_ITER {
                    if b - a <= INVERSE_TOL {
                        break;
                    }
                    let mid = 0.5 * (a + b);
                    if (c.v)(mid) > y {
                        b = mid;
                    } else {
                        a = mid;
                    }
                }
                0.5 * (a + b)
            }
        })
    }

    /// Sweep an even grid of [-1+δ, 1-δ] and check that v' stays strictly
    /// positive and v strictly increases between consecutive samples.
    pub fn validate(&self, samples: usize) -> Result<FluxReport> {
        if samples < 3 {
            return Err(SolverError::Validation(format!(
                "flux validation needs at least 3 samples, got {samples}"
            )));
        }
        let lim = self.limit();
        let mut report = FluxReport { samples, failures: Vec::new() };
        let mut prev: Option<(f64, f64)> = None;
        for i in 0..samples {
            let s = -lim + 2.0 * lim * (i as f64) / ((samples - 1) as f64);
            let value = match &self.kind {
                FluxKind::Mcf => s.atanh(),
                FluxKind::Heat => s,
                FluxKind::Custom(c) => (c.v)(s),
            };
            let slope = match &self.kind {
                FluxKind::Mcf => 1.0 / (1.0 - s * s),
                FluxKind::Heat => 1.0,
                FluxKind::Custom(c) => (c.v_prime)(s),
            };
            if !(slope > 0.0) || !slope.is_finite() {
                report.failures.push(FluxFailure { s, detail: format!("v'({s}) = {slope} is not strictly positive") });
            }
            if !value.is_finite() {
                report.failures.push(FluxFailure { s, detail: format!("v({s}) = {value} is not finite") });
            }
            if let Some((ps, pv)) = prev {
                if !(value > pv) {
                    report.failures.push(FluxFailure {
                        s,
                        detail: format!("v is not strictly increasing: v({ps}) = {pv}, v({s}) = {value}"),
                    });
                }
            }
            prev = Some((s, value));
        }
        Ok(report)
    }
}

/// Outcome of a validation sweep. Failures are carried, not thrown.
#[derive(Debug, Clone)]
pub struct FluxReport {
    pub samples: usize,
    pub failures: Vec<FluxFailure>,
}

#[derive(Debug, Clone)]
pub struct FluxFailure {
    pub s: f64,
    pub detail: String,
}

impl FluxReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Bisection oracle: solve tanh(y) = s for y without using atanh.
    fn artanh_by_bisection(s: f64) -> f64 {
        let (mut a, mut b) = (-50.0f64, 50.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid.tanh() > s {
                b = mid;
            } else {
                a = mid;
            }
        }
        0.5 * (a + b)
    }

    #[test]
    fn mcf_eval_at_zero_is_zero() {
        assert_eq!(FluxFunction::mcf().eval(0.0).unwrap(), 0.0);
    }

    #[test]
    fn mcf_eval_matches_log_form_and_bisection_oracle() {
        // artanh(0.5) = ln(3)/2; the oracle solves tanh(y) = 0.5 directly.
        let expected = 0.5 * 3.0f64.ln();
        let oracle = artanh_by_bisection(0.5);
        assert!((oracle - expected).abs() < 1e-12);
        let got = FluxFunction::mcf().eval(0.5).unwrap();
        assert!((got - expected).abs() < 1e-14, "artanh(0.5) = {got}");
    }

    #[test]
    fn heat_flux_is_identity() {
        assert_eq!(FluxFunction::heat().eval(0.3).unwrap(), 0.3);
        assert_eq!(FluxFunction::heat().prime(0.9).unwrap(), 1.0);
        assert_eq!(FluxFunction::heat().inverse(0.4).unwrap(), 0.4);
    }

    #[test]
    fn mcf_prime_values() {
        let f = FluxFunction::mcf();
        assert_eq!(f.prime(0.0).unwrap(), 1.0);
        assert!((f.prime(0.5).unwrap() - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn mcf_inverse_closed_form_matches_bisection_oracle() {
        let f = FluxFunction::mcf();
        assert_eq!(f.inverse(0.0).unwrap(), 0.0);
        // Oracle: bisection on artanh(s) = 1.
        let (mut a, mut b) = (-1.0f64 + 1e-15, 1.0f64 - 1e-15);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid.atanh() > 1.0 {
                b = mid;
            } else {
                a = mid;
            }
        }
        let oracle = 0.5 * (a + b);
        let got = f.inverse(1.0).unwrap();
        assert!((got - 1.0f64.tanh()).abs() < 1e-15);
        assert!((got - oracle).abs() < 1e-12, "tanh(1) = {got} vs oracle {oracle}");
    }

    #[test]
    fn domain_violation_outside_margin() {
        let f = FluxFunction::mcf();
        let err = f.eval(1.0).unwrap_err();
        assert!(matches!(err, SolverError::DomainViolation { .. }));
        assert!(f.eval(1.0 - 1e-9).is_ok());
        assert!(f.eval(-(1.0 - 1e-9)).is_ok());
        assert!(f.prime(-1.0).is_err());
    }

    #[test]
    fn inverse_range_violation() {
        let f = FluxFunction::cubic();
        let (lo, hi) = f.range();
        assert!(f.inverse(hi + 1.0).is_err());
        assert!(f.inverse(lo - 1.0).is_err());
    }

    #[test]
    fn custom_inverse_bisection_round_trip() {
        let f = FluxFunction::cubic();
        for &s in &[-0.9, -0.4, 0.0, 0.17, 0.83] {
            let y = f.eval(s).unwrap();
            let back = f.inverse(y).unwrap();
            assert!((back - s).abs() < 1e-10, "round trip at s = {s}: got {back}");
        }
    }

    #[test]
    fn validate_passes_for_builtins() {
        assert!(FluxFunction::mcf().validate(101).unwrap().pass());
        assert!(FluxFunction::heat().validate(101).unwrap().pass());
        assert!(FluxFunction::cubic().validate(101).unwrap().pass());
    }

    #[test]
    fn validate_rejects_decreasing_flux() {
        let f = FluxFunction::custom("negated", |s| -s, |_| -1.0, |_| 0.0);
        let report = f.validate(101).unwrap();
        assert!(!report.pass());
        // v' < 0 at every sample and v decreasing between all consecutive pairs.
        let prime_failures = report
            .failures
            .iter()
            .filter(|f| f.detail.contains("strictly positive"))
            .count();
        assert_eq!(prime_failures, 101);
    }

    #[test]
    fn validate_needs_three_samples() {
        assert!(FluxFunction::mcf().validate(2).is_err());
    }

    #[test]
    fn margin_must_be_in_unit_interval() {
        assert!(FluxFunction::mcf().with_margin(0.0).is_err());
        assert!(FluxFunction::mcf().with_margin(1.0).is_err());
        assert!(FluxFunction::mcf().with_margin(0.5).is_ok());
    }
}
