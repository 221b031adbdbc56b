//! Adaptive one-dimensional quadrature.
//!
//! [`integrate`] handles integrands that are smooth in the interior and may
//! carry integrable `y^-p` / `(1-y)^-p` singularities (`p < 1`) at either
//! end. [`cumulative`] tabulates running integrals for repeated lookups.

mod adaptive;
mod rule;
mod table;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub use adaptive::compensated_sum;
pub use table::{cumulative, cumulative_on, CumulativeTable};

/// Tolerances and budgets for [`integrate`] and [`cumulative`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_subdivisions: usize,
    /// Smallest width, relative to the range, of a panel touching an
    /// endpoint.
    pub endpoint_shave: T,
}

impl<T: Real> Default for QuadConfig<T> {
    fn default() -> Self {
        QuadConfig {
            rel_tol: T::c(1e-10),
            abs_tol: T::c(1e-12),
            max_subdivisions: 2000,
            endpoint_shave: T::c(1e-12),
        }
    }
}

impl<T: Real> QuadConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let ok = self.rel_tol > T::zero()
            && self.abs_tol >= T::zero()
            && self.max_subdivisions >= 1
            && self.endpoint_shave > T::zero()
            && self.endpoint_shave < T::c(1e-3);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "bad quadrature configuration {self:?}"
            )))
        }
    }

    /// Both tolerances divided by ten; used for inner integrals of nested
    /// quadratures.
    pub fn tightened(&self) -> Self {
        QuadConfig {
            rel_tol: self.rel_tol / T::c(10.0),
            abs_tol: self.abs_tol / T::c(10.0),
            ..*self
        }
    }
}

/// Result of a successful integration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult<T> {
    pub value: T,
    /// Achieved error estimate.
    pub error: T,
    pub subdivisions: usize,
    /// Whether the endpoint-stretching substitution was needed.
    pub substituted: bool,
}

/// Integrates `f` over `[a, b]`.
///
/// Returns once the error estimate is at most
/// `max(abs_tol, rel_tol * |value|)`. If plain bisection stalls with the
/// error concentrated in the outermost panels, the integral is retried
/// under `y = a + (b - a)(3u^2 - 2u^3)`, which turns a `y^-1/2` endpoint
/// singularity into a smooth integrand.
pub fn integrate<T, F>(f: F, a: T, b: T, cfg: &QuadConfig<T>) -> Result<QuadResult<T>>
where
    T: Real,
    F: Fn(T) -> T,
{
    cfg.validate()?;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::Domain(format!(
            "integration range [{a}, {b}] must be finite with a < b"
        )));
    }
    let not_finite = |x: T| {
        Error::divergence(
            x.to_f64_lossy(),
            "integrand is not finite at a quadrature node",
        )
    };

    let plain = adaptive::run(&f, a, b, cfg, cfg.max_subdivisions).map_err(not_finite)?;
    if plain.converged {
        return Ok(QuadResult {
            value: plain.value,
            error: plain.error,
            subdivisions: plain.subdivisions,
            substituted: false,
        });
    }
    if let Some(at) = diverging_edge(&plain.edges, plain.tolerance, a, b) {
        return Err(Error::divergence(
            at.to_f64_lossy(),
            "endpoint contribution does not shrink under refinement",
        ));
    }

    let remaining = cfg.max_subdivisions.saturating_sub(plain.subdivisions);
    if plain.endpoint_share > T::c(0.5) && remaining > 0 {
        let len = b - a;
        let six = T::c(6.0);
        let g = |u: T| {
            let y = a + len * u * u * (T::c(3.0) - T::c(2.0) * u);
            if y <= a || y >= b {
                // Rounded onto the endpoint; the panel has negligible width.
                T::zero()
            } else {
                f(y) * six * len * u * (T::one() - u)
            }
        };
        let stretched = adaptive::run(&g, T::zero(), T::one(), cfg, remaining)
            .map_err(|u| not_finite(a + len * u * u * (T::c(3.0) - T::c(2.0) * u)))?;
        let subdivisions = plain.subdivisions + stretched.subdivisions;
        if stretched.converged {
            return Ok(QuadResult {
                value: stretched.value,
                error: stretched.error,
                subdivisions,
                substituted: true,
            });
        }
        if let Some(at) = diverging_edge(&stretched.edges, stretched.tolerance, a, b) {
            return Err(Error::divergence(
                at.to_f64_lossy(),
                "endpoint contribution does not shrink under refinement",
            ));
        }
        return Err(Error::NonConvergence {
            subdivisions,
            error_estimate: plain.error.min(stretched.error).to_f64_lossy(),
        });
    }

    Err(Error::NonConvergence {
        subdivisions: plain.subdivisions,
        error_estimate: plain.error.to_f64_lossy(),
    })
}

fn diverging_edge<T: Real>(edges: &[adaptive::EdgeHistory<T>; 2], tol: T, a: T, b: T) -> Option<T> {
    if edges[0].diverging(tol) {
        Some(a)
    } else if edges[1].diverging(tol) {
        Some(b)
    } else {
        None
    }
}

/// Shorthand for [`integrate`] returning only the value.
pub fn integral<T, F>(f: F, a: T, b: T, cfg: &QuadConfig<T>) -> Result<T>
where
    T: Real,
    F: Fn(T) -> T,
{
    integrate(f, a, b, cfg).map(|r| r.value)
}
