//! Exact hitting theory for `dX = α ψ(X) σ²(X) dt + σ(X) dW` on `[0, 1]`.
//!
//! Everything is expressed through the scale function
//! `S(x) = ∫₀ˣ exp(-2α Ψ(y)) dy` with `Ψ(y) = ∫₀ʸ ψ`, evaluated by
//! quadrature (see [`ScaleTable`]). [`Diffusion`] bundles a model with its
//! scale table and answers all point queries; the free functions are
//! one-shot conveniences that rebuild the table on every call.

mod hitting;
mod scale;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::quadrature::QuadConfig;
use crate::scalar::Real;

pub use hitting::{Diffusion, HittingSummary};
pub use scale::{PsiIntegral, ScaleTable};

type ScalarFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// Frequency-dependent selection `ψ` on `[0, 1]`.
#[derive(Clone)]
pub enum FrequencyDependence<T> {
    /// `ψ(x) = Σ cᵢ xⁱ`
    Polynomial(Polynomial<T>),
    /// Arbitrary evaluator with a declared bound `M ≥ sup |ψ|`.
    Function { eval: ScalarFn<T>, bound: T },
}

impl<T: Real> FrequencyDependence<T> {
    pub fn polynomial(coeffs: Vec<T>) -> Self {
        FrequencyDependence::Polynomial(Polynomial::new(coeffs))
    }

    /// `ψ ≡ c`
    pub fn constant(c: T) -> Self {
        Self::polynomial(vec![c])
    }

    /// `ψ(y) = β - γ y`
    pub fn linear(beta: T, gamma: T) -> Self {
        Self::polynomial(vec![beta, -gamma])
    }

    pub fn from_fn(f: impl Fn(T) -> T + Send + Sync + 'static, bound: T) -> Self {
        FrequencyDependence::Function {
            eval: Arc::new(f),
            bound,
        }
    }

    #[inline]
    pub fn eval(&self, y: T) -> T {
        match self {
            FrequencyDependence::Polynomial(p) => p.eval(&y),
            FrequencyDependence::Function { eval, .. } => eval(y),
        }
    }

    /// Bound on `|ψ|` over `[0, 1]`; for polynomials the sum of absolute
    /// coefficients.
    pub fn bound(&self) -> T {
        match self {
            FrequencyDependence::Polynomial(p) => p.coeffs().iter().map(|c| c.abs()).sum(),
            FrequencyDependence::Function { bound, .. } => *bound,
        }
    }

    pub fn as_polynomial(&self) -> Option<&Polynomial<T>> {
        match self {
            FrequencyDependence::Polynomial(p) => Some(p),
            FrequencyDependence::Function { .. } => None,
        }
    }

    /// Selection seen by `1 - X`: `y ↦ -ψ(1 - y)`.
    pub fn mirrored(&self) -> Self {
        match self {
            FrequencyDependence::Polynomial(p) => FrequencyDependence::Polynomial(-p.reflect()),
            FrequencyDependence::Function { eval, bound } => {
                let f = eval.clone();
                FrequencyDependence::Function {
                    eval: Arc::new(move |y| -f(T::one() - y)),
                    bound: *bound,
                }
            }
        }
    }
}

impl<T: fmt::Debug> fmt::Debug for FrequencyDependence<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrequencyDependence::Polynomial(p) => f.debug_tuple("Polynomial").field(p).finish(),
            FrequencyDependence::Function { bound, .. } => f
                .debug_struct("Function")
                .field("bound", bound)
                .finish_non_exhaustive(),
        }
    }
}

/// The infinitesimal variance `σ²`.
#[derive(Clone)]
pub enum DiffusionCoefficient<T> {
    /// `σ²(y) = y(1 - y)`
    WrightFisher,
    Polynomial(Polynomial<T>),
    Function(ScalarFn<T>),
}

impl<T: Real> DiffusionCoefficient<T> {
    pub fn from_fn(f: impl Fn(T) -> T + Send + Sync + 'static) -> Self {
        DiffusionCoefficient::Function(Arc::new(f))
    }

    #[inline]
    pub fn eval(&self, y: T) -> T {
        match self {
            DiffusionCoefficient::WrightFisher => y * (T::one() - y),
            DiffusionCoefficient::Polynomial(p) => p.eval(&y),
            DiffusionCoefficient::Function(f) => f(y),
        }
    }

    pub fn is_wright_fisher(&self) -> bool {
        matches!(self, DiffusionCoefficient::WrightFisher)
    }

    /// `y ↦ σ²(1 - y)`
    pub fn mirrored(&self) -> Self {
        match self {
            DiffusionCoefficient::WrightFisher => DiffusionCoefficient::WrightFisher,
            DiffusionCoefficient::Polynomial(p) => DiffusionCoefficient::Polynomial(p.reflect()),
            DiffusionCoefficient::Function(f) => {
                let f = f.clone();
                DiffusionCoefficient::Function(Arc::new(move |y| f(T::one() - y)))
            }
        }
    }
}

impl<T: fmt::Debug> fmt::Debug for DiffusionCoefficient<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiffusionCoefficient::WrightFisher => write!(f, "WrightFisher"),
            DiffusionCoefficient::Polynomial(p) => f.debug_tuple("Polynomial").field(p).finish(),
            DiffusionCoefficient::Function(_) => write!(f, "Function(..)"),
        }
    }
}

/// Conditioning of a Green function or hitting time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Conditioning {
    None,
    /// On `T₁ < T₀` (fixation).
    Up,
    /// On `T₀ < T₁` (loss).
    Down,
}

/// `(α, ψ, σ²)`, immutable once built.
#[derive(Clone)]
pub struct DiffusionModel<T> {
    alpha: T,
    psi: FrequencyDependence<T>,
    sigma2: DiffusionCoefficient<T>,
}

impl<T: Real> fmt::Debug for DiffusionModel<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiffusionModel")
            .field("alpha", &self.alpha)
            .field("psi", &self.psi)
            .field("sigma2", &self.sigma2)
            .finish()
    }
}

const SIGMA_PROBES: usize = 1024;

impl<T: Real> DiffusionModel<T> {
    /// Validates that `α` is finite, `ψ` has a finite bound and `σ²` is
    /// positive on a fine interior grid.
    pub fn new(
        alpha: T,
        psi: FrequencyDependence<T>,
        sigma2: DiffusionCoefficient<T>,
    ) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::InvalidInput(format!(
                "alpha must be finite, got {alpha}"
            )));
        }
        let bound = psi.bound();
        if !bound.is_finite() || bound < T::zero() {
            return Err(Error::InvalidInput(format!(
                "psi bound must be finite, got {bound}"
            )));
        }
        if !sigma2.is_wright_fisher() {
            for i in 1..SIGMA_PROBES {
                let y = T::c(i as f64 / SIGMA_PROBES as f64);
                let v = sigma2.eval(y);
                if !(v > T::zero() && v.is_finite()) {
                    return Err(Error::InvalidInput(format!(
                        "sigma^2 must be positive on (0,1); sigma^2({y}) = {v}"
                    )));
                }
            }
        }
        Ok(DiffusionModel { alpha, psi, sigma2 })
    }

    /// Wright–Fisher model; cannot fail for a polynomial `ψ`.
    pub fn wright_fisher(alpha: T, psi: FrequencyDependence<T>) -> Result<Self> {
        Self::new(alpha, psi, DiffusionCoefficient::WrightFisher)
    }

    pub fn neutral_wright_fisher() -> Self {
        DiffusionModel {
            alpha: T::zero(),
            psi: FrequencyDependence::constant(T::zero()),
            sigma2: DiffusionCoefficient::WrightFisher,
        }
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn psi(&self) -> &FrequencyDependence<T> {
        &self.psi
    }

    pub fn sigma2(&self) -> &DiffusionCoefficient<T> {
        &self.sigma2
    }

    pub fn with_alpha(&self, alpha: T) -> Self {
        DiffusionModel {
            alpha,
            ..self.clone()
        }
    }

    /// `μ(y) = ψ(y) σ²(y)`
    pub fn mu(&self, y: T) -> T {
        self.psi.eval(y) * self.sigma2.eval(y)
    }

    /// Full drift `α μ(y)`.
    pub fn drift(&self, y: T) -> T {
        self.alpha * self.mu(y)
    }

    /// The model followed by `1 - X`.
    pub fn mirrored(&self) -> Self {
        DiffusionModel {
            alpha: self.alpha,
            psi: self.psi.mirrored(),
            sigma2: self.sigma2.mirrored(),
        }
    }
}

/// Builds the scale table of `model`.
pub fn build_scale<T: Real>(
    model: &DiffusionModel<T>,
    cfg: &QuadConfig<T>,
) -> Result<ScaleTable<T>> {
    ScaleTable::build(model, cfg)
}

/// `P_x(T₁ < T₀)`
pub fn hit_prob_up<T: Real>(model: &DiffusionModel<T>, x: T, cfg: &QuadConfig<T>) -> Result<T> {
    Diffusion::new(model.clone(), *cfg)?.hit_prob_up(x)
}

/// `P_x(T₀ < T₁)`
pub fn hit_prob_down<T: Real>(model: &DiffusionModel<T>, x: T, cfg: &QuadConfig<T>) -> Result<T> {
    Diffusion::new(model.clone(), *cfg)?.hit_prob_down(x)
}

pub fn green<T: Real>(
    model: &DiffusionModel<T>,
    x: T,
    y: T,
    conditioning: Conditioning,
    cfg: &QuadConfig<T>,
) -> Result<T> {
    Diffusion::new(model.clone(), *cfg)?.green(x, y, conditioning)
}

/// `E_x[T]`
pub fn absorption_time<T: Real>(model: &DiffusionModel<T>, x: T, cfg: &QuadConfig<T>) -> Result<T> {
    Diffusion::new(model.clone(), *cfg)?.absorption_time(x)
}

/// `E_x[T₁ | T₁ < T₀]` (`Up`) or `E_x[T₀ | T₀ < T₁]` (`Down`).
pub fn absorption_time_conditioned<T: Real>(
    model: &DiffusionModel<T>,
    x: T,
    direction: Conditioning,
    cfg: &QuadConfig<T>,
) -> Result<T> {
    Diffusion::new(model.clone(), *cfg)?.absorption_time_conditioned(x, direction)
}

pub fn frequency_spectrum<T: Real>(
    model: &DiffusionModel<T>,
    x: T,
    cfg: &QuadConfig<T>,
) -> Result<T> {
    Diffusion::new(model.clone(), *cfg)?.frequency_spectrum(x)
}

pub fn conditioned_drift<T: Real>(
    model: &DiffusionModel<T>,
    x: T,
    cfg: &QuadConfig<T>,
) -> Result<T> {
    Diffusion::new(model.clone(), *cfg)?.conditioned_drift(x)
}
