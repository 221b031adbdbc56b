//! Hitting probabilities, hitting times, Green functions and frequency
//! spectra of one-dimensional diffusions on `[0, 1]` with weak
//! frequency-dependent selection, together with their first-order
//! expansions in the selection strength.
//!
//! Numerical code is generic over [`scalar::Real`] (`f32`, `f64`); exact
//! algebra is generic over [`scalar::Field`], which also covers
//! [`Rational`].

pub mod diffusion;
pub mod error;
pub mod games;
pub mod montecarlo;
pub mod perturbation;
pub mod poly;
pub mod quadrature;
pub mod scalar;

pub use error::{Error, Result};

/// Arbitrary-precision rational numbers for the exact paths.
pub type Rational = num_rational::BigRational;
pub type RationalPoly = poly::Polynomial<Rational>;

pub type Model = diffusion::DiffusionModel<f64>;
pub type Model32 = diffusion::DiffusionModel<f32>;
pub type Psi = diffusion::FrequencyDependence<f64>;
pub type Sigma2 = diffusion::DiffusionCoefficient<f64>;
pub type Solver = diffusion::Diffusion<f64>;
pub type QuadConfig = quadrature::QuadConfig<f64>;
