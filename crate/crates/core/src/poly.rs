//! Dense univariate polynomials over a [`Field`].
//!
//! Used both with floats and with [`num_rational::BigRational`]; every
//! operation here is exact whenever the underlying field arithmetic is.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::scalar::{binomial, Field};

/// Polynomial `c0 + c1 x + ... + cd x^d`, coefficients stored low to high.
///
/// Trailing zero coefficients are trimmed, so the zero polynomial has an
/// empty coefficient vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Polynomial<F> {
    coeffs: Vec<F>,
}

impl<F: Field> Polynomial<F> {
    pub fn new(coeffs: Vec<F>) -> Self {
        let mut p = Polynomial { coeffs };
        p.trim();
        p
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: F) -> Self {
        Self::new(vec![c])
    }

    /// `x^k`
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![F::zero(); k + 1];
        coeffs[k] = F::one();
        Polynomial { coeffs }
    }

    /// `(1 - x)^k`, expanded.
    pub fn one_minus_x_pow(k: usize) -> Self {
        let coeffs = (0..=k)
            .map(|i| {
                let c: F = binomial(k as u32, i as u32);
                if i % 2 == 0 {
                    c
                } else {
                    -c
                }
            })
            .collect();
        Self::new(coeffs)
    }

    /// `a + b x`
    pub fn linear(a: F, b: F) -> Self {
        Self::new(vec![a, b])
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    /// Coefficient of `x^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> F {
        self.coeffs.get(i).cloned().unwrap_or_else(F::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &F) -> F {
        self.coeffs
            .iter()
            .rev()
            .fold(F::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn scale(&self, s: &F) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.clone() * s.clone()).collect())
    }

    /// Antiderivative vanishing at 0.
    pub fn antiderivative(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(F::zero());
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c.clone() / F::from_int(i as i64 + 1));
        }
        Self::new(coeffs)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.clone() * F::from_int(i as i64))
                .collect(),
        )
    }

    /// `∫₀¹ p`
    pub fn integral_unit(&self) -> F {
        self.coeffs
            .iter()
            .enumerate()
            .fold(F::zero(), |acc, (i, c)| {
                acc + c.clone() / F::from_int(i as i64 + 1)
            })
    }

    /// `y ↦ ∫_y^1 p`, as a polynomial in `y`.
    pub fn upper_tail(&self) -> Self {
        let anti = self.antiderivative();
        Self::constant(anti.eval(&F::one())) - anti
    }

    /// `x ↦ p(1 - x)`
    pub fn reflect(&self) -> Self {
        // Horner in the polynomial ring with the argument (1 - x).
        let arg = Self::linear(F::one(), -F::one());
        self.coeffs.iter().rev().fold(Self::zero(), |acc, c| {
            &(&acc * &arg) + &Self::constant(c.clone())
        })
    }

    /// Multiplies by `x^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![F::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Polynomial { coeffs }
    }

    /// Euclidean division; returns `(quotient, remainder)`.
    ///
    /// # Panics
    /// If `divisor` is the zero polynomial.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let d = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.coeffs[d].clone();
        let mut rem = self.coeffs.clone();
        let n = rem.len();
        if n <= d {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![F::zero(); n - d];
        for i in (0..n - d).rev() {
            let q = rem[i + d].clone() / lead.clone();
            if !q.is_zero() {
                for (j, c) in divisor.coeffs.iter().enumerate() {
                    rem[i + j] = rem[i + j].clone() - q.clone() * c.clone();
                }
            }
            quot[i] = q;
        }
        rem.truncate(d);
        (Self::new(quot), Self::new(rem))
    }

    /// Divides by `x(1 - x)`, returning `None` unless the division is exact
    /// (for floats: up to rounding relative to the largest coefficient).
    pub fn div_wright_fisher(&self) -> Option<Self> {
        let sigma2 = Self::new(vec![F::zero(), F::one(), -F::one()]);
        let (q, r) = self.div_rem(&sigma2);
        let scale = self.max_abs_coeff();
        r.coeffs.iter().all(|c| c.negligible(&scale)).then_some(q)
    }

    fn max_abs_coeff(&self) -> F {
        self.coeffs.iter().fold(F::zero(), |m, c| {
            let a = if *c < F::zero() {
                -c.clone()
            } else {
                c.clone()
            };
            if a > m {
                a
            } else {
                m
            }
        })
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> Polynomial<G> {
        Polynomial::new(self.coeffs.iter().map(f).collect())
    }
}

impl<F: Field> Add for &Polynomial<F> {
    type Output = Polynomial<F>;
    fn add(self, rhs: Self) -> Polynomial<F> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl<F: Field> Sub for &Polynomial<F> {
    type Output = Polynomial<F>;
    fn sub(self, rhs: Self) -> Polynomial<F> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl<F: Field> Mul for &Polynomial<F> {
    type Output = Polynomial<F>;
    fn mul(self, rhs: Self) -> Polynomial<F> {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![F::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Polynomial::new(out)
    }
}

impl<F: Field> Neg for &Polynomial<F> {
    type Output = Polynomial<F>;
    fn neg(self) -> Polynomial<F> {
        Polynomial::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<F: Field> $tr for Polynomial<F> {
            type Output = Polynomial<F>;
            fn $m(self, rhs: Self) -> Polynomial<F> {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<F: Field> Neg for Polynomial<F> {
    type Output = Polynomial<F>;
    fn neg(self) -> Polynomial<F> {
        -&self
    }
}

impl<F: Field> fmt::Display for Polynomial<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})x")?,
                _ => write!(f, "({c})x^{i}")?,
            }
        }
        Ok(())
    }
}
