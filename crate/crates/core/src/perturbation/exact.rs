//! First-order coefficients for Wright–Fisher `σ²` and polynomial `ψ`.
//!
//! Every integrand of the form `P(y) / (y(1-y))` is reduced by exact
//! polynomial division, so over a rational field the results are exact.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::scalar::{binomial, Field};

/// Which family of monomial selection functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MonomialKind {
    /// `ψ(x) = x^k`
    XPowK,
    /// `ψ(x) = (1 - x)^k`
    OneMinusXPowK,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
pub struct MonomialPsi {
    pub kind: MonomialKind,
    pub k: u32,
}

impl MonomialPsi {
    pub fn x_pow(k: u32) -> Self {
        MonomialPsi {
            kind: MonomialKind::XPowK,
            k,
        }
    }

    pub fn one_minus_x_pow(k: u32) -> Self {
        MonomialPsi {
            kind: MonomialKind::OneMinusXPowK,
            k,
        }
    }

    pub fn polynomial<F: Field>(&self) -> Polynomial<F> {
        match self.kind {
            MonomialKind::XPowK => Polynomial::monomial(self.k as usize),
            MonomialKind::OneMinusXPowK => Polynomial::one_minus_x_pow(self.k as usize),
        }
    }
}

/// The five `∂/∂α` quantities at `α = 0` for one starting frequency.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FirstOrderReport<F> {
    pub x: F,
    /// `∂_α P_x(T₁ < T₀)`
    pub d_fixation: F,
    /// Coefficient of `x` in `∂_α E_x[T]` as `x → 0`.
    pub d_time_unconditional_per_x: F,
    /// `∂_α E_{0+}[T₁ | T₁ < T₀]`
    pub d_time_cond_up_at_0: F,
    /// Coefficient of `x` in `∂_α E_x[T₀ | T₀ < T₁]` as `x → 0`.
    pub d_time_cond_down_per_x: F,
    /// `∂_α f^α(x)`
    pub d_spectrum: F,
}

/// First-order expansion of a Wright–Fisher model with polynomial `ψ`.
///
/// The Green-function derivatives are stored with their `4/σ²` factor
/// already divided out, so each is a polynomial in `y`.
#[derive(Clone, Debug, PartialEq)]
pub struct WfFirstOrder<F> {
    pub fixation: Polynomial<F>,
    pub green_unconditional: Polynomial<F>,
    pub green_cond_up: Polynomial<F>,
    pub green_cond_down: Polynomial<F>,
    pub time_unconditional: F,
    pub time_cond_up: F,
    pub time_cond_down: F,
    pub spectrum: Polynomial<F>,
    /// `r` with `∂_α μ*(x) = r(x) σ²(x)`.
    pub drift_ratio: Polynomial<F>,
}

/// Running integrals of `ψ` against the weights that appear in the
/// first-order formulas, all vanishing at `y = 0` except `B`.
#[derive(Clone, Debug)]
pub(crate) struct PolyBrackets<F> {
    /// `Ψ(y) = ∫₀ʸ ψ`
    pub psi: Polynomial<F>,
    /// `A(y) = ∫₀ʸ (1-z) ψ`
    pub a: Polynomial<F>,
    /// `B(y) = ∫_y^1 (1-z) ψ`
    pub b: Polynomial<F>,
    /// `C(y) = ∫₀ʸ z ψ`
    pub c: Polynomial<F>,
    /// `D(y) = ∫₀ʸ (1-2z) ψ`
    pub d: Polynomial<F>,
    pub a_total: F,
}

impl<F: Field> PolyBrackets<F> {
    pub fn new(psi: &Polynomial<F>) -> Self {
        let one_minus = Polynomial::linear(F::one(), -F::one());
        let weighted = &one_minus * psi;
        let a = weighted.antiderivative();
        let a_total = a.eval(&F::one());
        PolyBrackets {
            psi: psi.antiderivative(),
            b: weighted.upper_tail(),
            c: psi.shift(1).antiderivative(),
            d: (&Polynomial::linear(F::one(), -F::from_int(2)) * psi).antiderivative(),
            a,
            a_total,
        }
    }

    /// Numerators of the three Green-function derivative integrands.
    pub fn green_numerators(&self) -> [Polynomial<F>; 3] {
        let y = Polynomial::monomial(1);
        let om = Polynomial::linear(F::one(), -F::one());
        let om2 = &om * &om;
        let y2 = &y * &y;
        let none = &(&om * &self.a) - &(&y * &self.b);
        let up = &(&om2 * &self.c) - &(&y2 * &self.b);
        let down = &(&om2 * &self.d) - &(&(&y * &om) * &self.b).scale(&F::from_int(2));
        [none, up, down]
    }

    /// `2[x A(1) - ∫₀ˣ (x - y) ψ] = 2[x A(1) - x Ψ(x) + C(x)]`
    pub fn fixation(&self) -> Polynomial<F> {
        let x_a = Polynomial::linear(F::zero(), self.a_total.clone());
        (&(&x_a - &self.psi.shift(1)) + &self.c).scale(&F::from_int(2))
    }

    /// `A(x) - x A(1)`, the numerator of the spectrum derivative.
    pub fn spectrum_numerator(&self) -> Polynomial<F> {
        &self.a - &Polynomial::linear(F::zero(), self.a_total.clone())
    }

    /// `ψ(x) - 2 C(x) / x²`
    pub fn drift_ratio(&self, psi: &Polynomial<F>) -> Polynomial<F> {
        let (q, r) = self.c.div_rem(&Polynomial::monomial(2));
        debug_assert!(r.is_zero());
        psi - &q.scale(&F::from_int(2))
    }
}

fn divide<F: Field>(p: &Polynomial<F>, what: &str) -> Result<Polynomial<F>> {
    p.div_wright_fisher().ok_or_else(|| {
        let at_zero = !p.coeff(0).is_zero();
        Error::divergence(
            if at_zero { 0.0 } else { 1.0 },
            format!("{what}: numerator does not vanish at the boundary"),
        )
    })
}

impl<F: Field> WfFirstOrder<F> {
    pub fn new(psi: &Polynomial<F>) -> Result<Self> {
        let br = PolyBrackets::new(psi);
        let four = F::from_int(4);
        let [none, up, down] = br.green_numerators();
        let green_unconditional = divide(&none, "unconditional time")?.scale(&four);
        let green_cond_up = divide(&up, "time conditioned on fixation")?.scale(&four);
        let green_cond_down = divide(&down, "time conditioned on loss")?.scale(&four);
        let spectrum = divide(&br.spectrum_numerator(), "spectrum")?.scale(&F::from_int(2));
        Ok(WfFirstOrder {
            fixation: br.fixation(),
            time_unconditional: green_unconditional.integral_unit(),
            time_cond_up: green_cond_up.integral_unit(),
            time_cond_down: green_cond_down.integral_unit(),
            green_unconditional,
            green_cond_up,
            green_cond_down,
            spectrum,
            drift_ratio: br.drift_ratio(psi),
        })
    }

    pub fn at(&self, x: &F) -> FirstOrderReport<F> {
        FirstOrderReport {
            x: x.clone(),
            d_fixation: self.fixation.eval(x),
            d_time_unconditional_per_x: self.time_unconditional.clone(),
            d_time_cond_up_at_0: self.time_cond_up.clone(),
            d_time_cond_down_per_x: self.time_cond_down.clone(),
            d_spectrum: self.spectrum.eval(x),
        }
    }
}

/// Closed form of `∂_α P_x(T₁ < T₀)` for a monomial `ψ`:
/// `x(1 - x^{k+1}) / C(k+2, 2)`, or the same in `1 - x` for `(1-x)^k`.
pub fn d_fixation_monomial<F: Field>(m: MonomialPsi, x: &F) -> F {
    let u = match m.kind {
        MonomialKind::XPowK => x.clone(),
        MonomialKind::OneMinusXPowK => F::one() - x.clone(),
    };
    let mut pow = F::one();
    for _ in 0..=m.k {
        pow = pow * u.clone();
    }
    u * (F::one() - pow) / binomial::<F>(m.k + 2, 2)
}

pub fn wf_monomial_report<F: Field>(m: MonomialPsi, x: &F) -> Result<FirstOrderReport<F>> {
    Ok(WfFirstOrder::new(&m.polynomial())?.at(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    type Q = BigRational;

    fn q(n: i64, d: i64) -> Q {
        Q::new(BigInt::from(n), BigInt::from(d))
    }

    fn report(m: MonomialPsi, x: Q) -> FirstOrderReport<Q> {
        wf_monomial_report(m, &x).unwrap()
    }

    #[test]
    fn constant_selection() {
        let r = report(MonomialPsi::x_pow(0), q(3, 10));
        assert_eq!(r.d_fixation, q(21, 100));
        assert_eq!(r.d_time_unconditional_per_x, q(2, 1));
        assert_eq!(r.d_time_cond_up_at_0, q(0, 1));
        assert_eq!(r.d_time_cond_down_per_x, q(0, 1));
        assert_eq!(r.d_spectrum, q(1, 1));
        let mirrored = report(MonomialPsi::one_minus_x_pow(0), q(3, 10));
        assert_eq!(r, mirrored);
    }

    #[test]
    fn linear_monomial() {
        let r = report(MonomialPsi::x_pow(1), q(1, 2));
        assert_eq!(r.d_fixation, q(1, 8));
        assert_eq!(r.d_time_unconditional_per_x, q(0, 1));
        assert_eq!(r.d_time_cond_up_at_0, q(-1, 9));
        assert_eq!(r.d_time_cond_down_per_x, q(-5, 9));
        assert_eq!(r.d_spectrum, q(0, 1));
        let r = report(MonomialPsi::x_pow(1), q(1, 4));
        assert_eq!(r.d_spectrum, q(-1, 6));
    }

    #[test]
    fn closed_form_fixation_matches_expansion() {
        for k in 0..6 {
            for m in [MonomialPsi::x_pow(k), MonomialPsi::one_minus_x_pow(k)] {
                let poly = WfFirstOrder::<Q>::new(&m.polynomial()).unwrap().fixation;
                for x in [q(0, 1), q(1, 7), q(1, 2), q(5, 6), q(1, 1)] {
                    assert_eq!(poly.eval(&x), d_fixation_monomial(m, &x), "{m:?}");
                }
            }
        }
        assert_eq!(
            d_fixation_monomial(MonomialPsi::x_pow(2), &q(1, 2)),
            q(7, 96)
        );
        assert_eq!(
            d_fixation_monomial(MonomialPsi::one_minus_x_pow(1), &q(1, 2)),
            q(1, 8)
        );
    }

    #[test]
    fn unconditional_time_of_higher_monomials() {
        for k in 2..8u32 {
            let t = WfFirstOrder::<Q>::new(&Polynomial::monomial(k as usize))
                .unwrap()
                .time_unconditional;
            let h: Q = (2..=k as i64).map(|i| q(1, i)).fold(q(0, 1), |a, b| a + b);
            let expected = q(-4, ((k + 1) * (k + 2)) as i64) * h;
            assert_eq!(t, expected, "k={k}");
        }
    }

    #[test]
    fn unconditional_time_of_reflected_monomials() {
        // 4/(k+2) · H_{k+1}
        for k in 0..6u32 {
            let t = WfFirstOrder::<Q>::new(&Polynomial::one_minus_x_pow(k as usize))
                .unwrap()
                .time_unconditional;
            let h: Q = (1..=k as i64 + 1)
                .map(|i| q(1, i))
                .fold(q(0, 1), |a, b| a + b);
            assert_eq!(t, q(4, k as i64 + 2) * h, "k={k}");
        }
    }

    #[test]
    fn linear_psi_combinations() {
        // ψ = β - γy with β = 3, γ = 2
        let psi = Polynomial::new(vec![q(3, 1), q(-2, 1)]);
        let w = WfFirstOrder::new(&psi).unwrap();
        assert_eq!(w.time_unconditional, q(6, 1));
        assert_eq!(w.time_cond_up, q(2, 9));
        assert_eq!(w.time_cond_down, q(10, 9));
        // β + γ(1 - 2x)/3 at x = 1/4
        assert_eq!(w.spectrum.eval(&q(1, 4)), q(3, 1) + q(2, 6));
        // x(1-x)(β - γ(1+x)/3) at x = 1/5
        let x = q(1, 5);
        let expected =
            x.clone() * (q(1, 1) - x.clone()) * (q(3, 1) - q(2, 3) * (q(1, 1) + x.clone()));
        assert_eq!(w.fixation.eval(&x), expected);
    }

    #[test]
    fn green_spot_values() {
        let w = WfFirstOrder::<Q>::new(&Polynomial::monomial(0)).unwrap();
        assert_eq!(w.green_unconditional.eval(&q(1, 2)), q(2, 1));
        let w = WfFirstOrder::<Q>::new(&Polynomial::monomial(1)).unwrap();
        assert_eq!(w.green_cond_up.eval(&q(1, 2)), q(-1, 6));
    }

    #[test]
    fn drift_ratio_of_monomials() {
        for k in 0..5usize {
            let w = WfFirstOrder::<Q>::new(&Polynomial::monomial(k)).unwrap();
            let expected = Polynomial::monomial(k).scale(&q(k as i64, k as i64 + 2));
            assert_eq!(w.drift_ratio, expected);
        }
    }

    #[test]
    fn fixation_mirror_relation() {
        // ψ ↦ (1-y)^k corresponds to x ↦ 1 - x for the fixation derivative.
        for k in 0..5 {
            let a = WfFirstOrder::<Q>::new(&Polynomial::monomial(k))
                .unwrap()
                .fixation;
            let b = WfFirstOrder::<Q>::new(&Polynomial::one_minus_x_pow(k))
                .unwrap()
                .fixation;
            assert_eq!(b, a.reflect());
        }
    }

    #[test]
    fn float_field_agrees() {
        let w = WfFirstOrder::<f64>::new(&Polynomial::new(vec![0.0, 1.0])).unwrap();
        assert!((w.time_cond_up + 1.0 / 9.0).abs() < 1e-15);
    }
}
