//! Two-strategy games mapped onto frequency-dependent selection.
//!
//! Payoffs `(a, b, c, d)` are those of a row player using `S₁` or `S₂`
//! against `(S₁, S₂)`. The mutant allele plays `S₁`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perturbation::WfFirstOrder;
use crate::poly::Polynomial;
use crate::scalar::Field;
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PayoffMatrix<F> {
    pub a: F,
    pub b: F,
    pub c: F,
    pub d: F,
}

impl<F: Field> PayoffMatrix<F> {
    pub fn new(a: F, b: F, c: F, d: F) -> Self {
        PayoffMatrix { a, b, c, d }
    }
}

/// `ψ(x) = β - γ x`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearPsi<F> {
    pub beta: F,
    pub gamma: F,
}

impl<F: Field> LinearPsi<F> {
    pub fn new(beta: F, gamma: F) -> Self {
        LinearPsi { beta, gamma }
    }

    pub fn eval(&self, x: &F) -> F {
        self.beta.clone() - self.gamma.clone() * x.clone()
    }

    pub fn polynomial(&self) -> Polynomial<F> {
        Polynomial::linear(self.beta.clone(), -self.gamma.clone())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DiploidMode {
    /// `AA` and `AB` play `S₁`.
    Dominant,
    /// Only `AA` plays `S₁`.
    Recessive,
}

/// Diploid game reduced to its two selection parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiploidCase<F> {
    pub mode: DiploidMode,
    pub beta: F,
    pub gamma: F,
}

impl<F: Field> DiploidCase<F> {
    pub fn new(m: &PayoffMatrix<F>, mode: DiploidMode) -> Self {
        let (beta, gamma) = match mode {
            DiploidMode::Dominant => {
                let beta = m.a.clone() - m.c.clone();
                (beta.clone(), beta + m.d.clone() - m.b.clone())
            }
            DiploidMode::Recessive => {
                let beta = m.b.clone() - m.d.clone();
                (beta.clone(), beta + m.c.clone() - m.a.clone())
            }
        };
        DiploidCase { mode, beta, gamma }
    }

    /// Dominant: `(1-x)(β - γ(1-x)²)`; recessive: `x(β - γx²)`.
    pub fn polynomial(&self) -> Polynomial<F> {
        diploid_polynomial(self.mode, self.beta.clone(), self.gamma.clone())
    }
}

fn diploid_polynomial<F: Field>(mode: DiploidMode, beta: F, gamma: F) -> Polynomial<F> {
    match mode {
        DiploidMode::Dominant => {
            let inner =
                Polynomial::new(vec![gamma.clone(), -gamma.clone() * F::from_int(2), gamma]);
            let bracket = &Polynomial::constant(beta) - &inner;
            &Polynomial::linear(F::one(), -F::one()) * &bracket
        }
        DiploidMode::Recessive => Polynomial::new(vec![F::zero(), beta, F::zero(), -gamma]),
    }
}

/// `β = b - d`, `γ = b - d + c - a`.
pub fn haploid_psi<F: Field>(m: &PayoffMatrix<F>) -> LinearPsi<F> {
    let beta = m.b.clone() - m.d.clone();
    let gamma = beta.clone() + m.c.clone() - m.a.clone();
    LinearPsi { beta, gamma }
}

/// Degree-3 selection polynomial of a diploid game.
pub fn diploid_psi<F: Field>(m: &PayoffMatrix<F>, mode: DiploidMode) -> Polynomial<F> {
    DiploidCase::new(m, mode).polynomial()
}

/// `ψ(x) = h + x(1 - 2h)`, i.e. `β = h`, `γ = 2h - 1`.
pub fn dominance_psi<F: Field>(h: F) -> LinearPsi<F> {
    let gamma = h.clone() * F::from_int(2) - F::one();
    LinearPsi { beta: h, gamma }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Favored,
    Disfavored,
    Neutral,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Invasion<F> {
    pub verdict: Verdict,
    /// `ψ((1 + x) / 3)`
    pub margin: F,
}

/// Whether weak selection raises the fixation probability of a mutant at
/// initial frequency `x` above `x`: the sign of `ψ((1 + x)/3)`.
pub fn invasion_rule<F: Field>(p: &LinearPsi<F>, x: &F) -> Result<Invasion<F>> {
    if !(*x >= F::zero() && *x < F::one()) {
        return Err(Error::Domain(format!("x = {x} must lie in [0, 1)")));
    }
    let at = (F::one() + x.clone()) / F::from_int(3);
    let margin = p.eval(&at);
    let scale = abs(&p.beta) + abs(&p.gamma);
    let verdict = if margin.negligible(&scale) {
        Verdict::Neutral
    } else if margin > F::zero() {
        Verdict::Favored
    } else {
        Verdict::Disfavored
    };
    Ok(Invasion { verdict, margin })
}

fn abs<F: Field>(v: &F) -> F {
    if *v < F::zero() {
        -v.clone()
    } else {
        v.clone()
    }
}

/// A quantity that is linear in `(β, γ)`: `β·beta + γ·gamma`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinearForm<V> {
    pub beta: V,
    pub gamma: V,
}

/// First-order coefficients of a diploid game as linear forms in `(β, γ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiploidRuleCoefficients {
    pub mode: DiploidMode,
    /// Coefficient of `x` in `∂_α P_x(T₁ < T₀)` as `x → 0`.
    pub fixation: LinearForm<Rational>,
    pub time_unconditional: LinearForm<Rational>,
    pub time_cond_up: LinearForm<Rational>,
    pub time_cond_down: LinearForm<Rational>,
    /// `∂_α f^α(x)`, a polynomial in `x`.
    pub spectrum: LinearForm<Polynomial<Rational>>,
}

/// Feeds the diploid selection polynomials for `(β, γ) = (1, 0)` and
/// `(0, 1)` through the exact first-order expansion.
pub fn diploid_rule_coefficients(mode: DiploidMode) -> Result<DiploidRuleCoefficients> {
    let one = Rational::from_int(1);
    let zero = Rational::from_int(0);
    let b = WfFirstOrder::new(&diploid_polynomial(mode, one.clone(), zero.clone()))?;
    let g = WfFirstOrder::new(&diploid_polynomial(mode, zero, one))?;
    let form = |f: fn(&WfFirstOrder<Rational>) -> Rational| LinearForm {
        beta: f(&b),
        gamma: f(&g),
    };
    Ok(DiploidRuleCoefficients {
        mode,
        fixation: form(|w| w.fixation.coeff(1)),
        time_unconditional: form(|w| w.time_unconditional.clone()),
        time_cond_up: form(|w| w.time_cond_up.clone()),
        time_cond_down: form(|w| w.time_cond_down.clone()),
        spectrum: LinearForm {
            beta: b.spectrum.clone(),
            gamma: g.spectrum.clone(),
        },
    })
}

fn q(n: i64, d: i64) -> Rational {
    Rational::from_int(n) / Rational::from_int(d)
}

fn qpoly(c: &[(i64, i64)]) -> Polynomial<Rational> {
    Polynomial::new(c.iter().map(|&(n, d)| q(n, d)).collect())
}

/// Reference values of the coefficients for these two games, kept for
/// comparison only.
pub fn reference_diploid_coefficients(mode: DiploidMode) -> DiploidRuleCoefficients {
    let lf = |b: Rational, g: Rational| LinearForm { beta: b, gamma: g };
    match mode {
        DiploidMode::Dominant => DiploidRuleCoefficients {
            mode,
            fixation: lf(q(2, 3), q(-2, 5)),
            time_unconditional: lf(q(2, 1), q(-5, 3)),
            time_cond_up: lf(q(1, 9), q(-29, 300)),
            time_cond_down: lf(q(5, 9), q(-77, 100)),
            spectrum: LinearForm {
                beta: qpoly(&[(4, 3), (-2, 3)]),
                gamma: qpoly(&[(-8, 5), (12, 5), (-8, 5), (2, 5)]),
            },
        },
        DiploidMode::Recessive => DiploidRuleCoefficients {
            mode,
            fixation: lf(q(1, 3), q(-1, 10)),
            time_unconditional: lf(q(0, 1), q(1, 6)),
            time_cond_up: lf(q(-1, 9), q(29, 300)),
            time_cond_down: lf(q(-5, 9), q(27, 100)),
            spectrum: LinearForm {
                beta: qpoly(&[(-1, 3), (1, 600)]),
                gamma: qpoly(&[(1, 10), (1, 90), (1, 10), (-4, 10)]),
            },
        },
    }
}

/// One line of the computed-versus-reference comparison.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub mode: DiploidMode,
    pub quantity: &'static str,
    pub computed: LinearForm<String>,
    pub reference: LinearForm<String>,
    pub agrees: bool,
}

fn rows(c: &DiploidRuleCoefficients, p: &DiploidRuleCoefficients) -> Vec<ComparisonRow> {
    fn row<V: PartialEq + std::fmt::Display>(
        mode: DiploidMode,
        quantity: &'static str,
        c: &LinearForm<V>,
        p: &LinearForm<V>,
    ) -> ComparisonRow {
        let s = |f: &LinearForm<V>| LinearForm {
            beta: f.beta.to_string(),
            gamma: f.gamma.to_string(),
        };
        ComparisonRow {
            mode,
            quantity,
            computed: s(c),
            reference: s(p),
            agrees: c == p,
        }
    }
    vec![
        row(c.mode, "fixation_slope", &c.fixation, &p.fixation),
        row(
            c.mode,
            "time_unconditional_per_x",
            &c.time_unconditional,
            &p.time_unconditional,
        ),
        row(
            c.mode,
            "time_cond_up_at_0",
            &c.time_cond_up,
            &p.time_cond_up,
        ),
        row(
            c.mode,
            "time_cond_down_per_x",
            &c.time_cond_down,
            &p.time_cond_down,
        ),
        row(c.mode, "spectrum", &c.spectrum, &p.spectrum),
    ]
}

/// All ten diploid coefficients, recomputed and set against the reference
/// values. Agreement is reported per row, never assumed.
pub fn diploid_comparison_table() -> Result<Vec<ComparisonRow>> {
    let mut out = Vec::new();
    for mode in [DiploidMode::Dominant, DiploidMode::Recessive] {
        let computed = diploid_rule_coefficients(mode)?;
        out.extend(rows(&computed, &reference_diploid_coefficients(mode)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pm(a: i64, b: i64, c: i64, d: i64) -> PayoffMatrix<Rational> {
        PayoffMatrix::new(q(a, 1), q(b, 1), q(c, 1), q(d, 1))
    }

    #[test]
    fn haploid_examples() {
        assert_eq!(
            haploid_psi(&pm(0, 0, 0, 0)),
            LinearPsi::new(q(0, 1), q(0, 1))
        );
        assert_eq!(
            haploid_psi(&pm(1, 4, 2, 3)),
            LinearPsi::new(q(1, 1), q(2, 1))
        );
        assert_eq!(
            haploid_psi(&pm(2, 1, 1, 2)),
            LinearPsi::new(q(-1, 1), q(-2, 1))
        );
    }

    #[test]
    fn haploid_drift_identity() {
        // x(a - c) + (1-x)(b - d) == β - γx as polynomials
        let m = pm(3, -1, 7, 2);
        let lhs = Polynomial::new(vec![
            m.b.clone() - m.d.clone(),
            (m.a.clone() - m.c.clone()) - (m.b.clone() - m.d.clone()),
        ]);
        assert_eq!(lhs, haploid_psi(&m).polynomial());
    }

    #[test]
    fn payoff_shift_invariance() {
        let m = pm(3, -1, 7, 2);
        let s = pm(8, 4, 12, 7);
        assert_eq!(haploid_psi(&m), haploid_psi(&s));
        for mode in [DiploidMode::Dominant, DiploidMode::Recessive] {
            assert_eq!(diploid_psi(&m, mode), diploid_psi(&s, mode));
        }
    }

    #[test]
    fn diploid_expansions() {
        assert!(diploid_psi(&pm(0, 0, 0, 0), DiploidMode::Dominant).is_zero());
        // a - c = 1, d - b = -1: β = 1, γ = 0
        let p = diploid_psi(&pm(1, 5, 0, 4), DiploidMode::Dominant);
        assert_eq!(p, qpoly(&[(1, 1), (-1, 1)]));
        let p = diploid_polynomial(DiploidMode::Recessive, q(0, 1), q(1, 1));
        assert_eq!(p, qpoly(&[(0, 1), (0, 1), (0, 1), (-1, 1)]));
    }

    #[test]
    fn diploid_game_drift_matches_expansion() {
        // Dominant: ψ = (1-x)[(1-x)²(b-d) + (1-(1-x)²)(a-c)]
        let m = pm(2, -3, 5, 1);
        let om = Polynomial::linear(q(1, 1), q(-1, 1));
        let om2 = &om * &om;
        let rest = &Polynomial::constant(q(1, 1)) - &om2;
        let bracket =
            &om2.scale(&(m.b.clone() - m.d.clone())) + &rest.scale(&(m.a.clone() - m.c.clone()));
        assert_eq!(&om * &bracket, diploid_psi(&m, DiploidMode::Dominant));
        // Recessive: ψ = x[x²(a-c) + (1-x²)(b-d)]
        let x2 = Polynomial::monomial(2);
        let rest = &Polynomial::constant(q(1, 1)) - &x2;
        let bracket =
            &x2.scale(&(m.a.clone() - m.c.clone())) + &rest.scale(&(m.b.clone() - m.d.clone()));
        assert_eq!(bracket.shift(1), diploid_psi(&m, DiploidMode::Recessive));
    }

    #[test]
    fn dominance_mapping() {
        assert_eq!(dominance_psi(q(0, 1)), LinearPsi::new(q(0, 1), q(-1, 1)));
        assert_eq!(dominance_psi(q(1, 2)), LinearPsi::new(q(1, 2), q(0, 1)));
        assert_eq!(dominance_psi(1.0f64), LinearPsi::new(1.0, 1.0));
    }

    #[test]
    fn invasion_examples() {
        let r = invasion_rule(&LinearPsi::new(1.0, 3.0), &0.0).unwrap();
        assert_eq!(r.verdict, Verdict::Neutral);
        let r = invasion_rule(&LinearPsi::new(1.0f64, 2.0), &0.2).unwrap();
        assert_eq!(r.verdict, Verdict::Favored);
        assert!((r.margin - 0.2).abs() < 1e-15);
        for x in [0.0, 0.4, 0.9] {
            let r = invasion_rule(&LinearPsi::new(0.0, 1.0), &x).unwrap();
            assert_eq!(r.verdict, Verdict::Disfavored);
        }
        assert!(invasion_rule(&LinearPsi::new(1.0, 1.0), &1.0).is_err());
        let r = invasion_rule(&LinearPsi::new(q(1, 1), q(3, 1)), &q(0, 1)).unwrap();
        assert_eq!(r.verdict, Verdict::Neutral);
    }

    #[test]
    fn invasion_sign_matches_fixation_derivative() {
        for bi in -4..=4 {
            for gi in -4..=4 {
                for xi in 0..10 {
                    let (beta, gamma, x) = (q(bi, 2), q(gi, 2), q(xi, 10));
                    let p = LinearPsi::new(beta, gamma);
                    let r = invasion_rule(&p, &x).unwrap();
                    if xi == 0 {
                        continue;
                    }
                    let d = WfFirstOrder::new(&p.polynomial())
                        .unwrap()
                        .fixation
                        .eval(&x);
                    let expected = if d > q(0, 1) {
                        Verdict::Favored
                    } else if d < q(0, 1) {
                        Verdict::Disfavored
                    } else {
                        Verdict::Neutral
                    };
                    assert_eq!(r.verdict, expected);
                }
            }
        }
    }

    #[test]
    fn headline_diploid_rules() {
        let dom = diploid_rule_coefficients(DiploidMode::Dominant).unwrap();
        assert_eq!(
            dom.fixation,
            LinearForm {
                beta: q(2, 3),
                gamma: q(-2, 5)
            }
        );
        let rec = diploid_rule_coefficients(DiploidMode::Recessive).unwrap();
        assert_eq!(
            rec.fixation,
            LinearForm {
                beta: q(1, 3),
                gamma: q(-1, 10)
            }
        );
    }

    #[test]
    fn zero_game_has_zero_coefficients() {
        let m = pm(0, 0, 0, 0);
        let w = WfFirstOrder::new(&diploid_psi(&m, DiploidMode::Dominant)).unwrap();
        assert!(w.fixation.is_zero() && w.spectrum.is_zero());
        assert_eq!(w.time_unconditional, q(0, 1));
        assert_eq!(w.time_cond_up, q(0, 1));
        assert_eq!(w.time_cond_down, q(0, 1));
    }

    #[test]
    fn comparison_table_has_ten_rows() {
        let t = diploid_comparison_table().unwrap();
        assert_eq!(t.len(), 10);
        assert!(t[0].agrees && t[5].agrees);
    }
}
