use super::{DiffusionModel, FrequencyDependence};
use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::quadrature::{cumulative, CumulativeTable, QuadConfig};
use crate::scalar::Real;

/// `Ψ(y) = ∫₀ʸ ψ`: exact for polynomial `ψ`, tabulated otherwise.
#[derive(Clone, Debug)]
pub enum PsiIntegral<T> {
    Exact(Polynomial<T>),
    Table(CumulativeTable<T>),
}

impl<T: Real> PsiIntegral<T> {
    pub fn eval(&self, y: T) -> T {
        match self {
            PsiIntegral::Exact(p) => p.eval(&y),
            PsiIntegral::Table(t) => t.eval(y),
        }
    }
}

/// Scale function `S(x) = ∫₀ˣ exp(-2α Ψ(y)) dy` of a model.
///
/// With `α = 0` no table is built and `S(x) = x` exactly.
#[derive(Clone, Debug)]
pub struct ScaleTable<T> {
    alpha: T,
    psi_integral: PsiIntegral<T>,
    scale: Option<CumulativeTable<T>>,
    scale_total: T,
}

impl<T: Real> ScaleTable<T> {
    pub fn build(model: &DiffusionModel<T>, cfg: &QuadConfig<T>) -> Result<Self> {
        let alpha = model.alpha();
        let psi_integral = match model.psi() {
            FrequencyDependence::Polynomial(p) => PsiIntegral::Exact(p.antiderivative()),
            psi @ FrequencyDependence::Function { .. } => {
                PsiIntegral::Table(cumulative(|y| psi.eval(y), &cfg.tightened())?)
            }
        };
        if alpha == T::zero() {
            return Ok(ScaleTable {
                alpha,
                psi_integral,
                scale: None,
                scale_total: T::one(),
            });
        }
        let two_alpha = T::c(2.0) * alpha;
        let table = cumulative(|y| (-two_alpha * psi_integral.eval(y)).exp(), cfg)?;
        let scale_total = table.total();
        if !(scale_total > T::zero() && scale_total.is_finite()) {
            return Err(Error::divergence(
                1.0,
                format!("scale function total is {scale_total}"),
            ));
        }
        Ok(ScaleTable {
            alpha,
            psi_integral,
            scale: Some(table),
            scale_total,
        })
    }

    pub fn is_neutral(&self) -> bool {
        self.scale.is_none()
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    /// `Ψ(y)`
    pub fn psi_integral(&self, y: T) -> T {
        self.psi_integral.eval(y)
    }

    pub fn psi_cumulative(&self) -> &PsiIntegral<T> {
        &self.psi_integral
    }

    /// The tabulated `S`, absent in the neutral case.
    pub fn table(&self) -> Option<&CumulativeTable<T>> {
        self.scale.as_ref()
    }

    /// `S(x)`
    pub fn s(&self, x: T) -> T {
        match &self.scale {
            None => x,
            Some(t) => t.eval(x),
        }
    }

    /// `S(1) - S(x)`, evaluated without cancellation near 1.
    pub fn s_upper(&self, x: T) -> T {
        match &self.scale {
            None => T::one() - x,
            Some(t) => t.complement(x),
        }
    }

    /// `S'(x) = exp(-2α Ψ(x))`
    pub fn s_prime(&self, x: T) -> T {
        if self.scale.is_none() {
            return T::one();
        }
        (-T::c(2.0) * self.alpha * self.psi_integral(x)).exp()
    }

    /// `S(1)`
    pub fn total(&self) -> T {
        self.scale_total
    }

    /// `P_x(T₁ < T₀) = S(x) / S(1)`
    pub fn p_up(&self, x: T) -> T {
        self.s(x) / self.scale_total
    }

    /// `P_x(T₀ < T₁) = (S(1) - S(x)) / S(1)`
    pub fn p_down(&self, x: T) -> T {
        self.s_upper(x) / self.scale_total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffusion::FrequencyDependence as Psi;

    fn cfg() -> QuadConfig<f64> {
        QuadConfig::default()
    }

    fn scale(alpha: f64, psi: Psi<f64>) -> ScaleTable<f64> {
        ScaleTable::build(&DiffusionModel::wright_fisher(alpha, psi).unwrap(), &cfg()).unwrap()
    }

    #[test]
    fn neutral_scale_is_identity() {
        let s = scale(0.0, Psi::linear(1.0, 5.0));
        assert!(s.is_neutral());
        for x in [0.0, 0.3, 1.0] {
            assert_eq!(s.s(x), x);
            assert_eq!(s.s_prime(x), 1.0);
        }
    }

    #[test]
    fn constant_selection_closed_form() {
        // S(x) = (1 - e^{-2αx}) / (2α) with α = 0.5
        let s = scale(0.5, Psi::constant(1.0));
        assert!((s.total() - (1.0 - (-1.0f64).exp())).abs() < 1e-12);
        assert!((s.total() - 0.632_121).abs() < 1e-6);
        for x in [0.01f64, 0.2, 0.5, 0.9] {
            let exact = 1.0 - (-x).exp();
            assert!((s.s(x) - exact).abs() < 1e-10, "x={x}");
        }
    }

    #[test]
    fn gaussian_scale_total() {
        // ψ(y) = y, α = 1: S(1) = ∫₀¹ e^{-y²} dy = (√π/2) erf(1)
        let s = scale(1.0, Psi::polynomial(vec![0.0, 1.0]));
        assert!((s.total() - 0.746_824_132_812_427).abs() < 1e-12);
    }

    #[test]
    fn tabulated_psi_matches_polynomial_psi() {
        let poly = scale(0.7, Psi::linear(1.0, 2.0));
        let func = scale(0.7, Psi::from_fn(|y| 1.0 - 2.0 * y, 3.0));
        for x in [0.05, 0.4, 0.77] {
            assert!((poly.s(x) - func.s(x)).abs() < 1e-10);
            assert!((poly.s_prime(x) - func.s_prime(x)).abs() < 1e-10);
        }
    }

    #[test]
    fn strictly_increasing_with_negative_alpha() {
        let s = scale(-2.0, Psi::linear(1.0, -1.0));
        let mut prev = -1.0;
        for i in 0..=400 {
            let x = i as f64 / 400.0;
            let v = s.s(x);
            assert!(v > prev);
            prev = v;
        }
        assert!((s.p_up(1.0) - 1.0).abs() < 1e-15);
        assert_eq!(s.p_up(0.0), 0.0);
    }
}
