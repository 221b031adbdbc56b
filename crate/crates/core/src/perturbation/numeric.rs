use super::exact::{FirstOrderReport, PolyBrackets, WfFirstOrder};
use crate::diffusion::{Conditioning, DiffusionCoefficient, FrequencyDependence};
use crate::error::{Error, Result};
use crate::quadrature::{cumulative, integral, CumulativeTable, QuadConfig};
use crate::scalar::Real;

#[derive(Clone, Debug)]
#[allow(clippy::large_enum_variant)]
enum Brackets<T> {
    Poly(PolyBrackets<T>),
    Table {
        psi: CumulativeTable<T>,
        a: CumulativeTable<T>,
        c: CumulativeTable<T>,
        d: CumulativeTable<T>,
    },
}

impl<T: Real> Brackets<T> {
    fn build(psi: &FrequencyDependence<T>, cfg: &QuadConfig<T>) -> Result<Self> {
        if let Some(p) = psi.as_polynomial() {
            return Ok(Brackets::Poly(PolyBrackets::new(p)));
        }
        let cfg = cfg.tightened();
        let one = T::one();
        Ok(Brackets::Table {
            psi: cumulative(|y| psi.eval(y), &cfg)?,
            a: cumulative(|y| (one - y) * psi.eval(y), &cfg)?,
            c: cumulative(|y| y * psi.eval(y), &cfg)?,
            d: cumulative(|y| (one - T::c(2.0) * y) * psi.eval(y), &cfg)?,
        })
    }

    fn psi(&self, y: T) -> T {
        match self {
            Brackets::Poly(p) => p.psi.eval(&y),
            Brackets::Table { psi, .. } => psi.eval(y),
        }
    }

    fn a(&self, y: T) -> T {
        match self {
            Brackets::Poly(p) => p.a.eval(&y),
            Brackets::Table { a, .. } => a.eval(y),
        }
    }

    fn b(&self, y: T) -> T {
        match self {
            Brackets::Poly(p) => p.b.eval(&y),
            Brackets::Table { a, .. } => a.complement(y),
        }
    }

    fn c(&self, y: T) -> T {
        match self {
            Brackets::Poly(p) => p.c.eval(&y),
            Brackets::Table { c, .. } => c.eval(y),
        }
    }

    fn d(&self, y: T) -> T {
        match self {
            Brackets::Poly(p) => p.d.eval(&y),
            Brackets::Table { d, .. } => d.eval(y),
        }
    }

    fn a_total(&self) -> T {
        match self {
            Brackets::Poly(p) => p.a_total,
            Brackets::Table { a, .. } => a.total(),
        }
    }
}

/// First-order (`∂/∂α` at `α = 0`) quantities of a general model.
///
/// Wright–Fisher models with polynomial `ψ` are handled by
/// [`WfFirstOrder`]; everything else by quadrature over tabulated running
/// integrals of `ψ`.
#[derive(Clone, Debug)]
pub struct FirstOrder<T> {
    psi: FrequencyDependence<T>,
    sigma2: DiffusionCoefficient<T>,
    brackets: Brackets<T>,
    exact: Option<WfFirstOrder<T>>,
    cfg: QuadConfig<T>,
}

fn check(v: bool, what: &str) -> Result<()> {
    if v {
        Ok(())
    } else {
        Err(Error::Domain(what.to_string()))
    }
}

impl<T: Real> FirstOrder<T> {
    pub fn new(
        psi: &FrequencyDependence<T>,
        sigma2: &DiffusionCoefficient<T>,
        cfg: &QuadConfig<T>,
    ) -> Result<Self> {
        cfg.validate()?;
        let exact = match (psi.as_polynomial(), sigma2.is_wright_fisher()) {
            (Some(p), true) => Some(WfFirstOrder::new(p)?),
            _ => None,
        };
        Ok(FirstOrder {
            psi: psi.clone(),
            sigma2: sigma2.clone(),
            brackets: Brackets::build(psi, cfg)?,
            exact,
            cfg: *cfg,
        })
    }

    /// The exact expansion, when the model admits one.
    pub fn exact(&self) -> Option<&WfFirstOrder<T>> {
        self.exact.as_ref()
    }

    /// `∂_α P_x(T₁ < T₀)`
    pub fn d_fixation(&self, x: T) -> Result<T> {
        check(x >= T::zero() && x <= T::one(), "x must lie in [0, 1]")?;
        let br = &self.brackets;
        Ok(T::c(2.0) * (x * br.a_total() - x * br.psi(x) + br.c(x)))
    }

    /// Derivative of the Green kernel in `α`; per unit `x` (as `x → 0`)
    /// for `None` and `Down`, at `x = 0+` for `Up`.
    pub fn d_green(&self, y: T, conditioning: Conditioning) -> Result<T> {
        check(y > T::zero() && y < T::one(), "y must lie in (0, 1)")?;
        if let Some(w) = &self.exact {
            let p = match conditioning {
                Conditioning::None => &w.green_unconditional,
                Conditioning::Up => &w.green_cond_up,
                Conditioning::Down => &w.green_cond_down,
            };
            return Ok(p.eval(&y));
        }
        let v = self.green_kernel(y, conditioning);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::divergence(
                y.to_f64_lossy(),
                "first-order Green kernel is not finite",
            ))
        }
    }

    fn green_kernel(&self, y: T, conditioning: Conditioning) -> T {
        let br = &self.brackets;
        let om = T::one() - y;
        let b = br.b(y);
        let num = match conditioning {
            Conditioning::None => om * br.a(y) - y * b,
            Conditioning::Up => om * om * br.c(y) - y * y * b,
            Conditioning::Down => om * om * br.d(y) - T::c(2.0) * y * om * b,
        };
        T::c(4.0) * num / self.sigma2.eval(y)
    }

    /// `∫₀¹` of [`Self::d_green`].
    pub fn d_time(&self, conditioning: Conditioning) -> Result<T> {
        if let Some(w) = &self.exact {
            return Ok(match conditioning {
                Conditioning::None => w.time_unconditional,
                Conditioning::Up => w.time_cond_up,
                Conditioning::Down => w.time_cond_down,
            });
        }
        integral(
            |y| self.green_kernel(y, conditioning),
            T::zero(),
            T::one(),
            &self.cfg,
        )
    }

    pub fn d_time_unconditional(&self) -> Result<T> {
        self.d_time(Conditioning::None)
    }

    pub fn d_time_cond_up(&self) -> Result<T> {
        self.d_time(Conditioning::Up)
    }

    pub fn d_time_cond_down(&self) -> Result<T> {
        self.d_time(Conditioning::Down)
    }

    /// `∂_α f^α(x) = (2/σ²(x)) [A(x) - x A(1)]`
    pub fn d_spectrum(&self, x: T) -> Result<T> {
        check(x > T::zero() && x < T::one(), "x must lie in (0, 1)")?;
        if let Some(w) = &self.exact {
            return Ok(w.spectrum.eval(&x));
        }
        let br = &self.brackets;
        Ok(T::c(2.0) * (br.a(x) - x * br.a_total()) / self.sigma2.eval(x))
    }

    /// `∂_α μ*(x) = σ²(x) [ψ(x) - 2 C(x) / x²]`
    pub fn d_conditioned_drift(&self, x: T) -> Result<T> {
        check(x > T::zero() && x <= T::one(), "x must lie in (0, 1]")?;
        let ratio = match &self.exact {
            Some(w) => w.drift_ratio.eval(&x),
            None => self.psi.eval(x) - T::c(2.0) * self.brackets.c(x) / (x * x),
        };
        Ok(ratio * self.sigma2.eval(x))
    }

    pub fn report(&self, x: T) -> Result<FirstOrderReport<T>> {
        Ok(FirstOrderReport {
            x,
            d_fixation: self.d_fixation(x)?,
            d_time_unconditional_per_x: self.d_time_unconditional()?,
            d_time_cond_up_at_0: self.d_time_cond_up()?,
            d_time_cond_down_per_x: self.d_time_cond_down()?,
            d_spectrum: self.d_spectrum(x)?,
        })
    }
}

pub fn d_fixation<T: Real>(psi: &FrequencyDependence<T>, x: T, cfg: &QuadConfig<T>) -> Result<T> {
    FirstOrder::new(psi, &DiffusionCoefficient::WrightFisher, cfg)?.d_fixation(x)
}

pub fn d_time_unconditional<T: Real>(
    psi: &FrequencyDependence<T>,
    sigma2: &DiffusionCoefficient<T>,
    cfg: &QuadConfig<T>,
) -> Result<T> {
    FirstOrder::new(psi, sigma2, cfg)?.d_time_unconditional()
}

pub fn d_time_cond_up<T: Real>(
    psi: &FrequencyDependence<T>,
    sigma2: &DiffusionCoefficient<T>,
    cfg: &QuadConfig<T>,
) -> Result<T> {
    FirstOrder::new(psi, sigma2, cfg)?.d_time_cond_up()
}

pub fn d_time_cond_down<T: Real>(
    psi: &FrequencyDependence<T>,
    sigma2: &DiffusionCoefficient<T>,
    cfg: &QuadConfig<T>,
) -> Result<T> {
    FirstOrder::new(psi, sigma2, cfg)?.d_time_cond_down()
}

pub fn d_spectrum<T: Real>(
    psi: &FrequencyDependence<T>,
    sigma2: &DiffusionCoefficient<T>,
    x: T,
    cfg: &QuadConfig<T>,
) -> Result<T> {
    FirstOrder::new(psi, sigma2, cfg)?.d_spectrum(x)
}

pub fn d_green<T: Real>(
    psi: &FrequencyDependence<T>,
    sigma2: &DiffusionCoefficient<T>,
    y: T,
    conditioning: Conditioning,
    cfg: &QuadConfig<T>,
) -> Result<T> {
    FirstOrder::new(psi, sigma2, cfg)?.d_green(y, conditioning)
}

pub fn d_conditioned_drift<T: Real>(
    psi: &FrequencyDependence<T>,
    sigma2: &DiffusionCoefficient<T>,
    x: T,
    cfg: &QuadConfig<T>,
) -> Result<T> {
    FirstOrder::new(psi, sigma2, cfg)?.d_conditioned_drift(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Polynomial;

    type Psi = FrequencyDependence<f64>;

    fn cfg() -> QuadConfig<f64> {
        QuadConfig::default()
    }

    fn wf() -> DiffusionCoefficient<f64> {
        DiffusionCoefficient::WrightFisher
    }

    fn opaque_wf() -> DiffusionCoefficient<f64> {
        DiffusionCoefficient::from_fn(|y: f64| y * (1.0 - y))
    }

    fn opaque_linear(beta: f64, gamma: f64) -> Psi {
        Psi::from_fn(move |y| beta - gamma * y, beta.abs() + gamma.abs())
    }

    #[test]
    fn quadrature_path_matches_exact_path() {
        let exact = FirstOrder::new(&Psi::linear(1.0, 2.0), &wf(), &cfg()).unwrap();
        let numeric = FirstOrder::new(&opaque_linear(1.0, 2.0), &opaque_wf(), &cfg()).unwrap();
        assert!(exact.exact().is_some() && numeric.exact().is_none());
        for c in [Conditioning::None, Conditioning::Up, Conditioning::Down] {
            let (a, b) = (exact.d_time(c).unwrap(), numeric.d_time(c).unwrap());
            assert!((a - b).abs() < 1e-9, "{c:?}: {a} vs {b}");
            for y in [0.01, 0.3, 0.5, 0.97] {
                let (a, b) = (exact.d_green(y, c).unwrap(), numeric.d_green(y, c).unwrap());
                assert!((a - b).abs() < 1e-8, "{c:?} y={y}");
            }
        }
        for x in [0.1, 0.2, 0.75] {
            assert!((exact.d_fixation(x).unwrap() - numeric.d_fixation(x).unwrap()).abs() < 1e-10);
            assert!((exact.d_spectrum(x).unwrap() - numeric.d_spectrum(x).unwrap()).abs() < 1e-9);
            let (a, b) = (
                exact.d_conditioned_drift(x).unwrap(),
                numeric.d_conditioned_drift(x).unwrap(),
            );
            assert!((a - b).abs() < 1e-9);
        }
        assert!((exact.d_fixation(0.2).unwrap() - 0.032).abs() < 1e-15);
    }

    #[test]
    fn green_derivative_integrates_to_time_derivative() {
        let fo = FirstOrder::new(&opaque_linear(0.5, -1.5), &opaque_wf(), &cfg()).unwrap();
        for c in [Conditioning::None, Conditioning::Up, Conditioning::Down] {
            let t = fo.d_time(c).unwrap();
            let g = integral(|y| fo.d_green(y, c).unwrap(), 0.0, 1.0, &cfg()).unwrap();
            assert!((t - g).abs() < 1e-10);
        }
    }

    #[test]
    fn variance_scaling() {
        // Doubling σ² halves every time derivative and leaves fixation alone.
        let psi = Psi::linear(1.0, 0.5);
        let twice = DiffusionCoefficient::Polynomial(Polynomial::new(vec![0.0, 2.0, -2.0]));
        let a = FirstOrder::new(&psi, &wf(), &cfg()).unwrap();
        let b = FirstOrder::new(&psi, &twice, &cfg()).unwrap();
        for c in [Conditioning::None, Conditioning::Up, Conditioning::Down] {
            assert!((a.d_time(c).unwrap() - 2.0 * b.d_time(c).unwrap()).abs() < 1e-9);
        }
        assert_eq!(a.d_fixation(0.3).unwrap(), b.d_fixation(0.3).unwrap());
    }

    #[test]
    fn linearity_in_psi() {
        let f1 = opaque_linear(1.0, 3.0);
        let f2 = Psi::from_fn(|y: f64| (3.0 * y).sin(), 1.0);
        let combo = Psi::from_fn(
            move |y: f64| 2.0 * (1.0 - 3.0 * y) - 0.5 * (3.0 * y).sin(),
            8.5,
        );
        let [a, b, c] = [f1, f2, combo].map(|p| FirstOrder::new(&p, &opaque_wf(), &cfg()).unwrap());
        let lin = |u: f64, v: f64| 2.0 * u - 0.5 * v;
        for cond in [Conditioning::None, Conditioning::Up, Conditioning::Down] {
            let expected = lin(a.d_time(cond).unwrap(), b.d_time(cond).unwrap());
            let got = c.d_time(cond).unwrap();
            assert!(
                (got - expected).abs() < 1e-9,
                "{cond:?}: {got} vs {expected}"
            );
        }
        for x in [0.2, 0.6] {
            let expected = lin(a.d_spectrum(x).unwrap(), b.d_spectrum(x).unwrap());
            assert!((c.d_spectrum(x).unwrap() - expected).abs() < 1e-10);
            let expected = lin(a.d_fixation(x).unwrap(), b.d_fixation(x).unwrap());
            assert!((c.d_fixation(x).unwrap() - expected).abs() < 1e-10);
        }
    }

    #[test]
    fn non_integrable_variance_is_reported() {
        let sigma2 = DiffusionCoefficient::from_fn(|y: f64| y * y * (1.0 - y));
        let e = d_time_unconditional(&Psi::constant(1.0), &sigma2, &cfg()).unwrap_err();
        assert_eq!(e.class(), "Divergence");
    }

    #[test]
    fn domains() {
        let fo = FirstOrder::new(&Psi::constant(1.0), &wf(), &cfg()).unwrap();
        assert_eq!(fo.d_fixation(0.0).unwrap(), 0.0);
        assert_eq!(fo.d_fixation(1.0).unwrap(), 0.0);
        assert!(fo.d_green(0.0, Conditioning::Up).is_err());
        assert!(fo.d_spectrum(1.0).is_err());
        assert!(fo.d_conditioned_drift(0.0).is_err());
        assert_eq!(fo.d_conditioned_drift(0.4).unwrap(), 0.0);
    }
}
