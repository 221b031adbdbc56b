use std::fmt;

use serde::Serialize;

use super::{Conditioning, DiffusionModel, ScaleTable};
use crate::error::{Error, Result};
use crate::quadrature::{integral, QuadConfig};
use crate::scalar::Real;

/// Starting points used to extrapolate conditioned quantities to `x → 0+`.
const ZERO_LIMIT_POINTS: (f64, f64) = (1e-5, 1e-6);

/// Hitting probabilities and expected hitting times from one start point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HittingSummary<T> {
    pub x: T,
    pub p_up: T,
    pub p_down: T,
    /// `E_x[T]`
    pub e_t: T,
    /// `E_x[T₁ | T₁ < T₀]`
    pub e_t_up: T,
    /// `E_x[T₀ | T₀ < T₁]`
    pub e_t_down: T,
}

/// A model together with its scale table and quadrature settings.
#[derive(Clone)]
pub struct Diffusion<T> {
    model: DiffusionModel<T>,
    scale: ScaleTable<T>,
    cfg: QuadConfig<T>,
}

impl<T: Real> fmt::Debug for Diffusion<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Diffusion")
            .field("model", &self.model)
            .field("scale", &self.scale)
            .field("cfg", &self.cfg)
            .finish()
    }
}

/// Scale-function values at the start point, shared by all kernel calls.
#[derive(Clone, Copy)]
struct Start<T> {
    x: T,
    s: T,
    upper: T,
}

fn open_unit<T: Real>(v: T, name: &str) -> Result<()> {
    if v > T::zero() && v < T::one() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} = {v} must lie in (0, 1)")))
    }
}

fn closed_unit<T: Real>(v: T, name: &str) -> Result<()> {
    if v >= T::zero() && v <= T::one() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} = {v} must lie in [0, 1]")))
    }
}

impl<T: Real> Diffusion<T> {
    pub fn new(model: DiffusionModel<T>, cfg: QuadConfig<T>) -> Result<Self> {
        let scale = ScaleTable::build(&model, &cfg)?;
        Ok(Diffusion { model, scale, cfg })
    }

    pub fn model(&self) -> &DiffusionModel<T> {
        &self.model
    }

    pub fn scale(&self) -> &ScaleTable<T> {
        &self.scale
    }

    pub fn config(&self) -> &QuadConfig<T> {
        &self.cfg
    }

    pub fn hit_prob_up(&self, x: T) -> Result<T> {
        closed_unit(x, "x")?;
        Ok(self.scale.p_up(x).max(T::zero()).min(T::one()))
    }

    /// Complement of [`Self::hit_prob_up`], so the two sum to one exactly.
    pub fn hit_prob_down(&self, x: T) -> Result<T> {
        Ok(T::one() - self.hit_prob_up(x)?)
    }

    fn start(&self, x: T) -> Start<T> {
        Start {
            x,
            s: self.scale.s(x),
            upper: self.scale.s_upper(x),
        }
    }

    /// Green kernel with the start point's scale values precomputed. Each
    /// branch is the closed product form of `G`, `G·P_y(up)/P_x(up)` or
    /// `G·P_y(down)/P_x(down)`, with the `x`-ratios cancelled.
    fn kernel(&self, st: &Start<T>, y: T, conditioning: Conditioning) -> T {
        let two = T::c(2.0);
        let total = self.scale.total();
        let sy = self.scale.s(y);
        let uy = self.scale.s_upper(y);
        let d = self.scale.s_prime(y) * self.model.sigma2().eval(y);
        if y <= st.x {
            match conditioning {
                Conditioning::None => two * (st.upper / total) * sy / d,
                Conditioning::Up => two * (st.upper / total) * (sy / st.s) * sy / d,
                Conditioning::Down => two * (uy / total) * sy / d,
            }
        } else {
            match conditioning {
                Conditioning::None => two * (st.s / total) * uy / d,
                Conditioning::Up => two * (uy / total) * sy / d,
                Conditioning::Down => two * (st.s / total) * (uy / st.upper) * uy / d,
            }
        }
    }

    /// `G(x, y)`, or its version conditioned on the exit side.
    pub fn green(&self, x: T, y: T, conditioning: Conditioning) -> Result<T> {
        open_unit(x, "x")?;
        open_unit(y, "y")?;
        let g = self.kernel(&self.start(x), y, conditioning);
        if g.is_finite() {
            Ok(g)
        } else {
            Err(Error::divergence(
                y.to_f64_lossy(),
                "Green function is not finite; sigma^2 degenerates",
            ))
        }
    }

    /// Both algebraic forms of the unconditioned Green function:
    /// `2 P_x(·) (scale increment at y) / (σ² S')` and the version written
    /// with `P_y(·)` and the scale increment at `x`.
    pub fn green_forms(&self, x: T, y: T) -> Result<(T, T)> {
        open_unit(x, "x")?;
        open_unit(y, "y")?;
        let two = T::c(2.0);
        let d = self.scale.s_prime(y) * self.model.sigma2().eval(y);
        let s = &self.scale;
        Ok(if x <= y {
            (
                two * s.p_up(x) * s.s_upper(y) / d,
                two * s.p_down(y) * s.s(x) / d,
            )
        } else {
            (
                two * s.p_down(x) * s.s(y) / d,
                two * s.p_up(y) * s.s_upper(x) / d,
            )
        })
    }

    fn integrate_kernel(&self, x: T, conditioning: Conditioning) -> Result<T> {
        let st = self.start(x);
        let f = |y: T| self.kernel(&st, y, conditioning);
        let below = integral(f, T::zero(), x, &self.cfg)?;
        let above = integral(f, x, T::one(), &self.cfg)?;
        Ok(below + above)
    }

    /// `E_x[T] = ∫₀¹ G(x, y) dy`
    pub fn absorption_time(&self, x: T) -> Result<T> {
        open_unit(x, "x")?;
        self.integrate_kernel(x, Conditioning::None)
    }

    /// Expected exit time given the exit side (`Up`: through 1, `Down`:
    /// through 0). `Conditioning::None` gives [`Self::absorption_time`].
    pub fn absorption_time_conditioned(&self, x: T, direction: Conditioning) -> Result<T> {
        open_unit(x, "x")?;
        self.integrate_kernel(x, direction)
    }

    /// `lim_{x→0+} E_x[T₁ | T₁ < T₀]`, by linear Richardson extrapolation
    /// from two small starting points.
    pub fn absorption_time_up_from_zero(&self) -> Result<T> {
        let (x1, x2) = (T::c(ZERO_LIMIT_POINTS.0), T::c(ZERO_LIMIT_POINTS.1));
        let e1 = self.absorption_time_conditioned(x1, Conditioning::Up)?;
        let e2 = self.absorption_time_conditioned(x2, Conditioning::Up)?;
        Ok((x1 * e2 - x2 * e1) / (x1 - x2))
    }

    pub fn hitting_summary(&self, x: T) -> Result<HittingSummary<T>> {
        Ok(HittingSummary {
            x,
            p_up: self.hit_prob_up(x)?,
            p_down: self.hit_prob_down(x)?,
            e_t: self.absorption_time(x)?,
            e_t_up: self.absorption_time_conditioned(x, Conditioning::Up)?,
            e_t_down: self.absorption_time_conditioned(x, Conditioning::Down)?,
        })
    }

    /// Expected density of lineages at frequency `x` under a constant
    /// stream of new mutants: `exp(2αΨ(x)) / σ²(x) · P_x(T₀ < T₁)`.
    pub fn frequency_spectrum(&self, x: T) -> Result<T> {
        open_unit(x, "x")?;
        let d = self.scale.s_prime(x) * self.model.sigma2().eval(x);
        let f = self.scale.p_down(x) / d;
        if f.is_finite() {
            Ok(f)
        } else {
            Err(Error::divergence(
                x.to_f64_lossy(),
                "spectrum is not finite",
            ))
        }
    }

    /// Drift of the process conditioned to fix:
    /// `α μ(x) + S'(x) σ²(x) / (S(x) - S(0))`.
    pub fn conditioned_drift(&self, x: T) -> Result<T> {
        if !(x > T::zero() && x <= T::one()) {
            return Err(Error::Domain(format!("x = {x} must lie in (0, 1]")));
        }
        let sigma2 = self.model.sigma2().eval(x);
        Ok(self.model.drift(x) + self.scale.s_prime(x) / self.scale.s(x) * sigma2)
    }
}
