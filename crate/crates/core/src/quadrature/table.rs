use super::{compensated_sum, integral, QuadConfig};
use crate::error::{Error, Result};
use crate::scalar::Real;

const INITIAL_INTERVALS: usize = 16;

/// Running integral `T(y) = ∫_lo^y f` tabulated on an adaptive grid.
///
/// Between nodes the table is a cubic Hermite interpolant using the
/// integrand itself as slope, so it is exact at nodes and its error is
/// checked at every interval midpoint during construction. Both the
/// running integral and its complement `∫_y^hi f` are evaluated from the
/// nearer node, which keeps relative accuracy near both ends.
#[derive(Clone, Debug)]
pub struct CumulativeTable<T> {
    nodes: Vec<T>,
    values: Vec<T>,
    tails: Vec<T>,
    increments: Vec<T>,
    slopes: Vec<T>,
    max_error: T,
}

/// Tabulates `y ↦ ∫₀ʸ f` on `[0, 1]`.
pub fn cumulative<T, F>(f: F, cfg: &QuadConfig<T>) -> Result<CumulativeTable<T>>
where
    T: Real,
    F: Fn(T) -> T,
{
    cumulative_on(f, T::zero(), T::one(), cfg)
}

/// Tabulates `y ↦ ∫_lo^y f` on `[lo, hi]`.
pub fn cumulative_on<T, F>(f: F, lo: T, hi: T, cfg: &QuadConfig<T>) -> Result<CumulativeTable<T>>
where
    T: Real,
    F: Fn(T) -> T,
{
    cfg.validate()?;
    if lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) {
        return Err(Error::Domain(format!("table range [{lo}, {hi}] is empty")));
    }
    let n0 = INITIAL_INTERVALS;
    let step = (hi - lo) / T::c(n0 as f64);
    let mut nodes: Vec<T> = (0..=n0).map(|i| lo + step * T::c(i as f64)).collect();
    nodes[n0] = hi;
    let mut increments = nodes
        .windows(2)
        .map(|w| integral(&f, w[0], w[1], cfg))
        .collect::<Result<Vec<T>>>()?;

    let slope_at = |x: T| f(x);
    let min_width = cfg.endpoint_shave * (hi - lo);
    let mut max_error = T::zero();

    // Intervals still to be checked, as indices into `nodes`.
    let mut pending: Vec<bool> = vec![true; n0];
    loop {
        let scale: T = increments.iter().map(|v| v.abs()).sum();
        let tol = cfg.abs_tol.max(cfg.rel_tol * scale);
        let mut next_nodes = Vec::with_capacity(nodes.len() * 2);
        let mut next_incr = Vec::with_capacity(increments.len() * 2);
        let mut next_pending = Vec::with_capacity(increments.len() * 2);
        let mut split_any = false;

        for i in 0..increments.len() {
            let (x0, x1) = (nodes[i], nodes[i + 1]);
            next_nodes.push(x0);
            if !pending[i] {
                next_incr.push(increments[i]);
                next_pending.push(false);
                continue;
            }
            let h = x1 - x0;
            let mid = T::c(0.5) * (x0 + x1);
            let left = integral(&f, x0, mid, cfg)?;
            let d0 = finite_or(slope_at(x0), increments[i] / h);
            let d1 = finite_or(slope_at(x1), increments[i] / h);
            let predicted = T::c(0.5) * increments[i] + h * (d0 - d1) / T::c(8.0);
            let err = (left - predicted).abs();
            if err <= tol || h < min_width {
                max_error = max_error.max(err);
                next_incr.push(increments[i]);
                next_pending.push(false);
            } else {
                let right = integral(&f, mid, x1, cfg)?;
                next_incr.push(left);
                next_incr.push(right);
                next_nodes.push(mid);
                next_pending.push(true);
                next_pending.push(true);
                split_any = true;
            }
        }
        next_nodes.push(hi);
        nodes = next_nodes;
        increments = next_incr;
        pending = next_pending;
        if !split_any {
            break;
        }
        if nodes.len() > cfg.max_subdivisions {
            return Err(Error::NonConvergence {
                subdivisions: nodes.len(),
                error_estimate: max_error.to_f64_lossy(),
            });
        }
    }

    let n = increments.len();
    let mut values = Vec::with_capacity(n + 1);
    values.push(T::zero());
    for i in 0..n {
        values.push(compensated_sum(increments[..=i].iter().copied()));
    }
    let mut tails = vec![T::zero(); n + 1];
    for i in (0..n).rev() {
        tails[i] = compensated_sum(increments[i..].iter().copied());
    }
    let slopes = (0..=n)
        .map(|i| {
            let fallback = if i < n {
                increments[i] / (nodes[i + 1] - nodes[i])
            } else {
                increments[n - 1] / (nodes[n] - nodes[n - 1])
            };
            finite_or(slope_at(nodes[i]), fallback)
        })
        .collect();

    Ok(CumulativeTable {
        nodes,
        values,
        tails,
        increments,
        slopes,
        max_error,
    })
}

fn finite_or<T: Real>(v: T, fallback: T) -> T {
    if v.is_finite() {
        v
    } else {
        fallback
    }
}

// Cubic Hermite basis pieces used below.
fn h01<T: Real>(t: T) -> T {
    t * t * (T::c(3.0) - T::c(2.0) * t)
}
fn h10<T: Real>(t: T) -> T {
    t * (T::one() - t) * (T::one() - t)
}
fn h11<T: Real>(t: T) -> T {
    t * t * (t - T::one())
}

impl<T: Real> CumulativeTable<T> {
    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn lower(&self) -> T {
        self.nodes[0]
    }

    pub fn upper(&self) -> T {
        *self.nodes.last().expect("non-empty table")
    }

    /// `∫_lo^hi f`
    pub fn total(&self) -> T {
        self.tails[0]
    }

    /// Largest midpoint interpolation error accepted during construction.
    pub fn max_error(&self) -> T {
        self.max_error
    }

    fn locate(&self, y: T) -> (usize, T) {
        let y = y.max(self.lower()).min(self.upper());
        let n = self.increments.len();
        let i = self
            .nodes
            .partition_point(|&x| x <= y)
            .saturating_sub(1)
            .min(n - 1);
        let h = self.nodes[i + 1] - self.nodes[i];
        (i, (y - self.nodes[i]) / h)
    }

    /// `H(y) - H(x_i)` on interval `i` at local coordinate `t`.
    fn forward(&self, i: usize, t: T) -> T {
        let h = self.nodes[i + 1] - self.nodes[i];
        self.increments[i] * h01(t) + h * (self.slopes[i] * h10(t) + self.slopes[i + 1] * h11(t))
    }

    /// `H(x_{i+1}) - H(y)` on interval `i` at local coordinate `t`.
    fn backward(&self, i: usize, t: T) -> T {
        let h = self.nodes[i + 1] - self.nodes[i];
        let s = T::one() - t;
        self.increments[i] * h01(s) + h * (self.slopes[i + 1] * h10(s) + self.slopes[i] * h11(s))
    }

    /// `∫_lo^y f`; arguments outside the table range are clamped.
    pub fn eval(&self, y: T) -> T {
        let (i, t) = self.locate(y);
        if t <= T::c(0.5) {
            self.values[i] + self.forward(i, t)
        } else {
            self.values[i + 1] - self.backward(i, t)
        }
    }

    /// `∫_y^hi f`
    pub fn complement(&self, y: T) -> T {
        let (i, t) = self.locate(y);
        if t <= T::c(0.5) {
            self.tails[i] - self.forward(i, t)
        } else {
            self.tails[i + 1] + self.backward(i, t)
        }
    }

    /// Slope of the interpolant (approximates `f(y)`).
    pub fn derivative(&self, y: T) -> T {
        let (i, t) = self.locate(y);
        let h = self.nodes[i + 1] - self.nodes[i];
        let dh01 = T::c(6.0) * t * (T::one() - t);
        let dh10 = (T::one() - t) * (T::one() - T::c(3.0) * t);
        let dh11 = t * (T::c(3.0) * t - T::c(2.0));
        self.increments[i] / h * dh01 + self.slopes[i] * dh10 + self.slopes[i + 1] * dh11
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadConfig<f64> {
        QuadConfig::default()
    }

    #[test]
    fn identity_integrand() {
        let t = cumulative(|_y: f64| 1.0, &cfg()).unwrap();
        for y in [0.0, 0.013, 0.25, 0.5, 0.77, 1.0] {
            assert!((t.eval(y) - y).abs() < 1e-14);
            assert!((t.complement(y) - (1.0 - y)).abs() < 1e-14);
        }
        assert_eq!(t.eval(0.0), 0.0);
    }

    #[test]
    fn linear_integrand() {
        let t = cumulative(|y: f64| 1.0 - 2.0 * y, &cfg()).unwrap();
        assert!((t.eval(0.5) - 0.25).abs() < 1e-14);
    }

    #[test]
    fn cubic_total() {
        let t = cumulative(|y: f64| y.powi(3), &cfg()).unwrap();
        assert!((t.eval(1.0) - 0.25).abs() < 1e-14);
        assert!((t.total() - 0.25).abs() < 1e-14);
    }

    #[test]
    fn exact_at_nodes_and_accurate_between() {
        let f = |y: f64| (-2.0 * (y - 0.3).powi(2) * 10.0).exp();
        let t = cumulative(f, &cfg()).unwrap();
        for (x, v) in t.nodes().iter().zip(t.values()) {
            assert_eq!(t.eval(*x), *v);
        }
        for k in 0..=200 {
            let y = k as f64 / 200.0;
            let exact = integral(f, 0.0, y.max(1e-300), &cfg()).unwrap_or(0.0);
            assert!((t.eval(y) - exact).abs() < 1e-10, "y={y}");
            assert!((t.derivative(y) - f(y)).abs() < 1e-6, "y={y}");
        }
    }

    #[test]
    fn complement_keeps_relative_accuracy_near_the_top() {
        let t = cumulative(|y: f64| (y * 1.7).cos() + 2.0, &cfg()).unwrap();
        for eps in [1e-3, 1e-6, 1e-9] {
            let y: f64 = 1.0 - eps;
            let d = 1.0 - y;
            // sin a - sin b written as a product to avoid cancellation.
            let exact = 2.0 * (0.85 * (1.0 + y)).cos() * (0.85 * d).sin() / 1.7 + 2.0 * d;
            assert!(
                ((t.complement(y) - exact) / exact).abs() < 1e-8,
                "eps={eps}"
            );
        }
    }

    #[test]
    fn singular_endpoint_integrand() {
        let t = cumulative(|y: f64| y.powf(-0.5), &cfg()).unwrap();
        assert!((t.total() - 2.0).abs() < 1e-9);
        assert!((t.eval(0.25) - 1.0).abs() < 1e-6);
    }
}
