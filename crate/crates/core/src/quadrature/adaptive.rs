//! Globally adaptive bisection driven by the 21-point Gauss–Kronrod rule.
//!
//! Panels touching an endpoint of the integration range are tracked
//! separately: they may not be bisected below `endpoint_shave` times the
//! range length, and the sequence of their estimates is kept so that a
//! stalled run can be classified as divergent (the endpoint contribution
//! does not shrink with the panel) or merely slow.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::rule::{gauss_kronrod_21, PanelEstimate};
use super::QuadConfig;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug)]
struct Panel<T> {
    a: T,
    b: T,
    est: PanelEstimate<T>,
    left_edge: bool,
    right_edge: bool,
}

impl<T: Real> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T: Real> Eq for Panel<T> {}
impl<T: Real> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.est
            .error
            .partial_cmp(&other.est.error)
            .unwrap_or(Ordering::Equal)
    }
}

/// Estimates of the panels touching one endpoint, finest last.
#[derive(Clone, Debug, Default)]
pub(crate) struct EdgeHistory<T> {
    values: Vec<T>,
}

impl<T: Real> EdgeHistory<T> {
    /// The endpoint panel's contribution fails to decay: over the last ten
    /// halvings it lost less than half of its size (slower than `h^0.1`),
    /// while still being larger than the tolerance.
    pub(crate) fn diverging(&self, tol: T) -> bool {
        let n = self.values.len();
        if n < 11 {
            return false;
        }
        let last = self.values[n - 1].abs();
        let earlier = self.values[n - 11].abs();
        last > tol && last >= T::c(0.5) * earlier
    }
}

#[derive(Debug)]
pub(crate) struct Run<T> {
    pub value: T,
    pub error: T,
    pub subdivisions: usize,
    pub converged: bool,
    /// Share of the remaining error sitting in the two outermost panels.
    pub endpoint_share: T,
    pub edges: [EdgeHistory<T>; 2],
    pub tolerance: T,
}

/// Runs adaptive bisection on `[a, b]` with at most `budget` bisections.
/// `Err(x)` reports a non-finite integrand value at `x`.
pub(crate) fn run<T: Real, F: Fn(T) -> T>(
    f: &F,
    a: T,
    b: T,
    cfg: &QuadConfig<T>,
    budget: usize,
) -> Result<Run<T>, T> {
    let length = b - a;
    let min_edge_width = cfg.endpoint_shave * length;
    let first = Panel {
        a,
        b,
        est: gauss_kronrod_21(f, a, b)?,
        left_edge: true,
        right_edge: true,
    };

    let mut edges = [EdgeHistory::default(), EdgeHistory::default()];
    let mut value = first.est.value;
    let mut error = first.est.error;
    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Panel<T>> = Vec::new();
    let mut frozen_error = T::zero();
    heap.push(first);
    let mut subdivisions = 0;

    let tolerance = |v: T| cfg.abs_tol.max(cfg.rel_tol * v.abs());

    let converged = loop {
        if error <= tolerance(value) {
            break true;
        }
        if frozen_error > tolerance(value) {
            // Panels that may not be refined already exceed the budget.
            break false;
        }
        let Some(p) = heap.pop() else {
            break false;
        };
        if subdivisions >= budget {
            heap.push(p);
            break false;
        }
        let width = p.b - p.a;
        let mid = T::c(0.5) * (p.a + p.b);
        let at_edge = p.left_edge || p.right_edge;
        let too_narrow = if at_edge {
            width < min_edge_width
        } else {
            width <= T::c(8.0) * T::epsilon() * p.a.abs().max(p.b.abs())
        };
        if too_narrow || mid <= p.a || mid >= p.b {
            frozen_error += p.est.error;
            frozen.push(p);
            continue;
        }

        let left = Panel {
            a: p.a,
            b: mid,
            est: gauss_kronrod_21(f, p.a, mid)?,
            left_edge: p.left_edge,
            right_edge: false,
        };
        let right = Panel {
            a: mid,
            b: p.b,
            est: gauss_kronrod_21(f, mid, p.b)?,
            left_edge: false,
            right_edge: p.right_edge,
        };
        if left.left_edge {
            edges[0].values.push(left.est.value);
        }
        if right.right_edge {
            edges[1].values.push(right.est.value);
        }
        value += left.est.value + right.est.value - p.est.value;
        error += left.est.error + right.est.error - p.est.error;
        heap.push(left);
        heap.push(right);
        subdivisions += 1;
    };

    // Re-sum to shed drift from the running updates.
    let panels: Vec<Panel<T>> = heap.into_iter().chain(frozen).collect();
    let value = compensated_sum(panels.iter().map(|p| p.est.value));
    let error: T = panels.iter().map(|p| p.est.error).sum();
    let edge_error: T = panels
        .iter()
        .filter(|p| p.left_edge || p.right_edge)
        .map(|p| p.est.error)
        .sum();
    let endpoint_share = if error > T::zero() {
        edge_error / error
    } else {
        T::zero()
    };

    Ok(Run {
        value,
        error,
        subdivisions,
        converged: converged || error <= tolerance(value),
        endpoint_share,
        edges,
        tolerance: tolerance(value),
    })
}

/// Neumaier (compensated) summation.
pub fn compensated_sum<T: Real>(values: impl IntoIterator<Item = T>) -> T {
    let mut sum = T::zero();
    let mut comp = T::zero();
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumaier_recovers_cancelled_terms() {
        let s = compensated_sum([1.0, 1e100, 1.0, -1e100]);
        assert_eq!(s, 2.0);
    }

    #[test]
    fn logarithmic_endpoint_is_flagged_as_diverging() {
        let cfg = QuadConfig::<f64>::default();
        let r = run(&|y: f64| 1.0 / y, 0.0, 1.0, &cfg, 2000).unwrap();
        assert!(!r.converged);
        assert!(r.edges[0].diverging(r.tolerance));
        assert!(!r.edges[1].diverging(r.tolerance));
    }

    #[test]
    fn square_root_singularity_stalls_without_diverging() {
        let cfg = QuadConfig::<f64>::default();
        let r = run(&|y: f64| y.powf(-0.5), 0.0, 1.0, &cfg, 2000).unwrap();
        assert!(!r.edges[0].diverging(r.tolerance));
        assert!(r.endpoint_share > 0.5);
    }
}
