//! Test-only oracles, independent of the library's quadrature.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Composite Gauss–Legendre quadrature with `panels` equal panels of
/// 10 nodes each. Never evaluates `f` at `a` or `b`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let rule = gauss_legendre(10);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let mid = lo + 0.5 * h;
        for &(x, w) in &rule {
            total += 0.5 * h * w * f(mid + 0.5 * h * x);
        }
    }
    total
}

/// `S(x) / S(1)` for Wright–Fisher with `ψ(y) = β - γy`, where
/// `S(x) = ∫₀ˣ exp(-2α(βy - γy²/2)) dy`.
pub fn linear_psi_fixation(alpha: f64, beta: f64, gamma: f64, x: f64) -> f64 {
    let s = |y: f64| (-2.0 * alpha * (beta * y - 0.5 * gamma * y * y)).exp();
    integrate(s, 0.0, x, 400) / integrate(s, 0.0, 1.0, 400)
}

/// `-2(x ln x + (1-x) ln(1-x))`
pub fn neutral_time(x: f64) -> f64 {
    -2.0 * (x * x.ln() + (1.0 - x) * (1.0 - x).ln())
}

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `Σ_{i=lo}^{hi} 1/i`
pub fn harmonic(lo: i64, hi: i64) -> BigRational {
    (lo..=hi).fold(q(0, 1), |acc, i| acc + q(1, i))
}
