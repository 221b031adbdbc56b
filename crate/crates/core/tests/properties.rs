mod common;

use driftgreen::diffusion::{Conditioning, Diffusion, DiffusionCoefficient, DiffusionModel};
use driftgreen::perturbation::{FirstOrder, WfFirstOrder};
use driftgreen::poly::Polynomial;
use driftgreen::{Psi, QuadConfig, Rational, Sigma2, Solver};
use num_traits::ToPrimitive;
use proptest::prelude::*;

use common::{linear_psi_fixation, q};

fn solver(alpha: f64, psi: Psi, sigma2: Sigma2) -> Solver {
    Diffusion::new(
        DiffusionModel::new(alpha, psi, sigma2).unwrap(),
        QuadConfig::default(),
    )
    .unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + b.abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fixation_matches_direct_quadrature(
        alpha in -2.0f64..2.0, beta in -2.0f64..2.0, gamma in -2.0f64..2.0, x in 0.01f64..0.99,
    ) {
        let p = solver(alpha, Psi::linear(beta, gamma), DiffusionCoefficient::WrightFisher).hit_prob_up(x).unwrap();
        prop_assert!(close(p, linear_psi_fixation(alpha, beta, gamma, x), 1e-9));
    }

    #[test]
    fn mirror_swaps_the_boundaries(
        alpha in -1.5f64..1.5, beta in -1.0f64..1.0, gamma in -1.0f64..1.0, x in 0.05f64..0.95,
    ) {
        let model = DiffusionModel::new(
            alpha,
            Psi::linear(beta, gamma),
            DiffusionCoefficient::Polynomial(Polynomial::new(vec![0.0, 1.5, -1.0, -0.5])),
        ).unwrap();
        let cfg = QuadConfig::default();
        let d = Diffusion::new(model.clone(), cfg).unwrap();
        let m = Diffusion::new(model.mirrored(), cfg).unwrap();
        let (a, b) = (d.hitting_summary(x).unwrap(), m.hitting_summary(1.0 - x).unwrap());
        prop_assert!(close(a.p_up, b.p_down, 1e-9));
        prop_assert!(close(a.e_t, b.e_t, 1e-8));
        prop_assert!(close(a.e_t_up, b.e_t_down, 1e-8));
        prop_assert!(close(a.e_t_down, b.e_t_up, 1e-8));
    }

    #[test]
    fn absorption_time_solves_the_backward_equation(
        alpha in -1.0f64..1.0, beta in -1.0f64..1.0, gamma in -1.0f64..1.0, x in 0.2f64..0.8,
    ) {
        // σ²/2 E'' + αψσ² E' = -1, by central differences.
        let d = solver(alpha, Psi::linear(beta, gamma), DiffusionCoefficient::WrightFisher);
        let h = 1e-2;
        let e = |x: f64| d.absorption_time(x).unwrap();
        let (lo, mid, hi) = (e(x - h), e(x), e(x + h));
        let s2 = x * (1.0 - x);
        let lhs = 0.5 * s2 * (hi - 2.0 * mid + lo) / (h * h) + alpha * (beta - gamma * x) * s2 * (hi - lo) / (2.0 * h);
        prop_assert!((lhs + 1.0).abs() < 1e-3, "residual {}", lhs + 1.0);
    }

    #[test]
    fn first_order_matches_central_differences(
        beta in -1.0f64..1.0, gamma in -1.0f64..1.0, x in 0.1f64..0.9,
    ) {
        let psi = Psi::linear(beta, gamma);
        let wf = DiffusionCoefficient::WrightFisher;
        let fo = FirstOrder::new(&psi, &wf, &QuadConfig::default()).unwrap();
        let a = 1e-3;
        let plus = solver(a, psi.clone(), wf.clone());
        let minus = solver(-a, psi.clone(), wf.clone());
        let fd = |f: &dyn Fn(&Solver) -> f64| (f(&plus) - f(&minus)) / (2.0 * a);
        prop_assert!(close(fd(&|s| s.hit_prob_up(x).unwrap()), fo.d_fixation(x).unwrap(), 1e-5));
        prop_assert!(close(fd(&|s| s.frequency_spectrum(x).unwrap()), fo.d_spectrum(x).unwrap(), 1e-5));
        prop_assert!(close(fd(&|s| s.conditioned_drift(x).unwrap()), fo.d_conditioned_drift(x).unwrap(), 1e-5));
    }

    #[test]
    fn quadrature_first_order_matches_rational(
        c in prop::collection::vec(-4i64..=4, 1..=4), n in 1i64..64,
    ) {
        let exact_psi = Polynomial::new(c.iter().map(|&v| q(v, 1)).collect::<Vec<Rational>>());
        let float_psi = Polynomial::new(c.iter().map(|&v| v as f64).collect::<Vec<f64>>());
        let poly = float_psi.clone();
        let opaque = Psi::from_fn(move |y| poly.eval(&y), c.iter().map(|v| v.abs() as f64).sum());
        let fo = FirstOrder::new(&opaque, &DiffusionCoefficient::WrightFisher, &QuadConfig::default()).unwrap();
        prop_assert!(fo.exact().is_none());
        let w = WfFirstOrder::new(&exact_psi).unwrap();
        let x = n as f64 / 64.0;
        let e = w.at(&q(n, 64));
        let f = |r: &Rational| r.to_f64().unwrap();
        prop_assert!(close(fo.d_fixation(x).unwrap(), f(&e.d_fixation), 1e-9));
        prop_assert!(close(fo.d_spectrum(x).unwrap(), f(&e.d_spectrum), 1e-8));
        prop_assert!(close(fo.d_time(Conditioning::None).unwrap(), f(&e.d_time_unconditional_per_x), 1e-7));
        prop_assert!(close(fo.d_time(Conditioning::Up).unwrap(), f(&e.d_time_cond_up_at_0), 1e-7));
        prop_assert!(close(fo.d_time(Conditioning::Down).unwrap(), f(&e.d_time_cond_down_per_x), 1e-7));
    }

    #[test]
    fn probabilities_are_monotone_and_bounded(
        alpha in -5.0f64..5.0, beta in -2.0f64..2.0, gamma in -2.0f64..2.0,
    ) {
        let d = solver(alpha, Psi::linear(beta, gamma), DiffusionCoefficient::WrightFisher);
        let ps: Vec<f64> = (0..=20).map(|i| d.hit_prob_up(i as f64 / 20.0).unwrap()).collect();
        prop_assert_eq!(ps[0], 0.0);
        prop_assert_eq!(ps[20], 1.0);
        prop_assert!(ps.windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn general_variance_decomposition() {
    let d = solver(
        0.4,
        Psi::polynomial(vec![0.5, -1.0, 0.25]),
        DiffusionCoefficient::Polynomial(Polynomial::new(vec![0.0, 2.0, -2.0])),
    );
    for x in [0.1, 0.35, 0.8] {
        let h = d.hitting_summary(x).unwrap();
        assert!((h.e_t - (h.p_up * h.e_t_up + h.p_down * h.e_t_down)).abs() < 1e-8);
        // Doubling σ² halves every time.
        let wf = solver(
            0.4,
            Psi::polynomial(vec![0.5, -1.0, 0.25]),
            DiffusionCoefficient::WrightFisher,
        );
        assert!((2.0 * h.e_t - wf.absorption_time(x).unwrap()).abs() < 1e-8);
    }
}
