//! Euler–Maruyama simulation of the diffusion up to absorption.
//!
//! Every path draws from its own ChaCha8 stream, selected by the path
//! index under a common seed, so results do not depend on how paths are
//! spread over worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diffusion::DiffusionModel;
use crate::error::{Error, Result};
use crate::quadrature::compensated_sum;
use crate::scalar::Real;

/// Smallest subsample for which a standard error is reported.
pub const MIN_SAMPLES_FOR_SE: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub dt: f64,
    pub n_paths: usize,
    pub seed: u64,
    pub max_time: f64,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            dt: 1e-4,
            n_paths: 10_000,
            seed: 0,
            max_time: 1e4,
            workers: None,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "dt = {} must be positive",
                self.dt
            )));
        }
        if self.n_paths == 0 {
            return Err(Error::InvalidInput("n_paths must be at least 1".into()));
        }
        if self.max_time.is_nan() || self.max_time <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "max_time = {} must be positive",
                self.max_time
            )));
        }
        if self.workers == Some(0) {
            return Err(Error::InvalidInput("workers must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Boundary {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "1")]
    One,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum PathOutcome<T> {
    Absorbed { at: Boundary, time: T },
    Censored { time: T },
}

/// One Euler–Maruyama path from `x0`. A step that leaves `[0, 1]` is
/// absorbed at the nearer boundary at the end of that step.
pub fn simulate_path<T: Real>(
    model: &DiffusionModel<T>,
    x0: T,
    cfg: &SimConfig,
    path_index: u64,
) -> Result<PathOutcome<T>> {
    cfg.validate()?;
    if !(x0 > T::zero() && x0 < T::one()) {
        return Err(Error::Domain(format!("x0 = {x0} must lie in (0, 1)")));
    }
    Ok(run_path(model, x0, cfg, path_index))
}

fn run_path<T: Real>(
    model: &DiffusionModel<T>,
    x0: T,
    cfg: &SimConfig,
    path_index: u64,
) -> PathOutcome<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(path_index);
    let dt = T::c(cfg.dt);
    let sqrt_dt = dt.sqrt();
    let max_steps = (cfg.max_time / cfg.dt).ceil() as u64;
    let alpha = model.alpha();
    let mut x = x0;
    for step in 1..=max_steps {
        let z: f64 = StandardNormal.sample(&mut rng);
        let s2 = model.sigma2().eval(x).max(T::zero());
        x = x + alpha * model.psi().eval(x) * s2 * dt + s2.sqrt() * sqrt_dt * T::c(z);
        let at = if x <= T::zero() {
            Boundary::Zero
        } else if x >= T::one() {
            Boundary::One
        } else {
            continue;
        };
        return PathOutcome::Absorbed {
            at,
            time: T::c(step as f64 * cfg.dt),
        };
    }
    PathOutcome::Censored {
        time: T::c(max_steps as f64 * cfg.dt),
    }
}

/// A sample mean and, for large enough samples, its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate<T> {
    pub value: T,
    pub std_error: Option<T>,
    pub n: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McEstimates<T> {
    pub n_paths: usize,
    pub n_fixed: usize,
    pub n_lost: usize,
    /// Paths still running at `max_time`; excluded from every estimate.
    pub n_censored: usize,
    pub p_fix: Estimate<T>,
    pub mean_t: Estimate<T>,
    pub mean_t_up: Estimate<T>,
    pub mean_t_down: Estimate<T>,
}

fn mean_estimate<T: Real>(xs: &[T]) -> Estimate<T> {
    let n = xs.len();
    let nt = T::c(n as f64);
    let mean = compensated_sum(xs.iter().copied()) / nt;
    let std_error = (n >= MIN_SAMPLES_FOR_SE).then(|| {
        let ss = compensated_sum(xs.iter().map(|&v| (v - mean) * (v - mean)));
        (ss / (nt - T::one()) / nt).sqrt()
    });
    Estimate {
        value: mean,
        std_error,
        n,
    }
}

/// Simulates `cfg.n_paths` paths and aggregates them in path order.
pub fn simulate_paths<T: Real>(
    model: &DiffusionModel<T>,
    x0: T,
    cfg: &SimConfig,
) -> Result<Vec<PathOutcome<T>>> {
    cfg.validate()?;
    simulate_path(model, x0, cfg, 0)?;
    let job = || {
        (0..cfg.n_paths as u64)
            .into_par_iter()
            .map(|i| run_path(model, x0, cfg, i))
            .collect::<Vec<_>>()
    };
    match cfg.workers {
        None => Ok(job()),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

pub fn estimate<T: Real>(
    model: &DiffusionModel<T>,
    x0: T,
    cfg: &SimConfig,
) -> Result<McEstimates<T>> {
    let outcomes = simulate_paths(model, x0, cfg)?;
    let mut up = Vec::new();
    let mut down = Vec::new();
    let mut n_censored = 0;
    for o in &outcomes {
        match *o {
            PathOutcome::Absorbed {
                at: Boundary::One,
                time,
            } => up.push(time),
            PathOutcome::Absorbed {
                at: Boundary::Zero,
                time,
            } => down.push(time),
            PathOutcome::Censored { .. } => n_censored += 1,
        }
    }
    if up.is_empty() || down.is_empty() {
        return Err(Error::InsufficientData(format!(
            "{} paths fixed and {} were lost; both conditional means need at least one",
            up.len(),
            down.len()
        )));
    }
    let absorbed = up.len() + down.len();
    let p = T::c(up.len() as f64) / T::c(absorbed as f64);
    let p_fix = Estimate {
        value: p,
        std_error: (absorbed >= MIN_SAMPLES_FOR_SE)
            .then(|| (p * (T::one() - p) / T::c(absorbed as f64)).sqrt()),
        n: absorbed,
    };
    let all: Vec<T> = up.iter().chain(down.iter()).copied().collect();
    Ok(McEstimates {
        n_paths: outcomes.len(),
        n_fixed: up.len(),
        n_lost: down.len(),
        n_censored,
        p_fix,
        mean_t: mean_estimate(&all),
        mean_t_up: mean_estimate(&up),
        mean_t_down: mean_estimate(&down),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffusion::FrequencyDependence;

    fn cfg(n: usize) -> SimConfig {
        SimConfig {
            dt: 1e-3,
            n_paths: n,
            seed: 7,
            ..SimConfig::default()
        }
    }

    #[test]
    fn paths_are_reproducible() {
        let m = DiffusionModel::<f64>::neutral_wright_fisher();
        let a = simulate_path(&m, 0.5, &cfg(1), 3).unwrap();
        let b = simulate_path(&m, 0.5, &cfg(1), 3).unwrap();
        let c = simulate_path(&m, 0.5, &cfg(1), 4).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let m = DiffusionModel::wright_fisher(0.5, FrequencyDependence::linear(1.0, 0.5)).unwrap();
        let one = estimate(
            &m,
            0.3,
            &SimConfig {
                workers: Some(1),
                ..cfg(400)
            },
        )
        .unwrap();
        let four = estimate(
            &m,
            0.3,
            &SimConfig {
                workers: Some(4),
                ..cfg(400)
            },
        )
        .unwrap();
        assert_eq!(one, four);
    }

    #[test]
    fn start_near_zero_is_lost_quickly() {
        let m = DiffusionModel::<f64>::neutral_wright_fisher();
        let c = SimConfig { dt: 1e-4, ..cfg(1) };
        let mut lost = 0;
        for i in 0..200 {
            if let PathOutcome::Absorbed {
                at: Boundary::Zero,
                time,
            } = simulate_path(&m, 1e-6, &c, i).unwrap()
            {
                assert!(time < 0.01);
                lost += 1;
            }
        }
        assert!(lost >= 199);
    }

    #[test]
    fn strong_selection_fixes() {
        let m = DiffusionModel::wright_fisher(50.0, FrequencyDependence::constant(1.0)).unwrap();
        let c = cfg(1);
        let fixed = (0..500)
            .filter(|&i| {
                matches!(
                    simulate_path(&m, 0.5, &c, i).unwrap(),
                    PathOutcome::Absorbed {
                        at: Boundary::One,
                        ..
                    }
                )
            })
            .count();
        assert!(fixed >= 495);
    }

    #[test]
    fn in_sample_decomposition() {
        let m = DiffusionModel::<f64>::neutral_wright_fisher();
        let e = estimate(&m, 0.5, &cfg(300)).unwrap();
        let p = e.p_fix.value;
        let recomposed = p * e.mean_t_up.value + (1.0 - p) * e.mean_t_down.value;
        assert!((recomposed - e.mean_t.value).abs() < 1e-12);
        assert_eq!(e.n_fixed + e.n_lost + e.n_censored, 300);
        assert!(e.p_fix.std_error.is_some());
    }

    #[test]
    fn censoring_is_counted() {
        let m = DiffusionModel::<f64>::neutral_wright_fisher();
        let c = SimConfig {
            max_time: 0.05,
            ..cfg(200)
        };
        let e = estimate(&m, 0.5, &c);
        match e {
            Ok(e) => assert!(e.n_censored > 0),
            Err(err) => assert_eq!(err.class(), "InsufficientData"),
        }
    }

    #[test]
    fn small_samples_have_no_standard_error() {
        let m = DiffusionModel::<f64>::neutral_wright_fisher();
        let e = estimate(&m, 0.5, &cfg(40)).unwrap();
        assert!(e.p_fix.std_error.is_none() && e.mean_t.std_error.is_none());
    }

    #[test]
    fn invalid_configs() {
        let m = DiffusionModel::<f64>::neutral_wright_fisher();
        assert!(estimate(&m, 0.5, &SimConfig { dt: 0.0, ..cfg(10) }).is_err());
        assert!(estimate(
            &m,
            0.5,
            &SimConfig {
                n_paths: 0,
                ..cfg(10)
            }
        )
        .is_err());
        assert_eq!(
            estimate(&m, 1.0, &cfg(10)).unwrap_err().class(),
            "DomainError"
        );
    }

    #[test]
    fn single_precision_paths() {
        let m = DiffusionModel::<f32>::neutral_wright_fisher();
        assert!(simulate_path(&m, 0.5f32, &cfg(1), 0).is_ok());
    }
}
