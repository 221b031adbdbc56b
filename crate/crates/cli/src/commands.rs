use std::fs;
use std::path::Path;

use driftgreen::diffusion::{Conditioning, Diffusion};
use driftgreen::games::{
    diploid_comparison_table, diploid_rule_coefficients, haploid_psi, invasion_rule, DiploidCase,
    DiploidMode, LinearForm, LinearPsi, PayoffMatrix, Verdict,
};
use driftgreen::montecarlo::{estimate, SimConfig};
use driftgreen::perturbation::{FirstOrder, WfFirstOrder};
use driftgreen::poly::Polynomial;
use driftgreen::{QuadConfig, Rational, Solver};
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::args::{Cli, Command};
use crate::curve::{Curve, Grid, GridVar};
use crate::decimal::{rational_from_f64, to_f64};
use crate::failure::{Failure, EXIT_USAGE};
use crate::job::{Format, JobSpec, OutputSpec, Ploidy, ResolvedModel, TaskSpec};
use crate::Emitted;

/// Failed sweep points listed individually on standard error.
const LISTED_FAILURES: usize = 5;

enum Output {
    Json(Value),
    Sweep(Sweep),
}

struct Sweep {
    curve: Curve,
    errors: Vec<(String, Failure)>,
}

pub fn execute(cli: &Cli) -> Result<Emitted, Failure> {
    let mut job = match &cli.job {
        Some(path) => JobSpec::from_json(&read(path)?)?,
        None => JobSpec::default(),
    };
    cli.command.apply(&mut job).map_err(Failure::usage)?;
    let mut warnings = Vec::new();
    let output = match &cli.command {
        Command::Fixation(_) => curve_or_point(&job, Quantity::Fixation)?,
        Command::Spectrum(_) => curve_or_point(&job, Quantity::Spectrum)?,
        Command::Times(_) => curve_or_point(&job, Quantity::Time(conditioning(&job.task)))?,
        Command::Green(_) => curve_or_point(&job, Quantity::Green(conditioning(&job.task)))?,
        Command::Game(_) => Output::Json(game(&job.task)?),
        Command::Mc(_) => Output::Json(monte_carlo(&job, &mut warnings)?),
        Command::Report(_) => Output::Json(report(&job)?),
    };
    let mut emitted = deliver(output, &job.output)?;
    warnings.append(&mut emitted.stderr);
    emitted.stderr = warnings;
    Ok(emitted)
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text)
        .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

fn deliver(output: Output, spec: &OutputSpec) -> Result<Emitted, Failure> {
    let format = spec.format.unwrap_or(Format::Json);
    let (text, summary, exit, stderr) = match output {
        Output::Json(_) if format == Format::Csv => {
            return Err(Failure::usage(
                "CSV output is only available for --grid sweeps",
            ));
        }
        Output::Json(v) => (format!("{v}\n"), json!({}), 0, Vec::new()),
        Output::Sweep(s) => {
            let failed = s.curve.failed_rows();
            let text = match format {
                Format::Csv => s.curve.to_csv(),
                Format::Json => format!(
                    "{}\n",
                    json!({ "columns": s.curve.columns, "rows": s.curve.rows, "failed": failed })
                ),
            };
            let exit = s.errors.iter().map(|(_, f)| f.exit).max().unwrap_or(0);
            let mut stderr: Vec<String> = s
                .errors
                .iter()
                .take(LISTED_FAILURES)
                .map(|(at, f)| format!("driftgreen: {at}: {}: {}", f.class, f.message))
                .collect();
            if s.errors.len() > LISTED_FAILURES {
                stderr.push(format!(
                    "driftgreen: {} more grid points failed",
                    s.errors.len() - LISTED_FAILURES
                ));
            }
            let summary = json!({ "rows": s.curve.rows.len(), "failed": failed });
            (text, summary, exit, stderr)
        }
    };
    let stdout = match &spec.path {
        None => text,
        Some(path) => {
            write(path, &text)?;
            let mut summary = summary;
            summary["out"] = json!(path.display().to_string());
            format!("{summary}\n")
        }
    };
    Ok(Emitted {
        stdout,
        stderr,
        exit,
    })
}

fn conditioning(task: &TaskSpec) -> Conditioning {
    task.conditioning.unwrap_or(Conditioning::None)
}

fn require(v: Option<f64>, name: &str) -> Result<f64, Failure> {
    match v {
        Some(v) if v.is_finite() => Ok(v),
        Some(v) => Err(Failure::usage(format!(
            "--{name} = {v} is not a finite number"
        ))),
        None => Err(Failure::usage(format!("--{name} is required"))),
    }
}

fn exact(v: f64, name: &str) -> Result<Rational, Failure> {
    rational_from_f64(v)
        .ok_or_else(|| Failure::usage(format!("{name} = {v} is not a finite number")))
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Quantity {
    Fixation,
    Spectrum,
    Time(Conditioning),
    Green(Conditioning),
}

impl Quantity {
    fn grid_vars(self) -> &'static [GridVar] {
        match self {
            Quantity::Green(_) => &[GridVar::X, GridVar::Y, GridVar::Alpha],
            _ => &[GridVar::X, GridVar::Alpha],
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Point {
    alpha: f64,
    x: f64,
    y: f64,
}

impl Point {
    fn with(mut self, var: GridVar, v: f64) -> Self {
        match var {
            GridVar::X => self.x = v,
            GridVar::Y => self.y = v,
            GridVar::Alpha => self.alpha = v,
        }
        self
    }
}

/// Solvers shared by all points of a command: the model at its own `α`
/// (unless `α` is swept), the neutral model and the first-order expansion.
struct Setup {
    model: ResolvedModel,
    cfg: QuadConfig,
    base: Option<Solver>,
    neutral: Solver,
    first: FirstOrder<f64>,
}

impl Setup {
    fn new(model: ResolvedModel, with_base: bool) -> Result<Self, Failure> {
        let cfg = QuadConfig::default();
        let base = match with_base {
            true => Some(Diffusion::new(model.model()?, cfg)?),
            false => None,
        };
        Ok(Setup {
            neutral: Diffusion::new(model.at_alpha(0.0)?, cfg)?,
            first: FirstOrder::new(&model.psi, &model.sigma2, &cfg)?,
            base,
            model,
            cfg,
        })
    }

    fn solve<R>(
        &self,
        alpha: f64,
        f: impl FnOnce(&Solver) -> driftgreen::Result<R>,
    ) -> driftgreen::Result<R> {
        match &self.base {
            Some(s) if s.model().alpha() == alpha => f(s),
            _ => f(&Diffusion::new(self.model.at_alpha(alpha)?, self.cfg)?),
        }
    }

    /// The exact value and its first-order prediction. Times and kernels
    /// use the small-`x` form of the first-order term.
    fn evaluate(&self, q: Quantity, p: Point) -> driftgreen::Result<(f64, f64)> {
        let (a, x, y) = (p.alpha, p.x, p.y);
        let (n, fo) = (&self.neutral, &self.first);
        let per_x = |c: Conditioning| if c == Conditioning::Up { 1.0 } else { x };
        self.solve(a, |s| {
            Ok(match q {
                Quantity::Fixation => {
                    (s.hit_prob_up(x)?, n.hit_prob_up(x)? + a * fo.d_fixation(x)?)
                }
                Quantity::Spectrum => (
                    s.frequency_spectrum(x)?,
                    n.frequency_spectrum(x)? + a * fo.d_spectrum(x)?,
                ),
                Quantity::Time(c) => (
                    s.absorption_time_conditioned(x, c)?,
                    n.absorption_time_conditioned(x, c)? + a * per_x(c) * fo.d_time(c)?,
                ),
                Quantity::Green(c) => (
                    s.green(x, y, c)?,
                    n.green(x, y, c)? + a * per_x(c) * fo.d_green(y, c)?,
                ),
            })
        })
    }

    fn sweep(&self, q: Quantity, grid: &Grid, base: Point) -> Sweep {
        let results: Vec<_> = grid
            .values
            .par_iter()
            .map(|&v| (v, self.evaluate(q, base.with(grid.var, v))))
            .collect();
        let mut rows = Vec::with_capacity(results.len());
        let mut errors = Vec::new();
        for (v, r) in results {
            match r {
                Ok((e, f)) => rows.push(vec![Some(v), Some(e), Some(f), Some(e - f)]),
                Err(err) => {
                    rows.push(vec![Some(v), None, None, None]);
                    errors.push((format!("{}={v}", grid.var.name()), Failure::from(err)));
                }
            }
        }
        let columns = [grid.var.name(), "exact", "first_order", "difference"];
        Sweep {
            curve: Curve {
                columns: columns.iter().map(|c| c.to_string()).collect(),
                rows,
            },
            errors,
        }
    }
}

fn curve_or_point(job: &JobSpec, q: Quantity) -> Result<Output, Failure> {
    let model = job.model.resolve()?;
    let task = &job.task;
    let grid = match &task.grid {
        Some(g) => {
            let g: Grid = g.parse().map_err(Failure::usage)?;
            if !q.grid_vars().contains(&g.var) {
                return Err(Failure::usage(format!(
                    "this command cannot sweep {}",
                    g.var.name()
                )));
            }
            Some(g)
        }
        None => None,
    };
    let swept = |v: GridVar| grid.as_ref().is_some_and(|g| g.var == v);
    let x = if swept(GridVar::X) {
        0.0
    } else {
        require(task.x, "x")?
    };
    let y = match q {
        Quantity::Green(_) if !swept(GridVar::Y) => require(task.y, "y")?,
        _ => 0.0,
    };
    let alpha = model.alpha;
    let setup = Setup::new(model, !swept(GridVar::Alpha))?;
    let point = Point { alpha, x, y };
    if let Some(g) = grid {
        return Ok(Output::Sweep(setup.sweep(q, &g, point)));
    }
    let s = setup.base.as_ref().expect("built for point evaluation");
    let fo = &setup.first;
    let v = match q {
        Quantity::Fixation => json!({
            "x": x,
            "alpha": alpha,
            "p_up": s.hit_prob_up(x)?,
            "p_down": s.hit_prob_down(x)?,
            "d_fixation": fo.d_fixation(x)?,
        }),
        Quantity::Spectrum => json!({
            "x": x,
            "alpha": alpha,
            "f": s.frequency_spectrum(x)?,
            "d_spectrum": fo.d_spectrum(x)?,
        }),
        Quantity::Time(_) => {
            let h = s.hitting_summary(x)?;
            json!({
                "x": x,
                "alpha": alpha,
                "p_up": h.p_up,
                "p_down": h.p_down,
                "e_t": h.e_t,
                "e_t_up": h.e_t_up,
                "e_t_down": h.e_t_down,
                "e_t_up_from_zero": s.absorption_time_up_from_zero()?,
                "first_order": {
                    "d_time_unconditional_per_x": fo.d_time_unconditional()?,
                    "d_time_cond_up_at_0": fo.d_time_cond_up()?,
                    "d_time_cond_down_per_x": fo.d_time_cond_down()?,
                },
            })
        }
        Quantity::Green(_) => {
            let g = |c| s.green(x, y, c);
            let d = |c| fo.d_green(y, c);
            json!({
                "x": x,
                "y": y,
                "alpha": alpha,
                "none": g(Conditioning::None)?,
                "up": g(Conditioning::Up)?,
                "down": g(Conditioning::Down)?,
                "d_green": {
                    "none_per_x": d(Conditioning::None)?,
                    "up_at_0": d(Conditioning::Up)?,
                    "down_per_x": d(Conditioning::Down)?,
                },
            })
        }
    };
    Ok(Output::Json(v))
}

fn strings(p: &Polynomial<Rational>) -> Vec<String> {
    p.coeffs().iter().map(|c| c.to_string()).collect()
}

fn floats(p: &Polynomial<Rational>) -> Vec<f64> {
    p.coeffs().iter().map(to_f64).collect()
}

fn verdict(margin: &Rational) -> Verdict {
    if margin.is_zero() {
        Verdict::Neutral
    } else if margin.is_positive() {
        Verdict::Favored
    } else {
        Verdict::Disfavored
    }
}

/// Sign of the first-order gain in fixation probability at `x` for a
/// diploid game, measured as `∂_α P_x / (x(1 - x))` (its limit at `x = 0`).
fn diploid_rule(psi: &Polynomial<Rational>, x: &Rational) -> Result<(Verdict, Rational), Failure> {
    if x.is_negative() || *x >= Rational::one() {
        return Err(driftgreen::Error::Domain(format!("x = {x} must lie in [0, 1)")).into());
    }
    let w = WfFirstOrder::new(psi)?;
    let reduced = w
        .fixation
        .div_wright_fisher()
        .expect("the fixation derivative vanishes at both boundaries");
    let margin = reduced.eval(x);
    Ok((verdict(&margin), margin))
}

fn game(task: &TaskSpec) -> Result<Value, Failure> {
    let p = task
        .payoff
        .ok_or_else(|| Failure::usage("--payoff a,b,c,d is required"))?;
    let [a, b, c, d] = p.map(|v| exact(v, "payoff"));
    let m = PayoffMatrix::new(a?, b?, c?, d?);
    let ploidy = task.ploidy.unwrap_or(Ploidy::Haploid);
    let (beta, gamma, psi, mode) = match ploidy {
        Ploidy::Haploid => {
            let lp = haploid_psi(&m);
            let poly = lp.polynomial();
            (lp.beta, lp.gamma, poly, None)
        }
        Ploidy::Diploid => {
            let mode = task
                .mode
                .ok_or_else(|| Failure::usage("diploid games need --mode dominant or recessive"))?;
            let case = DiploidCase::new(&m, mode);
            let poly = case.polynomial();
            (case.beta, case.gamma, poly, Some(mode))
        }
    };
    let mut out = json!({
        "ploidy": ploidy,
        "mode": mode,
        "beta": to_f64(&beta),
        "gamma": to_f64(&gamma),
        "psi": floats(&psi),
        "exact": {
            "beta": beta.to_string(),
            "gamma": gamma.to_string(),
            "psi": strings(&psi),
        },
    });
    if task.rule == Some(true) {
        let x = task.x.unwrap_or(0.0);
        let xq = exact(x, "x")?;
        let (verdict, margin) = match ploidy {
            Ploidy::Haploid => {
                let inv = invasion_rule(&LinearPsi::new(beta, gamma), &xq)?;
                (inv.verdict, inv.margin)
            }
            Ploidy::Diploid => diploid_rule(&psi, &xq)?,
        };
        out["x"] = json!(x);
        out["verdict"] = json!(verdict);
        out["margin"] = json!(to_f64(&margin));
        out["exact"]["margin"] = json!(margin.to_string());
    }
    Ok(out)
}

fn monte_carlo(job: &JobSpec, warnings: &mut Vec<String>) -> Result<Value, Failure> {
    let task = &job.task;
    let x = require(task.x, "x")?;
    let resolved = job.model.resolve()?;
    let model = resolved.model()?;
    let defaults = SimConfig::default();
    let cfg = SimConfig {
        dt: task.dt.unwrap_or(defaults.dt),
        n_paths: task.paths.unwrap_or(defaults.n_paths),
        seed: task.seed.unwrap_or(defaults.seed),
        max_time: task.max_time.unwrap_or(defaults.max_time),
        workers: None,
    };
    let est = estimate(&model, x, &cfg)?;
    if est.n_censored > 0 {
        warnings.push(format!(
            "driftgreen: warning: {} of {} paths were still running at max_time = {} and are excluded",
            est.n_censored, est.n_paths, cfg.max_time
        ));
    }
    let reference = Diffusion::new(model, QuadConfig::default())
        .and_then(|s| s.hitting_summary(x))
        .ok();
    Ok(json!({
        "x": x,
        "alpha": resolved.alpha,
        "dt": cfg.dt,
        "n_paths": cfg.n_paths,
        "seed": cfg.seed,
        "max_time": cfg.max_time,
        "estimates": est,
        "diffusion": reference,
    }))
}

fn report(job: &JobSpec) -> Result<Value, Failure> {
    if let Some(mode) = job.task.diploid {
        return diploid_report(mode);
    }
    let x = require(job.task.x, "x")?;
    let model = job.model.resolve()?;
    let cfg = QuadConfig::default();
    let fo = FirstOrder::new(&model.psi, &model.sigma2, &cfg)?;
    let r = fo.report(x)?;
    let exact = match model.exact_wright_fisher() {
        Some(psi) => {
            let xq = exact(x, "x")?;
            let w = WfFirstOrder::new(psi)?;
            let e = w.at(&xq);
            let sigma2 = xq.clone() * (Rational::one() - xq.clone());
            json!({
                "x": xq.to_string(),
                "d_fixation": e.d_fixation.to_string(),
                "d_time_unconditional_per_x": e.d_time_unconditional_per_x.to_string(),
                "d_time_cond_up_at_0": e.d_time_cond_up_at_0.to_string(),
                "d_time_cond_down_per_x": e.d_time_cond_down_per_x.to_string(),
                "d_spectrum": e.d_spectrum.to_string(),
                "d_conditioned_drift": (w.drift_ratio.eval(&xq) * sigma2).to_string(),
            })
        }
        None => Value::Null,
    };
    Ok(json!({
        "x": x,
        "first_order": {
            "d_fixation": r.d_fixation,
            "d_time_unconditional_per_x": r.d_time_unconditional_per_x,
            "d_time_cond_up_at_0": r.d_time_cond_up_at_0,
            "d_time_cond_down_per_x": r.d_time_cond_down_per_x,
            "d_spectrum": r.d_spectrum,
            "d_conditioned_drift": fo.d_conditioned_drift(x)?,
        },
        "exact": exact,
    }))
}

fn diploid_report(mode: DiploidMode) -> Result<Value, Failure> {
    let c = diploid_rule_coefficients(mode)?;
    let form = |f: &LinearForm<Rational>| json!({ "beta": f.beta.to_string(), "gamma": f.gamma.to_string() });
    let comparison: Vec<_> = diploid_comparison_table()?
        .into_iter()
        .filter(|r| r.mode == mode)
        .collect();
    Ok(json!({
        "mode": mode,
        "fixation": form(&c.fixation),
        "time_unconditional": form(&c.time_unconditional),
        "time_cond_up": form(&c.time_cond_up),
        "time_cond_down": form(&c.time_cond_down),
        "spectrum": {
            "beta": strings(&c.spectrum.beta),
            "gamma": strings(&c.spectrum.gamma),
        },
        "comparison": comparison,
    }))
}

/// Applies `DRIFTGREEN_THREADS` to the global worker pool.
pub fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("DRIFTGREEN_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        Failure::new(
            "UsageError",
            format!("DRIFTGREEN_THREADS = {v:?} is not a positive integer"),
            EXIT_USAGE,
        )
    })?;
    // Already built by an earlier call in the same process.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}
