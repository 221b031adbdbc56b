use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use driftgreen::diffusion::Conditioning;
use driftgreen::games::DiploidMode;

use crate::job::{
    Format, JobSpec, ModelSpec, NamedPsi, OutputSpec, Ploidy, PsiSpec, Sigma2Name, Sigma2Spec,
};

/// Hitting probabilities, hitting times, Green functions and site-frequency
/// spectra of allele-frequency diffusions under frequency-dependent selection.
///
/// Results are printed as one JSON object. Exit status is 2 for usage errors
/// and 3 when a quantity diverges or a computation does not converge.
#[derive(Debug, Parser)]
#[command(name = "driftgreen", version)]
pub struct Cli {
    /// JSON job file; flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    pub job: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Probability of fixation and its first-order derivative in alpha.
    Fixation(PointArgs),
    /// Unconditional and conditioned absorption times.
    Times(TimesArgs),
    /// Green function, plain and conditioned on fixation or loss.
    Green(GreenArgs),
    /// Site-frequency spectrum of new mutations.
    Spectrum(PointArgs),
    /// Selection coefficients of a 2x2 game and its invasion rule.
    Game(GameArgs),
    /// Euler-Maruyama Monte Carlo estimates.
    Mc(McArgs),
    /// First-order report of a model, or the diploid rule coefficients.
    Report(ReportArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Fixation(_) => "fixation",
            Command::Times(_) => "times",
            Command::Green(_) => "green",
            Command::Spectrum(_) => "spectrum",
            Command::Game(_) => "game",
            Command::Mc(_) => "mc",
            Command::Report(_) => "report",
        }
    }
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Selection strength.
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,

    /// Coefficients of psi in ascending powers; `1,-2` is 1 - 2x.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with_all = ["monomial", "one_minus"])]
    pub psi: Option<Vec<f64>>,

    /// psi = x^k, given as `k=2`.
    #[arg(long, value_name = "k=K", value_parser = parse_power, conflicts_with = "one_minus")]
    pub monomial: Option<u32>,

    /// psi = (1 - x)^k, given as `k=1`.
    #[arg(long, value_name = "k=K", value_parser = parse_power)]
    pub one_minus: Option<u32>,

    /// `wright-fisher` (default) or polynomial coefficients of sigma^2.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_sigma2)]
    pub sigma2: Option<Sigma2Spec>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Sweep one variable: `x=0.1:0.9:9`, `y=...` or `alpha=...`.
    #[arg(long, value_name = "VAR=START:STOP:COUNT")]
    pub grid: Option<String>,

    /// Write the result to a file instead of standard output.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

#[derive(Debug, Args)]
pub struct PointArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Initial frequency.
    #[arg(long)]
    pub x: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct TimesArgs {
    #[command(flatten)]
    pub point: PointArgs,
    /// Which time a sweep reports.
    #[arg(long, value_enum)]
    pub conditioning: Option<ConditioningArg>,
}

#[derive(Debug, Args)]
pub struct GreenArgs {
    #[command(flatten)]
    pub point: PointArgs,
    /// Frequency at which occupation time is measured.
    #[arg(long)]
    pub y: Option<f64>,
    /// Which kernel a sweep reports.
    #[arg(long, value_enum)]
    pub conditioning: Option<ConditioningArg>,
}

#[derive(Debug, Args)]
pub struct GameArgs {
    /// Payoffs `a,b,c,d` of S1 and S2 against (S1, S2).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub payoff: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    pub ploidy: Option<PloidyArg>,
    /// Diploid dominance mode.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Also evaluate the invasion rule at initial frequency `--x`.
    #[arg(long)]
    pub rule: bool,
    /// Initial frequency for the rule (default 0).
    #[arg(long)]
    pub x: Option<f64>,
}

#[derive(Debug, Args)]
pub struct McArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub x: Option<f64>,
    /// Number of paths (default 10000).
    #[arg(long)]
    pub paths: Option<usize>,
    /// Time step (default 1e-4).
    #[arg(long)]
    pub dt: Option<f64>,
    /// Random seed (default 0).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Paths still running at this time are censored (default 1e4).
    #[arg(long)]
    pub max_time: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub x: Option<f64>,
    /// Report the rule coefficients of a diploid game instead.
    #[arg(long, value_enum)]
    pub diploid: Option<ModeArg>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ConditioningArg {
    None,
    Up,
    Down,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum PloidyArg {
    Haploid,
    Diploid,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    Dominant,
    Recessive,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        }
    }
}

impl From<ConditioningArg> for Conditioning {
    fn from(c: ConditioningArg) -> Self {
        match c {
            ConditioningArg::None => Conditioning::None,
            ConditioningArg::Up => Conditioning::Up,
            ConditioningArg::Down => Conditioning::Down,
        }
    }
}

impl From<PloidyArg> for Ploidy {
    fn from(p: PloidyArg) -> Self {
        match p {
            PloidyArg::Haploid => Ploidy::Haploid,
            PloidyArg::Diploid => Ploidy::Diploid,
        }
    }
}

impl From<ModeArg> for DiploidMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Dominant => DiploidMode::Dominant,
            ModeArg::Recessive => DiploidMode::Recessive,
        }
    }
}

fn parse_power(s: &str) -> Result<u32, String> {
    let k = s.strip_prefix("k=").unwrap_or(s);
    k.parse()
        .map_err(|_| format!("expected k=<non-negative integer>, got {s:?}"))
}

fn parse_sigma2(s: &str) -> Result<Sigma2Spec, String> {
    match s.to_ascii_lowercase().replace('_', "-").as_str() {
        "wf" | "wright-fisher" => return Ok(Sigma2Spec::Named(Sigma2Name::WrightFisher)),
        _ => {}
    }
    s.split(',')
        .map(|c| {
            c.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad sigma2 coefficient {c:?}"))
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Sigma2Spec::Coefficients)
}

fn set<T>(slot: &mut Option<T>, flag: Option<T>) {
    if flag.is_some() {
        *slot = flag;
    }
}

impl ModelArgs {
    fn apply(&self, m: &mut ModelSpec) {
        set(&mut m.alpha, self.alpha);
        set(&mut m.psi, self.psi.clone().map(PsiSpec::Coefficients));
        set(
            &mut m.psi,
            self.monomial.map(|k| PsiSpec::Named(NamedPsi::Monomial(k))),
        );
        set(
            &mut m.psi,
            self.one_minus
                .map(|k| PsiSpec::Named(NamedPsi::OneMinus(k))),
        );
        set(&mut m.sigma2, self.sigma2.clone());
    }
}

impl OutputArgs {
    fn apply(&self, job: &mut JobSpec) {
        set(&mut job.task.grid, self.grid.clone());
        let o: &mut OutputSpec = &mut job.output;
        set(&mut o.path, self.out.clone());
        set(&mut o.format, self.format.map(Format::from));
    }
}

impl PointArgs {
    fn apply(&self, job: &mut JobSpec) {
        self.model.apply(&mut job.model);
        set(&mut job.task.x, self.x);
        self.output.apply(job);
    }
}

impl Command {
    /// Writes every flag that was given over `job`.
    pub fn apply(&self, job: &mut JobSpec) -> Result<(), String> {
        match self {
            Command::Fixation(a) | Command::Spectrum(a) => a.apply(job),
            Command::Times(a) => {
                a.point.apply(job);
                set(
                    &mut job.task.conditioning,
                    a.conditioning.map(Conditioning::from),
                );
            }
            Command::Green(a) => {
                a.point.apply(job);
                set(&mut job.task.y, a.y);
                set(
                    &mut job.task.conditioning,
                    a.conditioning.map(Conditioning::from),
                );
            }
            Command::Game(a) => {
                if let Some(p) = &a.payoff {
                    let p: [f64; 4] = p.as_slice().try_into().map_err(|_| {
                        format!("--payoff needs four values a,b,c,d, got {}", p.len())
                    })?;
                    job.task.payoff = Some(p);
                }
                set(&mut job.task.ploidy, a.ploidy.map(Ploidy::from));
                set(&mut job.task.mode, a.mode.map(DiploidMode::from));
                if a.rule {
                    job.task.rule = Some(true);
                }
                set(&mut job.task.x, a.x);
            }
            Command::Mc(a) => {
                a.model.apply(&mut job.model);
                set(&mut job.task.x, a.x);
                set(&mut job.task.paths, a.paths);
                set(&mut job.task.dt, a.dt);
                set(&mut job.task.seed, a.seed);
                set(&mut job.task.max_time, a.max_time);
            }
            Command::Report(a) => {
                a.model.apply(&mut job.model);
                set(&mut job.task.x, a.x);
                set(&mut job.task.diploid, a.diploid.map(DiploidMode::from));
            }
        }
        Ok(())
    }
}
