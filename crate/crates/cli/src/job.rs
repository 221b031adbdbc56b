//! Job files: every command-line parameter in JSON form. Flags given on the
//! command line override the file.

use std::path::PathBuf;

use driftgreen::diffusion::{
    Conditioning, DiffusionCoefficient, DiffusionModel, FrequencyDependence,
};
use driftgreen::games::DiploidMode;
use driftgreen::poly::Polynomial;
use driftgreen::{Model, Psi, Rational, RationalPoly, Sigma2};
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::decimal::rational_from_f64;
use crate::failure::Failure;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    #[serde(default)]
    pub model: ModelSpec,
    #[serde(default)]
    pub task: TaskSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

impl JobSpec {
    pub fn from_json(text: &str) -> Result<Self, Failure> {
        serde_json::from_str(text).map_err(|e| Failure::usage(format!("job file: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("job specs always serialize")
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<PsiSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma2: Option<Sigma2Spec>,
}

/// `[1, -2]` is `1 - 2x`; `{"monomial": k}` is `x^k`; `{"one_minus": k}`
/// is `(1 - x)^k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PsiSpec {
    Coefficients(Vec<f64>),
    Named(NamedPsi),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum NamedPsi {
    Monomial(u32),
    OneMinus(u32),
}

/// `"WRIGHT_FISHER"` or polynomial coefficients in ascending order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Sigma2Spec {
    Named(Sigma2Name),
    Coefficients(Vec<f64>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sigma2Name {
    #[serde(rename = "WRIGHT_FISHER")]
    WrightFisher,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Ploidy {
    Haploid,
    Diploid,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Parameters of the individual subcommands; each reads only its own.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conditioning: Option<Conditioning>,
    /// `var=start:stop:count`
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<String>,
    /// `[a, b, c, d]`
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payoff: Option<[f64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ploidy: Option<Ploidy>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<DiploidMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paths: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_time: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diploid: Option<DiploidMode>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

/// A model ready for the solvers, with an exact copy of `ψ` when its
/// coefficients are known exactly.
#[derive(Clone, Debug)]
pub struct ResolvedModel {
    pub alpha: f64,
    pub psi: Psi,
    pub psi_exact: Option<RationalPoly>,
    pub sigma2: Sigma2,
}

impl ResolvedModel {
    pub fn at_alpha(&self, alpha: f64) -> driftgreen::Result<Model> {
        DiffusionModel::new(alpha, self.psi.clone(), self.sigma2.clone())
    }

    pub fn model(&self) -> driftgreen::Result<Model> {
        self.at_alpha(self.alpha)
    }

    /// `ψ` exactly, but only under Wright–Fisher variance.
    pub fn exact_wright_fisher(&self) -> Option<&RationalPoly> {
        self.psi_exact
            .as_ref()
            .filter(|_| self.sigma2.is_wright_fisher())
    }
}

fn finite(name: &str, v: f64) -> Result<f64, Failure> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Failure::usage(format!(
            "{name} = {v} is not a finite number"
        )))
    }
}

impl ModelSpec {
    /// `α` defaults to 0, `ψ` to 1 and `σ²` to Wright–Fisher.
    pub fn resolve(&self) -> Result<ResolvedModel, Failure> {
        let alpha = finite("alpha", self.alpha.unwrap_or(0.0))?;
        let (psi, psi_exact) = match &self.psi {
            None => (
                Polynomial::constant(1.0),
                Some(Polynomial::constant(Rational::one())),
            ),
            Some(PsiSpec::Coefficients(c)) => {
                if c.is_empty() {
                    return Err(Failure::usage("psi needs at least one coefficient"));
                }
                for &v in c {
                    finite("psi coefficient", v)?;
                }
                let exact = c
                    .iter()
                    .map(|&v| rational_from_f64(v))
                    .collect::<Option<Vec<_>>>();
                (Polynomial::new(c.clone()), exact.map(Polynomial::new))
            }
            Some(PsiSpec::Named(NamedPsi::Monomial(k))) => (
                Polynomial::monomial(*k as usize),
                Some(Polynomial::monomial(*k as usize)),
            ),
            Some(PsiSpec::Named(NamedPsi::OneMinus(k))) => (
                Polynomial::one_minus_x_pow(*k as usize),
                Some(Polynomial::one_minus_x_pow(*k as usize)),
            ),
        };
        let sigma2 = match &self.sigma2 {
            None | Some(Sigma2Spec::Named(Sigma2Name::WrightFisher)) => {
                DiffusionCoefficient::WrightFisher
            }
            Some(Sigma2Spec::Coefficients(c)) => {
                for &v in c {
                    finite("sigma2 coefficient", v)?;
                }
                let p = Polynomial::new(c.clone());
                if p == Polynomial::new(vec![0.0, 1.0, -1.0]) {
                    DiffusionCoefficient::WrightFisher
                } else {
                    DiffusionCoefficient::Polynomial(p)
                }
            }
        };
        Ok(ResolvedModel {
            alpha,
            psi: FrequencyDependence::Polynomial(psi),
            psi_exact,
            sigma2,
        })
    }
}
