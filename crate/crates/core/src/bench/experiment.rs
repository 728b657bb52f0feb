use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use log::info;
use serde::{Deserialize, Serialize};

use super::eval::{run_evaluation, EvalBudget};
use super::report::{write_csv, EvalRow, SummaryRow};
use super::BenchError;
use crate::env::{parse_config, preset_document, Action, Network, Preset, Scale};
use crate::heuristics::{da_levels, tune_base_stock, write_params, BaseStockPolicy, DaPolicy, HeuristicRecord};
use crate::parl::{parl_train, FixedPolicy, ParlHyper, QuantileWeighting, SamplingConfig, SamplingScheme};
use crate::solver::{BnbOptions, StepMethod};
use crate::valuenet::{critic_to_text, FitHyper};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Parl,
    BaseStock,
    Da,
    Fixed,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Parl => "parl",
            Method::BaseStock => "bs",
            Method::Da => "da",
            Method::Fixed => "fixed",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = BenchError;
    fn from_str(s: &str) -> Result<Self, BenchError> {
        match s.to_ascii_lowercase().as_str() {
            "parl" => Ok(Method::Parl),
            "bs" | "base-stock" => Ok(Method::BaseStock),
            "da" => Ok(Method::Da),
            "fixed" => Ok(Method::Fixed),
            _ => Err(BenchError::UnknownMethod(s.to_string())),
        }
    }
}

/// PARL hyperparameters as written in a spec; absent keys keep defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParlSection {
    pub gamma: Option<f64>,
    pub epsilon: Option<f64>,
    pub steps: Option<usize>,
    pub paths: Option<usize>,
    pub iterations: Option<usize>,
    pub hidden: Option<Vec<usize>>,
    pub eta: Option<usize>,
    pub scheme: Option<String>,
    pub weighting: Option<String>,
    pub epochs: Option<usize>,
    pub step_size: Option<f64>,
    pub batch_size: Option<usize>,
    pub warm_start: Option<bool>,
    pub threads: Option<usize>,
    /// `auto`, `bnb` or `enumeration`.
    pub solver: Option<String>,
    pub time_limit_secs: Option<f64>,
    pub enumeration_cap: Option<u64>,
}

impl ParlSection {
    pub fn hyper(&self) -> Result<ParlHyper, BenchError> {
        let d = ParlHyper::default();
        let bad = |e: String| BenchError::Spec(e);
        let sampling = SamplingConfig {
            scheme: match &self.scheme {
                Some(s) => s.parse::<SamplingScheme>().map_err(bad)?,
                None => d.sampling.scheme,
            },
            eta: self.eta.unwrap_or(d.sampling.eta),
            weighting: match &self.weighting {
                Some(s) => s.parse::<QuantileWeighting>().map_err(bad)?,
                None => d.sampling.weighting,
            },
        };
        let options = BnbOptions {
            time_limit: self.time_limit_secs.map_or(BnbOptions::default().time_limit, Duration::from_secs_f64),
            ..BnbOptions::default()
        };
        let cap = self.enumeration_cap.map_or(20_000, u128::from);
        let method = match self.solver.as_deref().unwrap_or("auto") {
            "auto" => StepMethod::Auto { cap, options },
            "bnb" => StepMethod::BranchAndBound { options, model: Default::default() },
            "enumeration" => StepMethod::Enumeration { cap },
            other => return Err(BenchError::Spec(format!("unknown solver `{other}`"))),
        };
        let fit = FitHyper {
            epochs: self.epochs.unwrap_or(d.fit.epochs),
            step_size: self.step_size.unwrap_or(d.fit.step_size),
            batch_size: self.batch_size.unwrap_or(d.fit.batch_size),
            ..d.fit
        };
        let h = ParlHyper {
            gamma: self.gamma.unwrap_or(d.gamma),
            sampling,
            epsilon: self.epsilon.unwrap_or(d.epsilon),
            steps: self.steps.unwrap_or(d.steps),
            paths: self.paths.unwrap_or(d.paths),
            iterations: self.iterations.unwrap_or(d.iterations),
            hidden: self.hidden.clone().unwrap_or(d.hidden),
            fit,
            method,
            warm_start: self.warm_start.unwrap_or(d.warm_start),
            threads: self.threads.unwrap_or(d.threads),
        };
        h.validate()?;
        Ok(h)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetSection {
    pub runs: usize,
    pub episodes: usize,
    pub steps: usize,
    pub seed: u64,
}

impl From<BudgetSection> for EvalBudget {
    fn from(b: BudgetSection) -> Self {
        EvalBudget { runs: b.runs, episodes: b.episodes, steps: b.steps, seed: b.seed }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedSection {
    pub action: Vec<i64>,
}

/// An experiment file: environment, methods, seeds and budgets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: Option<String>,
    /// Preset name such as `1s-3r`.
    pub env: Option<String>,
    /// `desk` or `paper`.
    pub scale: Option<String>,
    /// Path of a network document, relative to the spec file.
    pub network: Option<String>,
    pub methods: Vec<String>,
    /// One PARL training run per seed.
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    pub eval: Option<BudgetSection>,
    /// Grid-search budget for base stock.
    pub tuning: Option<BudgetSection>,
    #[serde(default)]
    pub parl: ParlSection,
    pub fixed: Option<FixedSection>,
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

impl ExperimentSpec {
    pub fn parse(text: &str) -> Result<Self, BenchError> {
        let spec: ExperimentSpec = toml::from_str(text).map_err(|e| BenchError::Spec(e.to_string()))?;
        if spec.methods.is_empty() {
            return Err(BenchError::Spec("no methods listed".into()));
        }
        if spec.seeds.is_empty() {
            return Err(BenchError::Spec("empty seed list".into()));
        }
        for m in &spec.methods {
            m.parse::<Method>()?;
        }
        if spec.env.is_some() == spec.network.is_some() {
            return Err(BenchError::Spec("give exactly one of `env` and `network`".into()));
        }
        Ok(spec)
    }

    pub fn network_document(&self, base: &Path) -> Result<String, BenchError> {
        if let Some(path) = &self.network {
            return Ok(fs::read_to_string(base.join(path))?);
        }
        let env = self.env.as_deref().expect("checked at parse");
        let p: Preset = env.parse().map_err(BenchError::Spec)?;
        let scale: Scale = self.scale.as_deref().unwrap_or("desk").parse().map_err(BenchError::Spec)?;
        Ok(preset_document(p, scale))
    }
}

pub fn load_network(doc: &str) -> Result<Network, BenchError> {
    Ok(Network::new(parse_config(doc)?)?)
}

/// Runs every method of `spec` and writes its artifacts under `out`.
/// Returns the summary rows in method order.
pub fn run_experiment_spec(spec: &ExperimentSpec, base: &Path, out: &Path) -> Result<Vec<SummaryRow>, BenchError> {
    fs::create_dir_all(out)?;
    let doc = spec.network_document(base)?;
    let net = load_network(&doc)?;
    fs::write(out.join("network.cfg"), &doc)?;
    fs::write(out.join("experiment.toml"), toml::to_string(spec).map_err(|e| BenchError::Spec(e.to_string()))?)?;
    let budget: EvalBudget = spec.eval.map(Into::into).unwrap_or_default();
    let mut summaries = Vec::new();
    for m in &spec.methods {
        let method: Method = m.parse()?;
        info!("running {method}");
        let mut rows = Vec::new();
        match method {
            Method::Parl => {
                let hyper = spec.parl.hyper()?;
                let mut curve = Vec::new();
                for &seed in &spec.seeds {
                    let outcome = parl_train(&net, &hyper, seed)?;
                    curve.extend(outcome.curve.iter().map(|c| (seed, c.clone())));
                    let critic = outcome.critics.last().expect("at least one iteration");
                    fs::write(out.join(format!("critic_seed{seed}.txt")), critic_to_text(critic))?;
                    let policy = outcome.policy(&net)?;
                    rows.extend(EvalRow::from_report("parl", Some(seed), &run_evaluation(&net, &policy, &budget)));
                }
                let flat: Vec<CurveCsv> = curve.into_iter().map(|(seed, c)| CurveCsv::new(seed, &c)).collect();
                write_csv(&out.join("learning_curve.csv"), &flat)?;
            }
            Method::BaseStock => {
                let tuning: EvalBudget = spec.tuning.map(Into::into).unwrap_or(budget);
                let (params, grids) = tune_base_stock(&net, &tuning)?;
                let mut f = fs::File::create(out.join("params_bs.jsonl"))?;
                write_params(&mut f, &HeuristicRecord::from_base_stock(&net, &params))?;
                let grid_rows: Vec<GridCsv> = grids
                    .iter()
                    .enumerate()
                    .flat_map(|(k, g)| {
                        g.evaluated.iter().map(move |p| GridCsv { link: k, s: p.pair.s, big_s: p.pair.big_s, mean_reward: p.mean_reward })
                    })
                    .collect();
                write_csv(&out.join("grid_bs.csv"), &grid_rows)?;
                rows = EvalRow::from_report("bs", None, &run_evaluation(&net, &BaseStockPolicy { params }, &budget));
            }
            Method::Da => {
                let levels = da_levels(&net)?;
                let mut f = fs::File::create(out.join("params_da.jsonl"))?;
                write_params(&mut f, &HeuristicRecord::from_da(&net, &levels))?;
                rows = EvalRow::from_report("da", None, &run_evaluation(&net, &DaPolicy { levels }, &budget));
            }
            Method::Fixed => {
                let action = match &spec.fixed {
                    Some(f) if f.action.len() == net.num_links() => Action(f.action.clone()),
                    Some(f) => {
                        return Err(BenchError::Spec(format!(
                            "fixed action has {} entries for {} links",
                            f.action.len(),
                            net.num_links()
                        )))
                    }
                    None => Action::zeros(&net),
                };
                rows = EvalRow::from_report("fixed", None, &run_evaluation(&net, &FixedPolicy(action), &budget));
            }
        }
        write_csv(&out.join(format!("eval_{method}.csv")), &rows)?;
        summaries.push(SummaryRow::from_rows(method.as_str(), &rows));
    }
    write_csv(&out.join("summary.csv"), &summaries)?;
    Ok(summaries)
}

pub fn run_experiment(path: &Path, out: &Path) -> Result<Vec<SummaryRow>, BenchError> {
    let spec = ExperimentSpec::parse(&fs::read_to_string(path)?)?;
    let base: PathBuf = path.parent().map(Path::to_path_buf).unwrap_or_default();
    run_experiment_spec(&spec, &base, out)
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CurveCsv {
    pub seed: u64,
    pub iteration: usize,
    pub env_steps: usize,
    pub mean: f64,
    pub median: f64,
    pub std: f64,
    pub seconds: f64,
}

impl CurveCsv {
    fn new(seed: u64, c: &crate::parl::CurveRow) -> Self {
        CurveCsv {
            seed,
            iteration: c.iteration,
            env_steps: c.env_steps,
            mean: c.mean,
            median: c.median,
            std: c.std,
            seconds: c.seconds,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct GridCsv {
    link: usize,
    s: i64,
    #[serde(rename = "S")]
    big_s: i64,
    mean_reward: f64,
}
