use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{info, warn};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use parl_core::bench::{
    compare_sampling, load_network, run_evaluation, run_experiment, write_csv, BenchError, EvalBudget, EvalRow,
    Method, ParlSection, SummaryRow,
};
use parl_core::env::{preset_document, reset, Action, Network, Preset, Scale};
use parl_core::heuristics::{
    base_stock_from_records, da_levels, read_params, tune_base_stock, write_params, BaseStockPolicy, DaPolicy,
    HeuristicRecord,
};
use parl_core::mip::{build_step_problem, export_lp, StepOptions};
use parl_core::parl::{parl_train, quantile_samples, FixedPolicy, GreedyPolicy, ParlHyper, Policy};
use parl_core::valuenet::{critic_from_text, critic_to_text, Critic, ReLUNet};

#[derive(Parser)]
#[command(name = "parl-bench", version, about = "Train and benchmark inventory policies")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Network configuration document; overrides --env.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Built-in network.
    #[arg(long, global = true, default_value = "1s-3r")]
    env: String,
    /// Preset scale: desk or paper.
    #[arg(long, global = true, default_value = "desk")]
    preset: String,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Per-step solver time limit in seconds.
    #[arg(long, global = true, env = "PARL_TIME_LIMIT")]
    time_limit: Option<f64>,
    /// Worker threads for rollouts and evaluation.
    #[arg(long, global = true, env = "PARL_THREADS")]
    threads: Option<usize>,
}

#[derive(Args, Clone, Copy)]
struct BudgetArgs {
    #[arg(long, default_value_t = 10)]
    runs: usize,
    #[arg(long, default_value_t = 20)]
    episodes: usize,
    #[arg(long, default_value_t = 256)]
    steps: usize,
}

impl BudgetArgs {
    fn budget(&self, seed: u64) -> EvalBudget {
        EvalBudget { runs: self.runs, episodes: self.episodes, steps: self.steps, seed }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Train PARL and write the critic and learning curve.
    Train {
        /// TOML file of PARL hyperparameters.
        #[arg(long)]
        hyper: Option<PathBuf>,
    },
    /// Evaluate a policy over paired-seed runs.
    Eval {
        #[arg(long)]
        method: String,
        /// Critic file for `parl`.
        #[arg(long)]
        critic: Option<PathBuf>,
        #[arg(long)]
        hyper: Option<PathBuf>,
        /// JSON-lines parameters for `bs`; tuned when absent.
        #[arg(long)]
        params: Option<PathBuf>,
        /// Comma-separated action for `fixed`.
        #[arg(long, value_delimiter = ',')]
        action: Vec<i64>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Grid-search (s, S) for every link.
    GridBs {
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Compute decomposition-aggregation levels.
    Da,
    /// Train with quantile and with random samples and compare.
    CompareSampling {
        #[arg(long)]
        hyper: Option<PathBuf>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Write the step MILP for a reset state in LP format.
    ExportLp {
        #[arg(long)]
        critic: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        eta: usize,
        #[arg(long, default_value_t = 0.75)]
        gamma: f64,
    },
    /// Run an experiment spec file.
    Run { spec: PathBuf },
}

fn network(c: &Common) -> Result<(Network, String), BenchError> {
    let doc = match &c.config {
        Some(p) => fs::read_to_string(p)?,
        None => {
            let p: Preset = c.env.parse().map_err(BenchError::Spec)?;
            let scale: Scale = c.preset.parse().map_err(BenchError::Spec)?;
            if scale == Scale::Paper {
                warn!("paper-scale networks train for hours on a workstation");
            }
            preset_document(p, scale)
        }
    };
    Ok((load_network(&doc)?, doc))
}

fn hyper(c: &Common, path: Option<&Path>) -> Result<ParlHyper, BenchError> {
    let mut section: ParlSection = match path {
        Some(p) => toml::from_str(&fs::read_to_string(p)?).map_err(|e| BenchError::Spec(e.to_string()))?,
        None => ParlSection::default(),
    };
    if c.time_limit.is_some() {
        section.time_limit_secs = c.time_limit;
    }
    if c.threads.is_some() {
        section.threads = c.threads;
    }
    section.hyper()
}

fn report(method: &str, rows: &[EvalRow]) {
    let s = SummaryRow::from_rows(method, rows);
    println!(
        "{method}: mean {:.3}  median {:.3}  std {:.3}  ({} runs, {} failed)",
        s.mean, s.median, s.std, s.runs, s.failed
    );
}

fn run(cli: Cli) -> Result<(), BenchError> {
    let c = &cli.common;
    if let Some(t) = c.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global() {
            warn!("thread pool already initialized: {e}");
        }
    }
    fs::create_dir_all(&c.out)?;
    match &cli.command {
        Command::Train { hyper: h } => {
            let (net, doc) = network(c)?;
            let hy = hyper(c, h.as_deref())?;
            let outcome = parl_train(&net, &hy, c.seed)?;
            fs::write(c.out.join("network.cfg"), doc)?;
            fs::write(c.out.join("critic.txt"), critic_to_text(outcome.critics.last().expect("one iteration")))?;
            write_csv(&c.out.join("learning_curve.csv"), &outcome.curve)?;
            for row in &outcome.curve {
                println!("iteration {:>3}  steps {:>7}  mean {:.3}", row.iteration, row.env_steps, row.mean);
            }
        }
        Command::Eval { method, critic, hyper: h, params, action, budget } => {
            let (net, _) = network(c)?;
            let m: Method = method.parse()?;
            let policy: Box<dyn Policy> = match m {
                Method::Parl => {
                    let path = critic.as_ref().ok_or_else(|| BenchError::Spec("--critic is required for parl".into()))?;
                    let critic = critic_from_text(&fs::read_to_string(path)?)
                        .map_err(|e| BenchError::Spec(format!("{}: {e}", path.display())))?;
                    let hy = hyper(c, h.as_deref())?;
                    Box::new(GreedyPolicy::new(&net, critic, hy.sampling, hy.gamma, hy.method)?)
                }
                Method::BaseStock => {
                    let params = match params {
                        Some(p) => base_stock_from_records(&net, &read_params(std::io::BufReader::new(fs::File::open(p)?))?)?,
                        None => tune_base_stock(&net, &budget.budget(c.seed))?.0,
                    };
                    Box::new(BaseStockPolicy { params })
                }
                Method::Da => Box::new(DaPolicy { levels: da_levels(&net)? }),
                Method::Fixed => {
                    if action.len() != net.num_links() {
                        return Err(BenchError::Spec(format!("--action needs {} entries", net.num_links())));
                    }
                    Box::new(FixedPolicy(Action(action.clone())))
                }
            };
            let rep = run_evaluation(&net, policy.as_ref(), &budget.budget(c.seed));
            let rows = EvalRow::from_report(m.as_str(), None, &rep);
            write_csv(&c.out.join(format!("eval_{m}.csv")), &rows)?;
            report(m.as_str(), &rows);
        }
        Command::GridBs { budget } => {
            let (net, _) = network(c)?;
            let (params, grids) = tune_base_stock(&net, &budget.budget(c.seed))?;
            let recs = HeuristicRecord::from_base_stock(&net, &params);
            write_params(fs::File::create(c.out.join("params_bs.jsonl"))?, &recs)?;
            for (k, (p, g)) in params.links.iter().zip(&grids).enumerate() {
                println!("{}: s={} S={} (reward {:.3})", net.link(k).name(), p.s, p.big_s, g.mean_reward);
            }
        }
        Command::Da => {
            let (net, _) = network(c)?;
            let levels = da_levels(&net)?;
            let recs = HeuristicRecord::from_da(&net, &levels);
            write_params(fs::File::create(c.out.join("params_da.jsonl"))?, &recs)?;
            write_params(std::io::stdout().lock(), &recs)?;
        }
        Command::CompareSampling { hyper: h, budget } => {
            let (net, _) = network(c)?;
            let rows = compare_sampling(&net, &hyper(c, h.as_deref())?, c.seed, &budget.budget(c.seed))?;
            write_csv(&c.out.join("sampling.csv"), &rows)?;
            for r in &rows {
                println!(
                    "{:<9} reward {:.3} ± {:.3}  train {:.5} s/step",
                    r.scheme, r.mean_reward, r.std_reward, r.train_seconds_per_step
                );
            }
        }
        Command::ExportLp { critic, eta, gamma } => {
            let (net, _) = network(c)?;
            let critic = match critic {
                Some(p) => critic_from_text(&fs::read_to_string(p)?).map_err(|e| BenchError::Spec(e.to_string()))?,
                None => {
                    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
                    Critic::new(ReLUNet::random(net.state_dim(), &[16, 16], &mut rng), net.feature_scale())
                        .map_err(|e| BenchError::Spec(e.to_string()))?
                }
            };
            let samples = quantile_samples(&net, *eta, Default::default())?.normalized()?;
            let state = reset(&net, c.seed);
            let prob = build_step_problem(&net, &state, &samples.realizations, &samples.weights, &critic, *gamma, &StepOptions::default())
                .map_err(|e| BenchError::Spec(e.to_string()))?;
            let text = export_lp(&prob.model).map_err(|e| BenchError::Spec(e.to_string()))?;
            let path = c.out.join("step.lp");
            fs::write(&path, text)?;
            let st = prob.model.stats();
            println!("wrote {} ({} variables, {} constraints)", path.display(), st.variables, st.constraints);
        }
        Command::Run { spec } => {
            let rows = run_experiment(spec, &c.out)?;
            for r in &rows {
                println!("{}: mean {:.3}  median {:.3}  std {:.3}", r.method, r.mean, r.median, r.std);
            }
        }
    }
    info!("artifacts in {}", c.out.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
