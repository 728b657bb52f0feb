use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::eval::EvalReport;
use super::BenchError;

/// One evaluation run in the report CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub method: String,
    pub train_seed: Option<u64>,
    pub run: usize,
    pub env_seed: u64,
    pub mean_reward: f64,
    pub demand_total: i64,
    pub revenue: f64,
    pub ordering_cost: f64,
    pub holding_cost: f64,
    pub backorder_cost: f64,
    pub reward: f64,
    pub steps: usize,
    pub error: Option<String>,
}

impl EvalRow {
    pub fn from_report(method: &str, train_seed: Option<u64>, report: &EvalReport) -> Vec<Self> {
        report
            .runs
            .iter()
            .map(|r| EvalRow {
                method: method.to_string(),
                train_seed,
                run: r.run,
                env_seed: r.env_seed,
                mean_reward: r.mean_reward,
                demand_total: r.demand_total,
                revenue: r.totals.revenue,
                ordering_cost: r.totals.ordering_cost,
                holding_cost: r.totals.holding_cost,
                backorder_cost: r.totals.backorder_cost,
                reward: r.totals.reward,
                steps: r.totals.steps,
                error: r.error.clone(),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub method: String,
    pub runs: usize,
    pub failed: usize,
    pub mean: f64,
    pub median: f64,
    pub std: f64,
    pub revenue_per_step: f64,
    pub ordering_cost_per_step: f64,
    pub holding_cost_per_step: f64,
    pub backorder_cost_per_step: f64,
}

impl SummaryRow {
    /// Statistics over the successful rows of one method.
    pub fn from_rows(method: &str, rows: &[EvalRow]) -> Self {
        let ok: Vec<&EvalRow> = rows.iter().filter(|r| r.method == method && r.error.is_none()).collect();
        let all = rows.iter().filter(|r| r.method == method).count();
        let means: Vec<f64> = ok.iter().map(|r| r.mean_reward).collect();
        let (mean, median, std) = if means.is_empty() { (f64::NAN, f64::NAN, f64::NAN) } else { super::summary(&means) };
        let steps = ok.iter().map(|r| r.steps).sum::<usize>().max(1) as f64;
        let per = |f: fn(&EvalRow) -> f64| ok.iter().map(|r| f(r)).sum::<f64>() / steps;
        SummaryRow {
            method: method.to_string(),
            runs: all,
            failed: all - ok.len(),
            mean,
            median,
            std,
            revenue_per_step: per(|r| r.revenue),
            ordering_cost_per_step: per(|r| r.ordering_cost),
            holding_cost_per_step: per(|r| r.holding_cost),
            backorder_cost_per_step: per(|r| r.backorder_cost),
        }
    }
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, BenchError> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}
