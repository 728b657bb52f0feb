use std::io::Write;

use serde::{Deserialize, Serialize};

use super::network::Network;
use super::state::{Action, PipelineState, Realization, RewardBreakdown};

/// One node in one period of a trajectory log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRow {
    pub period: u64,
    pub node: String,
    pub on_hand: i64,
    /// Pipeline slots `1..`, separated by `;`.
    pub pipeline: String,
    /// Inbound shipments per incoming link, separated by `;`.
    pub action: String,
    pub demand: i64,
    pub rs: f64,
    pub tsc: f64,
    pub hsc: f64,
    pub reward: f64,
}

fn join(v: impl IntoIterator<Item = i64>) -> String {
    v.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

pub fn log_rows(
    net: &Network,
    state: &PipelineState,
    action: &Action,
    real: &Realization,
    rb: &RewardBreakdown,
) -> Vec<LogRow> {
    (0..net.num_nodes())
        .map(|l| LogRow {
            period: state.period,
            node: net.node(l).id.clone(),
            on_hand: state.on_hand(l),
            pipeline: join(state.pipelines[l].iter().skip(1).copied()),
            action: join(net.incoming(l).iter().map(|&k| action.0[k])),
            demand: real.demand[l],
            rs: rb.rs[l],
            tsc: rb.tsc[l],
            hsc: rb.hsc[l],
            reward: rb.rs[l] - rb.tsc[l] - rb.hsc[l] - rb.boc[l],
        })
        .collect()
}

pub struct TrajectoryLog<W: Write> {
    writer: csv::Writer<W>,
}

impl<W: Write> TrajectoryLog<W> {
    pub fn new(inner: W) -> Self {
        TrajectoryLog { writer: csv::Writer::from_writer(inner) }
    }

    pub fn record(
        &mut self,
        net: &Network,
        state: &PipelineState,
        action: &Action,
        real: &Realization,
        rb: &RewardBreakdown,
    ) -> csv::Result<()> {
        for row in log_rows(net, state, action, real, rb) {
            self.writer.serialize(row)?;
        }
        Ok(())
    }

    pub fn finish(mut self) -> std::io::Result<W> {
        self.writer.flush()?;
        self.writer.into_inner().map_err(|e| e.into_error())
    }
}

pub fn read_log(text: &str) -> csv::Result<Vec<LogRow>> {
    csv::Reader::from_reader(text.as_bytes()).deserialize().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::presets::{preset, Preset, Scale};
    use crate::env::sim::{reset, sample_uncertainty, step};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn log_round_trips() {
        let net = preset(Preset::OneSThreeR, Scale::Desk);
        let st = reset(&net, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let real = sample_uncertainty(&net, &mut rng);
        let act = Action(vec![0, 1, 0]);
        let (_, rb) = step(&net, &st, &act, &real).unwrap();
        let mut log = TrajectoryLog::new(Vec::new());
        log.record(&net, &st, &act, &real, &rb).unwrap();
        let text = String::from_utf8(log.finish().unwrap()).unwrap();
        assert!(text.starts_with("period,node,on_hand,pipeline,action,demand,rs,tsc,hsc,reward"));
        let rows = read_log(&text).unwrap();
        assert_eq!(rows, log_rows(&net, &st, &act, &real, &rb));
        let total: f64 = rows.iter().map(|r| r.reward).sum();
        assert!((total - rb.total).abs() < 1e-9);
    }
}
