use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashSet};
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use super::ParlError;
use crate::env::{discretize, sample_uncertainty, Distribution, Network, Realization, Uncertainty};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SamplingScheme {
    Random,
    Quantile,
}

/// How quantile combinations are weighted before the top-η cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum QuantileWeighting {
    /// Density evaluated at the quantile level itself.
    #[default]
    LevelDensity,
    /// Equal weights.
    Uniform,
    /// Density evaluated at the quantile point.
    PointDensity,
}

impl fmt::Display for SamplingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SamplingScheme::Random => "random",
            SamplingScheme::Quantile => "quantile",
        })
    }
}

impl FromStr for SamplingScheme {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "random" => Ok(SamplingScheme::Random),
            "quantile" => Ok(SamplingScheme::Quantile),
            _ => Err(format!("unknown sampling scheme `{s}` (random, quantile)")),
        }
    }
}

impl fmt::Display for QuantileWeighting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QuantileWeighting::LevelDensity => "level-density",
            QuantileWeighting::Uniform => "uniform",
            QuantileWeighting::PointDensity => "point-density",
        })
    }
}

impl FromStr for QuantileWeighting {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "level-density" | "level" => Ok(QuantileWeighting::LevelDensity),
            "uniform" => Ok(QuantileWeighting::Uniform),
            "point-density" | "point" => Ok(QuantileWeighting::PointDensity),
            _ => Err(format!("unknown weighting `{s}` (level-density, uniform, point-density)")),
        }
    }
}

/// Weighted uncertainty realizations for one decision.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub realizations: Vec<Realization>,
    pub weights: Vec<f64>,
    pub scheme: SamplingScheme,
}

impl SampleSet {
    pub fn len(&self) -> usize {
        self.realizations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.realizations.is_empty()
    }

    /// Rescales positive weights to sum to one.
    pub fn normalized(mut self) -> Result<Self, ParlError> {
        if self.weights.len() != self.realizations.len() || self.is_empty() {
            return Err(ParlError::Samples("weights and realizations differ in length".into()));
        }
        if self.weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(ParlError::Samples("sample weights must be positive".into()));
        }
        let s: f64 = self.weights.iter().sum();
        self.weights.iter_mut().for_each(|w| *w /= s);
        Ok(self)
    }
}

/// `eta` independent draws with equal weights.
pub fn random_samples<R: Rng + ?Sized>(net: &Network, eta: usize, rng: &mut R) -> Result<SampleSet, ParlError> {
    if eta == 0 {
        return Err(ParlError::Samples("at least one sample is required".into()));
    }
    let realizations = (0..eta).map(|_| sample_uncertainty(net, rng)).collect();
    Ok(SampleSet { realizations, weights: vec![1.0 / eta as f64; eta], scheme: SamplingScheme::Random })
}

/// Quantile levels `(i − 0.5) / eta` for `i = 1..=eta`.
pub fn quantile_levels(eta: usize) -> Vec<f64> {
    (1..=eta).map(|i| (i as f64 - 0.5) / eta as f64).collect()
}

fn dim_distribution(net: &Network, u: Uncertainty) -> Distribution {
    match u {
        Uncertainty::Demand(i) => net.node(i).demand.expect("demand dimension"),
        Uncertainty::Production(i) => net.node(i).production.expect("production dimension"),
    }
}

#[derive(PartialEq)]
struct Combo {
    log_weight: f64,
    levels: Vec<usize>,
    ranks: Vec<usize>,
}

impl Eq for Combo {}
impl PartialOrd for Combo {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Combo {
    fn cmp(&self, o: &Self) -> Ordering {
        self.log_weight.total_cmp(&o.log_weight).then_with(|| Reverse(&self.levels).cmp(&Reverse(&o.levels)))
    }
}

/// Deterministic quantile sample set.
///
/// Each random dimension is cut at the same `eta` quantile levels. Among
/// the `eta^dim` level combinations, the `eta` with the largest product
/// weight are kept (ties go to the smaller level vector) and their weights
/// renormalized. Constant dimensions take their fixed value.
pub fn quantile_samples(net: &Network, eta: usize, weighting: QuantileWeighting) -> Result<SampleSet, ParlError> {
    if eta == 0 {
        return Err(ParlError::Samples("at least one sample is required".into()));
    }
    let dims = net.uncertainty_dims();
    let levels = quantile_levels(eta);
    // per dimension: (level index, value, log weight), sorted by weight
    let mut tables: Vec<Vec<(usize, i64, f64)>> = Vec::with_capacity(dims.len());
    for &u in &dims {
        let d = dim_distribution(net, u);
        let mut t = Vec::with_capacity(eta);
        for (i, &q) in levels.iter().enumerate() {
            let x = d.quantile(q).ok_or_else(|| ParlError::NonInvertible(d.to_string()))?;
            let w = match weighting {
                QuantileWeighting::LevelDensity => d.density(q),
                QuantileWeighting::PointDensity => d.density(x),
                QuantileWeighting::Uniform => Some(1.0),
            }
            .ok_or_else(|| ParlError::NonInvertible(d.to_string()))?;
            if !(w > 0.0) {
                return Err(ParlError::Samples(format!("zero weight at level {q} of {d}")));
            }
            t.push((i, discretize(x), w.ln()));
        }
        t.sort_by(|a, b| b.2.total_cmp(&a.2).then(a.0.cmp(&b.0)));
        tables.push(t);
    }
    let pool = (eta as f64).powi(dims.len() as i32);
    let keep = if pool < eta as f64 { pool as usize } else { eta };
    let mut chosen: Vec<Combo> = Vec::with_capacity(keep);
    let make = |ranks: Vec<usize>| -> Combo {
        let log_weight = ranks.iter().zip(&tables).map(|(&r, t)| t[r].2).sum();
        let levels = ranks.iter().zip(&tables).map(|(&r, t)| t[r].0).collect();
        Combo { log_weight, levels, ranks }
    };
    let mut heap = BinaryHeap::new();
    let mut seen = HashSet::new();
    let root = vec![0; dims.len()];
    seen.insert(root.clone());
    heap.push(make(root));
    while chosen.len() < keep {
        let Some(c) = heap.pop() else { break };
        for j in 0..c.ranks.len() {
            if c.ranks[j] + 1 < eta {
                let mut r = c.ranks.clone();
                r[j] += 1;
                if seen.insert(r.clone()) {
                    heap.push(make(r));
                }
            }
        }
        chosen.push(c);
    }
    chosen.sort_by(|a, b| a.levels.cmp(&b.levels));
    let n = net.num_nodes();
    let mut base = Realization::zeros(n);
    for i in 0..n {
        let node = net.node(i);
        if let Some(d) = node.demand {
            base.demand[i] = d.max_units().unwrap_or(0);
        }
        if let (Some(p), false) = (node.production, node.infinite_supply) {
            base.production[i] = p.max_units().unwrap_or(0);
        }
    }
    let max_lw = chosen.iter().map(|c| c.log_weight).fold(f64::NEG_INFINITY, f64::max);
    let mut realizations = Vec::with_capacity(chosen.len());
    let mut weights = Vec::with_capacity(chosen.len());
    for c in &chosen {
        let mut r = base.clone();
        for ((&u, &rank), t) in dims.iter().zip(&c.ranks).zip(&tables) {
            match u {
                Uncertainty::Demand(i) => r.demand[i] = t[rank].1,
                Uncertainty::Production(i) => r.production[i] = t[rank].1,
            }
        }
        realizations.push(r);
        weights.push((c.log_weight - max_lw).exp());
    }
    SampleSet { realizations, weights, scheme: SamplingScheme::Quantile }.normalized()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::presets::{preset, Preset, Scale};
    use crate::env::{parse_config, Network};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Inverse normal CDF by bisection on the error-function form.
    fn inv_normal(mean: f64, std: f64, q: f64) -> f64 {
        let cdf = |x: f64| 0.5 * (1.0 + statrs::function::erf::erf((x - mean) / (std * 2f64.sqrt())));
        let (mut lo, mut hi) = (mean - 20.0 * std, mean + 20.0 * std);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if cdf(mid) < q {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn one_dim(eta: usize) -> SampleSet {
        quantile_samples(&preset(Preset::Smoke, Scale::Desk), eta, QuantileWeighting::LevelDensity).unwrap()
    }

    #[test]
    fn single_dimension_quantiles() {
        let s = one_dim(3);
        let want: Vec<i64> = quantile_levels(3).iter().map(|&q| discretize(inv_normal(2.0, 10.0, q))).collect();
        assert_eq!(want, vec![0, 2, 12]);
        let got: Vec<i64> = s.realizations.iter().map(|r| r.demand[1]).collect();
        assert_eq!(got, want);
        assert!((s.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        // production is constant
        assert!(s.realizations.iter().all(|r| r.production[0] == 5));
    }

    #[test]
    fn odd_count_centers_on_the_median() {
        let s = one_dim(5);
        assert_eq!(s.realizations[2].demand[1], 2);
    }

    #[test]
    fn two_dimensions_keep_the_heaviest_pair() {
        let doc = "[node.S]\nkind = supplier\nproduction = const(0)\ncapacity = 100\n\
                   [node.R1..R2]\nkind = retailer\ndemand = [normal(2,1),normal(3,2)]\ncapacity = 10\n\
                   [link.S.R1..R2]\nlead_time = 1\nmax_order = 5\n";
        let net = Network::new(parse_config(doc).unwrap()).unwrap();
        let s = quantile_samples(&net, 2, QuantileWeighting::LevelDensity).unwrap();
        assert_eq!(s.len(), 2);
        assert!((s.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        // exhaustive pool of four combinations
        let lv = quantile_levels(2);
        let d = [(2.0, 1.0), (3.0, 2.0)];
        let pdf = |m: f64, sd: f64, x: f64| (-(x - m) * (x - m) / (2.0 * sd * sd)).exp() / (sd * (2.0 * std::f64::consts::PI).sqrt());
        let mut pool = Vec::new();
        for a in 0..2 {
            for b in 0..2 {
                let xa = inv_normal(d[0].0, d[0].1, lv[a]);
                let xb = inv_normal(d[1].0, d[1].1, lv[b]);
                pool.push((pdf(d[0].0, d[0].1, lv[a]) * pdf(d[1].0, d[1].1, lv[b]), vec![a, b], [discretize(xa), discretize(xb)]));
            }
        }
        pool.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap().then(x.1.cmp(&y.1)));
        let mut top: Vec<_> = pool[..2].to_vec();
        top.sort_by(|x, y| x.1.cmp(&y.1));
        for (r, t) in s.realizations.iter().zip(&top) {
            assert_eq!([r.demand[1], r.demand[2]], t.2);
        }
    }

    #[test]
    fn random_sets_are_reproducible() {
        let net = preset(Preset::Smoke, Scale::Desk);
        let a = random_samples(&net, 3, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        let b = random_samples(&net, 3, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.weights, vec![1.0 / 3.0; 3]);
        let one = random_samples(&net, 1, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        assert_eq!(one.weights, vec![1.0]);
    }

    #[test]
    fn clamped_mean_of_random_draws() {
        let net = preset(Preset::Smoke, Scale::Desk);
        let s = random_samples(&net, 10_000, &mut ChaCha8Rng::seed_from_u64(8)).unwrap();
        let xs: Vec<f64> = s.realizations.iter().map(|r| r.demand[1] as f64).collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / xs.len() as f64;
        // E[discretize(X)] for X ~ N(2, 10) by summing P(X rounds to k)
        let cdf = |x: f64| 0.5 * (1.0 + statrs::function::erf::erf((x - 2.0) / (10.0 * 2f64.sqrt())));
        let truth: f64 = (1..200).map(|k| k as f64 * (cdf(k as f64 + 0.5) - cdf(k as f64 - 0.5))).sum();
        assert!((mean - truth).abs() < 3.0 * (var / xs.len() as f64).sqrt(), "{mean} vs {truth}");
    }

    #[test]
    fn uniform_demand_is_not_invertible() {
        let doc = "[node.S]\nkind = supplier\nproduction = const(0)\ncapacity = 100\n\
                   [node.R]\nkind = retailer\ndemand = uniform(0,4)\ncapacity = 10\n\
                   [link.S.R]\nlead_time = 1\nmax_order = 5\n";
        let net = Network::new(parse_config(doc).unwrap()).unwrap();
        assert!(matches!(quantile_samples(&net, 3, QuantileWeighting::Uniform), Err(ParlError::NonInvertible(_))));
    }
}
