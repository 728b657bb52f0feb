use std::fmt;

use rand::Rng;
use rand_distr::{Distribution as _, Normal};
use statrs::distribution::{Continuous, ContinuousCDF, Normal as StatNormal};

/// A scalar random quantity attached to a node: retailer demand, supplier
/// production or an initial inventory slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distribution {
    /// Normal with mean and standard deviation.
    Normal { mean: f64, std: f64 },
    /// Discrete uniform on the integers `low..=high`.
    Uniform { low: i64, high: i64 },
    Const(f64),
}

/// Round half up, then take the positive part.
pub fn discretize(x: f64) -> i64 {
    let r = (x + 0.5).floor();
    if r <= 0.0 {
        0
    } else {
        r as i64
    }
}

impl Distribution {
    pub fn parse(text: &str) -> Result<Self, String> {
        let t = text.trim();
        let open = t
            .find('(')
            .ok_or_else(|| format!("expected a distribution like normal(mu,sigma), got `{t}`"))?;
        if !t.ends_with(')') {
            return Err(format!("unterminated distribution `{t}`"));
        }
        let name = t[..open].trim().to_ascii_lowercase();
        let args: Vec<f64> = t[open + 1..t.len() - 1]
            .split(',')
            .map(|a| {
                a.trim()
                    .parse::<f64>()
                    .map_err(|_| format!("bad numeric argument `{}` in `{t}`", a.trim()))
            })
            .collect::<Result<_, _>>()?;
        let want = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(format!("`{name}` takes {n} argument(s), got {}", args.len()))
            }
        };
        let dist = match name.as_str() {
            "normal" | "n" => {
                want(2)?;
                Distribution::Normal { mean: args[0], std: args[1] }
            }
            "uniform" | "u" => {
                want(2)?;
                if args[0].fract() != 0.0 || args[1].fract() != 0.0 {
                    return Err(format!("uniform bounds must be integers in `{t}`"));
                }
                Distribution::Uniform { low: args[0] as i64, high: args[1] as i64 }
            }
            "const" => {
                want(1)?;
                Distribution::Const(args[0])
            }
            other => return Err(format!("unknown distribution `{other}`")),
        };
        dist.validate()?;
        Ok(dist)
    }

    pub fn validate(&self) -> Result<(), String> {
        match *self {
            Distribution::Normal { mean, std } => {
                if !mean.is_finite() || !std.is_finite() || std < 0.0 {
                    return Err(format!("invalid normal({mean},{std})"));
                }
            }
            Distribution::Uniform { low, high } => {
                if low > high {
                    return Err(format!("uniform({low},{high}) has low > high"));
                }
            }
            Distribution::Const(v) => {
                if !v.is_finite() {
                    return Err(format!("invalid const({v})"));
                }
            }
        }
        Ok(())
    }

    /// Raw continuous draw before discretization.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Distribution::Normal { mean, std } => {
                if std == 0.0 {
                    mean
                } else {
                    Normal::new(mean, std).expect("validated").sample(rng)
                }
            }
            Distribution::Uniform { low, high } => rng.random_range(low..=high) as f64,
            Distribution::Const(v) => v,
        }
    }

    /// A nonnegative integer realization.
    pub fn sample_units<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        discretize(self.draw(rng))
    }

    pub fn is_random(&self) -> bool {
        match *self {
            Distribution::Normal { std, .. } => std > 0.0,
            Distribution::Uniform { low, high } => low < high,
            Distribution::Const(_) => false,
        }
    }

    /// Largest integer realization, if the support is bounded.
    pub fn max_units(&self) -> Option<i64> {
        match *self {
            Distribution::Normal { mean, std } if std == 0.0 => Some(discretize(mean)),
            Distribution::Normal { .. } => None,
            Distribution::Uniform { high, .. } => Some(high.max(0)),
            Distribution::Const(v) => Some(discretize(v)),
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Distribution::Normal { mean, .. } => mean,
            Distribution::Uniform { low, high } => (low + high) as f64 / 2.0,
            Distribution::Const(v) => v,
        }
    }

    /// Inverse CDF. `None` when the distribution has no continuous inverse.
    pub fn quantile(&self, q: f64) -> Option<f64> {
        match *self {
            Distribution::Normal { mean, std } if std > 0.0 && q > 0.0 && q < 1.0 => {
                Some(StatNormal::new(mean, std).ok()?.inverse_cdf(q))
            }
            _ => None,
        }
    }

    pub fn density(&self, x: f64) -> Option<f64> {
        match *self {
            Distribution::Normal { mean, std } if std > 0.0 => {
                Some(StatNormal::new(mean, std).ok()?.pdf(x))
            }
            _ => None,
        }
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Distribution::Normal { mean, std } => write!(f, "normal({mean},{std})"),
            Distribution::Uniform { low, high } => write!(f, "uniform({low},{high})"),
            Distribution::Const(v) => write!(f, "const({v})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn discretize_clamps_and_rounds() {
        assert_eq!(discretize(-3.4), 0);
        assert_eq!(discretize(8.6), 9);
        assert_eq!(discretize(2.5), 3);
        assert_eq!(discretize(2.49), 2);
        assert_eq!(discretize(-0.4), 0);
    }

    #[test]
    fn parse_round_trips_display() {
        for s in ["normal(2,10)", "uniform(0,4)", "const(10)", "normal(5,0.8)"] {
            let d = Distribution::parse(s).unwrap();
            assert_eq!(Distribution::parse(&d.to_string()).unwrap(), d);
        }
        assert!(Distribution::parse("gamma(1,2)").is_err());
        assert!(Distribution::parse("normal(1)").is_err());
        assert!(Distribution::parse("uniform(4,0)").is_err());
        assert!(Distribution::parse("normal(0,-1)").is_err());
    }

    #[test]
    fn constant_production_is_constant() {
        let d = Distribution::Const(10.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!((0..100).all(|_| d.sample_units(&mut rng) == 10));
        assert!(!d.is_random());
    }

    #[test]
    fn uniform_stays_in_support() {
        let d = Distribution::Uniform { low: 0, high: 4 };
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut seen = [false; 5];
        for _ in 0..500 {
            let v = d.sample_units(&mut rng);
            assert!((0..=4).contains(&v));
            seen[v as usize] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }
}
