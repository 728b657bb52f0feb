//! Versioned text serialization. Floats are written in their shortest
//! round-trip form, so a save/load cycle is bit-exact.

use std::fmt::Write as _;

use super::net::{Critic, Layer, ReLUNet};
use super::ValueNetError;

const MAGIC: &str = "parl-relunet";
const VERSION: u32 = 1;

fn write_row(out: &mut String, tag: &str, v: &[f64]) {
    out.push_str(tag);
    for x in v {
        let _ = write!(out, " {x:?}");
    }
    out.push('\n');
}

fn write_net(out: &mut String, net: &ReLUNet) {
    let widths: Vec<String> = net.hidden_widths().iter().map(|w| w.to_string()).collect();
    let _ = writeln!(out, "input {}", net.input_dim());
    let _ = writeln!(out, "hidden {}", widths.join(" "));
    for l in &net.layers {
        write_row(out, "W", &l.weights);
        write_row(out, "b", &l.bias);
    }
    write_row(out, "c", &net.output);
    write_row(out, "c0", &[net.output_bias]);
}

pub fn net_to_text(net: &ReLUNet) -> String {
    let mut out = format!("{MAGIC} v{VERSION}\n");
    write_net(&mut out, net);
    out
}

pub fn critic_to_text(critic: &Critic) -> String {
    let mut out = net_to_text(&critic.net);
    write_row(&mut out, "scale", &critic.input_scale);
    out
}

struct Lines<'a> {
    it: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn next_tagged(&mut self, tag: &str) -> Result<(usize, Vec<&'a str>), ValueNetError> {
        loop {
            let Some((i, line)) = self.it.next() else {
                return Err(ValueNetError::Parse(format!("missing `{tag}` line")));
            };
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let head = parts.next().unwrap_or("");
            if head != tag {
                return Err(ValueNetError::Parse(format!("line {}: expected `{tag}`, got `{head}`", i + 1)));
            }
            return Ok((i + 1, parts.collect()));
        }
    }

    fn floats(&mut self, tag: &str, want: usize) -> Result<Vec<f64>, ValueNetError> {
        let (line, parts) = self.next_tagged(tag)?;
        let v: Vec<f64> = parts
            .iter()
            .map(|p| p.parse::<f64>().map_err(|_| ValueNetError::Parse(format!("line {line}: bad number `{p}`"))))
            .collect::<Result<_, _>>()?;
        if v.len() != want {
            return Err(ValueNetError::Parse(format!("line {line}: `{tag}` needs {want} values, got {}", v.len())));
        }
        Ok(v)
    }

    fn usizes(&mut self, tag: &str) -> Result<Vec<usize>, ValueNetError> {
        let (line, parts) = self.next_tagged(tag)?;
        parts
            .iter()
            .map(|p| p.parse::<usize>().map_err(|_| ValueNetError::Parse(format!("line {line}: bad size `{p}`"))))
            .collect()
    }
}

fn read_net(lines: &mut Lines<'_>) -> Result<ReLUNet, ValueNetError> {
    let header = lines
        .it
        .next()
        .map(|(_, l)| l.trim().to_string())
        .ok_or_else(|| ValueNetError::Parse("empty document".into()))?;
    let expected = format!("{MAGIC} v{VERSION}");
    if header != expected {
        return Err(ValueNetError::Parse(format!("unsupported header `{header}`, expected `{expected}`")));
    }
    let input = lines.usizes("input")?;
    let [input] = input[..] else {
        return Err(ValueNetError::Parse("`input` takes one size".into()));
    };
    let hidden = lines.usizes("hidden")?;
    let mut layers = Vec::new();
    let mut fan_in = input;
    for &w in &hidden {
        let weights = lines.floats("W", fan_in * w)?;
        let bias = lines.floats("b", w)?;
        layers.push(Layer::new(fan_in, w, weights, bias)?);
        fan_in = w;
    }
    let output = lines.floats("c", fan_in)?;
    let c0 = lines.floats("c0", 1)?[0];
    ReLUNet::new(layers, output, c0)
}

pub fn net_from_text(text: &str) -> Result<ReLUNet, ValueNetError> {
    read_net(&mut Lines { it: text.lines().enumerate() })
}

pub fn critic_from_text(text: &str) -> Result<Critic, ValueNetError> {
    let mut lines = Lines { it: text.lines().enumerate() };
    let net = read_net(&mut lines)?;
    let scale = lines.floats("scale", net.input_dim())?;
    Critic::new(net, scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rejects_wrong_version() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let text = net_to_text(&ReLUNet::random(2, &[3], &mut rng)).replace("v1", "v9");
        assert!(net_from_text(&text).is_err());
    }

    #[test]
    fn critic_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c = Critic::new(ReLUNet::random(3, &[4, 2], &mut rng), vec![50.0, 10.0, 1.0]).unwrap();
        assert_eq!(critic_from_text(&critic_to_text(&c)).unwrap(), c);
    }

    proptest! {
        #[test]
        fn text_round_trip_is_bit_exact(seed in any::<u64>(), d in 1usize..5, w1 in 1usize..6, w2 in 0usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let hidden: Vec<usize> = if w2 == 0 { vec![w1] } else { vec![w1, w2] };
            let mut net = ReLUNet::random(d, &hidden, &mut rng);
            net.output_bias = f64::from_bits(seed >> 12 | 0x3ff0_0000_0000_0000);
            let back = net_from_text(&net_to_text(&net)).unwrap();
            prop_assert_eq!(
                back.params().iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                net.params().iter().map(|v| v.to_bits()).collect::<Vec<_>>()
            );
        }
    }
}
