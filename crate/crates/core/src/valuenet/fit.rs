use rand::seq::SliceRandom;
use rand::Rng;

use super::net::ReLUNet;
use super::ValueNetError;

/// Regression data: input vectors and their Monte-Carlo return targets.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FitDataset {
    pub inputs: Vec<Vec<f64>>,
    pub targets: Vec<f64>,
}

impl FitDataset {
    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn push(&mut self, x: Vec<f64>, t: f64) {
        self.inputs.push(x);
        self.targets.push(t);
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitHyper {
    pub step_size: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    /// Fit standardized targets and fold the affine map back into the head.
    pub standardize_targets: bool,
}

impl Default for FitHyper {
    fn default() -> Self {
        FitHyper {
            step_size: 1e-3,
            batch_size: 64,
            epochs: 200,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            standardize_targets: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FitOutcome {
    pub net: ReLUNet,
    /// Full-data mean squared error after each epoch, in target units.
    pub losses: Vec<f64>,
}

/// Mean squared error of `net` on `(xs, ts)` and its gradient with respect
/// to [`ReLUNet::params`].
pub fn loss_and_grad(net: &ReLUNet, xs: &[Vec<f64>], ts: &[f64]) -> Result<(f64, Vec<f64>), ValueNetError> {
    let mut grad = vec![0.0; net.num_params()];
    let n = ts.len().max(1) as f64;
    let mut loss = 0.0;
    // parameter offsets per layer
    let mut offsets = Vec::with_capacity(net.layers.len());
    let mut off = 0;
    for l in &net.layers {
        offsets.push(off);
        off += l.weights.len() + l.bias.len();
    }
    let out_off = off;
    for (x, &t) in xs.iter().zip(ts) {
        let act = net.activations(x)?;
        let err = act.value - t;
        loss += err * err;
        let g = 2.0 * err / n;
        let last = act.post.last().expect("nonempty");
        for (j, z) in last.iter().enumerate() {
            grad[out_off + j] += g * z;
        }
        grad[out_off + net.output.len()] += g;
        let mut delta: Vec<f64> = net
            .output
            .iter()
            .zip(act.pre.last().expect("nonempty"))
            .map(|(c, p)| if *p > 0.0 { g * c } else { 0.0 })
            .collect();
        for k in (0..net.layers.len()).rev() {
            let layer = &net.layers[k];
            let input: &[f64] = if k == 0 { x } else { &act.post[k - 1] };
            let o = offsets[k];
            for j in 0..layer.outputs {
                let d = delta[j];
                if d == 0.0 {
                    continue;
                }
                let row = &mut grad[o + j * layer.inputs..o + (j + 1) * layer.inputs];
                for (gi, v) in row.iter_mut().zip(input) {
                    *gi += d * v;
                }
                grad[o + layer.weights.len() + j] += d;
            }
            if k > 0 {
                let prev_pre = &act.pre[k - 1];
                let mut back = vec![0.0; layer.inputs];
                for j in 0..layer.outputs {
                    let d = delta[j];
                    if d == 0.0 {
                        continue;
                    }
                    for (b, w) in back.iter_mut().zip(layer.row(j)) {
                        *b += d * w;
                    }
                }
                delta = back
                    .into_iter()
                    .zip(prev_pre)
                    .map(|(b, p)| if *p > 0.0 { b } else { 0.0 })
                    .collect();
            }
        }
    }
    Ok((loss / n, grad))
}

pub fn mse(net: &ReLUNet, data: &FitDataset) -> Result<f64, ValueNetError> {
    let mut s = 0.0;
    for (x, t) in data.inputs.iter().zip(&data.targets) {
        let e = net.forward(x)? - t;
        s += e * e;
    }
    Ok(s / data.len().max(1) as f64)
}

/// Mini-batch Adam on the squared error.
pub fn fit<R: Rng + ?Sized>(
    net: &ReLUNet,
    data: &FitDataset,
    hyper: &FitHyper,
    rng: &mut R,
) -> Result<FitOutcome, ValueNetError> {
    if data.is_empty() {
        return Err(ValueNetError::EmptyDataset);
    }
    if data.inputs.len() != data.targets.len() {
        return Err(ValueNetError::Shape("inputs and targets differ in length".into()));
    }
    if data.targets.iter().any(|t| !t.is_finite()) {
        return Err(ValueNetError::NonFinite);
    }
    let n = data.len();
    let (shift, scale) = if hyper.standardize_targets {
        let m = data.targets.iter().sum::<f64>() / n as f64;
        let v = data.targets.iter().map(|t| (t - m) * (t - m)).sum::<f64>() / n as f64;
        let s = v.sqrt();
        (m, if s > 1e-12 { s } else { 1.0 })
    } else {
        (0.0, 1.0)
    };
    let targets: Vec<f64> = data.targets.iter().map(|t| (t - shift) / scale).collect();
    let mut work = net.clone();
    work.output.iter_mut().for_each(|c| *c /= scale);
    work.output_bias = (work.output_bias - shift) / scale;

    let mut params = work.params();
    let mut m1 = vec![0.0; params.len()];
    let mut m2 = vec![0.0; params.len()];
    let mut t_step = 0i32;
    let mut order: Vec<usize> = (0..n).collect();
    let batch = hyper.batch_size.max(1);
    let mut losses = Vec::with_capacity(hyper.epochs);
    let mut xs = Vec::with_capacity(batch);
    let mut ts = Vec::with_capacity(batch);
    for epoch in 0..hyper.epochs {
        order.shuffle(rng);
        for chunk in order.chunks(batch) {
            xs.clear();
            ts.clear();
            for &i in chunk {
                xs.push(data.inputs[i].clone());
                ts.push(targets[i]);
            }
            let (_, g) = loss_and_grad(&work, &xs, &ts)?;
            t_step += 1;
            let bc1 = 1.0 - hyper.beta1.powi(t_step);
            let bc2 = 1.0 - hyper.beta2.powi(t_step);
            for i in 0..params.len() {
                m1[i] = hyper.beta1 * m1[i] + (1.0 - hyper.beta1) * g[i];
                m2[i] = hyper.beta2 * m2[i] + (1.0 - hyper.beta2) * g[i] * g[i];
                let mh = m1[i] / bc1;
                let vh = m2[i] / bc2;
                params[i] -= hyper.step_size * mh / (vh.sqrt() + hyper.epsilon);
            }
            work.set_params(&params);
        }
        let mut s = 0.0;
        for (x, t) in data.inputs.iter().zip(&targets) {
            let e = work.forward(x)? - t;
            s += e * e;
        }
        let loss = s / n as f64 * scale * scale;
        if !loss.is_finite() {
            return Err(ValueNetError::NanLoss { epoch });
        }
        losses.push(loss);
    }
    work.output.iter_mut().for_each(|c| *c *= scale);
    work.output_bias = work.output_bias * scale + shift;
    Ok(FitOutcome { net: work, losses })
}
