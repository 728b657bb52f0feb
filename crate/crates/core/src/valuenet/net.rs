use rand::Rng;

use super::ValueNetError;

/// Dense affine map `W x + b`, with `W` stored row-major (`outputs × inputs`).
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Layer {
    pub fn new(inputs: usize, outputs: usize, weights: Vec<f64>, bias: Vec<f64>) -> Result<Self, ValueNetError> {
        if weights.len() != inputs * outputs || bias.len() != outputs {
            return Err(ValueNetError::Shape(format!(
                "layer {inputs}->{outputs} needs {} weights and {outputs} biases, got {} and {}",
                inputs * outputs,
                weights.len(),
                bias.len()
            )));
        }
        Ok(Layer { inputs, outputs, weights, bias })
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.weights[j * self.inputs..(j + 1) * self.inputs]
    }

    /// Pre-activations for input `x`.
    pub fn affine(&self, x: &[f64]) -> Vec<f64> {
        (0..self.outputs)
            .map(|j| self.row(j).iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.bias[j])
            .collect()
    }
}

/// Feed-forward ReLU network with a linear scalar head:
/// `V(s) = cᵀ z_K + c0`, `z_{k+1} = max(0, W_k z_k + b_k)`, `z_1 = s`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReLUNet {
    pub layers: Vec<Layer>,
    pub output: Vec<f64>,
    pub output_bias: f64,
}

/// Pre- and post-activation values of every hidden layer.
#[derive(Debug, Clone, PartialEq)]
pub struct Activations {
    pub pre: Vec<Vec<f64>>,
    pub post: Vec<Vec<f64>>,
    pub value: f64,
}

impl ReLUNet {
    pub fn new(layers: Vec<Layer>, output: Vec<f64>, output_bias: f64) -> Result<Self, ValueNetError> {
        if layers.is_empty() {
            return Err(ValueNetError::Shape("at least one hidden layer is required".into()));
        }
        for w in layers.windows(2) {
            if w[0].outputs != w[1].inputs {
                return Err(ValueNetError::Shape(format!(
                    "layer widths do not chain: {} then {}",
                    w[0].outputs, w[1].inputs
                )));
            }
        }
        let last = layers.last().expect("nonempty").outputs;
        if output.len() != last {
            return Err(ValueNetError::Shape(format!(
                "output weights have {} entries for a {last}-wide layer",
                output.len()
            )));
        }
        let net = ReLUNet { layers, output, output_bias };
        if !net.is_finite() {
            return Err(ValueNetError::NonFinite);
        }
        Ok(net)
    }

    /// Uniform `±1/sqrt(fan_in)` initialization.
    pub fn random<R: Rng + ?Sized>(input_dim: usize, hidden: &[usize], rng: &mut R) -> Self {
        let mut layers = Vec::with_capacity(hidden.len());
        let mut fan_in = input_dim;
        for &width in hidden {
            let a = 1.0 / (fan_in.max(1) as f64).sqrt();
            let weights = (0..fan_in * width).map(|_| rng.random_range(-a..=a)).collect();
            let bias = (0..width).map(|_| rng.random_range(-a..=a)).collect();
            layers.push(Layer { inputs: fan_in, outputs: width, weights, bias });
            fan_in = width;
        }
        let a = 1.0 / (fan_in.max(1) as f64).sqrt();
        let output = (0..fan_in).map(|_| rng.random_range(-a..=a)).collect();
        ReLUNet { layers, output, output_bias: 0.0 }
    }

    pub fn zeros(input_dim: usize, hidden: &[usize]) -> Self {
        let mut layers = Vec::new();
        let mut fan_in = input_dim;
        for &w in hidden {
            layers.push(Layer { inputs: fan_in, outputs: w, weights: vec![0.0; fan_in * w], bias: vec![0.0; w] });
            fan_in = w;
        }
        ReLUNet { layers, output: vec![0.0; fan_in], output_bias: 0.0 }
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].inputs
    }

    pub fn hidden_widths(&self) -> Vec<usize> {
        self.layers.iter().map(|l| l.outputs).collect()
    }

    pub fn num_neurons(&self) -> usize {
        self.layers.iter().map(|l| l.outputs).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.weights.iter().chain(&l.bias).all(|v| v.is_finite()))
            && self.output.iter().all(|v| v.is_finite())
            && self.output_bias.is_finite()
    }

    pub fn activations(&self, x: &[f64]) -> Result<Activations, ValueNetError> {
        if x.len() != self.input_dim() {
            return Err(ValueNetError::Dimension { got: x.len(), want: self.input_dim() });
        }
        let mut pre = Vec::with_capacity(self.layers.len());
        let mut post = Vec::with_capacity(self.layers.len());
        let mut z = x.to_vec();
        for l in &self.layers {
            let a = l.affine(&z);
            z = a.iter().map(|&v| v.max(0.0)).collect();
            pre.push(a);
            post.push(z.clone());
        }
        let value = self.output.iter().zip(&z).map(|(c, v)| c * v).sum::<f64>() + self.output_bias;
        Ok(Activations { pre, post, value })
    }

    pub fn forward(&self, x: &[f64]) -> Result<f64, ValueNetError> {
        Ok(self.activations(x)?.value)
    }

    pub fn num_params(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.bias.len()).sum::<usize>() + self.output.len() + 1
    }

    /// Parameters in the order: per layer `W` then `b`, then `c`, then `c0`.
    pub fn params(&self) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.num_params());
        for l in &self.layers {
            p.extend_from_slice(&l.weights);
            p.extend_from_slice(&l.bias);
        }
        p.extend_from_slice(&self.output);
        p.push(self.output_bias);
        p
    }

    pub fn set_params(&mut self, p: &[f64]) {
        assert_eq!(p.len(), self.num_params(), "parameter vector length");
        let mut i = 0;
        for l in &mut self.layers {
            let n = l.weights.len();
            l.weights.copy_from_slice(&p[i..i + n]);
            i += n;
            let n = l.bias.len();
            l.bias.copy_from_slice(&p[i..i + n]);
            i += n;
        }
        let n = self.output.len();
        self.output.copy_from_slice(&p[i..i + n]);
        self.output_bias = p[i + n];
    }
}

/// A value network over raw state vectors: inputs are divided by
/// `input_scale` before the first layer.
#[derive(Debug, Clone, PartialEq)]
pub struct Critic {
    pub net: ReLUNet,
    pub input_scale: Vec<f64>,
}

impl Critic {
    pub fn new(net: ReLUNet, input_scale: Vec<f64>) -> Result<Self, ValueNetError> {
        if input_scale.len() != net.input_dim() {
            return Err(ValueNetError::Dimension { got: input_scale.len(), want: net.input_dim() });
        }
        if input_scale.iter().any(|&s| !(s.is_finite() && s > 0.0)) {
            return Err(ValueNetError::Shape("input scales must be positive".into()));
        }
        Ok(Critic { net, input_scale })
    }

    /// The critic that values every state at zero.
    pub fn zero(input_scale: Vec<f64>, hidden: &[usize]) -> Self {
        let net = ReLUNet::zeros(input_scale.len(), hidden);
        Critic { net, input_scale }
    }

    pub fn scale(&self, raw: &[f64]) -> Vec<f64> {
        raw.iter().zip(&self.input_scale).map(|(v, s)| v / s).collect()
    }

    pub fn value(&self, raw: &[f64]) -> Result<f64, ValueNetError> {
        if raw.len() != self.input_scale.len() {
            return Err(ValueNetError::Dimension { got: raw.len(), want: self.input_scale.len() });
        }
        self.net.forward(&self.scale(raw))
    }
}
