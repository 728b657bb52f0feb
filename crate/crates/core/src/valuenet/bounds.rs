use super::net::ReLUNet;
use super::ValueNetError;

/// Largest and smallest value of `w·x + b` over the box `[lo, hi]`,
/// returned as `(M⁺, M⁻)`.
pub fn neuron_big_m(w: &[f64], b: f64, lo: &[f64], hi: &[f64]) -> Result<(f64, f64), ValueNetError> {
    if w.len() != lo.len() || w.len() != hi.len() {
        return Err(ValueNetError::Dimension { got: lo.len(), want: w.len() });
    }
    let mut m_plus = b;
    let mut m_minus = b;
    for i in 0..w.len() {
        if !lo[i].is_finite() || !hi[i].is_finite() {
            return Err(ValueNetError::UnboundedInput(i));
        }
        if lo[i] > hi[i] {
            return Err(ValueNetError::Shape(format!("box coordinate {i} has lo > hi")));
        }
        if w[i] >= 0.0 {
            m_plus += w[i] * hi[i];
            m_minus += w[i] * lo[i];
        } else {
            m_plus += w[i] * lo[i];
            m_minus += w[i] * hi[i];
        }
    }
    Ok((m_plus, m_minus))
}

/// Interval bounds of every layer for a given input box.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerBounds {
    pub input_lo: Vec<f64>,
    pub input_hi: Vec<f64>,
    /// Per hidden layer, pre-activation `M⁻` of each neuron.
    pub pre_lo: Vec<Vec<f64>>,
    /// Per hidden layer, pre-activation `M⁺` of each neuron.
    pub pre_hi: Vec<Vec<f64>>,
    /// Post-activation bounds `[max(0, M⁻), max(0, M⁺)]`.
    pub lo: Vec<Vec<f64>>,
    pub hi: Vec<Vec<f64>>,
}

impl LayerBounds {
    /// Neurons that are provably inactive (`M⁺ ≤ 0`) or active (`M⁻ ≥ 0`).
    pub fn stable_counts(&self) -> (usize, usize) {
        let mut dead = 0;
        let mut active = 0;
        for k in 0..self.pre_lo.len() {
            for j in 0..self.pre_lo[k].len() {
                if self.pre_hi[k][j] <= 0.0 {
                    dead += 1;
                } else if self.pre_lo[k][j] >= 0.0 {
                    active += 1;
                }
            }
        }
        (dead, active)
    }
}

pub fn propagate_bounds(net: &ReLUNet, lo: &[f64], hi: &[f64]) -> Result<LayerBounds, ValueNetError> {
    if lo.len() != net.input_dim() || hi.len() != net.input_dim() {
        return Err(ValueNetError::Dimension { got: lo.len(), want: net.input_dim() });
    }
    let mut out = LayerBounds {
        input_lo: lo.to_vec(),
        input_hi: hi.to_vec(),
        pre_lo: Vec::new(),
        pre_hi: Vec::new(),
        lo: Vec::new(),
        hi: Vec::new(),
    };
    let mut cur_lo = lo.to_vec();
    let mut cur_hi = hi.to_vec();
    for layer in &net.layers {
        let mut pl = Vec::with_capacity(layer.outputs);
        let mut ph = Vec::with_capacity(layer.outputs);
        for j in 0..layer.outputs {
            let (mp, mm) = neuron_big_m(layer.row(j), layer.bias[j], &cur_lo, &cur_hi)?;
            pl.push(mm);
            ph.push(mp);
        }
        cur_lo = pl.iter().map(|v| v.max(0.0)).collect();
        cur_hi = ph.iter().map(|v| v.max(0.0)).collect();
        out.pre_lo.push(pl);
        out.pre_hi.push(ph);
        out.lo.push(cur_lo.clone());
        out.hi.push(cur_hi.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::valuenet::net::Layer;

    #[test]
    fn sign_rule_extremes() {
        let (mp, mm) = neuron_big_m(&[1.0, -2.0], 0.5, &[0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert_eq!((mp, mm), (1.5, -1.5));
        let (mp, mm) = neuron_big_m(&[0.0, 0.0], 3.0, &[0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert_eq!((mp, mm), (3.0, 3.0));
        assert!(matches!(
            neuron_big_m(&[1.0], 0.0, &[0.0], &[f64::INFINITY]),
            Err(ValueNetError::UnboundedInput(0))
        ));
    }

    #[test]
    fn one_neuron_bounds() {
        let net = ReLUNet::new(vec![Layer::new(1, 1, vec![1.0], vec![0.0]).unwrap()], vec![1.0], 0.0).unwrap();
        let b = propagate_bounds(&net, &[-1.0], &[2.0]).unwrap();
        assert_eq!((b.lo[0][0], b.hi[0][0]), (0.0, 2.0));
        assert_eq!((b.pre_lo[0][0], b.pre_hi[0][0]), (-1.0, 2.0));
    }

    #[test]
    fn dead_layer_has_zero_bounds() {
        let l1 = Layer::new(2, 2, vec![1.0, 1.0, 0.5, -0.5], vec![-10.0, -10.0]).unwrap();
        let net = ReLUNet::new(vec![l1], vec![3.0, -7.0], 0.0).unwrap();
        let b = propagate_bounds(&net, &[0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert_eq!(b.hi[0], vec![0.0, 0.0]);
        assert_eq!(b.stable_counts(), (2, 0));
        assert_eq!(net.forward(&[1.0, 1.0]).unwrap(), 0.0);
    }
}
