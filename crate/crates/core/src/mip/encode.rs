use super::model::{MilpModel, Sense, VarKind};
use super::MipError;
use crate::valuenet::{LayerBounds, ReLUNet};

/// A model variable feeding the network as `var / scale`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetInput {
    pub var: usize,
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncodedNet {
    /// Post-activation variable of every neuron, per hidden layer.
    pub z: Vec<Vec<usize>>,
    /// Activation binary of every unstable neuron.
    pub y: Vec<Vec<Option<usize>>>,
    /// `cᵀ z_K` as model terms; add `output_constant` for the network value.
    pub output_terms: Vec<(usize, f64)>,
    pub output_constant: f64,
}

impl EncodedNet {
    pub fn binaries(&self) -> Vec<usize> {
        self.y.iter().flatten().flatten().copied().collect()
    }
}

const BOX_TOL: f64 = 1e-9;

/// Big-M encoding of every ReLU neuron.
///
/// A neuron whose pre-activation is provably nonpositive becomes `z = 0`,
/// one that is provably nonnegative becomes `z = wᵀx + b`; the rest get a
/// binary `y` and the four rows
/// `z ≥ wᵀx + b`, `z ≥ 0`, `z ≤ wᵀx + b − M⁻(1 − y)`, `z ≤ M⁺ y`.
pub fn encode_network(
    model: &mut MilpModel,
    net: &ReLUNet,
    bounds: &LayerBounds,
    inputs: &[NetInput],
    prefix: &str,
) -> Result<EncodedNet, MipError> {
    if inputs.len() != net.input_dim() {
        return Err(MipError::Dimension(format!(
            "{} input variables for a network of input dimension {}",
            inputs.len(),
            net.input_dim()
        )));
    }
    if bounds.pre_lo.len() != net.layers.len() {
        return Err(MipError::Dimension("bounds do not match the network depth".into()));
    }
    for (i, inp) in inputs.iter().enumerate() {
        let v = &model.vars[inp.var];
        if !v.lb.is_finite() || !v.ub.is_finite() {
            return Err(MipError::UnboundedInput(v.name.clone()));
        }
        let (lo, hi) = (v.lb / inp.scale, v.ub / inp.scale);
        let slack = BOX_TOL * (1.0 + lo.abs().max(hi.abs()));
        if lo < bounds.input_lo[i] - slack || hi > bounds.input_hi[i] + slack {
            return Err(MipError::Dimension(format!(
                "input `{}` range [{lo}, {hi}] is outside the propagated box [{}, {}]",
                v.name, bounds.input_lo[i], bounds.input_hi[i]
            )));
        }
    }
    let mut out = EncodedNet { z: Vec::new(), y: Vec::new(), output_terms: Vec::new(), output_constant: net.output_bias };
    for (k, layer) in net.layers.iter().enumerate() {
        let mut zs = Vec::with_capacity(layer.outputs);
        let mut ys = vec![None; layer.outputs];
        for j in 0..layer.outputs {
            let m_minus = bounds.pre_lo[k][j];
            let m_plus = bounds.pre_hi[k][j];
            let w = layer.row(j);
            let b = layer.bias[j];
            // -(wᵀx) terms
            let neg_wx: Vec<(usize, f64)> = if k == 0 {
                inputs.iter().zip(w).map(|(inp, &wi)| (inp.var, -wi / inp.scale)).collect()
            } else {
                out.z[k - 1].iter().zip(w).map(|(&v, &wi)| (v, -wi)).collect()
            };
            let tag = format!("{prefix}{}_{j}", k + 1);
            if m_plus <= 0.0 {
                let z = model.add_var(format!("{prefix}z{}_{j}", k + 1), VarKind::Continuous, 0.0, 0.0);
                model.add_con(format!("{prefix}dead{}_{j}", k + 1), vec![(z, 1.0)], Sense::Eq, 0.0);
                zs.push(z);
            } else if m_minus >= 0.0 {
                let z = model.add_var(format!("{prefix}z{}_{j}", k + 1), VarKind::Continuous, m_minus, m_plus);
                let mut t = vec![(z, 1.0)];
                t.extend(neg_wx);
                model.add_con(format!("{prefix}lin{tag}"), t, Sense::Eq, b);
                zs.push(z);
            } else {
                let z = model.add_var(format!("{prefix}z{}_{j}", k + 1), VarKind::Continuous, 0.0, m_plus);
                let y = model.add_var(format!("{prefix}y{}_{j}", k + 1), VarKind::Binary, 0.0, 1.0);
                let mut t1 = vec![(z, 1.0)];
                t1.extend(neg_wx.iter().copied());
                model.add_con(format!("{prefix}ge{tag}"), t1, Sense::Ge, b);
                model.add_con(format!("{prefix}nn{tag}"), vec![(z, 1.0)], Sense::Ge, 0.0);
                let mut t3 = vec![(z, 1.0)];
                t3.extend(neg_wx);
                t3.push((y, -m_minus));
                model.add_con(format!("{prefix}le{tag}"), t3, Sense::Le, b - m_minus);
                model.add_con(format!("{prefix}on{tag}"), vec![(z, 1.0), (y, -m_plus)], Sense::Le, 0.0);
                ys[j] = Some(y);
                zs.push(z);
            }
        }
        out.z.push(zs);
        out.y.push(ys);
    }
    let last = out.z.last().expect("nonempty");
    out.output_terms = last.iter().zip(&net.output).filter(|(_, &c)| c != 0.0).map(|(&v, &c)| (v, c)).collect();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mip::lp::export_lp;
    use crate::valuenet::{propagate_bounds, Layer};

    fn one_neuron(w: f64, b: f64) -> ReLUNet {
        ReLUNet::new(vec![Layer::new(1, 1, vec![w], vec![b]).unwrap()], vec![1.0], 0.0).unwrap()
    }

    fn encode_one(w: f64, b: f64, lo: f64, hi: f64) -> (MilpModel, EncodedNet) {
        let net = one_neuron(w, b);
        let bounds = propagate_bounds(&net, &[lo], &[hi]).unwrap();
        let mut m = MilpModel::new();
        let x = m.add_var("x", VarKind::Continuous, lo, hi);
        let enc = encode_network(&mut m, &net, &bounds, &[NetInput { var: x, scale: 1.0 }], "").unwrap();
        (m, enc)
    }

    #[test]
    fn dead_neuron_is_fixed_to_zero() {
        let (m, enc) = encode_one(1.0, -5.0, 0.0, 2.0);
        assert!(enc.binaries().is_empty());
        assert_eq!(m.cons.len(), 1);
        assert_eq!(m.cons[0].sense, Sense::Eq);
        assert_eq!(m.cons[0].terms, vec![(enc.z[0][0], 1.0)]);
    }

    #[test]
    fn active_neuron_is_affine() {
        let (m, enc) = encode_one(2.0, 1.0, 0.0, 2.0);
        assert!(enc.binaries().is_empty());
        assert_eq!(m.cons.len(), 1);
        assert_eq!(m.cons[0].terms, vec![(enc.z[0][0], 1.0), (0, -2.0)]);
        assert_eq!(m.cons[0].rhs, 1.0);
    }

    #[test]
    fn unstable_neuron_exports_four_rows_and_one_binary() {
        let (m, enc) = encode_one(1.0, 0.0, -1.0, 2.0);
        assert_eq!(enc.binaries().len(), 1);
        let lp = export_lp(&m).unwrap();
        let rows = lp
            .lines()
            .skip_while(|l| *l != "Subject To")
            .skip(1)
            .take_while(|l| *l != "Bounds")
            .count();
        assert_eq!(rows, 4);
        let bins: Vec<&str> = lp.lines().skip_while(|l| *l != "Binaries").skip(1).take_while(|l| *l != "End").collect();
        assert_eq!(bins, vec![" y1_0"]);
    }

    #[test]
    fn unbounded_input_is_rejected() {
        let net = one_neuron(1.0, 0.0);
        let bounds = propagate_bounds(&net, &[0.0], &[1.0]).unwrap();
        let mut m = MilpModel::new();
        let x = m.add_var("x", VarKind::Continuous, 0.0, f64::INFINITY);
        let err = encode_network(&mut m, &net, &bounds, &[NetInput { var: x, scale: 1.0 }], "").unwrap_err();
        assert!(matches!(err, MipError::UnboundedInput(_)));
    }
}
