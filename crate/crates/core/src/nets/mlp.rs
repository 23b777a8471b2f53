use alloc::vec;
use alloc::vec::Vec;

use libm::{sqrt, tanh};
use rand::Rng as _;

use super::optim::Params;
use crate::error::{invalid, Error, Result};
use crate::rng::Rng;

/// Fully connected network: tanh on hidden layers, identity on the output.
///
/// `weights[l]` is row-major `layer_sizes[l + 1] × layer_sizes[l]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpParams {
    pub layer_sizes: Vec<usize>,
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

/// Layer activations of one forward pass, kept for the backward pass.
#[derive(Debug, Clone, Default)]
pub struct MlpTrace {
    /// `acts[0]` is the input, `acts[l + 1]` the output of layer `l`.
    pub acts: Vec<Vec<f64>>,
}

impl MlpTrace {
    pub fn output(&self) -> &[f64] {
        self.acts.last().map(Vec::as_slice).unwrap_or(&[])
    }
}

impl MlpParams {
    pub fn zeros(layer_sizes: &[usize]) -> Result<Self> {
        if layer_sizes.len() < 2 || layer_sizes.contains(&0) {
            return Err(invalid("layer_sizes", "need at least two positive sizes"));
        }
        let weights = layer_sizes.windows(2).map(|w| vec![0.0; w[0] * w[1]]).collect();
        let biases = layer_sizes[1..].iter().map(|&n| vec![0.0; n]).collect();
        Ok(Self { layer_sizes: layer_sizes.to_vec(), weights, biases })
    }

    /// Glorot-uniform weights, zero biases.
    pub fn random(layer_sizes: &[usize], rng: &mut Rng) -> Result<Self> {
        let mut p = Self::zeros(layer_sizes)?;
        for (l, w) in p.weights.iter_mut().enumerate() {
            let (fan_in, fan_out) = (layer_sizes[l], layer_sizes[l + 1]);
            let limit = sqrt(6.0 / (fan_in + fan_out) as f64);
            for v in w.iter_mut() {
                *v = rng.gen_range(-limit..limit);
            }
        }
        Ok(p)
    }

    pub fn input_dim(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.layer_sizes.last().unwrap_or(&0)
    }

    pub fn n_layers(&self) -> usize {
        self.weights.len()
    }

    pub fn n_params(&self) -> usize {
        self.weights.iter().chain(&self.biases).map(Vec::len).sum()
    }

    /// Shape checks plus finiteness.
    pub fn validate(&self) -> Result<()> {
        let n = self.layer_sizes.len();
        if n < 2 || self.weights.len() != n - 1 || self.biases.len() != n - 1 {
            return Err(invalid("mlp", "layer count mismatch"));
        }
        for l in 0..n - 1 {
            let (i, o) = (self.layer_sizes[l], self.layer_sizes[l + 1]);
            if self.weights[l].len() != i * o || self.biases[l].len() != o {
                return Err(invalid("mlp", "layer shape mismatch"));
            }
        }
        if self.weights.iter().chain(&self.biases).flatten().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("mlp parameters"));
        }
        Ok(())
    }

    pub fn forward_into(&self, input: &[f64], trace: &mut MlpTrace) -> Result<()> {
        if input.len() != self.input_dim() {
            return Err(Error::DimensionMismatch { expected: self.input_dim(), got: input.len() });
        }
        let n = self.n_layers();
        trace.acts.resize_with(n + 1, Vec::new);
        trace.acts[0].clear();
        trace.acts[0].extend_from_slice(input);
        for l in 0..n {
            let (fan_in, fan_out) = (self.layer_sizes[l], self.layer_sizes[l + 1]);
            let (done, rest) = trace.acts.split_at_mut(l + 1);
            let x = &done[l];
            let y = &mut rest[0];
            y.clear();
            let w = &self.weights[l];
            for j in 0..fan_out {
                let row = &w[j * fan_in..(j + 1) * fan_in];
                let z = self.biases[l][j] + row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
                y.push(if l + 1 < n { tanh(z) } else { z });
            }
        }
        Ok(())
    }

    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        let mut trace = MlpTrace::default();
        self.forward_into(input, &mut trace)?;
        Ok(trace.acts.pop().unwrap_or_default())
    }

    /// Reverse pass: accumulates `upstream · ∂output/∂params` into `grad`
    /// and returns `upstream · ∂output/∂input`.
    pub fn backward(&self, trace: &MlpTrace, upstream: &[f64], grad: &mut MlpParams) -> Result<Vec<f64>> {
        if upstream.len() != self.output_dim() {
            return Err(Error::DimensionMismatch { expected: self.output_dim(), got: upstream.len() });
        }
        let n = self.n_layers();
        let mut delta = upstream.to_vec();
        for l in (0..n).rev() {
            let (fan_in, fan_out) = (self.layer_sizes[l], self.layer_sizes[l + 1]);
            if l + 1 < n {
                // through tanh: d/dz tanh = 1 − y²
                for (d, y) in delta.iter_mut().zip(&trace.acts[l + 1]) {
                    *d *= 1.0 - y * y;
                }
            }
            let x = &trace.acts[l];
            let gw = &mut grad.weights[l];
            for j in 0..fan_out {
                let d = delta[j];
                grad.biases[l][j] += d;
                if d != 0.0 {
                    for (g, xi) in gw[j * fan_in..(j + 1) * fan_in].iter_mut().zip(x) {
                        *g += d * xi;
                    }
                }
            }
            let w = &self.weights[l];
            let mut prev = vec![0.0; fan_in];
            for j in 0..fan_out {
                let d = delta[j];
                if d != 0.0 {
                    for (p, wij) in prev.iter_mut().zip(&w[j * fan_in..(j + 1) * fan_in]) {
                        *p += d * wij;
                    }
                }
            }
            delta = prev;
        }
        Ok(delta)
    }
}

impl Params for MlpParams {
    fn slices(&self) -> Vec<&[f64]> {
        self.weights.iter().chain(&self.biases).map(Vec::as_slice).collect()
    }

    fn slices_mut(&mut self) -> Vec<&mut [f64]> {
        self.weights.iter_mut().chain(self.biases.iter_mut()).map(Vec::as_mut_slice).collect()
    }
}

pub fn mlp_forward(params: &MlpParams, input: &[f64]) -> Result<Vec<f64>> {
    params.forward(input)
}

/// Gradient of `upstream · mlp(input)` with respect to every parameter and to
/// the input.
pub fn mlp_gradient(params: &MlpParams, input: &[f64], upstream: &[f64]) -> Result<(MlpParams, Vec<f64>)> {
    let mut trace = MlpTrace::default();
    params.forward_into(input, &mut trace)?;
    let mut grad = MlpParams::zeros(&params.layer_sizes)?;
    let input_grad = params.backward(&trace, upstream, &mut grad)?;
    Ok((grad, input_grad))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from;

    #[test]
    fn zero_weights_give_bias() {
        let mut p = MlpParams::zeros(&[3, 4, 2]).unwrap();
        p.biases[1] = vec![0.5, -1.5];
        assert_eq!(p.forward(&[1.0, 2.0, 3.0]).unwrap(), vec![0.5, -1.5]);
    }

    #[test]
    fn identity_layer() {
        let mut p = MlpParams::zeros(&[3, 3]).unwrap();
        for i in 0..3 {
            p.weights[0][i * 3 + i] = 1.0;
        }
        assert_eq!(p.forward(&[0.1, -2.0, 7.5]).unwrap(), vec![0.1, -2.0, 7.5]);
    }

    #[test]
    fn dimension_errors() {
        let p = MlpParams::zeros(&[3, 2]).unwrap();
        assert!(matches!(p.forward(&[1.0]), Err(Error::DimensionMismatch { .. })));
        assert!(mlp_gradient(&p, &[1.0, 2.0, 3.0], &[1.0]).is_err());
        assert!(MlpParams::zeros(&[3]).is_err());
        assert!(MlpParams::zeros(&[3, 0, 1]).is_err());
    }

    #[test]
    fn zero_upstream_zero_gradient() {
        let p = MlpParams::random(&[4, 5, 2], &mut rng_from(1)).unwrap();
        let (g, gi) = mlp_gradient(&p, &[0.3, -0.2, 0.9, 0.0], &[0.0, 0.0]).unwrap();
        assert!(g.weights.iter().chain(&g.biases).flatten().all(|&v| v == 0.0));
        assert!(gi.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn gradient_is_linear_in_upstream() {
        let p = MlpParams::random(&[4, 5, 2], &mut rng_from(2)).unwrap();
        let x = [0.3, -0.2, 0.9, 0.1];
        let (g1, _) = mlp_gradient(&p, &x, &[0.7, -0.4]).unwrap();
        let (g2, _) = mlp_gradient(&p, &x, &[1.4, -0.8]).unwrap();
        for (a, b) in g1.weights.iter().flatten().zip(g2.weights.iter().flatten()) {
            assert!((2.0 * a - b).abs() <= 1e-15 * (1.0 + b.abs()));
        }
    }
}
