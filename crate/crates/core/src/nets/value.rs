use alloc::vec;
use alloc::vec::Vec;

use super::mlp::{MlpParams, MlpTrace};
use super::observation::{Observation, OBS_DIM};
use super::optim::Params;
use crate::error::{invalid, Error, Result};
use crate::rng::Rng;

/// State-value network. The raw scalar output is multiplied by `scale` so the
/// network itself works with order-one numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueNet {
    pub net: MlpParams,
    pub scale: f64,
}

pub const VALUE_SCALE: f64 = 100.0;

impl Params for ValueNet {
    fn slices(&self) -> Vec<&[f64]> {
        self.net.slices()
    }

    fn slices_mut(&mut self) -> Vec<&mut [f64]> {
        self.net.slices_mut()
    }
}

impl ValueNet {
    pub fn new(hidden: &[usize], rng: &mut Rng) -> Result<Self> {
        let mut sizes = vec![OBS_DIM];
        sizes.extend_from_slice(hidden);
        sizes.push(1);
        let mut net = MlpParams::random(&sizes, rng)?;
        let last = net.n_layers() - 1;
        net.weights[last].fill(0.0);
        Ok(Self { net, scale: VALUE_SCALE })
    }

    pub fn validate(&self) -> Result<()> {
        self.net.validate()?;
        if self.net.output_dim() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, got: self.net.output_dim() });
        }
        if self.net.input_dim() != OBS_DIM {
            return Err(Error::DimensionMismatch { expected: OBS_DIM, got: self.net.input_dim() });
        }
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(invalid("value_scale", "must be finite and > 0"));
        }
        Ok(())
    }

    pub fn value(&self, obs: &Observation) -> Result<f64> {
        Ok(self.scale * self.net.forward(obs.as_slice())?[0])
    }

    pub fn value_traced(&self, obs: &Observation, trace: &mut MlpTrace) -> Result<f64> {
        self.net.forward_into(obs.as_slice(), trace)?;
        Ok(self.scale * trace.output()[0])
    }

    /// Adds `upstream · ∇V` to `grad` for the pass stored in `trace`.
    pub fn value_backward(&self, upstream: f64, trace: &MlpTrace, grad: &mut ValueNet) -> Result<()> {
        self.net.backward(trace, &[upstream * self.scale], &mut grad.net)?;
        Ok(())
    }

    /// Adds `upstream · ∇V(obs)` to `grad` and returns V(obs).
    pub fn value_grad(&self, obs: &Observation, upstream: f64, grad: &mut ValueNet, trace: &mut MlpTrace) -> Result<f64> {
        let v = self.value_traced(obs, trace)?;
        self.value_backward(upstream, trace, grad)?;
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from;

    #[test]
    fn fresh_value_is_zero() {
        let v = ValueNet::new(&[8], &mut rng_from(1)).unwrap();
        v.validate().unwrap();
        assert_eq!(v.value(&Observation([0.1; OBS_DIM])).unwrap(), 0.0);
    }
}
