use crate::error::{Error, Result};
use crate::sim::RobotState;

pub const OBS_DIM: usize = 6;

/// Divisors applied to (x_rel, v, z, dz, pitch, pitch_rate).
pub const OBS_SCALE: [f64; OBS_DIM] = [1.0, 1.0, 1.0, 1.0, 0.5, 2.0];

/// Normalised policy input. Horizontal position and height are measured from
/// the support foot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation(pub [f64; OBS_DIM]);

impl Observation {
    pub fn from_state(state: &RobotState) -> Self {
        let (foot_x, _) = state.support_foot();
        Self::from_raw([state.x - foot_x, state.dx, state.height(), state.dz, state.pitch, state.pitch_rate])
    }

    /// Normalise physical channel values.
    pub fn from_raw(raw: [f64; OBS_DIM]) -> Self {
        let mut v = raw;
        for (x, s) in v.iter_mut().zip(OBS_SCALE) {
            *x /= s;
        }
        Self(v)
    }

    /// Physical channel values.
    pub fn raw(&self) -> [f64; OBS_DIM] {
        let mut v = self.0;
        for (x, s) in v.iter_mut().zip(OBS_SCALE) {
            *x *= s;
        }
        v
    }

    /// Adds physical-unit noise to each channel.
    pub fn with_noise(&self, noise: &[f64; OBS_DIM]) -> Self {
        let mut raw = self.raw();
        for (x, n) in raw.iter_mut().zip(noise) {
            *x += n;
        }
        Self::from_raw(raw)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn check(&self) -> Result<()> {
        if self.0.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite("observation"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{initial_state, InitMode, SimParams};

    #[test]
    fn start_state_observation() {
        let p = SimParams::default();
        let s = initial_state(&p, 0.9, InitMode::UnloadedDrop);
        let o = Observation::from_state(&s);
        assert_eq!(o.0[0], 0.0);
        assert!((o.0[2] - 0.91).abs() < 1e-12);
        assert_eq!(o.0[1], 0.0);
    }

    #[test]
    fn scales_apply() {
        let o = Observation::from_raw([1.0, 2.0, 3.0, 4.0, 0.5, 2.0]);
        assert_eq!(o.0, [1.0, 2.0, 3.0, 4.0, 1.0, 1.0]);
        assert_eq!(o.raw(), [1.0, 2.0, 3.0, 4.0, 0.5, 2.0]);
    }
}
