use crate::error::{invalid, Result};

/// Per-step reward constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardConfig {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub v_tgt: f64,
    /// Episode cap in steps; the fall penalty is `c3 · t_max_steps`.
    pub t_max_steps: u32,
    /// Torque penalty weight, per N² per step. Zero disables it.
    pub c4: f64,
}

/// Weight on hip torque² relative to axial force², m⁻².
pub const TORQUE_SCALE: f64 = 25.0;

/// C4 used when the torque-penalty variant is switched on.
pub const C4_VARIANT: f64 = 1e-6;

impl Default for RewardConfig {
    fn default() -> Self {
        Self { c1: 1.0, c2: 0.3, c3: 0.01, v_tgt: 0.4, t_max_steps: 10_000, c4: 0.0 }
    }
}

impl RewardConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("C1", self.c1), ("C2", self.c2), ("C3", self.c3), ("C4", self.c4)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid(name, "must be finite and >= 0"));
            }
        }
        if !self.v_tgt.is_finite() {
            return Err(invalid("v_tgt", "must be finite"));
        }
        if self.t_max_steps == 0 {
            return Err(invalid("T_max_steps", "must be > 0"));
        }
        Ok(())
    }

    /// Reward given once, at the step the robot falls.
    pub fn fall_penalty(&self) -> f64 {
        -self.c3 * f64::from(self.t_max_steps)
    }
}

/// Alive bonus minus velocity and pitch-rate errors, or the fall penalty.
pub fn reward(v_act: f64, pitch_rate: f64, fell: bool, cfg: &RewardConfig) -> f64 {
    if fell {
        return cfg.fall_penalty();
    }
    let dv = v_act - cfg.v_tgt;
    -cfg.c1 * dv * dv - cfg.c2 * pitch_rate * pitch_rate + 1.0
}

pub fn reward_torque_penalty(base: f64, stance_axial: f64, hip_torque: f64, cfg: &RewardConfig) -> f64 {
    base - cfg.c4 * (stance_axial * stance_axial + hip_torque * hip_torque * TORQUE_SCALE)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_cases() {
        let cfg = RewardConfig::default();
        assert_eq!(reward(0.4, 0.0, false, &cfg), 1.0);
        assert!((reward(0.9, 1.0, false, &cfg) - 0.45).abs() < 1e-12);
        assert_eq!(reward(0.4, 0.0, true, &cfg), -100.0);
    }

    #[test]
    fn torque_penalty_cases() {
        let mut cfg = RewardConfig::default();
        assert_eq!(reward_torque_penalty(0.7, 1000.0, 50.0, &cfg), 0.7);
        cfg.c4 = C4_VARIANT;
        assert!((reward_torque_penalty(0.7, 1000.0, 0.0, &cfg) - (0.7 - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn rejects_negative_constants() {
        let cfg = RewardConfig { c2: -0.1, ..RewardConfig::default() };
        assert!(cfg.validate().is_err());
        let cfg = RewardConfig { t_max_steps: 0, ..RewardConfig::default() };
        assert!(cfg.validate().is_err());
    }
}
