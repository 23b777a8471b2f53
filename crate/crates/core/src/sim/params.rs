use crate::error::{invalid, Result};

/// Physical constants of the robot and integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimParams {
    /// kg
    pub mass: f64,
    /// kg·m² about the CoM
    pub inertia: f64,
    pub gravity: f64,
    /// s
    pub dt: f64,
    /// Axial series-spring stiffness, N/m.
    pub spring_k: f64,
    /// Axial damping, N·s/m.
    pub spring_d: f64,
    /// First-order torque / swing tracking time constant, s.
    pub hip_lag: f64,
    pub leg_len_min: f64,
    pub leg_len_max: f64,
    /// Hip torque saturation, N·m.
    pub torque_max: f64,
    pub axial_force_max: f64,
    pub friction_mu: f64,
    /// Fall threshold on |pitch|, rad.
    pub fall_pitch: f64,
    /// Fall threshold on CoM height, m.
    pub fall_height: f64,
    /// Motor-side leg length slew limit, m/s.
    pub motor_rate_max: f64,
    /// Swing leg angle stops, rad.
    pub swing_angle_max: f64,
}

impl Default for SimParams {
    fn default() -> Self {
        Self {
            mass: 64.0,
            inertia: 2.2,
            gravity: 9.81,
            dt: 0.001,
            spring_k: 1.0e4,
            spring_d: 100.0,
            hip_lag: 0.02,
            leg_len_min: 0.5,
            leg_len_max: 1.0,
            torque_max: 200.0,
            axial_force_max: 2000.0,
            friction_mu: 1.0,
            fall_pitch: 0.5,
            fall_height: 0.5,
            motor_rate_max: 2.0,
            swing_angle_max: 1.2,
        }
    }
}

impl SimParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("mass", self.mass),
            ("inertia", self.inertia),
            ("gravity", self.gravity),
            ("dt", self.dt),
            ("spring_k", self.spring_k),
            ("spring_d", self.spring_d),
            ("hip_lag", self.hip_lag),
            ("leg_len_min", self.leg_len_min),
            ("torque_max", self.torque_max),
            ("axial_force_max", self.axial_force_max),
            ("friction_mu", self.friction_mu),
            ("fall_pitch", self.fall_pitch),
            ("fall_height", self.fall_height),
            ("motor_rate_max", self.motor_rate_max),
            ("swing_angle_max", self.swing_angle_max),
        ];
        for (field, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(invalid(field, "must be finite and > 0"));
            }
        }
        if !(self.leg_len_min < self.leg_len_max) || !self.leg_len_max.is_finite() {
            return Err(invalid("leg_len_max", "must exceed leg_len_min"));
        }
        if !(self.fall_height < self.leg_len_max) {
            return Err(invalid("fall_height", "must be below leg_len_max"));
        }
        Ok(())
    }

    /// Weight of the robot, N.
    pub fn weight(&self) -> f64 {
        self.mass * self.gravity
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        SimParams::default().validate().unwrap();
    }

    #[test]
    fn rejects_bad_values() {
        let p = SimParams { dt: -1.0, ..SimParams::default() };
        assert!(p.validate().is_err());
        let p = SimParams { leg_len_min: 1.2, ..SimParams::default() };
        assert!(p.validate().is_err());
        let p = SimParams { fall_height: 1.5, ..SimParams::default() };
        assert!(p.validate().is_err());
    }
}
