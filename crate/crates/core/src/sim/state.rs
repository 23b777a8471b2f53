use libm::{atan2, cos, sin, sqrt};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

/// Which leg carries the torso.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stance {
    Left,
    Right,
    Flight,
}

impl Stance {
    pub fn side(self) -> Option<Side> {
        match self {
            Stance::Left => Some(Side::Left),
            Stance::Right => Some(Side::Right),
            Stance::Flight => None,
        }
    }

    pub fn from_side(side: Side) -> Self {
        match side {
            Side::Left => Stance::Left,
            Side::Right => Stance::Right,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Stance::Left => "left",
            Stance::Right => "right",
            Stance::Flight => "flight",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegState {
    /// From the downward vertical, positive = foot forward.
    pub angle: f64,
    /// Hip to foot, m.
    pub length: f64,
    pub angle_rate: f64,
    pub length_rate: f64,
    /// Motor-side set position of the series spring, m.
    pub motor_length: f64,
    /// Lagged hip torque, N·m.
    pub hip_torque_actual: f64,
    pub foot_x: f64,
    pub foot_z: f64,
    pub in_contact: bool,
    /// Contact point; meaningful only while `in_contact`.
    pub pinned_x: f64,
}

impl LegState {
    /// Leg at rest with its foot placed from the hip.
    pub fn from_geometry(hip_x: f64, hip_z: f64, angle: f64, length: f64) -> Self {
        let mut leg = Self {
            angle,
            length,
            angle_rate: 0.0,
            length_rate: 0.0,
            motor_length: length,
            hip_torque_actual: 0.0,
            foot_x: 0.0,
            foot_z: 0.0,
            in_contact: false,
            pinned_x: 0.0,
        };
        leg.place_foot(hip_x, hip_z);
        leg
    }

    /// Foot position relative to the hip.
    pub fn foot_rel(&self) -> (f64, f64) {
        (self.length * sin(self.angle), -self.length * cos(self.angle))
    }

    /// Foot velocity relative to the hip.
    pub fn foot_rel_vel(&self) -> (f64, f64) {
        let (s, c) = (sin(self.angle), cos(self.angle));
        (
            self.length_rate * s + self.length * c * self.angle_rate,
            -self.length_rate * c + self.length * s * self.angle_rate,
        )
    }

    /// Recomputes the foot from hip + angle/length.
    pub(crate) fn place_foot(&mut self, hip_x: f64, hip_z: f64) {
        let (rx, rz) = self.foot_rel();
        self.foot_x = hip_x + rx;
        self.foot_z = hip_z + rz;
    }

    /// Recomputes angle/length (and their rates) of a pinned leg from the hip
    /// pose, keeping the foot where it is.
    pub(crate) fn attach_to_hip(&mut self, hip_x: f64, hip_z: f64, hip_dx: f64, hip_dz: f64) {
        let ux = self.foot_x - hip_x;
        let uz = self.foot_z - hip_z;
        let len = sqrt(ux * ux + uz * uz);
        self.length = len;
        self.angle = atan2(ux, -uz);
        // d/dt of (ux, uz) = -(hip velocity)
        self.length_rate = -(ux * hip_dx + uz * hip_dz) / len;
        self.angle_rate = (-hip_dx * (-uz) - ux * hip_dz) / (len * len);
    }

    pub fn is_finite(&self) -> bool {
        [
            self.angle,
            self.length,
            self.angle_rate,
            self.length_rate,
            self.motor_length,
            self.hip_torque_actual,
            self.foot_x,
            self.foot_z,
        ]
        .iter()
        .all(|v| v.is_finite())
    }
}

/// Full mechanical state plus the bookkeeping the phase machine needs.
#[derive(Debug, Clone, PartialEq)]
pub struct RobotState {
    pub x: f64,
    pub z: f64,
    /// Horizontal CoM velocity (v_act).
    pub dx: f64,
    pub dz: f64,
    pub pitch: f64,
    pub pitch_rate: f64,
    pub left: LegState,
    pub right: LegState,
    pub stance_leg: Stance,
    /// Most recent stance leg; identifies the swing leg during flight.
    pub last_stance: Side,
    /// Time of the last touchdown (start of the current stance and swing).
    pub phase_start_t: f64,
    /// World height of the swing foot when its swing began.
    pub swing_start_z: f64,
    /// Consecutive post-minimum-stance steps with non-positive axial force.
    pub unload_count: u32,
    pub t: f64,
    pub steps_taken: u32,
    /// Ground reaction force applied during the last step, N.
    pub grf: (f64, f64),
}

impl RobotState {
    pub fn leg(&self, side: Side) -> &LegState {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    pub fn leg_mut(&mut self, side: Side) -> &mut LegState {
        match side {
            Side::Left => &mut self.left,
            Side::Right => &mut self.right,
        }
    }

    /// The leg being swung toward the next foothold.
    pub fn swing_side(&self) -> Side {
        self.last_stance.other()
    }

    /// Support foot: the stance foot, or the last one in flight.
    pub fn support_foot(&self) -> (f64, f64) {
        let leg = self.leg(self.last_stance);
        (leg.foot_x, leg.foot_z)
    }

    /// CoM height above the support foot.
    pub fn height(&self) -> f64 {
        self.z - self.support_foot().1
    }

    /// Time since the current swing began.
    pub fn phase_time(&self) -> f64 {
        self.t - self.phase_start_t
    }

    pub fn is_finite(&self) -> bool {
        [self.x, self.z, self.dx, self.dz, self.pitch, self.pitch_rate, self.t]
            .iter()
            .all(|v| v.is_finite())
            && self.left.is_finite()
            && self.right.is_finite()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn foot_geometry() {
        let leg = LegState::from_geometry(1.0, 0.9, 0.0, 0.9);
        assert!((leg.foot_x - 1.0).abs() < 1e-15);
        assert!(leg.foot_z.abs() < 1e-15);
    }

    #[test]
    fn attach_round_trip() {
        let mut leg = LegState::from_geometry(0.2, 0.85, 0.3, 0.8);
        let (a, l) = (leg.angle, leg.length);
        leg.attach_to_hip(0.2, 0.85, 0.0, 0.0);
        assert!((leg.angle - a).abs() < 1e-12);
        assert!((leg.length - l).abs() < 1e-12);
    }

    #[test]
    fn attach_rates_match_differences() {
        let mut a = LegState::from_geometry(0.0, 0.9, 0.2, 0.85);
        let mut b = a;
        let (vx, vz, h) = (0.7, -0.3, 1e-6);
        a.attach_to_hip(0.0, 0.9, vx, vz);
        b.attach_to_hip(vx * h, 0.9 + vz * h, vx, vz);
        assert!(((b.length - a.length) / h - a.length_rate).abs() < 1e-5);
        assert!(((b.angle - a.angle) / h - a.angle_rate).abs() < 1e-5);
    }
}
