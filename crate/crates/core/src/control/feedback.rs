use super::gains::GainSet;

/// A controller decision: desired ground reaction force and the swing foot
/// placement target (horizontal offset from the CoM at touchdown).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Action {
    pub fx: f64,
    pub fz: f64,
    pub x_p: f64,
}

impl Action {
    pub fn to_array(self) -> [f64; 3] {
        [self.fx, self.fz, self.x_p]
    }

    pub fn from_slice(v: &[f64]) -> Self {
        Self { fx: v[0], fz: v[1], x_p: v[2] }
    }

    pub fn is_finite(&self) -> bool {
        self.fx.is_finite() && self.fz.is_finite() && self.x_p.is_finite()
    }
}

/// Stance PD on torso pitch (horizontal force) and CoM height (vertical force).
pub fn stance_grf(pitch: f64, pitch_rate: f64, z: f64, dz: f64, gains: &GainSet) -> (f64, f64) {
    pitch_height_grf(gains.theta_des, gains.z_des, pitch, pitch_rate, z, dz, gains)
}

/// Same PD law with explicit set-points.
pub(crate) fn pitch_height_grf(
    theta_des: f64,
    z_des: f64,
    pitch: f64,
    pitch_rate: f64,
    z: f64,
    dz: f64,
    gains: &GainSet,
) -> (f64, f64) {
    let fx = gains.k_pt * (theta_des - pitch) + gains.k_dt * (-pitch_rate);
    let fz = gains.k_pz * (z_des - z) + gains.k_dz * (-dz);
    (fx, fz)
}

/// Raibert-style foot placement: velocity feedback plus the `0.5·v·T`
/// neutral-point feedforward (with `v = v_act`).
pub fn foot_placement(v_act: f64, gains: &GainSet) -> f64 {
    gains.k * (v_act - gains.v_tgt) + 0.5 * v_act * gains.swing_time
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_error_gives_zero_force() {
        let g = GainSet::default();
        assert_eq!(stance_grf(g.theta_des, 0.0, g.z_des, 0.0, &g), (0.0, 0.0));
    }

    #[test]
    fn hand_evaluated_forces() {
        let g = GainSet { k_pt: 600.0, k_dt: 40.0, k_pz: 5000.0, k_dz: 300.0, ..GainSet::default() };
        let (fx, _) = stance_grf(g.theta_des - 0.1, 0.2, g.z_des, 0.0, &g);
        assert!((fx - 52.0).abs() < 1e-12);
        let (_, fz) = stance_grf(g.theta_des, 0.0, g.z_des - 0.05, -0.1, &g);
        assert!((fz - 280.0).abs() < 1e-9);
    }

    #[test]
    fn proportional_term_is_linear() {
        let g = GainSet { k_dt: 0.0, ..GainSet::default() };
        let (a, _) = stance_grf(-0.05, 0.0, 0.9, 0.0, &g);
        let (b, _) = stance_grf(-0.10, 0.0, 0.9, 0.0, &g);
        assert_eq!(b, 2.0 * a);
    }

    #[test]
    fn placement_cases() {
        let g = GainSet { v_tgt: 0.0, ..GainSet::default() };
        assert_eq!(foot_placement(0.0, &g), 0.0);
        let g = GainSet { k: 0.2, v_tgt: 0.4, swing_time: 0.34, ..GainSet::default() };
        assert!((foot_placement(0.8, &g) - 0.216).abs() < 1e-12);
        let g = GainSet { v_tgt: 0.0, ..GainSet::default() };
        let v = 0.73;
        assert!((foot_placement(v, &g) - (g.k + 0.5 * g.swing_time) * v).abs() < 1e-15);
    }
}
