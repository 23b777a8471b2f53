use biped_core::control::*;
use biped_core::sim::{initial_state, stance_wrench, InitMode, LegState, SimParams};
use proptest::prelude::*;

#[test]
fn expert_zero_error_action() {
    let p = SimParams::default();
    let g = GainSet::default();
    let mut s = initial_state(&p, g.z_des, InitMode::UnloadedDrop);
    s.z = g.z_des;
    s.dx = g.v_tgt;
    let a = expert_action(&s, &g);
    assert_eq!(a, Action { fx: 0.0, fz: 0.0, x_p: 0.5 * g.v_tgt * g.swing_time });
}

#[test]
fn expert_is_composition() {
    let p = SimParams::default();
    let g = GainSet::default();
    let mut s = initial_state(&p, 0.85, InitMode::UnloadedDrop);
    s.pitch = 0.07;
    s.pitch_rate = -0.4;
    s.dz = 0.2;
    s.dx = 0.55;
    let a = expert_action(&s, &g);
    let (fx, fz) = stance_grf(s.pitch, s.pitch_rate, s.height(), s.dz, &g);
    assert_eq!((a.fx, a.fz, a.x_p), (fx, fz, foot_placement(s.dx, &g)));
}

#[test]
fn placement_with_zero_target_is_linear() {
    let g = GainSet { v_tgt: 0.0, ..GainSet::default() };
    for v in [-0.3, 0.0, 0.25, 1.1] {
        assert_eq!(foot_placement(v, &g), (g.k + 0.5 * g.swing_time) * v);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn grf_is_affine(pitch in -0.4..0.4f64, rate in -2.0..2.0f64, z in 0.6..1.0f64, dz in -1.0..1.0f64) {
        let g = GainSet::default();
        let (fx, fz) = stance_grf(pitch, rate, z, dz, &g);
        let (fx0, fz0) = stance_grf(0.0, 0.0, 0.0, 0.0, &g);
        let (fxp, _) = stance_grf(pitch, 0.0, 0.0, 0.0, &g);
        let (fxr, _) = stance_grf(0.0, rate, 0.0, 0.0, &g);
        let (_, fzz) = stance_grf(0.0, 0.0, z, 0.0, &g);
        let (_, fzd) = stance_grf(0.0, 0.0, 0.0, dz, &g);
        prop_assert!((fx - (fxp + fxr - fx0)).abs() <= 1e-9);
        prop_assert!((fz - (fzz + fzd - fz0)).abs() <= 1e-9);
    }

    #[test]
    fn placement_increasing(v in -2.0..2.0f64, dv in 1e-6..1.0f64, k in 0.0..0.5f64, t in 0.1..0.6f64) {
        let g = GainSet { k, swing_time: t, ..GainSet::default() };
        prop_assert!(foot_placement(v + dv, &g) > foot_placement(v, &g));
    }

    #[test]
    fn swing_boundaries(
        sx in -0.4..0.2f64, sz in -0.95..-0.6f64, svx in -0.5..0.5f64,
        x_p in -0.4..0.4f64, v in -0.5..1.0f64, h in -0.95..-0.75f64,
    ) {
        let g = GainSet::default();
        let start = FootPoint { pos: (sx, sz), vel: (svx, 0.0) };
        let traj = plan_swing(start, x_p, v, h, &g).unwrap();
        let a = swing_setpoint(&traj, 0.0);
        prop_assert!((a.pos.0 - sx).abs() <= 1e-12 && (a.pos.1 - sz).abs() <= 1e-12 && (a.vel.0 - svx).abs() <= 1e-12);
        let b = swing_setpoint(&traj, g.swing_time);
        prop_assert!((b.pos.0 - x_p).abs() <= 1e-12);
        prop_assert!((b.vel.0 + v).abs() <= 1e-12);
        prop_assert!((b.pos.1 - h).abs() <= 1e-12);
    }

    #[test]
    fn inverse_dynamics_round_trip(
        fx in -150.0..150.0f64, fz in 200.0..1200.0f64, angle in -0.4..0.4f64, length in 0.7..0.98f64,
    ) {
        let p = SimParams::default();
        prop_assume!(fx.abs() <= p.friction_mu * fz);
        prop_assume!((length * (fx * angle.cos() + fz * angle.sin())).abs() <= p.torque_max);
        let c = inverse_dynamics(fx, fz, angle, length, 0.0, &p);
        let (rx, rz) = stance_wrench(c.axial_force, c.hip_torque, angle, length);
        prop_assert!((rx - fx).abs() <= 1e-9 && (rz - fz).abs() <= 1e-9);
    }

    #[test]
    fn ik_inverts_geometry(angle in -1.0..1.0f64, length in 0.55..0.99f64) {
        let p = SimParams::default();
        let leg = LegState::from_geometry(0.0, 0.0, angle, length);
        let ik = inverse_kinematics(leg.foot_rel(), &p);
        prop_assert!(!ik.out_of_reach);
        prop_assert!((ik.angle - angle).abs() <= 1e-12);
        prop_assert!((ik.length - length).abs() <= 1e-12);
    }
}
