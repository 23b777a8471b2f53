use biped_core::control::{expert_action, motor_command, GainSet};
use biped_core::sim::*;
use proptest::prelude::*;

fn flight_state(dx: f64, dz: f64, w: f64) -> RobotState {
    let p = SimParams::default();
    let mut s = initial_state(&p, 0.9, InitMode::UnloadedDrop);
    s.z = 1.5;
    s.left.in_contact = false;
    s.stance_leg = Stance::Flight;
    s.dx = dx;
    s.dz = dz;
    s.pitch_rate = w;
    s
}

fn energy(s: &RobotState, p: &SimParams) -> f64 {
    0.5 * p.mass * (s.dx * s.dx + s.dz * s.dz) + 0.5 * p.inertia * s.pitch_rate * s.pitch_rate + p.mass * p.gravity * s.z
}

#[test]
fn spring_force_cases() {
    let p = SimParams::default();
    assert_eq!(axial_spring_force(0.9, 0.9, 0.0, &p), 0.0);
    assert!((axial_spring_force(0.91, 0.9, 0.0, &p) - 100.0).abs() < 1e-9);
    assert!((axial_spring_force(0.89, 0.9, 0.0, &p) + 100.0).abs() < 1e-9);
}

#[test]
fn fall_cases() {
    let p = SimParams::default();
    let mut s = initial_state(&p, 0.9, InitMode::UnloadedDrop);
    s.pitch = 0.6;
    assert!(check_fall(&s, &p));
    s.pitch = 0.0;
    s.z = 0.45;
    assert!(check_fall(&s, &p));
    s.pitch = 0.1;
    s.z = 0.9;
    assert!(!check_fall(&s, &p));
}

#[test]
fn ballistic_flight_matches_closed_form() {
    let p = SimParams::default();
    let s0 = flight_state(0.7, 1.2, 0.3);
    let mut s = s0.clone();
    let cmd = MotorCommand::default();
    for _ in 0..500 {
        s = step(&s, &cmd, &p).unwrap();
    }
    let t = s.t;
    assert!((t - 0.5).abs() < 1e-9);
    assert!((s.x - (s0.x + s0.dx * t)).abs() <= 1e-6);
    assert!((s.z - (s0.z + s0.dz * t - 0.5 * p.gravity * t * t)).abs() <= 1e-6);
    assert!((s.pitch - s0.pitch_rate * t).abs() <= 1e-9);
}

#[test]
fn static_equilibrium_holds() {
    let p = SimParams::default();
    let mut s = initial_state(&p, 0.9, InitMode::PreloadedLowered);
    s.z = 0.9;
    s.left.length = 0.9;
    s.left.motor_length = 0.9 + p.weight() / p.spring_k;
    let cmd = MotorCommand { stance_motor_length: s.left.motor_length, ..MotorCommand::default() };
    let mut cur = s.clone();
    for _ in 0..100 {
        let next = step(&cur, &cmd, &p).unwrap();
        assert!((next.z - cur.z).abs() <= 1e-6);
        assert!((next.x - cur.x).abs() <= 1e-6);
        assert!((next.pitch - cur.pitch).abs() <= 1e-6);
        cur = next;
    }
}

#[test]
fn preload_modes_initial_force() {
    let p = SimParams::default();
    let pre = initial_state(&p, 0.9, InitMode::PreloadedLowered);
    let leg = pre.left;
    let f = axial_spring_force(leg.motor_length, leg.length, leg.length_rate, &p);
    assert!((f - p.weight()).abs() <= 0.01 * p.weight());
    assert!((leg.motor_length - leg.length - 0.062_784).abs() < 1e-9);
    let un = initial_state(&p, 0.9, InitMode::UnloadedDrop);
    let leg = un.left;
    assert!(axial_spring_force(leg.motor_length, leg.length, leg.length_rate, &p).abs() <= 1.0);
}

#[test]
fn fsm_touchdown_swaps_roles() {
    let p = SimParams::default();
    let mut s = initial_state(&p, 0.9, InitMode::UnloadedDrop);
    s.t = 0.3;
    s.right.foot_z = -0.01;
    let timing = FsmTiming::from_swing_duration(0.34, 0.1);
    let n = fsm_update(&s, &Terrain::flat(0.0), &p, &timing);
    assert_eq!(n.stance_leg, Stance::Right);
    assert_eq!(n.steps_taken, 1);
    assert!(n.right.in_contact && !n.left.in_contact);
    assert_eq!(n.right.foot_z, 0.0);
}

#[test]
fn fsm_keeps_roles_above_ground() {
    let p = SimParams::default();
    let mut s = initial_state(&p, 0.9, InitMode::UnloadedDrop);
    s.t = 0.3;
    let timing = FsmTiming::from_swing_duration(0.34, 0.1);
    let n = fsm_update(&s, &Terrain::flat(0.0), &p, &timing);
    assert_eq!(n.stance_leg, Stance::Left);
    assert_eq!(n.steps_taken, 0);
}

#[test]
fn fsm_liftoff_after_unloading() {
    let p = SimParams::default();
    let mut s = initial_state(&p, 0.9, InitMode::UnloadedDrop);
    s.t = 0.2;
    // −50 N of tension on the stance spring
    s.left.motor_length = s.left.length - 50.0 / p.spring_k;
    let timing = FsmTiming::from_swing_duration(0.34, 0.1);
    for i in 0..LIFTOFF_UNLOAD_STEPS {
        assert_eq!(s.stance_leg, Stance::Left, "left early at {i}");
        s = fsm_update(&s, &Terrain::flat(0.0), &p, &timing);
    }
    assert_eq!(s.stance_leg, Stance::Flight);
}

fn run_expert(terrain: &Terrain, gains: &GainSet, steps: usize, mut check: impl FnMut(&RobotState, &RobotState)) {
    let p = SimParams::default();
    let timing = FsmTiming::from_swing_duration(gains.swing_time, 0.1);
    let mut s = initial_state(&p, gains.z_des, InitMode::UnloadedDrop);
    for _ in 0..steps {
        let a = expert_action(&s, gains);
        let out = motor_command(&s, &a, gains, &p);
        let next = step(&s, &out.cmd, &p).unwrap();
        check(&s, &next);
        s = fsm_update(&next, terrain, &p, &timing);
        if check_fall(&s, &p) {
            break;
        }
    }
}

#[test]
fn expert_trajectory_is_deterministic() {
    let t = generate_terrain(3, &TerrainSpec::default()).unwrap();
    let mut a = Vec::new();
    run_expert(&t, &GainSet::default(), 3000, |_, s| a.push(s.clone()));
    let mut b = Vec::new();
    run_expert(&t, &GainSet::default(), 3000, |_, s| b.push(s.clone()));
    assert_eq!(a, b);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn flight_conserves_momentum_and_energy(dx in -2.0..2.0f64, dz in -1.0..3.0f64, w in -2.0..2.0f64) {
        let p = SimParams::default();
        let mut s = flight_state(dx, dz, w);
        let (m0, e0) = (p.mass * s.dx, energy(&s, &p));
        for _ in 0..300 {
            s = step(&s, &MotorCommand::default(), &p).unwrap();
        }
        prop_assert!((p.mass * s.dx - m0).abs() <= 1e-9);
        prop_assert!((energy(&s, &p) - e0).abs() <= 1e-6 * s.t.max(1.0));
    }

    #[test]
    fn step_invariants_along_expert_runs(
        seed in 0u64..1000,
        k_pt in 400.0..1500.0f64,
        k in 0.1..0.4f64,
        v_tgt in 0.0..0.8f64,
    ) {
        let p = SimParams::default();
        let g = GainSet { k_pt, k_dt: 0.1 * k_pt, k, v_tgt, ..GainSet::default() };
        let t = generate_terrain(seed, &TerrainSpec::default()).unwrap();
        let mut ok = true;
        run_expert(&t, &g, 1500, |prev, s| {
            for leg in [&s.left, &s.right] {
                let (rx, rz) = leg.foot_rel();
                ok &= (s.x + rx - leg.foot_x).abs() <= 1e-12 && (s.z + rz - leg.foot_z).abs() <= 1e-12;
                ok &= leg.length >= p.leg_len_min - 1e-12 && leg.length <= p.leg_len_max + 1e-12;
                ok &= leg.hip_torque_actual.abs() <= p.torque_max;
            }
            if let Some(side) = s.stance_leg.side() {
                let leg = s.leg(side);
                ok &= leg.foot_x == leg.pinned_x;
                ok &= prev.leg(side).foot_z == leg.foot_z;
            }
            ok &= s.grf.0.abs() <= p.friction_mu * s.grf.1 + 1e-9;
        });
        prop_assert!(ok);
    }

    #[test]
    fn terrain_bounded_and_reproducible(seed in any::<u64>(), dev in 0.0..0.2f64) {
        let spec = TerrainSpec { max_dev: dev, ..TerrainSpec::default() };
        let a = generate_terrain(seed, &spec).unwrap();
        prop_assert!(a.segments().iter().all(|&(_, h)| h.abs() <= dev));
        prop_assert_eq!(a, generate_terrain(seed, &spec).unwrap());
    }
}
