use super::gains::GainSet;
use crate::error::{invalid, Result};

/// Downward foot speed relative to the hip at touchdown, m/s.
pub const TOUCHDOWN_SPEED: f64 = 0.2;

/// Position and velocity of a foot relative to the hip.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FootPoint {
    pub pos: (f64, f64),
    pub vel: (f64, f64),
}

/// Fifth-order polynomial on normalized time `s ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quintic {
    pub coeffs: [f64; 6],
}

/// `d^order/ds^order` of `s^power`.
fn basis(power: usize, order: usize, s: f64) -> f64 {
    if order > power {
        return 0.0;
    }
    let mut factor = 1.0;
    for k in 0..order {
        factor *= (power - k) as f64;
    }
    (0..power - order).fold(factor, |acc, _| acc * s)
}

impl Quintic {
    pub fn derivative(&self, order: usize, s: f64) -> f64 {
        self.coeffs.iter().enumerate().map(|(i, c)| c * basis(i, order, s)).sum()
    }

    pub fn value(&self, s: f64) -> f64 {
        self.derivative(0, s)
    }

    /// Solves for the polynomial meeting six `(order, s, value)` constraints.
    pub fn fit(constraints: &[(usize, f64, f64); 6]) -> Result<Self> {
        let mut a = [[0.0f64; 7]; 6];
        for (row, &(order, s, value)) in a.iter_mut().zip(constraints) {
            for (i, cell) in row.iter_mut().take(6).enumerate() {
                *cell = basis(i, order, s);
            }
            row[6] = value;
        }
        // Gaussian elimination with partial pivoting.
        for col in 0..6 {
            let pivot = (col..6)
                .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
                .unwrap_or(col);
            if a[pivot][col].abs() < 1e-12 {
                return Err(invalid("swing trajectory", "singular boundary conditions"));
            }
            a.swap(col, pivot);
            for r in col + 1..6 {
                let f = a[r][col] / a[col][col];
                if f != 0.0 {
                    for c in col..7 {
                        a[r][c] -= f * a[col][c];
                    }
                }
            }
        }
        let mut coeffs = [0.0; 6];
        for r in (0..6).rev() {
            let tail: f64 = (r + 1..6).map(|c| a[r][c] * coeffs[c]).sum();
            coeffs[r] = (a[r][6] - tail) / a[r][r];
        }
        Ok(Self { coeffs })
    }
}

/// Interior vertical way-point: hip-relative height at normalized time
/// `phase ∈ (0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Apex {
    pub phase: f64,
    pub height: f64,
}

/// Hip-relative swing foot path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwingTrajectory {
    pub start_foot: FootPoint,
    pub target_x: f64,
    pub duration: f64,
    pub horizontal: Quintic,
    pub vertical: Quintic,
}

/// Plans from `start` to `(target_x, end_z)` over `duration`, arriving with
/// hip-relative velocity `(end_vx, end_vz)` and zero end acceleration. The
/// vertical profile passes through `apex` when given.
pub fn plan_swing_segment(
    start: FootPoint,
    target_x: f64,
    end_vx: f64,
    end_z: f64,
    end_vz: f64,
    duration: f64,
    apex: Option<Apex>,
) -> Result<SwingTrajectory> {
    if !(duration > 0.0) || !duration.is_finite() {
        return Err(invalid("swing duration", "must be > 0"));
    }
    let d = duration;
    let horizontal = Quintic::fit(&[
        (0, 0.0, start.pos.0),
        (1, 0.0, start.vel.0 * d),
        (0, 1.0, target_x),
        (1, 1.0, end_vx * d),
        (2, 1.0, 0.0),
        (3, 1.0, 0.0),
    ])?;
    let last = match apex {
        Some(a) if a.phase > 0.0 && a.phase < 1.0 => (0, a.phase, a.height),
        _ => (3, 1.0, 0.0),
    };
    let vertical = Quintic::fit(&[
        (0, 0.0, start.pos.1),
        (1, 0.0, start.vel.1 * d),
        (0, 1.0, end_z),
        (1, 1.0, end_vz * d),
        (2, 1.0, 0.0),
        last,
    ])?;
    Ok(SwingTrajectory { start_foot: start, target_x, duration, horizontal, vertical })
}

/// Full swing of duration `gains.swing_time` from `current_foot` to the
/// placement target `x_p` at the expected ground height `terrain_h_rel` (all
/// hip-relative). The foot ends ground-speed matched (horizontal velocity
/// `−v_act`), descending at [`TOUCHDOWN_SPEED`], and passes
/// `gains.clearance` above the higher of its start and end heights at
/// mid-swing.
pub fn plan_swing(
    current_foot: FootPoint,
    x_p: f64,
    v_act: f64,
    terrain_h_rel: f64,
    gains: &GainSet,
) -> Result<SwingTrajectory> {
    let apex = Apex { phase: 0.5, height: current_foot.pos.1.max(terrain_h_rel) + gains.clearance };
    plan_swing_segment(current_foot, x_p, -v_act, terrain_h_rel, -TOUCHDOWN_SPEED, gains.swing_time, Some(apex))
}

/// Hip-relative set-point at time `t` into the swing; past the end the
/// terminal position is held and the terminal velocity reported.
pub fn swing_setpoint(traj: &SwingTrajectory, t: f64) -> FootPoint {
    let s = (t / traj.duration).clamp(0.0, 1.0);
    let inv = 1.0 / traj.duration;
    FootPoint {
        pos: (traj.horizontal.value(s), traj.vertical.value(s)),
        vel: (traj.horizontal.derivative(1, s) * inv, traj.vertical.derivative(1, s) * inv),
    }
}
