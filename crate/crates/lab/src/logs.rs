//! CSV logs. Comma separated, header first, floats in shortest round-trip
//! form, booleans as 0/1.

use std::fmt::Display;
use std::io::{self, Write};

use biped_core::learning::{CurvePoint, StepRecord};
use biped_core::sim::{axial_spring_force, SimParams};
use biped_core::transfer::TransferReport;

pub const TRAJECTORY_COLUMNS: [&str; 19] = [
    "t",
    "x",
    "z",
    "dx",
    "dz",
    "pitch",
    "pitch_rate",
    "stance_leg",
    "left_angle",
    "left_length",
    "right_angle",
    "right_length",
    "Fx_cmd",
    "Fz_cmd",
    "xp_cmd",
    "axial_force",
    "hip_torque",
    "reward",
    "fell",
];

pub const REWARD_CURVE_COLUMNS: [&str; 5] =
    ["iteration", "mean_reward", "std_reward", "mean_episode_steps", "fall_fraction"];

pub const TRANSFER_COLUMNS: [&str; 8] =
    ["policy_id", "kind", "env", "n_episodes", "n_success", "success_rate", "mean_reward", "mean_steps"];

pub const TRANSFER_SUMMARY_COLUMNS: [&str; 7] =
    ["kind", "env", "n_policies", "n_episodes", "n_success", "success_rate", "policies_transferred"];

pub const FALL_HISTOGRAM_COLUMNS: [&str; 6] = ["policy_id", "kind", "env", "bin_start", "bin_end", "falls"];

/// Steps per fall-histogram bin.
pub const FALL_BIN: u32 = 1000;

/// One simulated step as logged.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRow {
    pub t: f64,
    pub x: f64,
    pub z: f64,
    pub dx: f64,
    pub dz: f64,
    pub pitch: f64,
    pub pitch_rate: f64,
    pub stance_leg: &'static str,
    pub left_angle: f64,
    pub left_length: f64,
    pub right_angle: f64,
    pub right_length: f64,
    pub fx_cmd: f64,
    pub fz_cmd: f64,
    pub xp_cmd: f64,
    /// Measured spring force of the stance leg; 0 in flight.
    pub axial_force: f64,
    /// Delivered hip torque of the stance leg; 0 in flight.
    pub hip_torque: f64,
    pub reward: f64,
    pub fell: bool,
}

impl TrajectoryRow {
    pub fn from_record(rec: &StepRecord<'_>, params: &SimParams) -> Self {
        let s = rec.state;
        let (axial_force, hip_torque) = match s.stance_leg.side() {
            Some(side) => {
                let leg = s.leg(side);
                (axial_spring_force(leg.motor_length, leg.length, leg.length_rate, params), leg.hip_torque_actual)
            }
            None => (0.0, 0.0),
        };
        Self {
            t: s.t,
            x: s.x,
            z: s.z,
            dx: s.dx,
            dz: s.dz,
            pitch: s.pitch,
            pitch_rate: s.pitch_rate,
            stance_leg: s.stance_leg.as_str(),
            left_angle: s.left.angle,
            left_length: s.left.length,
            right_angle: s.right.angle,
            right_length: s.right.length,
            fx_cmd: rec.action.fx,
            fz_cmd: rec.action.fz,
            xp_cmd: rec.action.x_p,
            axial_force,
            hip_torque,
            reward: rec.reward,
            fell: rec.fell,
        }
    }
}

fn row<W: Write>(w: &mut W, cells: &[&dyn Display]) -> io::Result<()> {
    for (i, c) in cells.iter().enumerate() {
        if i > 0 {
            w.write_all(b",")?;
        }
        write!(w, "{c}")?;
    }
    w.write_all(b"\n")
}

fn header<W: Write>(w: &mut W, columns: &[&str]) -> io::Result<()> {
    writeln!(w, "{}", columns.join(","))
}

fn flag(b: bool) -> u8 {
    u8::from(b)
}

pub fn write_trajectory<W: Write>(w: &mut W, rows: &[TrajectoryRow]) -> io::Result<()> {
    header(w, &TRAJECTORY_COLUMNS)?;
    for r in rows {
        row(
            w,
            &[
                &r.t,
                &r.x,
                &r.z,
                &r.dx,
                &r.dz,
                &r.pitch,
                &r.pitch_rate,
                &r.stance_leg,
                &r.left_angle,
                &r.left_length,
                &r.right_angle,
                &r.right_length,
                &r.fx_cmd,
                &r.fz_cmd,
                &r.xp_cmd,
                &r.axial_force,
                &r.hip_torque,
                &r.reward,
                &flag(r.fell),
            ],
        )?;
    }
    Ok(())
}

pub fn write_reward_curve<W: Write>(w: &mut W, curve: &[CurvePoint]) -> io::Result<()> {
    header(w, &REWARD_CURVE_COLUMNS)?;
    for c in curve {
        row(w, &[&c.iteration, &c.mean_reward, &c.std_reward, &c.mean_episode_steps, &c.fall_fraction])?;
    }
    Ok(())
}

pub fn write_transfer_report<W: Write>(w: &mut W, report: &TransferReport) -> io::Result<()> {
    header(w, &TRANSFER_COLUMNS)?;
    for r in &report.rows {
        let s = &r.stats;
        row(
            w,
            &[
                &r.policy_id,
                &r.kind.as_str(),
                &r.env.as_str(),
                &s.n_episodes,
                &s.n_success,
                &s.success_rate,
                &s.mean_reward,
                &s.mean_steps,
            ],
        )?;
    }
    Ok(())
}

pub fn write_transfer_summary<W: Write>(w: &mut W, report: &TransferReport) -> io::Result<()> {
    header(w, &TRANSFER_SUMMARY_COLUMNS)?;
    for a in &report.aggregate {
        row(
            w,
            &[
                &a.kind.as_str(),
                &a.env.as_str(),
                &a.n_policies,
                &a.n_episodes,
                &a.n_success,
                &a.success_rate,
                &a.policies_transferred,
            ],
        )?;
    }
    Ok(())
}

pub fn write_fall_histograms<W: Write>(w: &mut W, report: &TransferReport, max_steps: u32) -> io::Result<()> {
    header(w, &FALL_HISTOGRAM_COLUMNS)?;
    for r in &report.rows {
        for (i, falls) in r.stats.fall_histogram(FALL_BIN, max_steps).iter().enumerate() {
            let start = i as u32 * FALL_BIN;
            let end = (start + FALL_BIN).min(max_steps);
            row(w, &[&r.policy_id, &r.kind.as_str(), &r.env.as_str(), &start, &end, falls])?;
        }
    }
    Ok(())
}

/// A parsed CSV file: header plus string cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    /// `Err((line, message))` on a ragged or empty file.
    pub fn parse(text: &str) -> Result<Self, (usize, String)> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, first) = lines.next().ok_or((1, "empty file".to_string()))?;
        let header: Vec<String> = first.split(',').map(|s| s.trim().to_string()).collect();
        let mut rows = Vec::new();
        for (i, l) in lines {
            let cells: Vec<String> = l.split(',').map(|s| s.trim().to_string()).collect();
            if cells.len() != header.len() {
                return Err((i + 1, format!("expected {} cells, got {}", header.len(), cells.len())));
            }
            rows.push(cells);
        }
        Ok(Self { header, rows })
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

/// Numeric code of a categorical cell, for plotting.
pub fn category_code(cell: &str) -> Option<f64> {
    Some(match cell {
        "flight" => -1.0,
        "left" | "pure_nn" | "nominal" => 0.0,
        "right" | "heuristic_nn" | "surrogate" => 1.0,
        _ => return None,
    })
}

/// Selected columns (all when `columns` is empty) with every cell numeric.
pub fn plot_table(table: &Table, columns: &[String]) -> Result<Table, String> {
    let idx: Vec<usize> = if columns.is_empty() {
        (0..table.header.len()).collect()
    } else {
        columns.iter().map(|c| table.column(c).ok_or_else(|| format!("no column `{c}`"))).collect::<Result<_, _>>()?
    };
    let header = idx.iter().map(|&i| table.header[i].clone()).collect();
    let mut rows = Vec::with_capacity(table.rows.len());
    for (r, cells) in table.rows.iter().enumerate() {
        let mut out = Vec::with_capacity(idx.len());
        for &i in &idx {
            let cell = &cells[i];
            let v = match cell.parse::<f64>() {
                Ok(v) => v,
                Err(_) => category_code(cell).ok_or_else(|| format!("row {}: `{cell}` is not numeric", r + 2))?,
            };
            out.push(v.to_string());
        }
        rows.push(out);
    }
    Ok(Table { header, rows })
}

pub fn write_table<W: Write>(w: &mut W, table: &Table) -> io::Result<()> {
    writeln!(w, "{}", table.header.join(","))?;
    for r in &table.rows {
        writeln!(w, "{}", r.join(","))?;
    }
    Ok(())
}
