use core::fmt;
use core::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::sim::SimParams;

/// Gains and set-points of the reactive controller. SI units throughout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainSet {
    pub k_pt: f64,
    pub k_dt: f64,
    pub k_pz: f64,
    pub k_dz: f64,
    pub theta_des: f64,
    pub z_des: f64,
    /// Velocity feedback gain of the foot placement law, s.
    pub k: f64,
    pub v_tgt: f64,
    /// Swing duration, s.
    pub swing_time: f64,
    /// Swing apex foot clearance, m.
    pub clearance: f64,
}

impl Default for GainSet {
    fn default() -> Self {
        Self {
            k_pt: 600.0,
            k_dt: 60.0,
            k_pz: 5000.0,
            k_dz: 300.0,
            theta_des: 0.0,
            z_des: 0.9,
            k: 0.2,
            v_tgt: 0.4,
            swing_time: 0.34,
            clearance: 0.10,
        }
    }
}

impl GainSet {
    pub fn validate(&self) -> Result<()> {
        for name in GainName::ALL {
            if !self.get(name).is_finite() {
                return Err(invalid(name.as_str(), "must be finite"));
            }
        }
        if !(self.k_pt > 0.0) {
            return Err(invalid("K_pt", "must be > 0"));
        }
        if !(self.k_pz > 0.0) {
            return Err(invalid("K_pz", "must be > 0"));
        }
        if !(self.swing_time > 0.0) {
            return Err(invalid("T", "must be > 0"));
        }
        if !(self.z_des > 0.0) {
            return Err(invalid("z_des", "must be > 0"));
        }
        if !(self.clearance >= 0.0) {
            return Err(invalid("clearance", "must be >= 0"));
        }
        Ok(())
    }

    /// [`validate`](Self::validate) plus reachability of `z_des`.
    pub fn validate_for(&self, params: &SimParams) -> Result<()> {
        self.validate()?;
        if !(self.z_des >= params.leg_len_min && self.z_des <= params.leg_len_max) {
            return Err(invalid("z_des", "must lie within the leg length range"));
        }
        Ok(())
    }

    pub fn get(&self, name: GainName) -> f64 {
        match name {
            GainName::KPt => self.k_pt,
            GainName::KDt => self.k_dt,
            GainName::KPz => self.k_pz,
            GainName::KDz => self.k_dz,
            GainName::ThetaDes => self.theta_des,
            GainName::ZDes => self.z_des,
            GainName::K => self.k,
            GainName::VTgt => self.v_tgt,
            GainName::SwingTime => self.swing_time,
            GainName::Clearance => self.clearance,
        }
    }

    pub fn set(&mut self, name: GainName, value: f64) {
        let slot = match name {
            GainName::KPt => &mut self.k_pt,
            GainName::KDt => &mut self.k_dt,
            GainName::KPz => &mut self.k_pz,
            GainName::KDz => &mut self.k_dz,
            GainName::ThetaDes => &mut self.theta_des,
            GainName::ZDes => &mut self.z_des,
            GainName::K => &mut self.k,
            GainName::VTgt => &mut self.v_tgt,
            GainName::SwingTime => &mut self.swing_time,
            GainName::Clearance => &mut self.clearance,
        };
        *slot = value;
    }
}

/// Field names of [`GainSet`] as they appear in config and checkpoint files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GainName {
    KPt,
    KDt,
    KPz,
    KDz,
    ThetaDes,
    ZDes,
    K,
    VTgt,
    SwingTime,
    Clearance,
}

impl GainName {
    pub const ALL: [GainName; 10] = [
        GainName::KPt,
        GainName::KDt,
        GainName::KPz,
        GainName::KDz,
        GainName::ThetaDes,
        GainName::ZDes,
        GainName::K,
        GainName::VTgt,
        GainName::SwingTime,
        GainName::Clearance,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            GainName::KPt => "K_pt",
            GainName::KDt => "K_dt",
            GainName::KPz => "K_pz",
            GainName::KDz => "K_dz",
            GainName::ThetaDes => "theta_des",
            GainName::ZDes => "z_des",
            GainName::K => "k",
            GainName::VTgt => "v_tgt",
            GainName::SwingTime => "T",
            GainName::Clearance => "clearance",
        }
    }
}

impl fmt::Display for GainName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GainName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GainName::ALL
            .iter()
            .copied()
            .find(|n| n.as_str() == s)
            .ok_or(invalid("gain_name", "not a GainSet field"))
    }
}
