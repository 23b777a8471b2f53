use alloc::vec::Vec;

use rand::Rng as _;

use crate::error::{invalid, Result};
use crate::rng::rng_from;

/// Piecewise-constant ground profile.
///
/// Segment `i` covers `[start_x[i], start_x[i + 1])`; the first segment also
/// extends to −∞ and the last to +∞.
#[derive(Debug, Clone, PartialEq)]
pub struct Terrain {
    segments: Vec<(f64, f64)>,
}

impl Terrain {
    pub fn new(segments: Vec<(f64, f64)>) -> Result<Self> {
        if segments.is_empty() {
            return Err(invalid("terrain", "needs at least one segment"));
        }
        if segments.windows(2).any(|w| !(w[0].0 < w[1].0)) {
            return Err(invalid("terrain", "segment starts must be strictly increasing"));
        }
        if segments.iter().any(|(x, h)| !x.is_finite() || !h.is_finite()) {
            return Err(invalid("terrain", "segments must be finite"));
        }
        Ok(Self { segments })
    }

    pub fn flat(height: f64) -> Self {
        Self { segments: alloc::vec![(-100.0, height)] }
    }

    pub fn segments(&self) -> &[(f64, f64)] {
        &self.segments
    }

    pub fn height_at(&self, x: f64) -> f64 {
        // index of the last segment whose start is <= x
        let idx = self.segments.partition_point(|&(start, _)| start <= x);
        self.segments[idx.saturating_sub(1)].1
    }

    pub fn max_abs_height(&self) -> f64 {
        self.segments.iter().fold(0.0, |m, &(_, h)| if h.abs() > m { h.abs() } else { m })
    }
}

pub fn terrain_height(terrain: &Terrain, x: f64) -> f64 {
    terrain.height_at(x)
}

/// Random step terrain parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TerrainSpec {
    /// Maximum |height| of any segment, m.
    pub max_dev: f64,
    pub step_len_min: f64,
    pub step_len_max: f64,
    /// Terrain is generated from x = 0 up to at least this distance, m.
    pub extent: f64,
}

impl Default for TerrainSpec {
    fn default() -> Self {
        Self { max_dev: 0.10, step_len_min: 0.3, step_len_max: 0.8, extent: 25.0 }
    }
}

impl TerrainSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.max_dev >= 0.0) || !self.max_dev.is_finite() {
            return Err(invalid("max_dev", "must be finite and >= 0"));
        }
        if !(self.step_len_min > 0.0 && self.step_len_min <= self.step_len_max)
            || !self.step_len_max.is_finite()
        {
            return Err(invalid("step_len_min", "need 0 < step_len_min <= step_len_max"));
        }
        if !(self.extent >= 0.0) || !self.extent.is_finite() {
            return Err(invalid("extent", "must be finite and >= 0"));
        }
        Ok(())
    }
}

/// Draws a step terrain. The segment under the start position (x = 0) is at
/// height zero; the following segments have uniform lengths in
/// `[step_len_min, step_len_max]` and uniform heights in `[-max_dev, max_dev]`.
pub fn generate_terrain(seed: u64, spec: &TerrainSpec) -> Result<Terrain> {
    spec.validate()?;
    let mut rng = rng_from(seed);
    let draw_len = |rng: &mut crate::rng::Rng| {
        if spec.step_len_min == spec.step_len_max {
            spec.step_len_min
        } else {
            rng.gen_range(spec.step_len_min..=spec.step_len_max)
        }
    };
    let mut segments = Vec::new();
    segments.push((-1.0, 0.0));
    let mut x = draw_len(&mut rng);
    while x <= spec.extent {
        let h = if spec.max_dev == 0.0 { 0.0 } else { rng.gen_range(-spec.max_dev..=spec.max_dev) };
        segments.push((x, h));
        x += draw_len(&mut rng);
    }
    Terrain::new(segments)
}
