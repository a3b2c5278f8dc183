//! Directional energy maps of an FOA clip.
//!
//! A cell's value is derived from the virtual-cardioid decode
//! `s(u) = W + X·ux + Y·uy + Z·uz` at the cell direction `u`. In `Power` mode
//! the value is the time-mean of `s(u)²`, in `LiteralLinear` mode the
//! time-mean of `s(u)` itself. Both only depend on the first and second
//! moments of the four channels over the window, so a map costs one pass
//! over the samples plus a 4×4 quadratic form per cell.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::clip::{Direction, FoaClip};
use super::grid::SphereGrid;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnergyMode {
    /// Mean squared decoded pressure.
    #[default]
    Power,
    /// Mean decoded pressure, without squaring.
    LiteralLinear,
}

impl FromStr for EnergyMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "power" => Ok(Self::Power),
            "literal-linear" | "linear" => Ok(Self::LiteralLinear),
            _ => Err(Error::InvalidParameter(format!("unknown energy mode '{s}'"))),
        }
    }
}

impl fmt::Display for EnergyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Power => "power",
            Self::LiteralLinear => "literal-linear",
        })
    }
}

/// First and second moments of the (W, X, Y, Z) channels over a window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelMoments {
    pub mean: [f64; 4],
    pub second: [[f64; 4]; 4],
}

impl ChannelMoments {
    pub fn from_window(clip: &FoaClip, start: usize, end: usize) -> Result<Self> {
        if start >= end || end > clip.len() {
            return Err(Error::InvalidWindow {
                start,
                end,
                len: clip.len(),
            });
        }
        let ch = clip.channels();
        let mut sum = [0.0; 4];
        let mut second = [[0.0; 4]; 4];
        for t in start..end {
            let a = [ch[0][t], ch[1][t], ch[2][t], ch[3][t]];
            for i in 0..4 {
                sum[i] += a[i];
                for j in i..4 {
                    second[i][j] += a[i] * a[j];
                }
            }
        }
        let n = (end - start) as f64;
        for i in 0..4 {
            sum[i] /= n;
            for j in i..4 {
                second[i][j] /= n;
                second[j][i] = second[i][j];
            }
        }
        Ok(Self { mean: sum, second })
    }

    pub fn power_at(&self, direction: &Direction) -> f64 {
        self.power_at_unit(direction.unit_vector())
    }

    pub fn linear_at(&self, direction: &Direction) -> f64 {
        self.linear_at_unit(direction.unit_vector())
    }

    pub fn value_at(&self, direction: &Direction, mode: EnergyMode) -> f64 {
        match mode {
            EnergyMode::Power => self.power_at(direction),
            EnergyMode::LiteralLinear => self.linear_at(direction),
        }
    }

    fn power_at_unit(&self, u: [f64; 3]) -> f64 {
        let g = [1.0, u[0], u[1], u[2]];
        let mut acc = 0.0;
        for i in 0..4 {
            let mut row = 0.0;
            for j in 0..4 {
                row += self.second[i][j] * g[j];
            }
            acc += g[i] * row;
        }
        acc.max(0.0)
    }

    fn linear_at_unit(&self, u: [f64; 3]) -> f64 {
        self.mean[0] + self.mean[1] * u[0] + self.mean[2] * u[1] + self.mean[3] * u[2]
    }
}

/// Half-open sample range `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleWindow {
    pub start: usize,
    pub end: usize,
}

impl SampleWindow {
    pub fn new(start: usize, end: usize) -> Self {
        Self { start, end }
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyMap {
    grid: Arc<SphereGrid>,
    values: Vec<f64>,
    window: SampleWindow,
    mode: EnergyMode,
}

impl EnergyMap {
    /// Wraps precomputed cell values.
    pub fn from_values(grid: Arc<SphereGrid>, values: Vec<f64>, window: SampleWindow, mode: EnergyMode) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a grid of {} cells",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("energy values must be finite".into()));
        }
        if mode == EnergyMode::Power && values.iter().any(|v| *v < 0.0) {
            return Err(Error::InvalidInput("power energy values must be nonnegative".into()));
        }
        Ok(Self {
            grid,
            values,
            window,
            mode,
        })
    }

    pub fn grid(&self) -> &SphereGrid {
        &self.grid
    }

    pub fn shared_grid(&self) -> &Arc<SphereGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn window(&self) -> SampleWindow {
        self.window
    }

    pub fn mode(&self) -> EnergyMode {
        self.mode
    }

    /// Index of the largest value; ties go to the lowest (band, azimuth) index.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, v) in self.values.iter().enumerate() {
            if *v > self.values[best] {
                best = i;
            }
        }
        best
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("azimuth,elevation,weight,value\n");
        for (cell, v) in self.grid.cells().iter().zip(&self.values) {
            out.push_str(&format!(
                "{},{},{},{}\n",
                cell.direction.azimuth(),
                cell.direction.elevation(),
                cell.area_weight,
                v
            ));
        }
        out
    }

    /// Binary PGM heatmap. Each row is one elevation band (top row = highest
    /// band), left-aligned and zero-padded to the widest band.
    pub fn to_pgm(&self) -> Vec<u8> {
        let width = (0..self.grid.n_elevation_bands())
            .map(|b| self.grid.band_range(b).len())
            .max()
            .unwrap_or(1);
        let height = self.grid.n_elevation_bands();
        let max = self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = self.values.iter().cloned().fold(f64::INFINITY, f64::min);
        let lo = if min < 0.0 { min } else { 0.0 };
        let span = max - lo;
        let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
        for band in (0..height).rev() {
            let range = self.grid.band_range(band);
            let n = range.len();
            for v in &self.values[range] {
                out.push(to_gray(*v, lo, span));
            }
            out.extend(std::iter::repeat_n(0u8, width - n));
        }
        out
    }
}

fn to_gray(v: f64, lo: f64, span: f64) -> u8 {
    if span > 0.0 {
        ((v - lo) / span * 255.0).round().clamp(0.0, 255.0) as u8
    } else {
        0
    }
}

/// Evaluates the energy of `clip` over `window` at every cell of `grid`.
pub fn energy_map(clip: &FoaClip, grid: &Arc<SphereGrid>, window: SampleWindow, mode: EnergyMode) -> Result<EnergyMap> {
    let moments = ChannelMoments::from_window(clip, window.start, window.end)?;
    Ok(map_from_moments(&moments, grid, window, mode))
}

pub(crate) fn map_from_moments(
    moments: &ChannelMoments,
    grid: &Arc<SphereGrid>,
    window: SampleWindow,
    mode: EnergyMode,
) -> EnergyMap {
    let values = grid
        .cells()
        .iter()
        .map(|c| match mode {
            EnergyMode::Power => moments.power_at_unit(c.unit),
            EnergyMode::LiteralLinear => moments.linear_at_unit(c.unit),
        })
        .collect();
    EnergyMap {
        grid: Arc::clone(grid),
        values,
        window,
        mode,
    }
}

/// Full-clip power map.
pub fn full_power_map(clip: &FoaClip, grid: &Arc<SphereGrid>) -> EnergyMap {
    let window = SampleWindow::new(0, clip.len());
    let moments = ChannelMoments::from_window(clip, 0, clip.len()).expect("clip is nonempty");
    map_from_moments(&moments, grid, window, EnergyMode::Power)
}
