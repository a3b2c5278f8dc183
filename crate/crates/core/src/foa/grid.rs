//! Equal-area-corrected equirectangular sampling of the sphere.
//!
//! Elevation is split into equal-angle bands. A plain equirectangular lattice
//! gives every band the same number of azimuth samples, which oversamples the
//! poles. Here the band at elevation `ε` keeps `max(1, round(M cos ε))`
//! samples, where `M` is the sample count on the equator, and every cell
//! carries its exact solid-angle fraction as a weight.

use std::f64::consts::{PI, TAU};

use super::clip::Direction;
use crate::error::{Error, Result};

pub const DEFAULT_ELEVATION_BANDS: usize = 32;
pub const DEFAULT_AZIMUTH_SAMPLES: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct GridCell {
    pub direction: Direction,
    /// Fraction of the full sphere covered by this cell.
    pub area_weight: f64,
    pub band: usize,
    pub azimuth_index: usize,
    pub samples_in_band: usize,
    pub(crate) unit: [f64; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct SphereGrid {
    n_elevation_bands: usize,
    max_azimuth_samples: usize,
    cells: Vec<GridCell>,
    band_starts: Vec<usize>,
}

impl SphereGrid {
    pub fn new(n_elevation_bands: usize, max_azimuth_samples: usize) -> Result<Self> {
        if n_elevation_bands == 0 || max_azimuth_samples == 0 {
            return Err(Error::InvalidParameter("grid dimensions must be at least 1x1".into()));
        }
        let band_height = PI / n_elevation_bands as f64;
        let mut cells = Vec::new();
        let mut band_starts = Vec::with_capacity(n_elevation_bands + 1);
        for band in 0..n_elevation_bands {
            band_starts.push(cells.len());
            let lower = -PI / 2.0 + band as f64 * band_height;
            let upper = lower + band_height;
            let elevation = lower + 0.5 * band_height;
            let samples = samples_for_band(max_azimuth_samples, elevation);
            // solid angle of the band over 4π
            let band_area = (upper.sin() - lower.sin()) / 2.0;
            for j in 0..samples {
                let direction = Direction::new(TAU * j as f64 / samples as f64, elevation)?;
                cells.push(GridCell {
                    direction,
                    area_weight: band_area / samples as f64,
                    band,
                    azimuth_index: j,
                    samples_in_band: samples,
                    unit: direction.unit_vector(),
                });
            }
        }
        band_starts.push(cells.len());
        Ok(Self {
            n_elevation_bands,
            max_azimuth_samples,
            cells,
            band_starts,
        })
    }

    /// Parses `BANDSxAZIMUTHS`, e.g. `32x64`.
    pub fn parse(text: &str) -> Result<Self> {
        let (b, a) = text
            .split_once(['x', 'X'])
            .ok_or_else(|| Error::InvalidParameter(format!("grid '{text}' is not of the form BANDSxAZIMUTHS")))?;
        let parse = |s: &str| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidParameter(format!("grid '{text}' has a non-integer dimension")))
        };
        Self::new(parse(b)?, parse(a)?)
    }

    pub fn n_elevation_bands(&self) -> usize {
        self.n_elevation_bands
    }

    pub fn max_azimuth_samples(&self) -> usize {
        self.max_azimuth_samples
    }

    pub fn cells(&self) -> &[GridCell] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Cell index range of one elevation band (band 0 is the lowest).
    pub fn band_range(&self, band: usize) -> std::ops::Range<usize> {
        self.band_starts[band]..self.band_starts[band + 1]
    }

    pub fn weights(&self) -> impl Iterator<Item = f64> + '_ {
        self.cells.iter().map(|c| c.area_weight)
    }

    /// Index of the cell center closest to `direction` along the sphere.
    pub fn nearest_cell(&self, direction: &Direction) -> usize {
        let mut best = 0;
        let mut best_angle = f64::INFINITY;
        for (i, cell) in self.cells.iter().enumerate() {
            let a = cell.direction.angle_to(direction);
            if a < best_angle {
                best_angle = a;
                best = i;
            }
        }
        best
    }

    pub(crate) fn same_layout(&self, other: &SphereGrid) -> bool {
        self.n_elevation_bands == other.n_elevation_bands
            && self.max_azimuth_samples == other.max_azimuth_samples
    }
}

impl Default for SphereGrid {
    fn default() -> Self {
        Self::new(DEFAULT_ELEVATION_BANDS, DEFAULT_AZIMUTH_SAMPLES).expect("default grid is valid")
    }
}

fn samples_for_band(max_azimuth_samples: usize, elevation: f64) -> usize {
    ((max_azimuth_samples as f64 * elevation.cos()).round() as usize).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_one() {
        for (b, a) in [(1, 1), (2, 3), (8, 16), (32, 64), (45, 90), (7, 200)] {
            let g = SphereGrid::new(b, a).unwrap();
            let total: f64 = g.weights().sum();
            assert!((total - 1.0).abs() < 1e-9, "{b}x{a}: {total}");
            assert!(g.weights().all(|w| w > 0.0));
        }
    }

    #[test]
    fn band_sampling_follows_cosine() {
        let g = SphereGrid::default();
        for band in 0..g.n_elevation_bands() {
            let r = g.band_range(band);
            let cell = &g.cells()[r.start];
            let expected = ((64.0 * cell.direction.elevation().cos()).round() as usize).max(1);
            assert_eq!(r.len(), expected);
            assert_eq!(cell.samples_in_band, expected);
        }
        // equatorial bands keep nearly every sample; polar bands far fewer
        assert_eq!(g.band_range(16).len(), 64);
        assert!(g.band_range(0).len() < 8);
    }

    #[test]
    fn parse_grid_string() {
        let g = SphereGrid::parse("8x16").unwrap();
        assert_eq!((g.n_elevation_bands(), g.max_azimuth_samples()), (8, 16));
        assert!(SphereGrid::parse("8by16").is_err());
        assert!(SphereGrid::parse("0x16").is_err());
    }

    #[test]
    fn nearest_cell_of_cell_center_is_itself() {
        let g = SphereGrid::new(8, 16).unwrap();
        for (i, c) in g.cells().iter().enumerate() {
            assert_eq!(g.nearest_cell(&c.direction), i);
        }
    }
}
