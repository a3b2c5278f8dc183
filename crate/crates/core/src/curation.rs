//! Corpus curation filters for raw FOA recordings.
//!
//! All per-second rules work on full one-second segments starting at
//! sample 0; a trailing partial second is ignored.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::foa::{full_power_map, Direction, FoaClip, SphereGrid};

/// Mean absolute amplitude below which a channel-second counts as empty.
pub const AMPLITUDE_FLOOR: f64 = 1e-20;
pub const CLIP_SECONDS: usize = 5;
/// A 5 s window is kept when strictly more than 3 s are valid.
pub const MIN_VALID_SECONDS: usize = 4;

fn seconds(clip: &FoaClip) -> usize {
    clip.len() / clip.sample_rate() as usize
}

fn second_range(clip: &FoaClip, k: usize) -> std::ops::Range<usize> {
    let sr = clip.sample_rate() as usize;
    k * sr..(k + 1) * sr
}

/// Rejects the clip (`false`) if any channel has a one-second window whose
/// mean absolute amplitude is below [`AMPLITUDE_FLOOR`].
pub fn amplitude_gate(clip: &FoaClip) -> Result<bool> {
    let n = seconds(clip);
    if n == 0 {
        return Err(Error::InvalidInput(format!(
            "clip of {} samples at {} Hz is shorter than one second",
            clip.len(),
            clip.sample_rate()
        )));
    }
    for ch in clip.channels() {
        for k in 0..n {
            let seg = &ch[second_range(clip, k)];
            let mean_abs = seg.iter().map(|v| v.abs()).sum::<f64>() / seg.len() as f64;
            if mean_abs < AMPLITUDE_FLOOR {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// One validity flag per full second.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentMask {
    pub valid: Vec<bool>,
}

impl SegmentMask {
    pub fn new(valid: Vec<bool>) -> Self {
        Self { valid }
    }

    pub fn len(&self) -> usize {
        self.valid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.valid.is_empty()
    }
}

/// A second is valid when the RMS of its W samples reaches `rms_threshold`.
pub fn segment_mask(clip: &FoaClip, rms_threshold: f64) -> Result<SegmentMask> {
    if !rms_threshold.is_finite() || rms_threshold < 0.0 {
        return Err(Error::InvalidParameter(format!("RMS threshold {rms_threshold} must be nonnegative")));
    }
    let valid = (0..seconds(clip))
        .map(|k| {
            let seg = &clip.w()[second_range(clip, k)];
            let rms = (seg.iter().map(|v| v * v).sum::<f64>() / seg.len() as f64).sqrt();
            rms >= rms_threshold
        })
        .collect();
    Ok(SegmentMask { valid })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClipWindow {
    pub start_second: usize,
    pub end_second: usize,
}

/// Non-overlapping 5 s windows at stride 5 with at least 4 valid seconds.
pub fn select_windows(mask: &SegmentMask) -> Vec<ClipWindow> {
    mask.valid
        .chunks_exact(CLIP_SECONDS)
        .enumerate()
        .filter(|(_, chunk)| chunk.iter().filter(|v| **v).count() >= MIN_VALID_SECONDS)
        .map(|(k, _)| ClipWindow {
            start_second: k * CLIP_SECONDS,
            end_second: (k + 1) * CLIP_SECONDS,
        })
        .collect()
}

/// Direction of the strongest cell of the full-clip power map.
pub fn fov_center(clip: &FoaClip, grid: &Arc<SphereGrid>) -> Result<Direction> {
    let map = full_power_map(clip, grid);
    if map.values().iter().all(|v| *v == 0.0) {
        return Err(Error::NoEnergy);
    }
    Ok(grid.cells()[map.argmax()].direction)
}

/// Sub-clip covering whole seconds `[start, end)`.
pub fn slice_seconds(clip: &FoaClip, window: &ClipWindow) -> Result<FoaClip> {
    let sr = clip.sample_rate() as usize;
    let (a, b) = (window.start_second * sr, window.end_second * sr);
    if a >= b || b > clip.len() {
        return Err(Error::InvalidInput(format!(
            "window {}..{} s exceeds the clip",
            window.start_second, window.end_second
        )));
    }
    FoaClip::new(std::array::from_fn(|c| clip.channel(c)[a..b].to_vec()), clip.sample_rate())
}

/// Keeps scores at or above `mean − std` (population standard deviation).
pub fn relevance_filter(scores: &[f64]) -> Result<Vec<bool>> {
    if scores.len() < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            got: scores.len(),
        });
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::InvalidInput("relevance scores must be finite".into()));
    }
    let n = scores.len() as f64;
    let mean = scores.iter().sum::<f64>() / n;
    let std = (scores.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / n).sqrt();
    let cut = mean - std;
    Ok(scores.iter().map(|s| *s >= cut).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foa::encode_mono;

    const SR: u32 = 1000;

    fn sine(len: usize, amp: f64) -> Vec<f64> {
        (0..len).map(|i| amp * (i as f64 * 0.3).sin()).collect()
    }

    fn clip(ch: [Vec<f64>; 4]) -> FoaClip {
        FoaClip::new(ch, SR).unwrap()
    }

    #[test]
    fn gate_cases() {
        assert!(!amplitude_gate(&FoaClip::zeros(2000, SR).unwrap()).unwrap());
        let s = sine(2000, 0.1);
        assert!(amplitude_gate(&clip([s.clone(), s.clone(), s.clone(), s.clone()])).unwrap());
        let z = vec![0.0; 2000];
        assert!(!amplitude_gate(&clip([s.clone(), z.clone(), z.clone(), z])).unwrap());
        // one silent second in one channel is enough
        let mut y = s.clone();
        y[1000..].iter_mut().for_each(|v| *v = 0.0);
        assert!(!amplitude_gate(&clip([s.clone(), s.clone(), y, s.clone()])).unwrap());
        assert!(amplitude_gate(&FoaClip::zeros(999, SR).unwrap()).is_err());
    }

    #[test]
    fn mask_alternates() {
        let mut w = vec![0.0; 6000];
        for k in (1..6).step_by(2) {
            w[k * 1000..(k + 1) * 1000].copy_from_slice(&sine(1000, 1.0));
        }
        let z = vec![0.0; 6000];
        let m = segment_mask(&clip([w, z.clone(), z.clone(), z]), 0.1).unwrap();
        assert_eq!(m.valid, vec![false, true, false, true, false, true]);
        let silent = segment_mask(&FoaClip::zeros(3500, SR).unwrap(), 0.1).unwrap();
        assert_eq!(silent.valid, vec![false; 3]);
        assert!(segment_mask(&FoaClip::zeros(1000, SR).unwrap(), -1.0).is_err());
    }

    #[test]
    fn window_rule() {
        let m = |v: &[u8]| SegmentMask::new(v.iter().map(|b| *b == 1).collect());
        assert_eq!(select_windows(&m(&[1, 1, 1, 1, 0])).len(), 1);
        assert!(select_windows(&m(&[1, 1, 0, 0, 0])).is_empty());
        assert!(select_windows(&m(&[1, 1, 1, 0, 0])).is_empty());
        assert_eq!(
            select_windows(&m(&[1, 1, 1, 1, 1, 0, 0, 0, 0, 0])),
            vec![ClipWindow { start_second: 0, end_second: 5 }]
        );
        assert!(select_windows(&m(&[1, 1, 1, 1])).is_empty());
        let w = select_windows(&m(&[0, 1, 1, 1, 1, 1, 1, 0, 1, 1, 1, 1]));
        assert_eq!(w, vec![
            ClipWindow { start_second: 0, end_second: 5 },
            ClipWindow { start_second: 5, end_second: 10 },
        ]);
    }

    #[test]
    fn relevance_cut_arithmetic() {
        // mean 8, population std 4, cut at 4
        let keep = relevance_filter(&[0.0, 10.0, 10.0, 10.0, 10.0]).unwrap();
        assert_eq!(keep, vec![false, true, true, true, true]);
        assert_eq!(relevance_filter(&[3.0; 4]).unwrap(), vec![true; 4]);
        assert!(relevance_filter(&[1.0]).is_err());
    }

    #[test]
    fn fov_center_tie_and_errors() {
        let grid = Arc::new(SphereGrid::new(8, 16).unwrap());
        assert!(matches!(fov_center(&FoaClip::zeros(100, SR).unwrap(), &grid), Err(Error::NoEnergy)));
        // identical signals from zenith and nadir cancel the directional channels,
        // leaving a flat map: the tie goes to cell 0
        let s = sine(500, 0.5);
        let up = encode_mono(&s, &Direction::new(0.3, 1.2).unwrap(), SR).unwrap();
        // antipode: same W, negated directional channels
        let [w, x, y, z] = up.channels().clone();
        let neg = |v: Vec<f64>| v.into_iter().map(|a| -a).collect::<Vec<_>>();
        let down = FoaClip::new([w, neg(x), neg(y), neg(z)], SR).unwrap();
        let both = up.mix(&down).unwrap();
        assert_eq!(fov_center(&both, &grid).unwrap(), grid.cells()[0].direction);
    }

    #[test]
    fn slicing_whole_seconds() {
        let c = FoaClip::zeros(6000, SR).unwrap();
        let s = slice_seconds(&c, &ClipWindow { start_second: 0, end_second: 5 }).unwrap();
        assert_eq!(s.len(), 5000);
        assert!(slice_seconds(&c, &ClipWindow { start_second: 5, end_second: 10 }).is_err());
    }
}
