//! Spatial agreement between a generated and a reference FOA clip.
//!
//! Both clips are turned into power energy maps on the same sphere grid and
//! compared with two saliency-style scores: an area-weighted Pearson
//! correlation (CC) and an area-weighted ROC AUC. Scores are reported for the
//! whole clip, for 1000 ms windows and for 200 ms windows; windowed scores are
//! the mean over windows where both scores are defined.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::foa::{map_from_moments, ChannelMoments, EnergyMap, EnergyMode, FoaClip, SampleWindow, SphereGrid};

pub const DEFAULT_FIXATION_PERCENTILE: f64 = 95.0;
pub const SCHEMA_VERSION: u32 = 1;

/// Area-weighted Pearson correlation of two maps on the same grid.
pub fn correlation(gen: &EnergyMap, gt: &EnergyMap) -> Result<f64> {
    check_grids(gen, gt)?;
    let w: Vec<f64> = gen.grid().weights().collect();
    let mean = |v: &[f64]| -> f64 { v.iter().zip(&w).map(|(x, w)| x * w).sum::<f64>() };
    let (mg, mt) = (mean(gen.values()), mean(gt.values()));
    let (mut cov, mut vg, mut vt) = (0.0, 0.0, 0.0);
    for ((g, t), w) in gen.values().iter().zip(gt.values()).zip(&w) {
        let (dg, dt) = (g - mg, t - mt);
        cov += w * dg * dt;
        vg += w * dg * dg;
        vt += w * dt * dt;
    }
    if vg <= 0.0 || !is_varying(gen.values()) {
        return Err(Error::UndefinedCorrelation("generated"));
    }
    if vt <= 0.0 || !is_varying(gt.values()) {
        return Err(Error::UndefinedCorrelation("ground-truth"));
    }
    Ok((cov / (vg.sqrt() * vt.sqrt())).clamp(-1.0, 1.0))
}

/// Area-weighted ROC AUC of `gen` scores against the fixations of `gt`.
///
/// Fixations are the cells whose ground-truth value is at or above the
/// area-weighted `fixation_percentile` of `gt`. Ties in `gen` contribute half.
pub fn auc(gen: &EnergyMap, gt: &EnergyMap, fixation_percentile: f64) -> Result<f64> {
    check_grids(gen, gt)?;
    if !(0.0..=100.0).contains(&fixation_percentile) {
        return Err(Error::InvalidParameter(format!(
            "fixation percentile {fixation_percentile} outside [0, 100]"
        )));
    }
    if !is_varying(gt.values()) {
        return Err(Error::UndefinedFixations("ground-truth map is constant"));
    }
    let weights: Vec<f64> = gt.grid().weights().collect();
    let threshold = weighted_percentile(gt.values(), &weights, fixation_percentile);
    let positive: Vec<bool> = gt.values().iter().map(|v| *v >= threshold).collect();

    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| gen.values()[a].total_cmp(&gen.values()[b]));

    let (mut total_pos, mut total_neg) = (0.0, 0.0);
    for (w, p) in weights.iter().zip(&positive) {
        if *p {
            total_pos += w;
        } else {
            total_neg += w;
        }
    }
    if total_neg <= 0.0 {
        return Err(Error::UndefinedFixations("every cell is a fixation"));
    }

    // weighted Mann-Whitney statistic over tie groups of gen scores
    let mut area = 0.0;
    let mut neg_below = 0.0;
    let mut i = 0;
    while i < order.len() {
        let score = gen.values()[order[i]];
        let (mut pos_w, mut neg_w) = (0.0, 0.0);
        while i < order.len() && gen.values()[order[i]] == score {
            let c = order[i];
            if positive[c] {
                pos_w += weights[c];
            } else {
                neg_w += weights[c];
            }
            i += 1;
        }
        area += pos_w * (neg_below + 0.5 * neg_w);
        neg_below += neg_w;
    }
    Ok((area / (total_pos * total_neg)).clamp(0.0, 1.0))
}

/// Smallest value whose cumulative weight (ascending) reaches `percentile`.
pub fn weighted_percentile(values: &[f64], weights: &[f64], percentile: f64) -> f64 {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let total: f64 = weights.iter().sum();
    let target = percentile / 100.0 * total;
    let mut cumulative = 0.0;
    for &i in &order {
        cumulative += weights[i];
        if cumulative >= target {
            return values[i];
        }
    }
    values[*order.last().expect("nonempty map")]
}

fn check_grids(a: &EnergyMap, b: &EnergyMap) -> Result<()> {
    if Arc::ptr_eq(a.shared_grid(), b.shared_grid()) || a.grid().same_layout(b.grid()) {
        Ok(())
    } else {
        Err(Error::IncompatibleGrids)
    }
}

fn is_varying(values: &[f64]) -> bool {
    values.iter().any(|v| *v != values[0])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Granularity {
    #[serde(rename = "all")]
    All,
    #[serde(rename = "1fps")]
    OneFps,
    #[serde(rename = "5fps")]
    FiveFps,
}

impl Granularity {
    pub const ALL: [Granularity; 3] = [Granularity::All, Granularity::OneFps, Granularity::FiveFps];

    pub fn name(&self) -> &'static str {
        match self {
            Granularity::All => "all",
            Granularity::OneFps => "1fps",
            Granularity::FiveFps => "5fps",
        }
    }

    /// Non-overlapping full windows covering the clip from sample 0.
    /// A trailing partial window is dropped.
    pub fn windows(&self, len: usize, sample_rate: u32) -> Vec<SampleWindow> {
        let size = match self {
            Granularity::All => return vec![SampleWindow::new(0, len)],
            Granularity::OneFps => sample_rate as usize,
            Granularity::FiveFps => ((sample_rate as f64) / 5.0).round().max(1.0) as usize,
        };
        (0..len / size)
            .map(|k| SampleWindow::new(k * size, (k + 1) * size))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct WindowCounts {
    pub all: usize,
    #[serde(rename = "1fps")]
    pub fps1: usize,
    #[serde(rename = "5fps")]
    pub fps5: usize,
}

impl WindowCounts {
    fn slot(&mut self, g: Granularity) -> &mut usize {
        match g {
            Granularity::All => &mut self.all,
            Granularity::OneFps => &mut self.fps1,
            Granularity::FiveFps => &mut self.fps5,
        }
    }

    pub fn get(&self, g: Granularity) -> usize {
        match g {
            Granularity::All => self.all,
            Granularity::OneFps => self.fps1,
            Granularity::FiveFps => self.fps5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpatialReport {
    pub schema_version: u32,
    pub cc_all: f64,
    pub cc_1fps: f64,
    pub cc_5fps: f64,
    pub auc_all: f64,
    pub auc_1fps: f64,
    pub auc_5fps: f64,
    pub windows_used: WindowCounts,
    pub windows_skipped: WindowCounts,
}

impl SpatialReport {
    pub const CSV_HEADER: &'static str = "cc_all,cc_1fps,cc_5fps,auc_all,auc_1fps,auc_5fps,used_all,used_1fps,used_5fps,skipped_all,skipped_1fps,skipped_5fps";

    pub fn cc(&self, g: Granularity) -> f64 {
        match g {
            Granularity::All => self.cc_all,
            Granularity::OneFps => self.cc_1fps,
            Granularity::FiveFps => self.cc_5fps,
        }
    }

    pub fn auc(&self, g: Granularity) -> f64 {
        match g {
            Granularity::All => self.auc_all,
            Granularity::OneFps => self.auc_1fps,
            Granularity::FiveFps => self.auc_5fps,
        }
    }

    pub fn csv_row(&self) -> String {
        let u = &self.windows_used;
        let s = &self.windows_skipped;
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.cc_all,
            self.cc_1fps,
            self.cc_5fps,
            self.auc_all,
            self.auc_1fps,
            self.auc_5fps,
            u.all,
            u.fps1,
            u.fps5,
            s.all,
            s.fps1,
            s.fps5
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialOptions {
    pub fixation_percentile: f64,
}

impl Default for SpatialOptions {
    fn default() -> Self {
        Self {
            fixation_percentile: DEFAULT_FIXATION_PERCENTILE,
        }
    }
}

pub fn evaluate_windows(gen: &FoaClip, gt: &FoaClip, grid: &Arc<SphereGrid>) -> Result<SpatialReport> {
    evaluate_windows_with(gen, gt, grid, &SpatialOptions::default())
}

pub fn evaluate_windows_with(
    gen: &FoaClip,
    gt: &FoaClip,
    grid: &Arc<SphereGrid>,
    options: &SpatialOptions,
) -> Result<SpatialReport> {
    if gen.len() != gt.len() {
        return Err(Error::IncompatibleClips(format!(
            "lengths differ ({} vs {} samples)",
            gen.len(),
            gt.len()
        )));
    }
    if gen.sample_rate() != gt.sample_rate() {
        return Err(Error::IncompatibleClips(format!(
            "sample rates differ ({} vs {} Hz)",
            gen.sample_rate(),
            gt.sample_rate()
        )));
    }
    let mut used = WindowCounts::default();
    let mut skipped = WindowCounts::default();
    let mut means = [(0.0, 0.0); 3];
    for (slot, g) in Granularity::ALL.into_iter().enumerate() {
        let (mut cc_sum, mut auc_sum, mut n) = (0.0, 0.0, 0usize);
        let windows = g.windows(gt.len(), gt.sample_rate());
        for w in &windows {
            match score_window(gen, gt, grid, *w, options.fixation_percentile)? {
                Some((cc, a)) => {
                    cc_sum += cc;
                    auc_sum += a;
                    n += 1;
                }
                None => *skipped.slot(g) += 1,
            }
        }
        if n == 0 {
            return Err(Error::NoUsableWindows(g.name()));
        }
        *used.slot(g) = n;
        means[slot] = (cc_sum / n as f64, auc_sum / n as f64);
    }
    Ok(SpatialReport {
        schema_version: SCHEMA_VERSION,
        cc_all: means[0].0,
        cc_1fps: means[1].0,
        cc_5fps: means[2].0,
        auc_all: means[0].1,
        auc_1fps: means[1].1,
        auc_5fps: means[2].1,
        windows_used: used,
        windows_skipped: skipped,
    })
}

/// Scores one window; `None` when either score is undefined there.
fn score_window(
    gen: &FoaClip,
    gt: &FoaClip,
    grid: &Arc<SphereGrid>,
    window: SampleWindow,
    percentile: f64,
) -> Result<Option<(f64, f64)>> {
    let map = |clip: &FoaClip| -> Result<EnergyMap> {
        let m = ChannelMoments::from_window(clip, window.start, window.end)?;
        Ok(map_from_moments(&m, grid, window, EnergyMode::Power))
    };
    let (gen_map, gt_map) = (map(gen)?, map(gt)?);
    let cc = match correlation(&gen_map, &gt_map) {
        Ok(v) => v,
        Err(Error::UndefinedCorrelation(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let a = match auc(&gen_map, &gt_map, percentile) {
        Ok(v) => v,
        Err(Error::UndefinedFixations(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    Ok(Some((cc, a)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foa::{encode_mono, Direction};

    fn grid(b: usize, a: usize) -> Arc<SphereGrid> {
        Arc::new(SphereGrid::new(b, a).unwrap())
    }

    fn map(g: &Arc<SphereGrid>, values: Vec<f64>) -> EnergyMap {
        EnergyMap::from_values(Arc::clone(g), values, SampleWindow::new(0, 1), EnergyMode::Power).unwrap()
    }

    fn ramp(g: &Arc<SphereGrid>) -> Vec<f64> {
        (0..g.len()).map(|i| ((i * 37) % 101) as f64 + 0.5).collect()
    }

    #[test]
    fn identical_maps_score_one() {
        let g = grid(8, 16);
        let m = map(&g, ramp(&g));
        assert!((correlation(&m, &m).unwrap() - 1.0).abs() < 1e-12);
        assert!((auc(&m, &m, 95.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn negative_affine_map_is_anticorrelated() {
        let g = grid(8, 16);
        let v = ramp(&g);
        let gen = EnergyMap::from_values(
            Arc::clone(&g),
            v.iter().map(|x| -2.0 * x + 3.0).collect(),
            SampleWindow::new(0, 1),
            EnergyMode::LiteralLinear,
        )
        .unwrap();
        assert!((correlation(&gen, &map(&g, v)).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_prediction_is_chance() {
        let g = grid(8, 16);
        let gt = map(&g, ramp(&g));
        let gen = map(&g, vec![0.3; g.len()]);
        assert!((auc(&gen, &gt, 95.0).unwrap() - 0.5).abs() < 1e-12);
        assert!(matches!(correlation(&gen, &gt), Err(Error::UndefinedCorrelation("generated"))));
    }

    #[test]
    fn constant_ground_truth_is_undefined() {
        let g = grid(4, 8);
        let gt = map(&g, vec![1.0; g.len()]);
        let gen = map(&g, ramp(&g));
        assert!(matches!(auc(&gen, &gt, 95.0), Err(Error::UndefinedFixations(_))));
        assert!(matches!(correlation(&gen, &gt), Err(Error::UndefinedCorrelation("ground-truth"))));
    }

    #[test]
    fn grid_mismatch_is_rejected() {
        let (a, b) = (grid(4, 8), grid(8, 16));
        let (ma, mb) = (map(&a, ramp(&a)), map(&b, ramp(&b)));
        assert!(matches!(correlation(&ma, &mb), Err(Error::IncompatibleGrids)));
        assert!(matches!(auc(&ma, &mb, 95.0), Err(Error::IncompatibleGrids)));
        // equal layouts built separately are compatible
        let a2 = grid(4, 8);
        assert!(correlation(&ma, &map(&a2, ramp(&a2))).is_ok());
    }

    #[test]
    fn weighted_percentile_picks_cumulative_crossing() {
        let v = [5.0, 1.0, 3.0, 2.0];
        let w = [0.1, 0.4, 0.3, 0.2];
        // ascending: 1 (0.4), 2 (0.6), 3 (0.9), 5 (1.0)
        assert_eq!(weighted_percentile(&v, &w, 50.0), 2.0);
        assert_eq!(weighted_percentile(&v, &w, 90.0), 3.0);
        assert_eq!(weighted_percentile(&v, &w, 95.0), 5.0);
    }

    #[test]
    fn window_counts_for_five_seconds() {
        let len = 5 * 44100;
        assert_eq!(Granularity::All.windows(len, 44100).len(), 1);
        assert_eq!(Granularity::OneFps.windows(len, 44100).len(), 5);
        assert_eq!(Granularity::FiveFps.windows(len, 44100).len(), 25);
        assert_eq!(Granularity::FiveFps.windows(len, 44100)[1], SampleWindow::new(8820, 17640));
    }

    #[test]
    fn self_evaluation_scores_one() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let s: Vec<f64> = (0..16000).map(|_| rng.random_range(-1.0..1.0)).collect();
        let clip = encode_mono(&s, &Direction::new(1.0, 0.2).unwrap(), 8000).unwrap();
        let r = evaluate_windows(&clip, &clip, &grid(16, 32)).unwrap();
        for g in Granularity::ALL {
            assert!((r.cc(g) - 1.0).abs() < 1e-9);
            assert!((r.auc(g) - 1.0).abs() < 1e-9);
        }
        assert_eq!(r.windows_used, WindowCounts { all: 1, fps1: 2, fps5: 10 });
        assert_eq!(r.windows_skipped, WindowCounts::default());
    }

    #[test]
    fn silent_windows_are_skipped() {
        let mut s = vec![0.0; 16000];
        for (i, v) in s.iter_mut().enumerate().take(8000) {
            *v = (i as f64 * 0.05).sin();
        }
        let clip = encode_mono(&s, &Direction::front(), 8000).unwrap();
        let r = evaluate_windows(&clip, &clip, &grid(8, 16)).unwrap();
        assert_eq!(r.windows_used.fps1, 1);
        assert_eq!(r.windows_skipped.fps1, 1);
        assert_eq!(r.windows_used.fps5 + r.windows_skipped.fps5, 10);
        assert_eq!(r.windows_skipped.fps5, 5);
    }

    #[test]
    fn mismatched_or_silent_clips_error() {
        let a = FoaClip::zeros(8000, 8000).unwrap();
        let b = FoaClip::zeros(8001, 8000).unwrap();
        let c = FoaClip::zeros(8000, 16000).unwrap();
        let g = grid(4, 8);
        assert!(matches!(evaluate_windows(&a, &b, &g), Err(Error::IncompatibleClips(_))));
        assert!(matches!(evaluate_windows(&a, &c, &g), Err(Error::IncompatibleClips(_))));
        assert!(matches!(evaluate_windows(&a, &a, &g), Err(Error::NoUsableWindows("all"))));
    }

    #[test]
    fn csv_row_has_header_arity() {
        let r = SpatialReport {
            schema_version: 1,
            cc_all: 1.0,
            cc_1fps: 0.5,
            cc_5fps: 0.25,
            auc_all: 1.0,
            auc_1fps: 0.9,
            auc_5fps: 0.8,
            windows_used: WindowCounts { all: 1, fps1: 5, fps5: 25 },
            windows_skipped: WindowCounts::default(),
        };
        assert_eq!(
            r.csv_row().split(',').count(),
            SpatialReport::CSV_HEADER.split(',').count()
        );
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["windows_used"]["5fps"], 25);
    }
}
