//! Patchwise visual energy maps from patch embeddings.
//!
//! Each patch gets a spatial score `2 − 2·cos(x, spatial mean)` and a
//! temporal score `2 − 2·cos(x, temporal mean)`, where the means run over
//! the `(2N+1)²` spatial and `2T+1` temporal neighbourhoods (the patch itself
//! included, indices clamped at the borders). Per frame the two score maps
//! are softmaxed over patches, averaged, top-p filtered and renormalized.

use ndarray::{Array3, Array4, ArrayView1, Axis};
use serde::Serialize;

use crate::error::{Error, Result};

pub const DEFAULT_WINDOW: usize = 1;
pub const DEFAULT_TEMPERATURE: f64 = 0.1;
pub const DEFAULT_TOP_P: f64 = 0.7;
/// Score used when a neighbourhood mean has zero norm.
pub const ZERO_MEAN_SCORE: f64 = 2.0;

/// `T × h × w × d` patch features.
#[derive(Debug, Clone, PartialEq)]
pub struct PatchEmbeddings {
    tensor: Array4<f64>,
}

impl PatchEmbeddings {
    pub fn new(tensor: Array4<f64>) -> Result<Self> {
        if tensor.shape().contains(&0) {
            return Err(Error::InvalidInput(format!("embedding shape {:?} has an empty axis", tensor.shape())));
        }
        if tensor.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("embeddings must be finite".into()));
        }
        let (t, h, w, _) = tensor.dim();
        for ti in 0..t {
            for i in 0..h {
                for j in 0..w {
                    let row = tensor.slice(ndarray::s![ti, i, j, ..]);
                    if row.iter().all(|v| *v == 0.0) {
                        return Err(Error::InvalidInput(format!("embedding at (t={ti}, i={i}, j={j}) is all zero")));
                    }
                }
            }
        }
        Ok(Self { tensor })
    }

    /// Builds from row-major `f32` data of shape `[T, h, w, d]`.
    pub fn from_f32(shape: [usize; 4], data: &[f32]) -> Result<Self> {
        let tensor = Array4::from_shape_vec(shape, data.iter().map(|v| *v as f64).collect())
            .map_err(|e| Error::DimensionMismatch(e.to_string()))?;
        Self::new(tensor)
    }

    pub fn tensor(&self) -> &Array4<f64> {
        &self.tensor
    }

    /// `(T, h, w, d)`.
    pub fn dim(&self) -> (usize, usize, usize, usize) {
        self.tensor.dim()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoreKind {
    Spatial,
    Temporal,
}

/// A patch whose neighbourhood mean vanished; its score is [`ZERO_MEAN_SCORE`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct UndefinedPatch {
    pub kind: ScoreKind,
    pub t: usize,
    pub i: usize,
    pub j: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatchScores {
    pub spatial: Array3<f64>,
    pub temporal: Array3<f64>,
    pub undefined: Vec<UndefinedPatch>,
}

fn cosine(a: ArrayView1<f64>, b: &[f64]) -> Option<f64> {
    let mut dot = 0.0;
    let mut na = 0.0;
    let mut nb = 0.0;
    for (x, y) in a.iter().zip(b) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if nb == 0.0 {
        return None;
    }
    Some((dot / (na.sqrt() * nb.sqrt())).clamp(-1.0, 1.0))
}

fn clamp_index(center: usize, offset: isize, len: usize) -> usize {
    (center as isize + offset).clamp(0, len as isize - 1) as usize
}

pub fn patch_scores(emb: &PatchEmbeddings, spatial_window: usize, temporal_window: usize) -> PatchScores {
    let x = emb.tensor();
    let (nt, h, w, d) = emb.dim();
    let sw = spatial_window as isize;
    let tw = temporal_window as isize;
    let spatial_count = ((2 * spatial_window + 1) * (2 * spatial_window + 1)) as f64;
    let temporal_count = (2 * temporal_window + 1) as f64;

    let mut spatial = Array3::zeros((nt, h, w));
    let mut temporal = Array3::zeros((nt, h, w));
    let mut undefined = Vec::new();
    let mut mean = vec![0.0; d];

    for t in 0..nt {
        for i in 0..h {
            for j in 0..w {
                let patch = x.slice(ndarray::s![t, i, j, ..]);

                mean.iter_mut().for_each(|m| *m = 0.0);
                for di in -sw..=sw {
                    let k = clamp_index(i, di, h);
                    for dj in -sw..=sw {
                        let l = clamp_index(j, dj, w);
                        for (m, v) in mean.iter_mut().zip(x.slice(ndarray::s![t, k, l, ..])) {
                            *m += v;
                        }
                    }
                }
                mean.iter_mut().for_each(|m| *m /= spatial_count);
                spatial[[t, i, j]] = match cosine(patch, &mean) {
                    Some(c) => 2.0 - 2.0 * c,
                    None => {
                        undefined.push(UndefinedPatch { kind: ScoreKind::Spatial, t, i, j });
                        ZERO_MEAN_SCORE
                    }
                };

                mean.iter_mut().for_each(|m| *m = 0.0);
                for dt in -tw..=tw {
                    let k = clamp_index(t, dt, nt);
                    for (m, v) in mean.iter_mut().zip(x.slice(ndarray::s![k, i, j, ..])) {
                        *m += v;
                    }
                }
                mean.iter_mut().for_each(|m| *m /= temporal_count);
                temporal[[t, i, j]] = match cosine(patch, &mean) {
                    Some(c) => 2.0 - 2.0 * c,
                    None => {
                        undefined.push(UndefinedPatch { kind: ScoreKind::Temporal, t, i, j });
                        ZERO_MEAN_SCORE
                    }
                };
            }
        }
    }
    PatchScores {
        spatial,
        temporal,
        undefined,
    }
}

/// `T × h × w` map where each frame is a probability distribution over patches.
#[derive(Debug, Clone, PartialEq)]
pub struct PatchEnergyMap {
    values: Array3<f64>,
}

impl PatchEnergyMap {
    pub fn values(&self) -> &Array3<f64> {
        &self.values
    }

    pub fn into_values(self) -> Array3<f64> {
        self.values
    }

    /// Row-major `f32` copy for serialization.
    pub fn to_f32(&self) -> Vec<f32> {
        self.values.iter().map(|v| *v as f32).collect()
    }

    /// Binary PGM of one frame, scaled so the frame maximum is 255.
    pub fn frame_pgm(&self, t: usize) -> Vec<u8> {
        let (_, h, w) = self.values.dim();
        let frame = self.values.index_axis(Axis(0), t);
        let max = frame.iter().cloned().fold(0.0f64, f64::max);
        let mut out = format!("P5\n{w} {h}\n255\n").into_bytes();
        for v in frame.iter() {
            let g = if max > 0.0 { (v / max * 255.0).round() } else { 0.0 };
            out.push(g.clamp(0.0, 255.0) as u8);
        }
        out
    }
}

fn softmax(scores: &[f64], temperature: f64) -> Vec<f64> {
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = scores.iter().map(|s| ((s - max) / temperature).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Keeps the smallest highest-probability set with mass ≥ `top_p` (plus any
/// patches tied with the last one kept), zeroes the rest and renormalizes.
pub fn top_p_filter(probs: &mut [f64], top_p: f64) {
    let mut order: Vec<usize> = (0..probs.len()).collect();
    order.sort_by(|&a, &b| probs[b].total_cmp(&probs[a]));
    let mut cumulative = 0.0;
    let mut cutoff = probs[order[order.len() - 1]];
    for &i in &order {
        cumulative += probs[i];
        if cumulative >= top_p {
            cutoff = probs[i];
            break;
        }
    }
    for p in probs.iter_mut() {
        if *p < cutoff {
            *p = 0.0;
        }
    }
    let kept: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= kept);
}

pub fn energy_from_scores(
    spatial: &Array3<f64>,
    temporal: &Array3<f64>,
    temperature: f64,
    top_p: f64,
) -> Result<PatchEnergyMap> {
    if spatial.dim() != temporal.dim() {
        return Err(Error::DimensionMismatch(format!(
            "spatial scores {:?} vs temporal scores {:?}",
            spatial.dim(),
            temporal.dim()
        )));
    }
    if !(temperature > 0.0 && temperature.is_finite()) {
        return Err(Error::InvalidParameter(format!("temperature {temperature} must be positive")));
    }
    if !(top_p > 0.0 && top_p <= 1.0) {
        return Err(Error::InvalidParameter(format!("top-p {top_p} must be in (0, 1]")));
    }
    if spatial.iter().chain(temporal.iter()).any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("scores must be finite".into()));
    }
    let (nt, h, w) = spatial.dim();
    let mut values = Array3::zeros((nt, h, w));
    for t in 0..nt {
        let s: Vec<f64> = spatial.index_axis(Axis(0), t).iter().cloned().collect();
        let tm: Vec<f64> = temporal.index_axis(Axis(0), t).iter().cloned().collect();
        let ps = softmax(&s, temperature);
        let pt = softmax(&tm, temperature);
        let mut avg: Vec<f64> = ps.iter().zip(&pt).map(|(a, b)| 0.5 * (a + b)).collect();
        top_p_filter(&mut avg, top_p);
        for (dst, v) in values.index_axis_mut(Axis(0), t).iter_mut().zip(avg) {
            *dst = v;
        }
    }
    Ok(PatchEnergyMap { values })
}

/// Scores and aggregates with the given windows and sampling parameters.
pub fn patch_energy(
    emb: &PatchEmbeddings,
    spatial_window: usize,
    temporal_window: usize,
    temperature: f64,
    top_p: f64,
) -> Result<(PatchEnergyMap, Vec<UndefinedPatch>)> {
    let scores = patch_scores(emb, spatial_window, temporal_window);
    let map = energy_from_scores(&scores.spatial, &scores.temporal, temperature, top_p)?;
    Ok((map, scores.undefined))
}
