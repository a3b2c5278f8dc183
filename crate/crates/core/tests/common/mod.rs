//! Test fixtures and independent oracles. Nothing here calls the library's
//! own numerical routines.
#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use foakit_core::foa::{encode_mono, Direction, FoaClip, Rotation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn noise(rng: &mut impl Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| StandardNormal.sample(rng)).collect()
}

/// Uniform on the sphere.
pub fn random_direction(rng: &mut impl Rng) -> Direction {
    let z: f64 = rng.random_range(-1.0..1.0);
    let az: f64 = rng.random_range(0.0..TAU);
    Direction::new(az, z.asin()).unwrap()
}

pub fn random_rotation(rng: &mut impl Rng) -> Rotation {
    let axis = random_direction(rng).unit_vector();
    Rotation::from_axis_angle(axis, rng.random_range(-PI..PI)).unwrap()
}

pub fn random_clip(rng: &mut impl Rng, len: usize, sample_rate: u32) -> FoaClip {
    let ch = std::array::from_fn(|_| noise(rng, len));
    FoaClip::new(ch, sample_rate).unwrap()
}

pub fn noise_source(rng: &mut impl Rng, len: usize, sample_rate: u32) -> (FoaClip, Direction) {
    let d = random_direction(rng);
    let s = noise(rng, len);
    (encode_mono(&s, &d, sample_rate).unwrap(), d)
}

pub fn unit(az: f64, el: f64) -> [f64; 3] {
    [az.cos() * el.cos(), az.sin() * el.cos(), el.sin()]
}

/// Mean squared decoded pressure, computed sample by sample.
pub fn brute_power(clip: &FoaClip, start: usize, end: usize, az: f64, el: f64) -> f64 {
    let u = unit(az, el);
    let mut acc = 0.0;
    for n in start..end {
        let s = clip.w()[n] + clip.x()[n] * u[0] + clip.y()[n] * u[1] + clip.z()[n] * u[2];
        acc += s * s;
    }
    acc / (end - start) as f64
}

/// Weighted Pearson correlation by direct summation.
pub fn pearson(a: &[f64], b: &[f64], w: &[f64]) -> f64 {
    let sw: f64 = w.iter().sum();
    let ma = a.iter().zip(w).map(|(x, w)| x * w).sum::<f64>() / sw;
    let mb = b.iter().zip(w).map(|(x, w)| x * w).sum::<f64>() / sw;
    let mut num = 0.0;
    let mut da = 0.0;
    let mut db = 0.0;
    for i in 0..a.len() {
        num += w[i] * (a[i] - ma) * (b[i] - mb);
        da += w[i] * (a[i] - ma).powi(2);
        db += w[i] * (b[i] - mb).powi(2);
    }
    num / (da * db).sqrt()
}

/// Smallest distinct value `v` with weight(values ≤ v) ≥ p·total.
pub fn percentile_threshold(values: &[f64], w: &[f64], percentile: f64) -> f64 {
    let mut distinct: Vec<f64> = values.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    let total: f64 = w.iter().sum();
    for v in &distinct {
        let below: f64 = values.iter().zip(w).filter(|(x, _)| **x <= *v).map(|(_, w)| w).sum();
        if below >= percentile / 100.0 * total - 1e-15 {
            return *v;
        }
    }
    *distinct.last().unwrap()
}

/// Area under the weighted ROC curve by trapezoidal integration over all
/// distinct score thresholds.
pub fn trapezoid_auc(scores: &[f64], positive: &[bool], w: &[f64]) -> f64 {
    let p: f64 = positive.iter().zip(w).filter(|(p, _)| **p).map(|(_, w)| w).sum();
    let n: f64 = positive.iter().zip(w).filter(|(p, _)| !**p).map(|(_, w)| w).sum();
    let mut thresholds: Vec<f64> = scores.to_vec();
    thresholds.sort_by(|a, b| b.total_cmp(a));
    thresholds.dedup();
    let (mut fpr0, mut tpr0) = (0.0, 0.0);
    let mut area = 0.0;
    for t in thresholds {
        let mut tp = 0.0;
        let mut fp = 0.0;
        for i in 0..scores.len() {
            if scores[i] >= t {
                if positive[i] {
                    tp += w[i];
                } else {
                    fp += w[i];
                }
            }
        }
        let (fpr, tpr) = (fp / n, tp / p);
        area += (fpr - fpr0) * (tpr + tpr0) / 2.0;
        fpr0 = fpr;
        tpr0 = tpr;
    }
    area
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |j| *j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

pub fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let (n, m, k) = (a.len(), b[0].len(), b.len());
    (0..n).map(|i| (0..m).map(|j| (0..k).map(|l| a[i][l] * b[l][j]).sum()).collect()).collect()
}

pub fn transpose(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

/// Lower Cholesky factor of an SPD matrix.
pub fn cholesky(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                l[i][j] = (a[i][i] - s).sqrt();
            } else {
                l[i][j] = (a[i][j] - s) / l[j][j];
            }
        }
    }
    l
}

/// Fréchet distance via tr√(Σ₁Σ₂) = Σ √eig(Lᵀ Σ₂ L), Σ₁ = L Lᵀ.
pub fn frechet_oracle(m1: &[f64], s1: &[Vec<f64>], m2: &[f64], s2: &[Vec<f64>]) -> f64 {
    let mean: f64 = m1.iter().zip(m2).map(|(a, b)| (a - b).powi(2)).sum();
    let tr = |s: &[Vec<f64>]| (0..s.len()).map(|i| s[i][i]).sum::<f64>();
    let l = cholesky(s1);
    let inner = matmul(&matmul(&transpose(&l), s2), &l);
    let root: f64 = jacobi_eigenvalues(inner).into_iter().map(|v| v.max(0.0).sqrt()).sum();
    mean + tr(s1) + tr(s2) - 2.0 * root
}

/// Random SPD matrix A Aᵀ + δI.
pub fn random_spd(rng: &mut impl Rng, d: usize) -> Vec<Vec<f64>> {
    let a: Vec<Vec<f64>> = (0..d).map(|_| noise(rng, d)).collect();
    let mut s = matmul(&a, &transpose(&a));
    for (i, row) in s.iter_mut().enumerate() {
        row[i] += 0.1;
    }
    s
}

/// Two-pass sample mean and unbiased covariance.
pub fn sample_stats(rows: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = rows.len() as f64;
    let d = rows[0].len();
    let mean: Vec<f64> = (0..d).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n).collect();
    let cov = (0..d)
        .map(|a| {
            (0..d)
                .map(|b| rows.iter().map(|r| (r[a] - mean[a]) * (r[b] - mean[b])).sum::<f64>() / (n - 1.0))
                .collect()
        })
        .collect();
    (mean, cov)
}

/// Patch scores by explicit nested loops over the clamped window.
pub fn patch_scores_oracle(x: &[f64], dims: [usize; 4], n: usize, tw: usize) -> (Vec<f64>, Vec<f64>) {
    let [nt, h, w, d] = dims;
    let at = |t: usize, i: usize, j: usize, k: usize| x[((t * h + i) * w + j) * d + k];
    let clampi = |v: i64, hi: usize| v.max(0).min(hi as i64 - 1) as usize;
    let cosine_score = |t: usize, i: usize, j: usize, m: &[f64]| {
        let dot: f64 = (0..d).map(|k| at(t, i, j, k) * m[k]).sum();
        let na: f64 = (0..d).map(|k| at(t, i, j, k).powi(2)).sum::<f64>().sqrt();
        let nm: f64 = m.iter().map(|v| v * v).sum::<f64>().sqrt();
        if nm == 0.0 {
            2.0
        } else {
            2.0 - 2.0 * dot / (na * nm)
        }
    };
    let mut s = Vec::new();
    let mut tt = Vec::new();
    for t in 0..nt {
        for i in 0..h {
            for j in 0..w {
                let mut m = vec![0.0; d];
                let mut count = 0.0;
                for a in i as i64 - n as i64..=i as i64 + n as i64 {
                    for b in j as i64 - n as i64..=j as i64 + n as i64 {
                        let (a, b) = (clampi(a, h), clampi(b, w));
                        for k in 0..d {
                            m[k] += at(t, a, b, k);
                        }
                        count += 1.0;
                    }
                }
                m.iter_mut().for_each(|v| *v /= count);
                s.push(cosine_score(t, i, j, &m));

                let mut m = vec![0.0; d];
                let mut count = 0.0;
                for c in t as i64 - tw as i64..=t as i64 + tw as i64 {
                    let c = clampi(c, nt);
                    for k in 0..d {
                        m[k] += at(c, i, j, k);
                    }
                    count += 1.0;
                }
                m.iter_mut().for_each(|v| *v /= count);
                tt.push(cosine_score(t, i, j, &m));
            }
        }
    }
    (s, tt)
}

/// Per-frame softmax average, nucleus cut (ties at the boundary kept),
/// renormalized. `frame` is the number of patches per frame.
pub fn patch_energy_oracle(s: &[f64], t: &[f64], frame: usize, tau: f64, top_p: f64) -> Vec<f64> {
    let soft = |v: &[f64]| {
        let m = v.iter().cloned().fold(f64::MIN, f64::max);
        let e: Vec<f64> = v.iter().map(|x| ((x - m) / tau).exp()).collect();
        let z: f64 = e.iter().sum();
        e.into_iter().map(|x| x / z).collect::<Vec<_>>()
    };
    let mut out = Vec::new();
    for (fs, ft) in s.chunks(frame).zip(t.chunks(frame)) {
        let (a, b) = (soft(fs), soft(ft));
        let p: Vec<f64> = a.iter().zip(&b).map(|(x, y)| (x + y) / 2.0).collect();
        let mut sorted = p.clone();
        sorted.sort_by(|x, y| y.total_cmp(x));
        let mut cum = 0.0;
        let mut cutoff = sorted[sorted.len() - 1];
        for v in &sorted {
            cum += v;
            if cum >= top_p {
                cutoff = *v;
                break;
            }
        }
        let kept: Vec<f64> = p.iter().map(|v| if *v >= cutoff { *v } else { 0.0 }).collect();
        let z: f64 = kept.iter().sum();
        out.extend(kept.into_iter().map(|v| v / z));
    }
    out
}
