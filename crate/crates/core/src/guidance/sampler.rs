use rand::Rng;
use serde::{Deserialize, Serialize};

use super::combine::LogitSet;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingParams {
    pub temperature: f64,
    pub top_p: f64,
    /// Take the highest logit instead of drawing.
    pub argmax: bool,
}

impl Default for SamplingParams {
    fn default() -> Self {
        Self {
            temperature: 1.0,
            top_p: 1.0,
            argmax: false,
        }
    }
}

impl SamplingParams {
    pub fn argmax() -> Self {
        Self {
            argmax: true,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "temperature {} must be positive",
                self.temperature
            )));
        }
        if !(self.top_p > 0.0 && self.top_p <= 1.0) {
            return Err(Error::InvalidParameter(format!("top-p {} must be in (0, 1]", self.top_p)));
        }
        Ok(())
    }
}

/// First index of the largest logit.
pub fn argmax(logits: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in logits.iter().enumerate() {
        if *v > logits[best] {
            best = i;
        }
    }
    best
}

/// Temperature softmax, in the original index order.
pub fn softmax(logits: &[f64], temperature: f64) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|l| ((l - max) / temperature).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

pub fn sample_row<R: Rng + ?Sized>(logits: &[f64], params: &SamplingParams, rng: &mut R) -> usize {
    if params.argmax {
        return argmax(logits);
    }
    let probs = softmax(logits, params.temperature);
    let mut order: Vec<usize> = (0..probs.len()).collect();
    order.sort_by(|&a, &b| probs[b].total_cmp(&probs[a]).then(a.cmp(&b)));
    let mut kept = 0;
    let mut mass = 0.0;
    for &i in &order {
        mass += probs[i];
        kept += 1;
        if mass >= params.top_p {
            break;
        }
    }
    let nucleus = &order[..kept];
    let total: f64 = nucleus.iter().map(|&i| probs[i]).sum();
    let mut u = rng.random::<f64>() * total;
    for &i in nucleus {
        u -= probs[i];
        if u < 0.0 {
            return i;
        }
    }
    nucleus[kept - 1]
}

/// Draws one code per row.
pub fn sample_step<R: Rng + ?Sized>(logits: &LogitSet, params: &SamplingParams, rng: &mut R) -> Result<Vec<u16>> {
    params.validate()?;
    if logits.vocab() > u16::MAX as usize {
        return Err(Error::InvalidInput("vocabulary does not fit in 16-bit codes".into()));
    }
    Ok((0..logits.rows())
        .map(|r| sample_row(logits.row(r), params, rng) as u16)
        .collect())
}
