//! Autoregressive generation over a pattern schedule.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::combine::{combine, ConditionalLogits, Conditioning, GuidanceConfig, LogitSet};
use super::sampler::{sample_row, SamplingParams};
use crate::error::{Error, Result};
use crate::pattern::{unpack, CodeMatrix, Pattern, ReorgMatrix};

/// What a predictor sees at one generation step.
#[derive(Debug)]
pub struct StepQuery<'a> {
    /// 1-based step index.
    pub step: usize,
    /// Slots generated so far; everything at or after `step` is padding.
    pub prefix: &'a ReorgMatrix,
    /// 1-based rows that receive a code at this step.
    pub active_rows: &'a [usize],
}

/// Stand-in for a conditional decoder.
///
/// One call per step returns one `4N × V` logit set for each requested
/// conditioning, in the requested order.
pub trait Predictor {
    fn predict(&mut self, query: &StepQuery<'_>, variants: &[Conditioning]) -> Result<Vec<LogitSet>>;
}

impl<P: Predictor + ?Sized> Predictor for &mut P {
    fn predict(&mut self, query: &StepQuery<'_>, variants: &[Conditioning]) -> Result<Vec<LogitSet>> {
        (**self).predict(query, variants)
    }
}

/// Zero logits everywhere.
#[derive(Debug, Clone)]
pub struct UniformPredictor {
    rows: usize,
    vocab: usize,
}

impl UniformPredictor {
    pub fn new(rows: usize, vocab: usize) -> Self {
        Self { rows, vocab }
    }
}

impl Predictor for UniformPredictor {
    fn predict(&mut self, _query: &StepQuery<'_>, variants: &[Conditioning]) -> Result<Vec<LogitSet>> {
        Ok(variants.iter().map(|_| LogitSet::zeros(self.rows, self.vocab)).collect())
    }
}

pub const DEFAULT_PEAK_LOGIT: f64 = 50.0;

/// Emits `peak_logit` on the code a known matrix holds at each scheduled
/// slot and zero elsewhere, identically for every conditioning.
#[derive(Debug, Clone)]
pub struct TablePredictor {
    target: CodeMatrix,
    peak_logit: f64,
}

impl TablePredictor {
    pub fn new(target: CodeMatrix, peak_logit: f64) -> Result<Self> {
        if !(peak_logit > 0.0 && peak_logit.is_finite()) {
            return Err(Error::InvalidParameter(format!("peak logit {peak_logit} must be positive")));
        }
        Ok(Self { target, peak_logit })
    }

    pub fn target(&self) -> &CodeMatrix {
        &self.target
    }

    pub fn peak_logit(&self) -> f64 {
        self.peak_logit
    }
}

impl Predictor for TablePredictor {
    fn predict(&mut self, query: &StepQuery<'_>, variants: &[Conditioning]) -> Result<Vec<LogitSet>> {
        let t = &self.target;
        let pattern = query.prefix.pattern();
        let mut logits = LogitSet::zeros(t.rows(), t.vocab_size() as usize);
        for &row in query.active_rows {
            if let Some(time) = pattern.time_at(row, query.step, t.n_per_channel(), t.frames()) {
                logits.row_mut(row - 1)[t.get(row, time) as usize] = self.peak_logit;
            }
        }
        Ok(variants.iter().map(|_| logits.clone()).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerateConfig {
    pub n_per_channel: usize,
    pub frames: usize,
    pub vocab_size: u16,
    pub pattern: Pattern,
    pub guidance: GuidanceConfig,
    pub sampling: SamplingParams,
    pub seed: u64,
}

/// Runs the pattern schedule step by step and returns the unpacked matrix.
///
/// Each step issues one predictor query for the conditionings the guidance
/// mode needs, combines them, and samples only the rows scheduled at that
/// step, in ascending row order.
pub fn generate<P: Predictor + ?Sized>(predictor: &mut P, config: &GenerateConfig) -> Result<CodeMatrix> {
    config.sampling.validate()?;
    let n = config.n_per_channel;
    let rows = 4 * n;
    let vocab = config.vocab_size as usize;
    let mut reorg = ReorgMatrix::empty(config.pattern, n, config.frames, config.vocab_size)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let variants = config.guidance.mode.required();

    for step in 1..=reorg.steps() {
        let active = config.pattern.active_rows(step, n, config.frames);
        let outputs = {
            let query = StepQuery {
                step,
                prefix: &reorg,
                active_rows: &active,
            };
            predictor.predict(&query, variants)?
        };
        if outputs.len() != variants.len() {
            return Err(Error::DimensionMismatch(format!(
                "predictor returned {} logit sets for {} conditionings at step {step}",
                outputs.len(),
                variants.len()
            )));
        }
        let mut available = ConditionalLogits::default();
        for (c, set) in variants.iter().zip(&outputs) {
            if set.rows() != rows || set.vocab() != vocab {
                return Err(Error::DimensionMismatch(format!(
                    "predictor returned {}x{} logits at step {step}, expected {rows}x{vocab}",
                    set.rows(),
                    set.vocab()
                )));
            }
            available.set(*c, set);
        }
        let guided = combine(config.guidance.mode, &available, config.guidance.omega, config.guidance.omega2)?;
        for &row in &active {
            let code = sample_row(guided.row(row - 1), &config.sampling, &mut rng);
            reorg.set(row, step, code as u16);
        }
    }
    unpack(&reorg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::guidance::GuidanceMode;

    struct Counting<P> {
        inner: P,
        queries: usize,
        touched: Vec<(usize, usize)>,
    }

    impl<P: Predictor> Predictor for Counting<P> {
        fn predict(&mut self, query: &StepQuery<'_>, variants: &[Conditioning]) -> Result<Vec<LogitSet>> {
            self.queries += 1;
            // nothing at or after the current step may be filled yet
            for row in 1..=query.prefix.rows() {
                for step in query.step..=query.prefix.steps() {
                    assert!(query.prefix.is_pad(row, step));
                }
            }
            self.touched.extend(query.active_rows.iter().map(|&r| (r, query.step)));
            self.inner.predict(query, variants)
        }
    }

    fn config(pattern: Pattern, mode: GuidanceMode, omega: f64) -> GenerateConfig {
        GenerateConfig {
            n_per_channel: 2,
            frames: 3,
            vocab_size: 16,
            pattern,
            guidance: GuidanceConfig::new(mode, omega, 0.0).unwrap(),
            sampling: SamplingParams::default(),
            seed: 5,
        }
    }

    #[test]
    fn uniform_predictor_step_contract() {
        let mut p = Counting {
            inner: UniformPredictor::new(8, 16),
            queries: 0,
            touched: Vec::new(),
        };
        let out = generate(&mut p, &config(Pattern::Proposed, GuidanceMode::Joint, 2.5)).unwrap();
        assert_eq!((out.rows(), out.frames()), (8, 3));
        assert_eq!(p.queries, 7);
        // every cell exactly once, in schedule order
        let mut cells = p.touched.clone();
        cells.sort();
        cells.dedup();
        assert_eq!(cells.len(), 24);
        assert_eq!(p.touched.len(), 24);
        assert!(p.touched.windows(2).all(|w| w[0].1 <= w[1].1));
    }

    #[test]
    fn zero_scale_directional_matches_unguided() {
        let run = |mode| {
            let mut p = UniformPredictor::new(8, 16);
            generate(&mut p, &config(Pattern::Proposed, mode, 0.0)).unwrap()
        };
        assert_eq!(run(GuidanceMode::None), run(GuidanceMode::Directional));
    }

    #[test]
    fn table_predictor_is_reproduced() {
        let codes: Vec<u16> = (0..24).map(|i| (i * 5 % 16) as u16).collect();
        let target = CodeMatrix::new(2, 3, 16, codes).unwrap();
        for pattern in Pattern::ALL {
            let mut p = TablePredictor::new(target.clone(), DEFAULT_PEAK_LOGIT).unwrap();
            let mut cfg = config(pattern, GuidanceMode::Dual, 2.5);
            cfg.sampling = SamplingParams::argmax();
            assert_eq!(generate(&mut p, &cfg).unwrap(), target);
        }
    }

    struct WrongShape;

    impl Predictor for WrongShape {
        fn predict(&mut self, _q: &StepQuery<'_>, variants: &[Conditioning]) -> Result<Vec<LogitSet>> {
            Ok(variants.iter().map(|_| LogitSet::zeros(8, 15)).collect())
        }
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let err = generate(&mut WrongShape, &config(Pattern::Proposed, GuidanceMode::None, 0.0)).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch(_)));
    }
}
