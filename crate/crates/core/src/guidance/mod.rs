//! Classifier-free guidance over code logits and the generation harness.

mod combine;
mod generate;
mod sampler;

pub use combine::{
    combine, ConditionalLogits, Conditioning, GuidanceConfig, GuidanceMode, LogitSet, DEFAULT_GUIDANCE_SCALE,
};
pub use generate::{
    generate, GenerateConfig, Predictor, StepQuery, TablePredictor, UniformPredictor, DEFAULT_PEAK_LOGIT,
};
pub use sampler::{argmax, sample_row, sample_step, softmax, SamplingParams};
