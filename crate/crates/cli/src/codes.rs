//! pattern pack/unpack/table and generate.

use std::path::PathBuf;

use clap::{Args, Subcommand};
use foakit_core::guidance::{
    self, GenerateConfig, GuidanceConfig, GuidanceMode, Predictor, SamplingParams, TablePredictor, UniformPredictor,
    DEFAULT_GUIDANCE_SCALE, DEFAULT_PEAK_LOGIT,
};
use foakit_core::io::{self, CodeFile};
use foakit_core::pattern::{self, Pattern};
use serde::Serialize;

use crate::output::{data_error, emit, to_json, usage, write_atomic, CliResult, SCHEMA_VERSION};

#[derive(Args, Debug)]
pub struct PatternArgs {
    #[command(subcommand)]
    action: PatternAction,
}

#[derive(Subcommand, Debug)]
enum PatternAction {
    /// Reorganize a raw code file into a pattern schedule (padding code = V).
    Pack {
        /// [proposed | sequential-delay | residual-only | spatial-only]
        #[arg(long)]
        pattern: Pattern,
        input: PathBuf,
        output: PathBuf,
    },
    /// Restore the raw 4N x L_c matrix from a packed code file.
    Unpack { input: PathBuf, output: PathBuf },
    /// Build a table-predictor file that replays a raw code file.
    Table {
        /// Logit placed on the scheduled code; all others are 0 [logit units].
        #[arg(long, default_value_t = DEFAULT_PEAK_LOGIT)]
        peak_logit: f64,
        input: PathBuf,
        output: PathBuf,
    },
}

pub fn pattern(a: PatternArgs) -> CliResult {
    match a.action {
        PatternAction::Pack { pattern, input, output } => match io::read_codes(&input)? {
            CodeFile::Raw(m) => write_atomic(&output, &CodeFile::Packed(pattern::pack(&m, pattern)).to_bytes()),
            CodeFile::Packed(_) => Err(data_error(&input, "already packed")),
        },
        PatternAction::Unpack { input, output } => match io::read_codes(&input)? {
            CodeFile::Packed(r) => {
                let m = pattern::unpack(&r).map_err(|e| data_error(&input, e))?;
                write_atomic(&output, &CodeFile::Raw(m).to_bytes())
            }
            CodeFile::Raw(_) => Err(data_error(&input, "not a packed code file")),
        },
        PatternAction::Table { peak_logit, input, output } => match io::read_codes(&input)? {
            CodeFile::Raw(m) => {
                let p = TablePredictor::new(m, peak_logit).map_err(|e| usage(e.to_string()))?;
                write_atomic(&output, &io::table_predictor_bytes(&p))
            }
            CodeFile::Packed(_) => Err(data_error(&input, "table targets must be raw code files")),
        },
    }
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    /// Output raw code file.
    output: PathBuf,
    /// Replay a table-predictor file instead of the uniform predictor.
    #[arg(long)]
    table: Option<PathBuf>,
    /// Codebooks per channel N [count]; taken from --table when given.
    #[arg(long)]
    codebooks: Option<usize>,
    /// Code frames L_c [count]; taken from --table when given.
    #[arg(long)]
    frames: Option<usize>,
    /// Vocabulary size V [codes]; taken from --table when given.
    #[arg(long)]
    vocab: Option<u16>,
    /// [proposed | sequential-delay | residual-only | spatial-only]
    #[arg(long, default_value = "proposed")]
    pattern: Pattern,
    /// [none | directional | visual | joint | dual]
    #[arg(long, default_value = "joint")]
    guidance: GuidanceMode,
    /// Guidance scale ω (directional scale for dual) [unitless].
    #[arg(long, default_value_t = DEFAULT_GUIDANCE_SCALE, allow_hyphen_values = true)]
    omega: f64,
    /// Visual guidance scale ω₂, used by dual only [unitless].
    #[arg(long, default_value_t = DEFAULT_GUIDANCE_SCALE, allow_hyphen_values = true)]
    omega2: f64,
    /// Softmax temperature [unitless, > 0].
    #[arg(long, default_value_t = 1.0)]
    temperature: f64,
    /// Nucleus mass [probability, (0, 1]].
    #[arg(long, default_value_t = 1.0)]
    top_p: f64,
    /// Take the highest logit instead of sampling.
    #[arg(long)]
    argmax: bool,
    /// RNG seed [integer].
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Serialize)]
struct GenerateJson {
    schema_version: u32,
    output: String,
    predictor: &'static str,
    pattern: Pattern,
    steps: usize,
    codebooks_per_channel: usize,
    frames: usize,
    vocab_size: u16,
    guidance: GuidanceConfig,
    sampling: SamplingParams,
    seed: u64,
}

pub fn generate(a: GenerateArgs) -> CliResult {
    let table = a.table.as_ref().map(io::read_table_predictor).transpose()?;
    let pick = |flag: Option<usize>, from_table: Option<usize>, name: &str| -> CliResult<usize> {
        match (flag, from_table) {
            (Some(v), Some(t)) if v != t => Err(usage(format!("--{name} {v} disagrees with the table ({t})"))),
            (Some(v), _) | (None, Some(v)) => Ok(v),
            (None, None) => Err(usage(format!("--{name} is required without --table"))),
        }
    };
    let target = table.as_ref().map(|t| t.target());
    let n = pick(a.codebooks, target.map(|t| t.n_per_channel()), "codebooks")?;
    let frames = pick(a.frames, target.map(|t| t.frames()), "frames")?;
    let vocab = pick(a.vocab.map(usize::from), target.map(|t| t.vocab_size() as usize), "vocab")? as u16;
    if n == 0 || frames == 0 || vocab == 0 || vocab == u16::MAX {
        return Err(usage("--codebooks and --frames must be positive and --vocab in 1..65535"));
    }
    let config = GenerateConfig {
        n_per_channel: n,
        frames,
        vocab_size: vocab,
        pattern: a.pattern,
        guidance: GuidanceConfig::new(a.guidance, a.omega, a.omega2)?,
        sampling: SamplingParams {
            temperature: a.temperature,
            top_p: a.top_p,
            argmax: a.argmax,
        },
        seed: a.seed,
    };
    let (mut predictor, name): (Box<dyn Predictor>, _) = match table {
        Some(t) => (Box::new(t), "table"),
        None => (Box::new(UniformPredictor::new(4 * n, vocab as usize)), "uniform"),
    };
    let codes = guidance::generate(&mut *predictor, &config)?;
    write_atomic(&a.output, &CodeFile::Raw(codes).to_bytes())?;
    emit(
        &to_json(&GenerateJson {
            schema_version: SCHEMA_VERSION,
            output: a.output.display().to_string(),
            predictor: name,
            pattern: a.pattern,
            steps: a.pattern.steps(n, frames),
            codebooks_per_channel: n,
            frames,
            vocab_size: vocab,
            guidance: config.guidance,
            sampling: config.sampling,
            seed: a.seed,
        }),
        None,
    )
}
