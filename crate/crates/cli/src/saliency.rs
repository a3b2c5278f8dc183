//! patch-energy.

use std::path::PathBuf;

use clap::Args;
use foakit_core::io::{self, Tensor};
use foakit_core::saliency::{self, PatchEmbeddings, UndefinedPatch, DEFAULT_TEMPERATURE, DEFAULT_TOP_P, DEFAULT_WINDOW};
use serde::Serialize;

use crate::output::{data_error, emit, to_json, write_all_atomic, CliResult, SCHEMA_VERSION};

#[derive(Args, Debug)]
pub struct PatchEnergyArgs {
    /// f32 embedding tensor of shape [T, h, w, d].
    input: PathBuf,
    /// f32 output tensor of shape [T, h, w]; each frame sums to 1.
    output: PathBuf,
    /// Spatial half-window N: neighbourhood is (2N+1)^2 patches [patches].
    #[arg(long, default_value_t = DEFAULT_WINDOW)]
    spatial_window: usize,
    /// Temporal half-window T: neighbourhood is 2T+1 frames [frames].
    #[arg(long, default_value_t = DEFAULT_WINDOW)]
    temporal_window: usize,
    /// Softmax temperature τ [unitless, > 0].
    #[arg(long, default_value_t = DEFAULT_TEMPERATURE)]
    temperature: f64,
    /// Nucleus mass kept per frame [probability, (0, 1]].
    #[arg(long, default_value_t = DEFAULT_TOP_P)]
    top_p: f64,
    /// Also write one PGM image per frame (frame_0000.pgm, ...) into this directory.
    #[arg(long)]
    pgm_dir: Option<PathBuf>,
}

#[derive(Serialize)]
struct PatchEnergyJson {
    schema_version: u32,
    output: String,
    shape: [usize; 3],
    /// Patches whose neighbourhood mean had zero norm (scored as 2).
    undefined: Vec<UndefinedPatch>,
}

pub fn patch_energy(a: PatchEnergyArgs) -> CliResult {
    let t = io::read_tensor(&a.input)?;
    let shape: [usize; 4] = t
        .shape()
        .try_into()
        .map_err(|_| data_error(&a.input, format!("expected a [T, h, w, d] tensor, got {:?}", t.shape())))?;
    let data = t.as_f32().ok_or_else(|| data_error(&a.input, "expected an f32 tensor"))?;
    let emb = PatchEmbeddings::from_f32(shape, data).map_err(|e| data_error(&a.input, e))?;
    let (map, undefined) = saliency::patch_energy(&emb, a.spatial_window, a.temporal_window, a.temperature, a.top_p)?;

    let out_shape = [shape[0], shape[1], shape[2]];
    let tensor = Tensor::f32(out_shape.to_vec(), map.to_f32()).expect("shape matches");
    let mut files = vec![(a.output.clone(), tensor.to_bytes())];
    if let Some(dir) = &a.pgm_dir {
        std::fs::create_dir_all(dir).map_err(|e| data_error(dir, e))?;
        for frame in 0..shape[0] {
            files.push((dir.join(format!("frame_{frame:04}.pgm")), map.frame_pgm(frame)));
        }
    }
    write_all_atomic(&files)?;
    emit(
        &to_json(&PatchEnergyJson {
            schema_version: SCHEMA_VERSION,
            output: a.output.display().to_string(),
            shape: out_shape,
            undefined,
        }),
        None,
    )
}
