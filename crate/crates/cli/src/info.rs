//! info: describe any file the toolkit reads.

use std::path::PathBuf;

use clap::Args;
use foakit_core::io::{self, CodeFile, Tensor, CODES_MAGIC, TABLE_FORMAT};
use serde_json::json;

use crate::output::{data_error, emit, to_json, CliResult, SCHEMA_VERSION};

#[derive(Args, Debug)]
pub struct InfoArgs {
    /// WAV, tensor, code or table-predictor file.
    input: PathBuf,
}

pub fn info(a: InfoArgs) -> CliResult {
    let path = &a.input;
    let bytes = std::fs::read(path).map_err(|e| data_error(path, e))?;
    let err = |e: foakit_core::Error| e.in_file(path);
    let value = if bytes.starts_with(b"RIFF") {
        let audio = io::read_wav_bytes(&bytes).map_err(err)?;
        let frames = audio.channels.first().map_or(0, |c| c.len());
        json!({
            "kind": "wav",
            "channels": audio.channels.len(),
            "sample_rate": audio.sample_rate,
            "frames": frames,
            "duration_seconds": frames as f64 / audio.sample_rate as f64,
        })
    } else if bytes.starts_with(CODES_MAGIC) {
        match CodeFile::from_bytes(&bytes).map_err(err)? {
            CodeFile::Raw(m) => json!({
                "kind": "codes",
                "pattern": null,
                "codebooks_per_channel": m.n_per_channel(),
                "frames": m.frames(),
                "vocab_size": m.vocab_size(),
                "columns": m.frames(),
            }),
            CodeFile::Packed(r) => json!({
                "kind": "codes",
                "pattern": r.pattern(),
                "codebooks_per_channel": r.n_per_channel(),
                "frames": r.frames(),
                "vocab_size": r.vocab_size(),
                "columns": r.steps(),
            }),
        }
    } else if bytes.windows(TABLE_FORMAT.len()).take(256).any(|w| w == TABLE_FORMAT.as_bytes()) {
        let p = io::table_predictor_from_bytes(&bytes).map_err(err)?;
        json!({
            "kind": "table_predictor",
            "peak_logit": p.peak_logit(),
            "codebooks_per_channel": p.target().n_per_channel(),
            "frames": p.target().frames(),
            "vocab_size": p.target().vocab_size(),
        })
    } else {
        let t = Tensor::from_bytes(&bytes).map_err(err)?;
        json!({
            "kind": "tensor",
            "dtype": t.dtype().name(),
            "shape": t.shape(),
        })
    };
    let mut value = value;
    value["schema_version"] = json!(SCHEMA_VERSION);
    value["path"] = json!(path.display().to_string());
    emit(&to_json(&value), None)
}
