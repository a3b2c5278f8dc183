//! curate: corpus filtering over a manifest of raw FOA recordings.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::Args;
use foakit_core::curation::{self, ClipWindow};
use foakit_core::foa::SphereGrid;
use foakit_core::io::{self, WavFormat};
use serde::{Deserialize, Serialize};

use crate::manifest::{parallel_map, read_ndjson};
use crate::output::{data_error, emit, usage, write_all_atomic, CliResult, Failure, SCHEMA_VERSION};
use crate::parse;

#[derive(Args, Debug)]
pub struct CurateArgs {
    /// NDJSON manifest, one {"path": WAV, "relevance": SCORE?} per line; paths are relative to the manifest.
    /// When any entry has a relevance score, all must, and clips below mean − std are dropped.
    #[arg(long)]
    manifest: PathBuf,
    /// Minimum RMS of the W channel for a valid second [linear amplitude, full scale = 1].
    #[arg(long)]
    rms_threshold: f64,
    /// Sphere grid BANDSxMAX_AZIMUTHS used for field-of-view centers [cells].
    #[arg(long, default_value = "32x64", value_parser = parse::grid)]
    grid: SphereGrid,
    /// Worker threads [count].
    #[arg(long, default_value = "1", value_parser = parse::positive_jobs)]
    jobs: usize,
    /// Write kept 5 s windows as f32 WAVs (<stem>_<start>s.wav) into this directory.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Write the NDJSON report here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Deserialize)]
struct Entry {
    path: String,
    relevance: Option<f64>,
}

#[derive(Serialize)]
struct Center {
    azimuth: f64,
    elevation: f64,
}

#[derive(Serialize)]
struct WindowJson {
    start_second: usize,
    end_second: usize,
    /// Direction of the strongest cell in the window [radians]; null when the window is silent.
    fov_center: Option<Center>,
}

#[derive(Serialize)]
struct ClipJson {
    schema_version: u32,
    path: String,
    amplitude_gate: bool,
    valid_seconds: Vec<bool>,
    windows: Vec<WindowJson>,
    relevance: Option<f64>,
    relevance_kept: Option<bool>,
    kept: bool,
}

struct Processed {
    json: ClipJson,
    files: Vec<(PathBuf, Vec<u8>)>,
}

fn process(path: &Path, entry: &Entry, threshold: f64, grid: &Arc<SphereGrid>, out_dir: Option<&Path>) -> CliResult<Processed> {
    let clip = io::read_foa(path)?;
    let gate = curation::amplitude_gate(&clip).map_err(|e| data_error(path, e))?;
    let mut json = ClipJson {
        schema_version: SCHEMA_VERSION,
        path: path.display().to_string(),
        amplitude_gate: gate,
        valid_seconds: Vec::new(),
        windows: Vec::new(),
        relevance: entry.relevance,
        relevance_kept: None,
        kept: false,
    };
    let mut files = Vec::new();
    if gate {
        let mask = curation::segment_mask(&clip, threshold)?;
        for w in curation::select_windows(&mask) {
            let part = curation::slice_seconds(&clip, &w).map_err(|e| data_error(path, e))?;
            let center = curation::fov_center(&part, grid).ok().map(|d| Center {
                azimuth: d.azimuth(),
                elevation: d.elevation(),
            });
            if let Some(dir) = out_dir {
                let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                files.push((dir.join(format!("{stem}_{}s.wav", w.start_second)), io::foa_wav_bytes(&part, WavFormat::Float32)?));
            }
            let ClipWindow { start_second, end_second } = w;
            json.windows.push(WindowJson {
                start_second,
                end_second,
                fov_center: center,
            });
        }
        json.valid_seconds = mask.valid;
    }
    Ok(Processed { json, files })
}

pub fn curate(a: CurateArgs) -> CliResult {
    if !(a.rms_threshold >= 0.0 && a.rms_threshold.is_finite()) {
        return Err(usage("--rms-threshold must be a nonnegative number"));
    }
    let entries: Vec<Entry> = read_ndjson(&a.manifest)?;
    let scored = entries.iter().filter(|e| e.relevance.is_some()).count();
    if scored != 0 && scored != entries.len() {
        return Err(data_error(&a.manifest, "relevance scores must be given for every entry or none"));
    }
    let grid = Arc::new(a.grid);
    let items: Vec<(PathBuf, &Entry)> = entries.iter().map(|e| (parse::relative_to(&a.manifest, &e.path), e)).collect();
    let mut results = parallel_map(&items, a.jobs, |(p, e)| process(p, e, a.rms_threshold, &grid, a.out_dir.as_deref()))?
        .into_iter()
        .collect::<Result<Vec<_>, Failure>>()?;

    if scored > 0 {
        let scores: Vec<f64> = entries.iter().map(|e| e.relevance.unwrap()).collect();
        let keep = curation::relevance_filter(&scores).map_err(|e| data_error(&a.manifest, e))?;
        for (r, k) in results.iter_mut().zip(keep) {
            r.json.relevance_kept = Some(k);
        }
    }
    let mut files = Vec::new();
    let mut lines = String::new();
    for r in &mut results {
        r.json.kept = r.json.amplitude_gate && !r.json.windows.is_empty() && r.json.relevance_kept.unwrap_or(true);
        if r.json.kept {
            files.append(&mut r.files);
        }
        lines.push_str(&serde_json::to_string(&r.json).expect("report serializes"));
        lines.push('\n');
    }
    if let Some(dir) = &a.out_dir {
        std::fs::create_dir_all(dir).map_err(|e| data_error(dir, e))?;
    }
    write_all_atomic(&files)?;
    emit(&lines, a.output.as_deref())
}
