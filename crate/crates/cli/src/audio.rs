//! encode, decode, rotate and energy-map.

use std::path::PathBuf;
use std::sync::Arc;

use clap::Args;
use foakit_core::foa::{self, EnergyMode, Rotation, SampleWindow, SphereGrid};
use foakit_core::io::{self, WavFormat};
use serde::Serialize;

use crate::output::{emit, to_json, usage, write_all_atomic, write_atomic, CliResult, SCHEMA_VERSION};
use crate::parse::{self, DirArg};

#[derive(Args, Debug)]
pub struct EncodeArgs {
    /// Source direction AZIMUTH,ELEVATION [radians; degrees with --degrees].
    /// Azimuth is counter-clockwise from the front (+x) toward +y, elevation is up from the horizon.
    #[arg(long, value_parser = parse::dir_arg, allow_hyphen_values = true)]
    dir: DirArg,
    /// Read --dir in degrees instead of radians.
    #[arg(long)]
    degrees: bool,
    /// Output sample encoding [f32 | pcm16].
    #[arg(long, default_value = "f32")]
    format: WavFormat,
    /// Mono input WAV.
    input: PathBuf,
    /// 4-channel W,X,Y,Z output WAV.
    output: PathBuf,
}

pub fn encode(a: EncodeArgs) -> CliResult {
    let dir = a.dir.resolve(a.degrees)?;
    let (signal, sr) = io::read_mono(&a.input)?;
    let clip = foa::encode_mono(&signal, &dir, sr).map_err(|e| e.in_file(&a.input))?;
    write_atomic(&a.output, &io::foa_wav_bytes(&clip, a.format)?)
}

#[derive(Args, Debug)]
pub struct DecodeArgs {
    /// Listening direction AZIMUTH,ELEVATION [radians; degrees with --degrees].
    #[arg(long, value_parser = parse::dir_arg, allow_hyphen_values = true)]
    dir: DirArg,
    /// Read --dir in degrees instead of radians.
    #[arg(long)]
    degrees: bool,
    /// Output sample encoding [f32 | pcm16].
    #[arg(long, default_value = "f32")]
    format: WavFormat,
    /// 4-channel W,X,Y,Z input WAV.
    input: PathBuf,
    /// Mono output WAV.
    output: PathBuf,
}

pub fn decode(a: DecodeArgs) -> CliResult {
    let dir = a.dir.resolve(a.degrees)?;
    let clip = io::read_foa(&a.input)?;
    let mono = foa::decode_to_mono(&clip, &dir);
    write_atomic(&a.output, &io::wav_bytes(&[&mono], clip.sample_rate(), a.format)?)
}

#[derive(Args, Debug)]
pub struct RotateArgs {
    /// Exact 90° turn about +z: (W, X, Y, Z) -> (W, -Y, X, Z).
    #[arg(long, conflicts_with_all = ["yaw", "axis", "matrix"])]
    quarter_turn: bool,
    /// Rotation about +z [radians; degrees with --degrees].
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["axis", "matrix"])]
    yaw: Option<f64>,
    /// Rotation axis X,Y,Z [unitless, normalized internally]; requires --angle.
    #[arg(long, value_parser = parse::numbers, allow_hyphen_values = true, requires = "angle", conflicts_with = "matrix")]
    axis: Option<std::vec::Vec<f64>>,
    /// Right-handed rotation angle about --axis [radians; degrees with --degrees].
    #[arg(long, allow_hyphen_values = true, requires = "axis")]
    angle: Option<f64>,
    /// Row-major 3x3 rotation matrix R11,R12,...,R33 [unitless].
    #[arg(long, value_parser = parse::numbers, allow_hyphen_values = true)]
    matrix: Option<std::vec::Vec<f64>>,
    /// Read --yaw and --angle in degrees.
    #[arg(long)]
    degrees: bool,
    /// Output sample encoding [f32 | pcm16].
    #[arg(long, default_value = "f32")]
    format: WavFormat,
    input: PathBuf,
    output: PathBuf,
}

pub fn rotate(a: RotateArgs) -> CliResult {
    let angle = |v: f64| if a.degrees { v.to_radians() } else { v };
    let rotation = if a.quarter_turn {
        Rotation::quarter_turn_z()
    } else if let Some(y) = a.yaw {
        Rotation::about_z(angle(y))
    } else if let (Some(axis), Some(t)) = (&a.axis, a.angle) {
        let axis: [f64; 3] = axis.as_slice().try_into().map_err(|_| usage("--axis needs three components"))?;
        Rotation::from_axis_angle(axis, angle(t)).map_err(|e| usage(e.to_string()))?
    } else if let Some(m) = &a.matrix {
        if m.len() != 9 {
            return Err(usage("--matrix needs nine components"));
        }
        Rotation::new(std::array::from_fn(|i| std::array::from_fn(|j| m[3 * i + j]))).map_err(|e| usage(e.to_string()))?
    } else {
        return Err(usage("give one of --quarter-turn, --yaw, --axis/--angle or --matrix"));
    };
    let clip = io::read_foa(&a.input)?;
    write_atomic(&a.output, &io::foa_wav_bytes(&foa::rotate(&clip, &rotation), a.format)?)
}

#[derive(Args, Debug)]
pub struct EnergyMapArgs {
    /// 4-channel W,X,Y,Z input WAV.
    input: PathBuf,
    /// Sphere grid BANDSxMAX_AZIMUTHS [cells]: elevation bands x azimuth samples on the equator.
    #[arg(long, default_value = "32x64", value_parser = parse::grid)]
    grid: SphereGrid,
    /// Energy definition [power | literal-linear].
    #[arg(long, default_value = "power")]
    mode: EnergyMode,
    /// First sample of the analysis window [samples, inclusive].
    #[arg(long, default_value_t = 0)]
    start: usize,
    /// End of the analysis window [samples, exclusive; default: clip length].
    #[arg(long)]
    end: Option<usize>,
    /// Write per-cell values as CSV (azimuth, elevation [radians], weight, value).
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Write the map as a binary PGM image (rows = elevation bands, top = highest).
    #[arg(long)]
    pgm: Option<PathBuf>,
    /// Write the JSON summary here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Serialize)]
struct PeakJson {
    index: usize,
    azimuth: f64,
    elevation: f64,
    value: f64,
}

#[derive(Serialize)]
struct EnergyMapJson {
    schema_version: u32,
    input: String,
    grid: String,
    cells: usize,
    mode: String,
    window: [usize; 2],
    peak: PeakJson,
    weighted_mean: f64,
}

pub fn energy_map(a: EnergyMapArgs) -> CliResult {
    let clip = io::read_foa(&a.input)?;
    let grid = Arc::new(a.grid);
    let end = a.end.unwrap_or(clip.len());
    let map = foa::energy_map(&clip, &grid, SampleWindow::new(a.start, end), a.mode).map_err(|e| e.in_file(&a.input))?;
    let peak = map.argmax();
    let cell = &grid.cells()[peak];
    let summary = EnergyMapJson {
        schema_version: SCHEMA_VERSION,
        input: a.input.display().to_string(),
        grid: format!("{}x{}", grid.n_elevation_bands(), grid.max_azimuth_samples()),
        cells: grid.len(),
        mode: a.mode.to_string(),
        window: [a.start, end],
        peak: PeakJson {
            index: peak,
            azimuth: cell.direction.azimuth(),
            elevation: cell.direction.elevation(),
            value: map.values()[peak],
        },
        weighted_mean: grid.weights().zip(map.values()).map(|(w, v)| w * v).sum(),
    };
    let mut files = Vec::new();
    if let Some(p) = a.csv {
        files.push((p, map.to_csv().into_bytes()));
    }
    if let Some(p) = a.pgm {
        files.push((p, map.to_pgm()));
    }
    write_all_atomic(&files)?;
    emit(&to_json(&summary), a.output.as_deref())
}
