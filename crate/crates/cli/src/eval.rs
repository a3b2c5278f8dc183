//! eval-spatial and eval-semantic.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Subcommand, ValueEnum};
use foakit_core::foa::SphereGrid;
use foakit_core::io::{self, Tensor};
use foakit_core::semantic::{self, ClassDistribution, FeatureSet, DEFAULT_KLD_EPSILON};
use foakit_core::spatial::{self, Granularity, SpatialOptions, SpatialReport, DEFAULT_FIXATION_PERCENTILE};
use serde::{Deserialize, Serialize};

use crate::manifest::{parallel_map, read_ndjson};
use crate::output::{data_error, emit, to_json, usage, CliResult, Failure, SCHEMA_VERSION};
use crate::parse;

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ReportFormat {
    Json,
    Csv,
}

#[derive(Args, Debug)]
pub struct EvalSpatialArgs {
    /// Generated 4-channel WAV (omit with --manifest).
    gen: Option<PathBuf>,
    /// Ground-truth 4-channel WAV (omit with --manifest).
    gt: Option<PathBuf>,
    /// NDJSON manifest, one {"gen": PATH, "gt": PATH} per line; paths are relative to the manifest.
    #[arg(long, conflicts_with_all = ["gen", "gt"])]
    manifest: Option<PathBuf>,
    /// Sphere grid BANDSxMAX_AZIMUTHS [cells].
    #[arg(long, default_value = "32x64", value_parser = parse::grid)]
    grid: SphereGrid,
    /// Ground-truth percentile that defines AUC fixations [percent, 0-100].
    #[arg(long, default_value_t = DEFAULT_FIXATION_PERCENTILE)]
    fixation_percentile: f64,
    /// Worker threads for manifest evaluation [count].
    #[arg(long, default_value = "1", value_parser = parse::positive_jobs)]
    jobs: usize,
    /// Report format.
    #[arg(long, value_enum, default_value = "json")]
    format: ReportFormat,
    /// Write the report here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Deserialize)]
struct SpatialEntry {
    gen: String,
    gt: String,
}

#[derive(Serialize)]
struct ClipReport {
    gen: String,
    gt: String,
    #[serde(flatten)]
    report: SpatialReport,
}

#[derive(Serialize)]
struct MeanReport {
    cc_all: f64,
    cc_1fps: f64,
    cc_5fps: f64,
    auc_all: f64,
    auc_1fps: f64,
    auc_5fps: f64,
}

#[derive(Serialize)]
struct BatchReport {
    schema_version: u32,
    clips: Vec<ClipReport>,
    mean: MeanReport,
}

fn evaluate_pair(gen: &Path, gt: &Path, grid: &Arc<SphereGrid>, options: &SpatialOptions) -> CliResult<SpatialReport> {
    let g = io::read_foa(gen)?;
    let t = io::read_foa(gt)?;
    spatial::evaluate_windows_with(&g, &t, grid, options).map_err(|e| data_error(gen, format!("against {}: {e}", gt.display())))
}

pub fn eval_spatial(a: EvalSpatialArgs) -> CliResult {
    if !(0.0..=100.0).contains(&a.fixation_percentile) {
        return Err(usage("--fixation-percentile must be within 0..=100"));
    }
    let grid = Arc::new(a.grid);
    let options = SpatialOptions {
        fixation_percentile: a.fixation_percentile,
    };
    let pairs: Vec<(PathBuf, PathBuf)> = match (&a.manifest, &a.gen, &a.gt) {
        (Some(m), _, _) => read_ndjson::<SpatialEntry>(m)?
            .into_iter()
            .map(|e| (parse::relative_to(m, &e.gen), parse::relative_to(m, &e.gt)))
            .collect(),
        (None, Some(g), Some(t)) => vec![(g.clone(), t.clone())],
        _ => return Err(usage("give GEN and GT, or --manifest")),
    };
    let reports = parallel_map(&pairs, a.jobs, |(g, t)| evaluate_pair(g, t, &grid, &options))?
        .into_iter()
        .collect::<Result<Vec<_>, Failure>>()?;

    let text = match a.format {
        ReportFormat::Csv => {
            let mut s = format!("gen,gt,{}\n", SpatialReport::CSV_HEADER);
            for ((g, t), r) in pairs.iter().zip(&reports) {
                s.push_str(&format!("{},{},{}\n", g.display(), t.display(), r.csv_row()));
            }
            s
        }
        ReportFormat::Json if a.manifest.is_none() => to_json(&reports[0]),
        ReportFormat::Json => {
            let n = reports.len() as f64;
            let mean_cc = |g| reports.iter().map(|r| r.cc(g)).sum::<f64>() / n;
            let mean_auc = |g| reports.iter().map(|r| r.auc(g)).sum::<f64>() / n;
            let mean = MeanReport {
                cc_all: mean_cc(Granularity::All),
                cc_1fps: mean_cc(Granularity::OneFps),
                cc_5fps: mean_cc(Granularity::FiveFps),
                auc_all: mean_auc(Granularity::All),
                auc_1fps: mean_auc(Granularity::OneFps),
                auc_5fps: mean_auc(Granularity::FiveFps),
            };
            let clips = pairs
                .iter()
                .zip(reports)
                .map(|((g, t), report)| ClipReport {
                    gen: g.display().to_string(),
                    gt: t.display().to_string(),
                    report,
                })
                .collect();
            to_json(&BatchReport {
                schema_version: SCHEMA_VERSION,
                clips,
                mean,
            })
        }
    };
    emit(&text, a.output.as_deref())
}

#[derive(Args, Debug)]
pub struct EvalSemanticArgs {
    #[command(subcommand)]
    metric: SemanticMetric,
}

#[derive(Subcommand, Debug)]
enum SemanticMetric {
    /// Fréchet distance between two f32 embedding tensors of shape [n, d].
    Fad(PairArgs),
    /// Mean FAD over the W, X, Y, Z channels: four --gen and four --gt tensors, in channel order.
    FadAvg(PairArgs),
    /// D_KL(gt || gen) between f32 class-probability tensors of shape [classes] or [clips, classes],
    /// averaged over clips.
    Kld {
        #[command(flatten)]
        pair: PairArgs,
        /// Probability floor applied before renormalizing [probability, 0-1].
        #[arg(long, default_value_t = DEFAULT_KLD_EPSILON)]
        epsilon: f64,
    },
}

#[derive(Args, Debug)]
struct PairArgs {
    /// Generated-side tensor(s).
    #[arg(long, num_args = 1..)]
    gen: Vec<PathBuf>,
    /// Ground-truth-side tensor(s).
    #[arg(long, num_args = 1..)]
    gt: Vec<PathBuf>,
    /// NDJSON manifest, one {"gen": PATH|[PATHS], "gt": PATH|[PATHS]} per line; paths are relative to the manifest.
    #[arg(long, conflicts_with_all = ["gen", "gt"])]
    manifest: Option<PathBuf>,
    /// Worker threads for manifest evaluation [count].
    #[arg(long, default_value = "1", value_parser = parse::positive_jobs)]
    jobs: usize,
    /// Write the report here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(String),
    Many(Vec<String>),
}

impl OneOrMany {
    fn paths(self, manifest: &Path) -> Vec<PathBuf> {
        match self {
            OneOrMany::One(p) => vec![parse::relative_to(manifest, &p)],
            OneOrMany::Many(v) => v.iter().map(|p| parse::relative_to(manifest, p)).collect(),
        }
    }
}

#[derive(Deserialize)]
struct SemanticEntry {
    gen: OneOrMany,
    gt: OneOrMany,
}

#[derive(Serialize)]
struct SemanticItem {
    gen: Vec<String>,
    gt: Vec<String>,
    value: f64,
}

#[derive(Serialize)]
struct SemanticReport {
    schema_version: u32,
    metric: &'static str,
    /// Mean over items.
    value: f64,
    items: Vec<SemanticItem>,
}

fn f32_tensor(path: &Path) -> CliResult<Tensor> {
    let t = io::read_tensor(path)?;
    if t.as_f32().is_none() {
        return Err(data_error(path, "expected an f32 tensor"));
    }
    Ok(t)
}

fn features(path: &Path) -> CliResult<FeatureSet> {
    let t = f32_tensor(path)?;
    let [n, d] = t.shape() else {
        return Err(data_error(path, format!("embedding tensor must be [n, d], got {:?}", t.shape())));
    };
    let data: Vec<f64> = t.as_f32().unwrap().iter().map(|v| *v as f64).collect();
    FeatureSet::from_rows(&data, *n, *d).map_err(|e| data_error(path, e))
}

fn distributions(path: &Path) -> CliResult<Vec<ClassDistribution>> {
    let t = f32_tensor(path)?;
    let classes = match t.shape() {
        [k] | [_, k] => *k,
        s => return Err(data_error(path, format!("probability tensor must be [classes] or [clips, classes], got {s:?}"))),
    };
    t.as_f32()
        .unwrap()
        .chunks(classes)
        .enumerate()
        .map(|(row, c)| {
            ClassDistribution::new(c.iter().map(|v| *v as f64).collect()).map_err(|e| data_error(path, format!("row {row}: {e}")))
        })
        .collect()
}

fn semantic_item(metric: &SemanticMetric, gen: &[PathBuf], gt: &[PathBuf]) -> CliResult<f64> {
    match metric {
        SemanticMetric::Fad(_) => {
            let (g, t) = match (gen, gt) {
                ([g], [t]) => (g, t),
                _ => return Err(usage("fad takes exactly one --gen and one --gt tensor")),
            };
            semantic::fad(&features(g)?, &features(t)?).map_err(|e| data_error(g, format!("against {}: {e}", t.display())))
        }
        SemanticMetric::FadAvg(_) => {
            if gen.len() != 4 || gt.len() != 4 {
                return Err(usage("fad-avg takes four --gen and four --gt tensors (W, X, Y, Z)"));
            }
            let mut pairs = Vec::with_capacity(4);
            for (g, t) in gen.iter().zip(gt) {
                pairs.push((features(g)?, features(t)?));
            }
            semantic::fad_avg(&pairs).map_err(|e| data_error(&gen[0], e))
        }
        SemanticMetric::Kld { epsilon, .. } => {
            let (g, t) = match (gen, gt) {
                ([g], [t]) => (g, t),
                _ => return Err(usage("kld takes exactly one --gen and one --gt tensor")),
            };
            let (dg, dt) = (distributions(g)?, distributions(t)?);
            if dg.len() != dt.len() {
                return Err(data_error(g, format!("{} clips vs {} in {}", dg.len(), dt.len(), t.display())));
            }
            let pairs: Vec<_> = dg.into_iter().zip(dt).collect();
            semantic::mean_kld(&pairs, *epsilon).map_err(|e| match e {
                foakit_core::Error::InvalidParameter(_) => Failure::from(e),
                e => data_error(g, e),
            })
        }
    }
}

pub fn eval_semantic(a: EvalSemanticArgs) -> CliResult {
    let (pair, name) = match &a.metric {
        SemanticMetric::Fad(p) => (p, "fad"),
        SemanticMetric::FadAvg(p) => (p, "fad_avg"),
        SemanticMetric::Kld { pair, .. } => (pair, "kld"),
    };
    let items: Vec<(Vec<PathBuf>, Vec<PathBuf>)> = match &pair.manifest {
        Some(m) => read_ndjson::<SemanticEntry>(m)?.into_iter().map(|e| (e.gen.paths(m), e.gt.paths(m))).collect(),
        None if !pair.gen.is_empty() && !pair.gt.is_empty() => vec![(pair.gen.clone(), pair.gt.clone())],
        None => return Err(usage("give --gen and --gt, or --manifest")),
    };
    let values = parallel_map(&items, pair.jobs, |(g, t)| semantic_item(&a.metric, g, t))?
        .into_iter()
        .collect::<Result<Vec<_>, Failure>>()?;
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let show = |v: &[PathBuf]| v.iter().map(|p| p.display().to_string()).collect();
    let report = SemanticReport {
        schema_version: SCHEMA_VERSION,
        metric: name,
        value: mean,
        items: items
            .iter()
            .zip(values)
            .map(|((g, t), value)| SemanticItem {
                gen: show(g),
                gt: show(t),
                value,
            })
            .collect(),
    };
    emit(&to_json(&report), pair.output.as_deref())
}
