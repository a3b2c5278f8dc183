//! Argument value parsers.

use std::path::{Path, PathBuf};

use foakit_core::foa::{Direction, SphereGrid};

use crate::output::{usage, CliResult};

/// Comma-separated list of finite numbers.
pub fn numbers(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|p| {
            let v: f64 = p.trim().parse().map_err(|_| format!("'{p}' is not a number"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format!("'{p}' is not finite"))
            }
        })
        .collect()
}

/// `azimuth,elevation` pair, interpreted later according to `--degrees`.
#[derive(Debug, Clone, Copy)]
pub struct DirArg(pub f64, pub f64);

pub fn dir_arg(s: &str) -> Result<DirArg, String> {
    match numbers(s)?.as_slice() {
        [a, e] => Ok(DirArg(*a, *e)),
        _ => Err("expected AZIMUTH,ELEVATION".into()),
    }
}

impl DirArg {
    pub fn resolve(&self, degrees: bool) -> CliResult<Direction> {
        let d = if degrees {
            Direction::from_degrees(self.0, self.1)
        } else {
            Direction::new(self.0, self.1)
        };
        d.map_err(|e| usage(format!("--dir: {e}")))
    }
}

pub fn grid(s: &str) -> Result<SphereGrid, String> {
    SphereGrid::parse(s).map_err(|e| e.to_string())
}

pub fn positive_jobs(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err("expected a positive integer".into()),
    }
}

/// Resolves a manifest entry relative to the manifest's directory.
pub fn relative_to(manifest: &Path, entry: &str) -> PathBuf {
    let p = Path::new(entry);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        manifest.parent().unwrap_or(Path::new("")).join(p)
    }
}
