//! Newline-delimited JSON manifests and the ordered parallel map.

use std::path::Path;

use rayon::prelude::*;
use serde::de::DeserializeOwned;

use crate::output::{data_error, CliResult};

/// One JSON object per non-blank line.
pub fn read_ndjson<T: DeserializeOwned>(path: &Path) -> CliResult<Vec<T>> {
    let text = std::fs::read_to_string(path).map_err(|e| data_error(path, e))?;
    let mut out = Vec::new();
    let mut offset = 0usize;
    for (k, line) in text.split_inclusive('\n').enumerate() {
        if !line.trim().is_empty() {
            let entry = serde_json::from_str(line).map_err(|e| {
                data_error(path, format!("line {} (byte {}): {e}", k + 1, offset + e.column().saturating_sub(1)))
            })?;
            out.push(entry);
        }
        offset += line.len();
    }
    if out.is_empty() {
        return Err(data_error(path, "manifest has no entries"));
    }
    Ok(out)
}

/// Maps `f` over `items` on `jobs` threads; results keep input order.
pub fn parallel_map<T, R, F>(items: &[T], jobs: usize, f: F) -> CliResult<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| crate::output::usage(format!("--jobs: {e}")))?;
    Ok(pool.install(|| items.par_iter().map(&f).collect()))
}
