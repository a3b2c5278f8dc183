//! Failure classification and atomic file output.

use std::fmt;
use std::io::Write;
use std::path::Path;

use foakit_core::Error;
use serde::Serialize;

/// Exit 1 for usage problems, 2 for bad data.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Data(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Data(m) => f.write_str(m),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_) => Failure::Usage(e.to_string()),
            e => Failure::Data(e.to_string()),
        }
    }
}

pub type CliResult<T = ()> = Result<T, Failure>;

pub fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

pub fn data_error(path: &Path, msg: impl fmt::Display) -> Failure {
    Failure::Data(format!("{}: {msg}", path.display()))
}

/// Writes through a temporary file in the destination directory and
/// renames it into place, so a failure never leaves a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let fail = |e: std::io::Error| data_error(path, e);
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(bytes).map_err(fail)?;
    tmp.as_file().sync_all().map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}

/// Writes every `(path, bytes)` pair only after all of them were produced.
pub fn write_all_atomic(files: &[(std::path::PathBuf, Vec<u8>)]) -> CliResult {
    for (path, bytes) in files {
        write_atomic(path, bytes)?;
    }
    Ok(())
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes")
}

/// Prints to stdout, or writes atomically when a sink is given.
pub fn emit(text: &str, sink: Option<&Path>) -> CliResult {
    match sink {
        Some(path) => {
            let mut bytes = text.as_bytes().to_vec();
            if !text.ends_with('\n') {
                bytes.push(b'\n');
            }
            write_atomic(path, &bytes)
        }
        None => {
            println!("{}", text.trim_end_matches('\n'));
            Ok(())
        }
    }
}

pub const SCHEMA_VERSION: u32 = 1;
