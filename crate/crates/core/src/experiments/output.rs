//! Run metadata sidecars and thread-pool control.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const TOOL_VERSION: &str = concat!("holescan ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub command: String,
    pub spec: serde_json::Value,
    pub master_seed: u64,
    pub tool_version: String,
    pub threads: usize,
    pub complete: bool,
    pub wall_clock_seconds: Option<f64>,
    pub summary: Option<String>,
}

/// `results.csv` -> `results.meta.json`.
pub fn sidecar_path(output: &Path) -> PathBuf {
    output.with_extension("meta.json")
}

/// A sidecar written as incomplete when the run starts.
#[derive(Debug)]
pub struct Sidecar {
    path: PathBuf,
    meta: RunMetadata,
    started: Instant,
}

impl Sidecar {
    pub fn begin<S: Serialize>(
        output: &Path,
        command: &str,
        spec: &S,
        master_seed: u64,
        threads: usize,
    ) -> Result<Self> {
        let meta = RunMetadata {
            command: command.to_string(),
            spec: serde_json::to_value(spec)?,
            master_seed,
            tool_version: TOOL_VERSION.to_string(),
            threads,
            complete: false,
            wall_clock_seconds: None,
            summary: None,
        };
        let sidecar = Sidecar { path: sidecar_path(output), meta, started: Instant::now() };
        sidecar.write()?;
        Ok(sidecar)
    }

    fn write(&self) -> Result<()> {
        let text = serde_json::to_string_pretty(&self.meta)?;
        fs::write(&self.path, text + "\n")?;
        Ok(())
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Marks the run complete with its duration and a one-line summary.
    pub fn finish(mut self, summary: impl Into<String>) -> Result<RunMetadata> {
        self.meta.complete = true;
        self.meta.wall_clock_seconds = Some(self.started.elapsed().as_secs_f64());
        self.meta.summary = Some(summary.into());
        self.write()?;
        Ok(self.meta)
    }
}

pub fn read_metadata(path: &Path) -> Result<RunMetadata> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

/// Threads a run will use: `requested`, or rayon's default when `None`.
pub fn effective_threads(requested: Option<usize>) -> usize {
    requested.unwrap_or_else(rayon::current_num_threads)
}

/// Runs `f` on a dedicated pool of `threads` workers (rayon's default size
/// when `None`). Results never depend on the worker count.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    if threads == Some(0) {
        return Err(Error::domain("thread count must be >= 1"));
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| Error::Io(e.to_string()))?;
    Ok(pool.install(f))
}
