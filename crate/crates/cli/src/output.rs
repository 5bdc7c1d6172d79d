use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::error::CliResult;

/// Shortest round-tripping text (exponent form for very small or large
/// magnitudes); NaN for missing values.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

/// Collects the files written by one run so the manifest can list them.
pub struct Outputs {
    dir: PathBuf,
    files: Vec<String>,
}

impl Outputs {
    pub fn new(dir: &Path) -> CliResult<Self> {
        fs::create_dir_all(dir)?;
        Ok(Outputs {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }

    pub fn csv<I, R>(&mut self, name: &str, header: &[String], rows: I) -> CliResult<PathBuf>
    where
        I: IntoIterator<Item = R>,
        R: IntoIterator<Item = String>,
    {
        let path = self.dir.join(name);
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(header)?;
        for row in rows {
            w.write_record(row)?;
        }
        w.flush()?;
        self.record(name, &path);
        Ok(path)
    }

    pub fn json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> CliResult<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, serde_json::to_string_pretty(value)? + "\n")?;
        self.record(name, &path);
        Ok(path)
    }

    fn record(&mut self, name: &str, path: &Path) {
        log::info!("wrote {}", path.display());
        self.files.push(name.to_string());
    }
}

pub fn header(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|c| c.to_string()).collect()
}

/// Writes `<command>_manifest.json`: the resolved configuration, engine
/// version, wall time, output files and a command summary.
pub fn write_manifest(
    out: &mut Outputs,
    command: &str,
    argv: &[String],
    config: &RunConfig,
    started: Instant,
    summary: Value,
) -> CliResult<PathBuf> {
    let files = out.files().to_vec();
    let manifest = json!({
        "command": command,
        "argv": argv,
        "version": taa_core::VERSION,
        "wall_time_s": started.elapsed().as_secs_f64(),
        "config": config,
        "outputs": files,
        "summary": summary,
    });
    out.json(&format!("{command}_manifest.json"), &manifest)
}
