//! Output directory handling: CSV files, plot specs and the run manifest.

use anyhow::{Context, Result};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub args: Vec<String>,
    pub seed: Option<u64>,
    pub version: String,
    pub outputs: Vec<String>,
    pub wall_clock_seconds: f64,
    #[serde(skip_serializing_if = "serde_json::Map::is_empty")]
    pub notes: serde_json::Map<String, serde_json::Value>,
}

/// Collects everything a command writes into one directory.
pub struct Output {
    dir: PathBuf,
    started: Instant,
    manifest: RunManifest,
}

impl Output {
    pub fn new(dir: &Path, command: &str, seed: Option<u64>) -> Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Output {
            dir: dir.to_path_buf(),
            started: Instant::now(),
            manifest: RunManifest {
                command: command.to_string(),
                args: std::env::args().skip(1).collect(),
                seed,
                version: env!("CARGO_PKG_VERSION").to_string(),
                outputs: Vec::new(),
                wall_clock_seconds: 0.0,
                notes: serde_json::Map::new(),
            },
        })
    }

    pub fn note(&mut self, key: &str, value: impl Serialize) {
        self.manifest.notes.insert(key.to_string(), serde_json::to_value(value).unwrap_or(serde_json::Value::Null));
    }

    /// Writes a CSV with `header` and rows of already formatted cells.
    pub fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<PathBuf> {
        let path = self.dir.join(name);
        let mut w = csv::Writer::from_path(&path).with_context(|| format!("writing {}", path.display()))?;
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        w.flush()?;
        self.manifest.outputs.push(name.to_string());
        Ok(path)
    }

    /// Renderer-neutral plot description next to the CSV it draws from.
    pub fn plot(&mut self, name: &str, spec: &PlotSpec) -> Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, serde_json::to_string_pretty(spec)?)?;
        self.manifest.outputs.push(name.to_string());
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.manifest.wall_clock_seconds = self.started.elapsed().as_secs_f64();
        let path = self.dir.join("manifest.json");
        std::fs::write(&path, serde_json::to_string_pretty(&self.manifest)?)?;
        Ok(())
    }
}

#[derive(Debug, Serialize)]
pub struct Series {
    pub y: String,
    pub label: String,
    /// `solid` for curves, `dashed` for asymptotes.
    pub style: &'static str,
}

#[derive(Debug, Serialize)]
pub struct PlotSpec {
    /// `line`, `heatmap` or `contour`.
    pub kind: &'static str,
    pub title: String,
    pub data: String,
    pub x: String,
    pub x_label: String,
    pub y_label: String,
    pub x_log: bool,
    pub y_log: bool,
    pub series: Vec<Series>,
    /// Value column of a heatmap.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<String>,
}

/// Shortest round-trip text of a float.
pub fn num(x: f64) -> String {
    let m = x.abs();
    if x.is_nan() {
        String::new()
    } else if m == 0.0 || (1e-4..1e16).contains(&m) || m.is_infinite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn list(xs: &[f64]) -> String {
    xs.iter().map(|x| num(*x)).collect::<Vec<_>>().join(";")
}
