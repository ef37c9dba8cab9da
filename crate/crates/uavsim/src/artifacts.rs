//! CSV schemas and the output-directory bookkeeping.
//!
//! Floats are written in scientific notation with 17 significant digits so
//! every value reads back bit-identical.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Deserialize;
use uavsim_core::agents::RunMetrics;

use crate::error::HarnessError;

pub const MANIFEST_FILE: &str = "manifest.csv";

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct MetricsRow {
    pub episode: usize,
    pub total_reward: f64,
    pub average_reward: f64,
    pub q0: f64,
    pub q0_ar_ratio: f64,
    pub steps: usize,
    pub time_proxy_s: f64,
}

impl MetricsRow {
    pub const HEADER: [&'static str; 7] = [
        "episode",
        "total_reward",
        "average_reward",
        "q0",
        "q0_ar_ratio",
        "steps",
        "time_proxy_s",
    ];

    pub fn from_metrics(metrics: &RunMetrics) -> Vec<Self> {
        metrics
            .episodes
            .iter()
            .map(|e| MetricsRow {
                episode: e.episode,
                total_reward: e.total_reward,
                average_reward: e.average_reward,
                q0: e.q0,
                q0_ar_ratio: e.q0_ar_ratio,
                steps: e.steps,
                time_proxy_s: e.time_proxy_s,
            })
            .collect()
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.episode.to_string(),
            fmt_f64(self.total_reward),
            fmt_f64(self.average_reward),
            fmt_f64(self.q0),
            fmt_f64(self.q0_ar_ratio),
            self.steps.to_string(),
            fmt_f64(self.time_proxy_s),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub struct TrajectoryRow {
    pub step: usize,
    pub col: usize,
    pub row: usize,
}

impl TrajectoryRow {
    pub const HEADER: [&'static str; 3] = ["step", "col", "row"];

    fn record(&self) -> Vec<String> {
        vec![self.step.to_string(), self.col.to_string(), self.row.to_string()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct FieldRow {
    pub x: f64,
    pub y: f64,
    pub value: f64,
}

impl FieldRow {
    pub const HEADER: [&'static str; 3] = ["x", "y", "value"];

    fn record(&self) -> Vec<String> {
        vec![fmt_f64(self.x), fmt_f64(self.y), fmt_f64(self.value)]
    }
}

/// One candidate's ratio trace from discount selection.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct SelectionRow {
    pub gamma: f64,
    pub episode: usize,
    pub q0: f64,
    pub average_reward: f64,
    pub q0_ar_ratio: f64,
}

impl SelectionRow {
    pub const HEADER: [&'static str; 5] = ["gamma", "episode", "q0", "average_reward", "q0_ar_ratio"];

    fn record(&self) -> Vec<String> {
        vec![
            fmt_f64(self.gamma),
            self.episode.to_string(),
            fmt_f64(self.q0),
            fmt_f64(self.average_reward),
            fmt_f64(self.q0_ar_ratio),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ManifestRow {
    /// Relative to the manifest's directory.
    pub path: String,
    pub kind: String,
    pub algorithm: String,
    pub seed: Option<u64>,
    pub config_hash: String,
    pub env_hash: String,
    pub delta: f64,
}

impl ManifestRow {
    pub const HEADER: [&'static str; 7] = ["path", "kind", "algorithm", "seed", "config_hash", "env_hash", "delta"];

    fn record(&self) -> Vec<String> {
        vec![
            self.path.clone(),
            self.kind.clone(),
            self.algorithm.clone(),
            self.seed.map(|s| s.to_string()).unwrap_or_default(),
            self.config_hash.clone(),
            self.env_hash.clone(),
            fmt_f64(self.delta),
        ]
    }
}

/// Rows that can be written under a fixed header.
pub trait CsvRecord {
    fn header() -> &'static [&'static str];
    fn fields(&self) -> Vec<String>;
}

macro_rules! csv_record {
    ($($t:ty),*) => {$(
        impl CsvRecord for $t {
            fn header() -> &'static [&'static str] {
                &Self::HEADER
            }
            fn fields(&self) -> Vec<String> {
                self.record()
            }
        }
    )*};
}

csv_record!(MetricsRow, TrajectoryRow, FieldRow, SelectionRow, ManifestRow);

pub fn write_csv<T: CsvRecord>(path: &Path, rows: &[T]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_path(path).map_err(HarnessError::csv(path))?;
    w.write_record(T::header()).map_err(HarnessError::csv(path))?;
    for row in rows {
        w.write_record(row.fields()).map_err(HarnessError::csv(path))?;
    }
    w.flush().map_err(HarnessError::io(path))
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, HarnessError> {
    let mut r = csv::Reader::from_path(path).map_err(HarnessError::csv(path))?;
    r.deserialize()
        .collect::<Result<_, _>>()
        .map_err(HarnessError::csv(path))
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestRow>, HarnessError> {
    read_csv(path)
}

/// Files and directories written by one command. Dropping it without
/// calling [`OutputSet::commit`] removes everything it created.
pub struct OutputSet {
    root: PathBuf,
    files: Vec<PathBuf>,
    dirs: Vec<PathBuf>,
    committed: bool,
}

impl OutputSet {
    pub fn create(root: &Path) -> Result<Self, HarnessError> {
        let mut set = Self {
            root: root.to_path_buf(),
            files: Vec::new(),
            dirs: Vec::new(),
            committed: false,
        };
        set.ensure_dir(root)?;
        Ok(set)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn ensure_dir(&mut self, dir: &Path) -> Result<(), HarnessError> {
        let mut missing = Vec::new();
        let mut cur = Some(dir);
        while let Some(d) = cur {
            if d.as_os_str().is_empty() || d.exists() {
                break;
            }
            missing.push(d.to_path_buf());
            cur = d.parent();
        }
        for d in missing.into_iter().rev() {
            fs::create_dir(&d).map_err(HarnessError::io(&d))?;
            self.dirs.push(d);
        }
        Ok(())
    }

    /// Absolute path for `relative`, creating parent directories.
    pub fn path(&mut self, relative: &str) -> Result<PathBuf, HarnessError> {
        let path = self.root.join(relative);
        if let Some(parent) = path.parent() {
            self.ensure_dir(parent)?;
        }
        self.files.push(path.clone());
        Ok(path)
    }

    pub fn write_csv<T: CsvRecord>(&mut self, relative: &str, rows: &[T]) -> Result<(), HarnessError> {
        let path = self.path(relative)?;
        write_csv(&path, rows)
    }

    pub fn write_text(&mut self, relative: &str, text: &str) -> Result<(), HarnessError> {
        let path = self.path(relative)?;
        fs::write(&path, text).map_err(HarnessError::io(&path))
    }

    pub fn commit(mut self) {
        self.committed = true;
    }
}

impl Drop for OutputSet {
    fn drop(&mut self) {
        if self.committed {
            return;
        }
        for f in self.files.iter().rev() {
            let _ = fs::remove_file(f);
        }
        for d in self.dirs.iter().rev() {
            let _ = fs::remove_dir(d);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(-2.5), "-2.5000000000000000e0");
        for v in [0.1, 1.0 / 3.0, -7.25e-300, f64::MAX, f64::MIN_POSITIVE, 0.0] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
        assert_eq!(fmt_f64(f64::INFINITY).parse::<f64>().unwrap(), f64::INFINITY);
    }

    #[test]
    fn uncommitted_outputs_are_removed() {
        let tmp = tempfile::tempdir().unwrap();
        let root = tmp.path().join("a/b");
        {
            let mut set = OutputSet::create(&root).unwrap();
            set.write_text("c/d.txt", "x").unwrap();
            assert!(root.join("c/d.txt").exists());
        }
        assert!(!tmp.path().join("a").exists());
        let mut set = OutputSet::create(&root).unwrap();
        set.write_text("e.txt", "y").unwrap();
        set.commit();
        assert!(root.join("e.txt").exists());
    }
}
