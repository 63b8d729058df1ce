//! CSV output: every file starts with `#`-prefixed header comments
//! carrying the tool version, an optional timestamp, the subcommand, and
//! the full resolved config, so any output file is self-describing and
//! reproducible from its own header.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};

use crate::config::ExperimentConfig;

/// Header material shared by every file one command writes.
pub struct OutputContext {
    command: &'static str,
    config_toml: String,
    timestamp: Option<u64>,
    out_dir: PathBuf,
}

impl OutputContext {
    /// Captures the resolved config; with `reproducible` the timestamp
    /// line is omitted so reruns are byte-identical.
    pub fn new(
        command: &'static str,
        cfg: &ExperimentConfig,
        out_dir: PathBuf,
        reproducible: bool,
    ) -> Result<Self> {
        let timestamp = if reproducible {
            None
        } else {
            Some(SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()))
        };
        Ok(Self {
            command,
            config_toml: cfg.header_toml()?,
            timestamp,
            out_dir,
        })
    }

    /// The directory all files of this command go to.
    pub fn dir(&self) -> &Path {
        &self.out_dir
    }

    /// Opens `name` in the output directory and writes the full header:
    /// version, timestamp, command, resolved config, file-specific notes,
    /// and finally the column-name row.
    pub fn create(&self, name: &str, notes: &[String], columns: &str) -> Result<CsvFile> {
        fs::create_dir_all(&self.out_dir)
            .with_context(|| format!("cannot create output directory {}", self.out_dir.display()))?;
        let path = self.out_dir.join(name);
        let file = File::create(&path)
            .with_context(|| format!("cannot create output file {}", path.display()))?;
        let mut w = BufWriter::new(file);
        writeln!(w, "# rydnet {}", env!("CARGO_PKG_VERSION"))?;
        if let Some(ts) = self.timestamp {
            writeln!(w, "# generated_unix = {ts}")?;
        }
        writeln!(w, "# command = {}", self.command)?;
        writeln!(w, "# config:")?;
        for line in self.config_toml.lines() {
            writeln!(w, "#   {line}")?;
        }
        for note in notes {
            writeln!(w, "# {note}")?;
        }
        writeln!(w, "{columns}")?;
        Ok(CsvFile { w, path })
    }
}

/// One open CSV file; call [`CsvFile::row`] per data row and
/// [`CsvFile::finish`] to flush.
pub struct CsvFile {
    w: BufWriter<File>,
    path: PathBuf,
}

impl CsvFile {
    /// Writes one pre-formatted data row.
    pub fn row(&mut self, line: &str) -> Result<()> {
        writeln!(self.w, "{line}")?;
        Ok(())
    }

    /// Flushes and returns the file path for reporting.
    pub fn finish(mut self) -> Result<PathBuf> {
        self.w.flush()?;
        Ok(self.path)
    }
}

/// A one-dimensional histogram with explicit bin edges.
pub struct Histogram {
    /// `len + 1` ascending edges; bin `k` is `[edges[k], edges[k+1])`,
    /// with the last bin closed on the right.
    pub edges: Vec<f64>,
    /// Sample count per bin.
    pub counts: Vec<usize>,
    /// How the binning was chosen, echoed into output headers.
    pub description: String,
}

/// Bins samples with Freedman-Diaconis widths by default, or a fixed
/// bin count when `bins` is given. Returns `None` for no samples.
pub fn histogram(samples: &[f64], bins: Option<usize>) -> Option<Histogram> {
    if samples.is_empty() {
        return None;
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let (min, max) = (sorted[0], sorted[sorted.len() - 1]);
    let span = max - min;

    let (k, description) = if span <= 0.0 {
        (1, "degenerate (all samples equal)".to_string())
    } else if let Some(k) = bins {
        (k.max(1), format!("fixed, {} bins", k.max(1)))
    } else {
        let iqr = quantile(&sorted, 0.75) - quantile(&sorted, 0.25);
        let width = 2.0 * iqr / (sorted.len() as f64).cbrt();
        let k = if width > 0.0 {
            ((span / width).ceil() as usize).clamp(1, 10_000)
        } else {
            // Quartiles coincide; fall back to the square-root rule.
            ((sorted.len() as f64).sqrt().ceil() as usize).max(1)
        };
        (k, format!("freedman_diaconis, {k} bins"))
    };

    let edges: Vec<f64> = (0..=k).map(|i| min + span * i as f64 / k as f64).collect();
    let mut counts = vec![0usize; k];
    for &x in &sorted {
        let idx = if span <= 0.0 {
            0
        } else {
            (((x - min) / span * k as f64) as usize).min(k - 1)
        };
        counts[idx] += 1;
    }
    Some(Histogram { edges, counts, description })
}

/// Linear-interpolation quantile of pre-sorted data (the convention where
/// q of 0 and 1 hit the extremes exactly).
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
    }
}
