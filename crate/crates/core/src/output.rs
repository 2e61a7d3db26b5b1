//! Report files. Everything is written under a `.partial` suffix first and
//! renamed only when the whole run has succeeded.

use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::Result;

pub const PARTIAL_SUFFIX: &str = ".partial";

/// Set of files produced by one run.
#[derive(Debug)]
pub struct OutputSet {
    dir: PathBuf,
    pending: Vec<String>,
}

impl OutputSet {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(OutputSet {
            dir: dir.to_path_buf(),
            pending: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Writes `name.partial` immediately.
    pub fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        fs::write(self.dir.join(format!("{name}{PARTIAL_SUFFIX}")), contents)?;
        if !self.pending.iter().any(|n| n == name) {
            self.pending.push(name.to_string());
        }
        Ok(())
    }

    /// Promotes every partial file to its final name; returns the final paths.
    pub fn commit(self) -> Result<Vec<PathBuf>> {
        let mut out = Vec::with_capacity(self.pending.len());
        for name in &self.pending {
            let fin = self.dir.join(name);
            fs::rename(self.dir.join(format!("{name}{PARTIAL_SUFFIX}")), &fin)?;
            out.push(fin);
        }
        Ok(out)
    }
}

/// Comma-separated table with a header row and LF line endings.
#[derive(Debug, Clone)]
pub struct Csv {
    text: String,
    columns: usize,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Csv {
            text: format!("{}\n", header.join(",")),
            columns: header.len(),
        }
    }

    pub fn row(&mut self, cells: &[&dyn Display]) {
        debug_assert_eq!(cells.len(), self.columns, "row width must match the header");
        let line: Vec<String> = cells.iter().map(|c| c.to_string()).collect();
        self.text.push_str(&line.join(","));
        self.text.push('\n');
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }
}
