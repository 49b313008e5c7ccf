use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

pub const BUILD_ID: &str = concat!(env!("CARGO_PKG_NAME"), "-", env!("CARGO_PKG_VERSION"));

/// Output directory that records every file it hands out.
pub struct OutputDir {
    dir: PathBuf,
    comment: String,
    files: Vec<String>,
}

impl OutputDir {
    pub fn create(dir: &Path, command: &str, config_sha256: &str, seed: u64) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Usage(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            comment: format!("hardball {command} config_sha256={config_sha256} seed={seed} build={BUILD_ID}"),
            files: Vec::new(),
        })
    }

    pub fn comment(&self) -> &str {
        &self.comment
    }

    /// Opens a CSV file; the caller writes the header, this writes nothing.
    pub fn raw_csv(&mut self, name: &str) -> Result<BufWriter<File>, CliError> {
        let path = self.dir.join(name);
        let f = File::create(&path).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
        self.files.push(name.to_string());
        Ok(BufWriter::new(f))
    }

    /// Opens a CSV file that starts with the provenance comment.
    pub fn csv(&mut self, name: &str) -> Result<BufWriter<File>, CliError> {
        let mut w = self.raw_csv(name)?;
        writeln!(w, "# {}", self.comment)?;
        Ok(w)
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut w = self.raw_csv(name)?;
        serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::Usage(e.to_string()))?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }
}
