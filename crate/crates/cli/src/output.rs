use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;

/// Record of one invocation. Everything except `wall_time_secs` is a pure
/// function of the command line.
#[derive(Debug, Serialize)]
pub struct RunManifest<'a, C: Serialize> {
    pub command: &'a str,
    pub config: &'a C,
    pub seed: u64,
    pub version: &'static str,
    pub wall_time_secs: f64,
    pub outputs: Vec<String>,
}

/// Collects every file written under `--out` so the manifest can list it.
pub struct OutputDir {
    root: Option<PathBuf>,
    written: Vec<String>,
    started: Instant,
}

impl OutputDir {
    pub fn new(root: Option<PathBuf>) -> Result<Self> {
        if let Some(dir) = &root {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
        Ok(Self { root, written: Vec::new(), started: Instant::now() })
    }

    pub fn enabled(&self) -> bool {
        self.root.is_some()
    }

    fn open(&mut self, name: &str) -> Result<Option<BufWriter<File>>> {
        let Some(dir) = &self.root else { return Ok(None) };
        let path = dir.join(name);
        let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        self.written.push(name.to_string());
        Ok(Some(BufWriter::new(file)))
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        if let Some(mut w) = self.open(name)? {
            serde_json::to_writer_pretty(&mut w, value)?;
            writeln!(w)?;
            w.flush()?;
        }
        Ok(())
    }

    pub fn json_lines<'a, T: Serialize + 'a>(
        &mut self,
        name: &str,
        items: impl IntoIterator<Item = &'a T>,
    ) -> Result<()> {
        if let Some(mut w) = self.open(name)? {
            for item in items {
                serde_json::to_writer(&mut w, item)?;
                writeln!(w)?;
            }
            w.flush()?;
        }
        Ok(())
    }

    pub fn csv<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<()> {
        if let Some(w) = self.open(name)? {
            let mut out = csv::Writer::from_writer(w);
            for row in rows {
                out.serialize(row)?;
            }
            out.flush()?;
        }
        Ok(())
    }

    pub fn finish<C: Serialize>(mut self, command: &str, config: &C, seed: u64) -> Result<()> {
        if !self.enabled() {
            return Ok(());
        }
        let mut outputs = self.written.clone();
        outputs.push("manifest.json".into());
        let manifest = RunManifest {
            command,
            config,
            seed,
            version: env!("CARGO_PKG_VERSION"),
            wall_time_secs: self.started.elapsed().as_secs_f64(),
            outputs,
        };
        self.json("manifest.json", &manifest)
    }

    pub fn root(&self) -> Option<&Path> {
        self.root.as_deref()
    }
}
