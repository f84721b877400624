use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::pipeline::Context;
use crate::{Command, RunError};

/// Output directory and the files written so far.
pub struct Files {
    dir: PathBuf,
    pub written: Vec<PathBuf>,
}

impl Files {
    pub fn new(dir: &Path) -> Result<Files, RunError> {
        std::fs::create_dir_all(dir).map_err(|source| RunError::Write {
            path: dir.to_path_buf(),
            source,
        })?;
        Ok(Files {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), RunError> {
        let path = self.dir.join(name);
        std::fs::write(&path, bytes).map_err(|source| RunError::Write {
            path: path.clone(),
            source,
        })?;
        self.written.push(path);
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), RunError> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| RunError::Encode {
            path: self.dir.join(name),
            message: e.to_string(),
        })?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    pub fn csv(
        &mut self,
        name: &str,
        header: &[String],
        rows: &[Vec<String>],
    ) -> Result<(), RunError> {
        let encode = |e: csv::Error| RunError::Encode {
            path: self.dir.join(name),
            message: e.to_string(),
        };
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header).map_err(encode)?;
        for row in rows {
            let mut row = row.clone();
            row.resize(header.len(), String::new());
            w.write_record(&row).map_err(encode)?;
        }
        let bytes = w.into_inner().map_err(|e| RunError::Encode {
            path: self.dir.join(name),
            message: e.to_string(),
        })?;
        self.write(name, &bytes)
    }

    /// Run metadata, kept apart from the deterministic data files.
    pub fn manifest(
        &mut self,
        command: Command,
        config: &Path,
        ctx: &Context,
        seconds: f64,
    ) -> Result<(), RunError> {
        #[derive(Serialize)]
        struct Timing<'a> {
            stage: &'a str,
            seconds: f64,
        }
        #[derive(Serialize)]
        struct Manifest<'a> {
            tool: &'static str,
            version: &'static str,
            core_version: &'static str,
            command: &'static str,
            config: String,
            scenario: &'a str,
            precision_bits: usize,
            files: Vec<String>,
            timings: Vec<Timing<'a>>,
            total_seconds: f64,
        }
        let files = self
            .written
            .iter()
            .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
            .collect();
        let m = Manifest {
            tool: "tunnel-orders",
            version: env!("CARGO_PKG_VERSION"),
            core_version: tunnel_orders::VERSION,
            command: command.name(),
            config: config.display().to_string(),
            scenario: &ctx.scenario.label,
            precision_bits: ctx.scenario.precision_bits,
            files,
            timings: ctx
                .timings
                .iter()
                .map(|(stage, seconds)| Timing {
                    stage,
                    seconds: *seconds,
                })
                .collect(),
            total_seconds: seconds,
        };
        self.json("manifest.json", &m)
    }
}
