//! Report files, 17-digit JSON and the run manifest.

use std::collections::BTreeMap;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::config::Config;
use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Writes every float with 17 significant digits.
struct Sig17;

impl serde_json::ser::Formatter for Sig17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        write!(w, "{v:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        write!(w, "{:.16e}", v as f64)
    }
}

pub fn to_json_bytes<T: Serialize>(v: &T) -> Vec<u8> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Sig17);
    v.serialize(&mut ser).expect("in-memory JSON serialization");
    out.push(b'\n');
    out
}

/// 17 significant digits for CSV cells.
pub fn f17(v: f64) -> String {
    format!("{v:.16e}")
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// One command invocation: collects outputs and writes the manifest last.
pub struct Run {
    command: String,
    command_line: Vec<String>,
    out_dir: PathBuf,
    seed: u64,
    threads: usize,
    grid: Value,
    started: Instant,
    outputs: BTreeMap<String, String>,
}

impl Run {
    pub fn new(command: &str, command_line: Vec<String>, out_dir: &Path, seed: u64, threads: usize) -> Result<Self, CliError> {
        std::fs::create_dir_all(out_dir).map_err(|e| CliError::Io(format!("--out-dir {}: {e}", out_dir.display())))?;
        Ok(Self {
            command: command.to_string(),
            command_line,
            out_dir: out_dir.to_path_buf(),
            seed,
            threads,
            grid: Value::Null,
            started: Instant::now(),
            outputs: BTreeMap::new(),
        })
    }

    pub fn set_grid(&mut self, grid: Value) {
        self.grid = grid;
    }

    /// The reproducible part of the manifest: thread cap, paths and timings are excluded.
    fn identity(&self, config: &Config) -> Value {
        json!({
            "command": self.command,
            "config": config.effective(),
            "seed": self.seed,
            "grid": self.grid,
            "version": VERSION,
        })
    }

    pub fn digest(&self, config: &Config) -> String {
        sha256_hex(&to_json_bytes(&self.identity(config)))
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.out_dir.join(name);
        std::fs::write(&path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        self.outputs.insert(name.to_string(), sha256_hex(bytes));
        Ok(())
    }

    /// Serializes `report` as a single JSON object carrying the manifest digest.
    pub fn write_json<T: Serialize>(&mut self, name: &str, config: &Config, report: &T) -> Result<(), CliError> {
        let mut v = serde_json::to_value(report).map_err(|e| CliError::Io(e.to_string()))?;
        let obj = match v {
            Value::Object(ref mut m) => m,
            _ => {
                v = Value::Object(Map::from_iter([("result".to_string(), v)]));
                v.as_object_mut().unwrap()
            }
        };
        obj.insert("manifest_digest".into(), Value::String(self.digest(config)));
        let bytes = to_json_bytes(&v);
        self.write_bytes(name, &bytes)
    }

    pub fn write_csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
        let mut s = header.join(",");
        s.push('\n');
        for r in rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        self.write_bytes(name, s.as_bytes())
    }

    pub fn finish(self, config: &Config) -> Result<(), CliError> {
        let mut m = match self.identity(config) {
            Value::Object(m) => m,
            _ => unreachable!(),
        };
        m.insert("manifest_digest".into(), Value::String(self.digest(config)));
        m.insert("command_line".into(), json!(self.command_line));
        m.insert(
            "config_file".into(),
            json!(config.path().map(|p| p.display().to_string())),
        );
        m.insert("threads".into(), json!(self.threads));
        m.insert("wall_time_ms".into(), json!(self.started.elapsed().as_millis() as u64));
        m.insert("outputs".into(), json!(self.outputs));
        let bytes = to_json_bytes(&Value::Object(m));
        let path = self.out_dir.join("manifest.json");
        std::fs::write(&path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }
}
