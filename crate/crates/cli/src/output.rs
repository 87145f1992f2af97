use std::fs;
use std::path::{Path, PathBuf};

use kac_spectral::Result;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;

pub const VERSION: &str = env!("KAC_BUILD_VERSION");

/// Output directory plus the manifest being assembled for it.
pub struct Outputs {
    dir: PathBuf,
    command: &'static str,
    files: Vec<String>,
    fields: serde_json::Map<String, Value>,
}

impl Outputs {
    pub fn create(dir: &Path, command: &'static str) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            command,
            files: Vec::new(),
            fields: serde_json::Map::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        fs::write(self.dir.join(name), contents)?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn record(&mut self, key: &str, value: impl Serialize) {
        self.fields.insert(
            key.to_string(),
            serde_json::to_value(value).expect("manifest value serializes"),
        );
    }

    pub fn record_config(&mut self, cfg: &RunConfig) {
        self.record("config_hash", cfg.hash());
        self.record("config", cfg);
        self.record("grid", json!({"n_v": cfg.n_v, "n_x": cfg.n_x, "length": cfg.length}));
        self.record("s", cfg.s);
        self.record("scheme", cfg.scheme);
        self.record("seed", cfg.seed());
    }

    /// Writes `manifest.json` and returns its path.
    pub fn finish(mut self) -> Result<PathBuf> {
        self.fields.insert("command".into(), json!(self.command));
        self.fields.insert("version".into(), json!(VERSION));
        self.fields.insert("files".into(), json!(self.files));
        let path = self.dir.join("manifest.json");
        fs::write(&path, serde_json::to_string_pretty(&Value::Object(self.fields))? + "\n")?;
        Ok(path)
    }
}
