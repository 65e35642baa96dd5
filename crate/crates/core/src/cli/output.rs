use std::fs;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::config::RunConfig;

/// Provenance stamped on every emitted file.
#[derive(Clone, Debug, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config_sha256: String,
}

impl Meta {
    pub fn new(command: &str, config: &RunConfig) -> Self {
        // The output directory does not affect results, so it is left out of the hash.
        let mut hashed = config.clone();
        hashed.output = Default::default();
        let canonical = serde_json::to_string(&hashed).expect("config serializes");
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            config_sha256: hex::encode(Sha256::digest(canonical.as_bytes())),
        }
    }

    fn csv_header(&self) -> String {
        format!("# {} {} command={} config_sha256={}\n", self.tool, self.version, self.command, self.config_sha256)
    }
}

/// Files of one run, held in memory until every computation has succeeded.
#[derive(Debug)]
pub struct Outputs {
    meta: Meta,
    files: Vec<(String, String)>,
}

impl Outputs {
    pub fn new(meta: Meta) -> Self {
        Self { meta, files: Vec::new() }
    }

    pub fn csv(&mut self, name: &str, body: &str) {
        self.files.push((name.to_string(), format!("{}{}", self.meta.csv_header(), body)));
    }

    pub fn json<T: Serialize>(&mut self, name: &str, data: &T) {
        let doc = serde_json::json!({ "meta": self.meta, "data": data });
        let mut text = serde_json::to_string_pretty(&doc).expect("output serializes");
        text.push('\n');
        self.files.push((name.to_string(), text));
    }

    pub fn names(&self) -> Vec<&str> {
        self.files.iter().map(|(n, _)| n.as_str()).collect()
    }

    /// Writes every file under temporary names, then renames them into place.
    pub fn commit(&self, dir: &Path) -> std::io::Result<()> {
        fs::create_dir_all(dir)?;
        let mut staged = Vec::with_capacity(self.files.len());
        for (name, body) in &self.files {
            let tmp = dir.join(format!(".{name}.partial"));
            if let Err(e) = fs::write(&tmp, body) {
                for t in &staged {
                    let _ = fs::remove_file(t);
                }
                let _ = fs::remove_file(&tmp);
                return Err(e);
            }
            staged.push(tmp);
        }
        for ((name, _), tmp) in self.files.iter().zip(&staged) {
            fs::rename(tmp, dir.join(name))?;
        }
        Ok(())
    }
}
