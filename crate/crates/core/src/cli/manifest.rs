//! Run manifests: what was computed, from which inputs, with which settings.
//!
//! The manifest hash covers the command, crate version, effective settings
//! and input content hashes. Paths, backend address, cache mode and worker
//! count are left out: they change where results come from, not what they
//! are.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use super::CliError;
use crate::backend::canonical_json;
use crate::backend::sha256_hex;

#[derive(Debug, Clone)]
pub struct Manifest {
    command: String,
    settings: BTreeMap<String, String>,
    inputs: BTreeMap<String, String>,
    outputs: BTreeMap<String, String>,
}

impl Manifest {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            settings: BTreeMap::new(),
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
        }
    }

    pub fn setting(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.settings.insert(key.to_string(), value.to_string());
        self
    }

    /// Records the content hash of an input file under `role`.
    pub fn input(&mut self, role: &str, path: &Path) -> Result<&mut Self, CliError> {
        let bytes = fs::read(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        self.inputs.insert(role.to_string(), sha256_hex(&bytes));
        Ok(self)
    }

    fn core(&self) -> Value {
        let settings = canonical_json(&json!(self.settings));
        json!({
            "command": self.command,
            "version": env!("CARGO_PKG_VERSION"),
            "config_hash": sha256_hex(settings.as_bytes()),
            "settings": self.settings,
            "inputs": self.inputs,
        })
    }

    pub fn hash(&self) -> String {
        sha256_hex(canonical_json(&self.core()).as_bytes())
    }

    /// Writes `name` under the manifest, recording its hash.
    pub fn write_output(&mut self, path: &Path, content: &str) -> Result<(), CliError> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))?;
        }
        fs::write(path, content).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?;
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        self.outputs.insert(name, sha256_hex(content.as_bytes()));
        Ok(())
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let mut v = self.core();
        v["manifest_hash"] = json!(self.hash());
        v["outputs"] = json!(self.outputs);
        let mut text = serde_json::to_string_pretty(&v).expect("manifest serializes");
        text.push('\n');
        fs::write(path, text).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
    }
}

/// `<dir>/manifest.json` for directory outputs.
pub fn manifest_in(dir: &Path) -> PathBuf {
    dir.join("manifest.json")
}

/// `<stem>.manifest.json` beside a file output.
pub fn manifest_beside(file: &Path) -> PathBuf {
    sibling(file, "manifest.json")
}

/// `<stem>.<suffix>` in the same directory as `file`.
pub fn sibling(file: &Path, suffix: &str) -> PathBuf {
    let stem = file.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    file.with_file_name(format!("{stem}.{suffix}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_ignores_outputs_and_insertion_order() {
        let mut a = Manifest::new("stats");
        a.setting("k", 5).setting("languages", "en,zh");
        let mut b = Manifest::new("stats");
        b.setting("languages", "en,zh").setting("k", 5);
        b.outputs.insert("x".into(), "y".into());
        assert_eq!(a.hash(), b.hash());
        b.setting("k", 4);
        assert_ne!(a.hash(), b.hash());
    }

    #[test]
    fn beside_paths() {
        assert_eq!(manifest_beside(Path::new("out/auc.tsv")), PathBuf::from("out/auc.manifest.json"));
        assert_eq!(sibling(Path::new("auc.tsv"), "population.tsv"), PathBuf::from("auc.population.tsv"));
    }
}
