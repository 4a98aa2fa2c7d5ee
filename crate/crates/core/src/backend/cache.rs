use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde_json::Value;
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::{canonical_json, Task};

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("cache I/O at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("cache entry {path} failed its checksum")]
    Integrity { path: PathBuf },
}

/// Hex SHA-256 of the canonical `{"item", "model_id", "task"}` object.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CacheKey(String);

impl CacheKey {
    pub fn new(task: Task, model_id: &str, item: &Value) -> Self {
        let keyed = serde_json::json!({
            "task": task.as_str(),
            "model_id": model_id,
            "item": item,
        });
        Self(sha256_hex(canonical_json(&keyed).as_bytes()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CacheKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub(crate) fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Directory names are restricted to `[A-Za-z0-9._-]`; the full model id
/// still goes into the key hash.
fn model_dir(model_id: &str) -> String {
    model_id
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-') {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Content-addressed store of raw response payloads.
///
/// Layout: `<root>/<task>/<model_id>/<hex>.resp` with the payload's SHA-256
/// in a sidecar `<hex>.sha256`. Reads may run concurrently; writes are
/// serialized and atomic (temp file + rename, sidecar first).
#[derive(Debug)]
pub struct ScoreCache {
    root: PathBuf,
    write_lock: Mutex<()>,
}

impl ScoreCache {
    pub fn open(root: impl Into<PathBuf>) -> Result<Self, CacheError> {
        let root = root.into();
        fs::create_dir_all(&root).map_err(|source| CacheError::Io {
            path: root.clone(),
            source,
        })?;
        Ok(Self {
            root,
            write_lock: Mutex::new(()),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn paths(&self, task: Task, model_id: &str, key: &CacheKey) -> (PathBuf, PathBuf) {
        let dir = self.root.join(task.as_str()).join(model_dir(model_id));
        (
            dir.join(format!("{}.resp", key.0)),
            dir.join(format!("{}.sha256", key.0)),
        )
    }

    pub fn get(&self, task: Task, model_id: &str, key: &CacheKey) -> Result<Option<Vec<u8>>, CacheError> {
        let (resp, sum) = self.paths(task, model_id, key);
        let payload = match fs::read(&resp) {
            Ok(p) => p,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(None),
            Err(source) => return Err(CacheError::Io { path: resp, source }),
        };
        let expected = match fs::read_to_string(&sum) {
            Ok(s) => s,
            Err(e) if e.kind() == io::ErrorKind::NotFound => {
                return Err(CacheError::Integrity { path: resp })
            }
            Err(source) => return Err(CacheError::Io { path: sum, source }),
        };
        if expected.trim() != sha256_hex(&payload) {
            return Err(CacheError::Integrity { path: resp });
        }
        Ok(Some(payload))
    }

    pub fn put(&self, task: Task, model_id: &str, key: &CacheKey, payload: &[u8]) -> Result<(), CacheError> {
        let (resp, sum) = self.paths(task, model_id, key);
        let _guard = self.write_lock.lock().unwrap_or_else(|p| p.into_inner());
        if fs::read(&resp).is_ok_and(|existing| existing == payload) {
            return Ok(());
        }
        let dir = resp.parent().expect("entry has a parent");
        fs::create_dir_all(dir).map_err(|source| CacheError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        write_atomic(&sum, format!("{}\n", sha256_hex(payload)).as_bytes())?;
        write_atomic(&resp, payload)
    }

    /// Number of stored entries for one task/model.
    pub fn count(&self, task: Task, model_id: &str) -> usize {
        fs::read_dir(self.root.join(task.as_str()).join(model_dir(model_id)))
            .map(|rd| {
                rd.filter_map(Result::ok)
                    .filter(|e| e.path().extension().is_some_and(|x| x == "resp"))
                    .count()
            })
            .unwrap_or(0)
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CacheError> {
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    fs::write(&tmp, bytes)
        .and_then(|_| fs::rename(&tmp, path))
        .map_err(|source| CacheError::Io {
            path: path.to_path_buf(),
            source,
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn put_then_get_identical_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let cache = ScoreCache::open(dir.path()).unwrap();
        let key = CacheKey::new(Task::Nli, "m/1", &serde_json::json!({"premise": "a", "hypothesis": "b"}));
        let payload = br#"{"entail": 0.7, "neutral":0.2,"contradict":0.1}"#;
        cache.put(Task::Nli, "m/1", &key, payload).unwrap();
        assert_eq!(cache.get(Task::Nli, "m/1", &key).unwrap().unwrap(), payload);
        assert_eq!(cache.count(Task::Nli, "m/1"), 1);
        // Re-put is a no-op.
        cache.put(Task::Nli, "m/1", &key, payload).unwrap();
    }

    #[test]
    fn unknown_key_misses() {
        let dir = tempfile::tempdir().unwrap();
        let cache = ScoreCache::open(dir.path()).unwrap();
        let key = CacheKey::new(Task::Langid, "m", &serde_json::json!({"text": "x"}));
        assert!(cache.get(Task::Langid, "m", &key).unwrap().is_none());
    }

    #[test]
    fn reordered_keys_hash_identically() {
        // Oracle: keys of the canonical form are sorted, so both spellings
        // denote the same bytes before hashing.
        let a: Value = serde_json::from_str(r#"{"premise":"p","hypothesis":"h"}"#).unwrap();
        let b: Value = serde_json::from_str(r#"{"hypothesis":"h","premise":"p"}"#).unwrap();
        assert_eq!(CacheKey::new(Task::Nli, "m", &a), CacheKey::new(Task::Nli, "m", &b));
        assert_eq!(
            CacheKey::new(Task::Nli, "m", &a).as_str(),
            sha256_hex(br#"{"item":{"hypothesis":"h","premise":"p"},"model_id":"m","task":"nli"}"#)
        );
        assert_ne!(CacheKey::new(Task::Nli, "m", &a), CacheKey::new(Task::Nli, "other", &a));
    }

    #[test]
    fn corruption_detected() {
        let dir = tempfile::tempdir().unwrap();
        let cache = ScoreCache::open(dir.path()).unwrap();
        let key = CacheKey::new(Task::Nli, "m", &serde_json::json!({"premise": "a", "hypothesis": "b"}));
        cache.put(Task::Nli, "m", &key, b"{}").unwrap();
        let (resp, _) = cache.paths(Task::Nli, "m", &key);
        fs::write(&resp, b"{\"tampered\":1}").unwrap();
        assert!(matches!(cache.get(Task::Nli, "m", &key), Err(CacheError::Integrity { .. })));
    }
}
