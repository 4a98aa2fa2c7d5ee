//! Flat `key = value` run configuration.
//!
//! Precedence, highest first: command-line flag, config file, the
//! `POLYHALLO_BACKEND` environment variable (backend address only), built-in
//! default. Relative paths in a config file resolve against the file's
//! directory.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::CliError;

const PATH_KEYS: &[&str] = &[
    "gen",
    "refs",
    "annotations",
    "templates",
    "stopwords",
    "cache",
    "out",
    "lexical",
    "sentences",
    "doc_scores",
];

const KEYS: &[&str] = &[
    "gen",
    "refs",
    "annotations",
    "templates",
    "stopwords",
    "cache",
    "out",
    "lexical",
    "sentences",
    "doc_scores",
    "scores",
    "k",
    "languages",
    "setting",
    "backend",
    "cache_mode",
    "nli_model",
    "ner_model",
    "langid_model",
    "jobs",
    "seed",
    "granularity",
    "positive",
    "level",
    "averaging",
    "random_trials",
    "thresholds",
    "continuous",
    "lenient",
];

#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
    base: PathBuf,
}

impl ConfigFile {
    pub fn parse(text: &str, base: &Path) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Usage(format!("config line {}: expected key = value", i + 1)));
            };
            let key = key.trim().replace('-', "_");
            if !KEYS.contains(&key.as_str()) {
                return Err(CliError::Usage(format!("config line {}: unknown key {key:?}", i + 1)));
            }
            if values.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(CliError::Usage(format!("config line {}: {key} set twice", i + 1)));
            }
        }
        Ok(Self {
            values,
            base: base.to_path_buf(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text =
            fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, &base)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Resolves a path relative to the config file's directory.
    pub fn resolve(&self, value: &str) -> PathBuf {
        let p = Path::new(value);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base.join(p)
        }
    }
}

/// Merges flags over a config file.
pub struct Resolver {
    file: ConfigFile,
}

impl Resolver {
    pub fn new(config: Option<&Path>) -> Result<Self, CliError> {
        Ok(Self {
            file: match config {
                Some(p) => ConfigFile::load(p)?,
                None => ConfigFile::default(),
            },
        })
    }

    pub fn file(&self) -> &ConfigFile {
        &self.file
    }

    pub fn path(&self, flag: Option<&PathBuf>, key: &str) -> Option<PathBuf> {
        debug_assert!(PATH_KEYS.contains(&key));
        flag.cloned().or_else(|| self.file.get(key).map(|v| self.file.resolve(v)))
    }

    pub fn require_path(&self, flag: Option<&PathBuf>, key: &str) -> Result<PathBuf, CliError> {
        let p = self
            .path(flag, key)
            .ok_or_else(|| CliError::Usage(format!("missing --{key} (or `{key}` in the config file)")))?;
        if !p.exists() {
            return Err(CliError::Usage(format!("--{key}: {} does not exist", p.display())));
        }
        Ok(p)
    }

    pub fn string(&self, flag: Option<&String>, key: &str) -> Option<String> {
        flag.cloned().or_else(|| self.file.get(key).map(String::from))
    }

    pub fn value<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        self.file
            .get(key)
            .map(|v| v.parse::<T>().map_err(|e| CliError::Usage(format!("config {key} = {v:?}: {e}"))))
            .transpose()
    }

    pub fn flag(&self, flag: bool, key: &str) -> Result<bool, CliError> {
        Ok(flag || self.value::<bool>(None, key)?.unwrap_or(false))
    }

    /// Comma-separated list, flag values first replacing file values.
    pub fn list(&self, flag: &[String], key: &str) -> Vec<String> {
        if !flag.is_empty() {
            return flag.iter().flat_map(|v| split_list(v)).collect();
        }
        self.file.get(key).map(split_list).unwrap_or_default()
    }

    /// `name=path` entries; config-file paths resolve against its directory.
    pub fn named_paths(&self, flag: &[String], key: &str) -> Result<Vec<(String, PathBuf)>, CliError> {
        let (entries, from_file) = if flag.is_empty() {
            (self.file.get(key).map(split_list).unwrap_or_default(), true)
        } else {
            (flag.to_vec(), false)
        };
        entries
            .into_iter()
            .map(|e| {
                let (name, path) = match e.split_once('=') {
                    Some((n, p)) => (n.trim().to_string(), p.trim().to_string()),
                    None => {
                        let stem = Path::new(&e).file_stem().and_then(|s| s.to_str()).unwrap_or("").to_string();
                        (stem, e.clone())
                    }
                };
                if name.is_empty() {
                    return Err(CliError::Usage(format!("--{key} {e:?}: cannot derive a metric name")));
                }
                let path = if from_file { self.file.resolve(&path) } else { PathBuf::from(path) };
                if !path.exists() {
                    return Err(CliError::Usage(format!("--{key}: {} does not exist", path.display())));
                }
                Ok((name, path))
            })
            .collect()
    }
}

fn split_list(v: &str) -> Vec<String> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_resolve() {
        let c = ConfigFile::parse("# run\ngen = data/gen.jsonl\nk=3\n\nlanguages = en, zh\n", Path::new("/cfg")).unwrap();
        assert_eq!(c.get("k"), Some("3"));
        assert_eq!(c.resolve(c.get("gen").unwrap()), PathBuf::from("/cfg/data/gen.jsonl"));
        assert_eq!(c.resolve("/abs/x"), PathBuf::from("/abs/x"));
    }

    #[test]
    fn unknown_and_malformed() {
        assert!(matches!(ConfigFile::parse("colour = red", Path::new(".")), Err(CliError::Usage(_))));
        assert!(ConfigFile::parse("gen", Path::new(".")).is_err());
        assert!(ConfigFile::parse("k = 1\nk = 2", Path::new(".")).is_err());
    }

    #[test]
    fn flags_override_file() {
        let r = Resolver {
            file: ConfigFile::parse("k = 3\nlanguages = en,zh\ncontinuous = true", Path::new(".")).unwrap(),
        };
        assert_eq!(r.value::<usize>(Some(7), "k").unwrap(), Some(7));
        assert_eq!(r.value::<usize>(None, "k").unwrap(), Some(3));
        assert_eq!(r.list(&[], "languages"), vec!["en", "zh"]);
        assert_eq!(r.list(&["fr".into()], "languages"), vec!["fr"]);
        assert!(r.flag(false, "continuous").unwrap());
        assert!(r.value::<usize>(None, "seed").unwrap().is_none());
    }
}
