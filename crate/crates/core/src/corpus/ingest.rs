use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::Deserialize;

use super::{
    normalize_lang, BioEntity, CorpusError, GenerationConfig, GenerationSample, ReferenceDoc,
    SampleGroup,
};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GenerationRecord {
    entity_id: String,
    name: String,
    language: String,
    sample_index: usize,
    prompt: String,
    text: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReferenceRecord {
    entity_id: String,
    language: String,
    title: String,
    text: String,
}

/// A group with fewer samples than requested. It is still scored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RaggedGroup {
    pub entity_id: String,
    pub language: String,
    pub present: usize,
    pub missing_indices: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct Ingested {
    /// Groups sorted by (entity_id, language).
    pub groups: Vec<SampleGroup>,
    pub entities: Vec<BioEntity>,
    pub ragged: Vec<RaggedGroup>,
    pub samples_per_prompt: usize,
}

impl Ingested {
    pub fn sample_count(&self) -> usize {
        self.groups.iter().map(|g| g.samples.len()).sum()
    }
}

fn open(path: &Path) -> Result<BufReader<File>, CorpusError> {
    File::open(path).map(BufReader::new).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Reads a line-delimited generation corpus and groups it by
/// (entity_id, language).
pub fn ingest_generations(path: impl AsRef<Path>, k: usize) -> Result<Ingested, CorpusError> {
    let path = path.as_ref();
    parse_generations(open(path)?, k).map_err(|e| match e {
        CorpusError::Io { source, .. } => CorpusError::Io {
            path: path.display().to_string(),
            source,
        },
        other => other,
    })
}

fn non_empty(line: usize, field: &str, value: &str) -> Result<(), CorpusError> {
    if value.trim().is_empty() {
        Err(CorpusError::Parse {
            line,
            message: format!("field `{field}` must be non-empty"),
        })
    } else {
        Ok(())
    }
}

pub fn parse_generations<R: BufRead>(reader: R, k: usize) -> Result<Ingested, CorpusError> {
    if k == 0 {
        return Err(CorpusError::Parse {
            line: 0,
            message: "samples per prompt must be positive".into(),
        });
    }
    let mut groups: BTreeMap<(String, String), BTreeMap<usize, GenerationSample>> = BTreeMap::new();
    let mut entities: BTreeMap<String, BioEntity> = BTreeMap::new();

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|source| CorpusError::Io {
            path: String::new(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: GenerationRecord = serde_json::from_str(&line).map_err(|e| CorpusError::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        non_empty(line_no, "entity_id", &rec.entity_id)?;
        non_empty(line_no, "name", &rec.name)?;
        non_empty(line_no, "language", &rec.language)?;
        if rec.sample_index >= k {
            return Err(CorpusError::Parse {
                line: line_no,
                message: format!("sample_index {} out of range for k={k}", rec.sample_index),
            });
        }
        let language = normalize_lang(&rec.language);
        entities
            .entry(rec.entity_id.clone())
            .or_insert_with(|| BioEntity {
                entity_id: rec.entity_id.clone(),
                name: rec.name.clone(),
                reference_languages: Default::default(),
            });
        let slot = groups
            .entry((rec.entity_id.clone(), language.clone()))
            .or_default();
        if slot.contains_key(&rec.sample_index) {
            return Err(CorpusError::DuplicateKey {
                line: line_no,
                entity_id: rec.entity_id,
                language,
                sample_index: Some(rec.sample_index),
            });
        }
        slot.insert(
            rec.sample_index,
            GenerationSample {
                entity_id: rec.entity_id,
                name: rec.name,
                language,
                sample_index: rec.sample_index,
                prompt: rec.prompt,
                text: rec.text,
                detected_language: None,
                detector_valid: false,
            },
        );
    }

    let mut ragged = Vec::new();
    let groups = groups
        .into_iter()
        .map(|((entity_id, language), samples)| {
            if samples.len() < k {
                ragged.push(RaggedGroup {
                    entity_id: entity_id.clone(),
                    language: language.clone(),
                    present: samples.len(),
                    missing_indices: (0..k).filter(|i| !samples.contains_key(i)).collect(),
                });
            }
            SampleGroup {
                entity_id,
                language,
                samples: samples.into_values().collect(),
                generation_config: GenerationConfig::default(),
            }
        })
        .collect();

    Ok(Ingested {
        groups,
        entities: entities.into_values().collect(),
        ragged,
        samples_per_prompt: k,
    })
}

/// Reference documents keyed by (entity_id, language).
#[derive(Debug, Clone, Default)]
pub struct ReferenceSet {
    docs: HashMap<(String, String), ReferenceDoc>,
}

impl ReferenceSet {
    pub fn get(&self, entity_id: &str, language: &str) -> Option<&ReferenceDoc> {
        self.docs.get(&(entity_id.to_string(), language.to_string()))
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn insert(&mut self, doc: ReferenceDoc) -> Option<ReferenceDoc> {
        self.docs
            .insert((doc.entity_id.clone(), doc.language.clone()), doc)
    }

    /// Marks which languages have references on each entity.
    pub fn annotate_entities(&self, entities: &mut [BioEntity]) {
        for entity in entities {
            entity.reference_languages = self
                .docs
                .keys()
                .filter(|(id, _)| *id == entity.entity_id)
                .map(|(_, lang)| lang.clone())
                .collect();
        }
    }
}

pub fn ingest_references(path: impl AsRef<Path>) -> Result<ReferenceSet, CorpusError> {
    let path = path.as_ref();
    parse_references(open(path)?).map_err(|e| match e {
        CorpusError::Io { source, .. } => CorpusError::Io {
            path: path.display().to_string(),
            source,
        },
        other => other,
    })
}

pub fn parse_references<R: BufRead>(reader: R) -> Result<ReferenceSet, CorpusError> {
    let mut set = ReferenceSet::default();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|source| CorpusError::Io {
            path: String::new(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: ReferenceRecord = serde_json::from_str(&line).map_err(|e| CorpusError::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        non_empty(line_no, "entity_id", &rec.entity_id)?;
        let doc = ReferenceDoc {
            entity_id: rec.entity_id,
            language: normalize_lang(&rec.language),
            title: rec.title,
            text: rec.text,
        };
        if set.get(&doc.entity_id, &doc.language).is_some() {
            return Err(CorpusError::DuplicateKey {
                line: line_no,
                entity_id: doc.entity_id,
                language: doc.language,
                sample_index: None,
            });
        }
        set.insert(doc);
    }
    Ok(set)
}
