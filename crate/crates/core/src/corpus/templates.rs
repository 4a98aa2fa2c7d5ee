use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::Deserialize;

use super::{normalize_lang, CorpusError};

pub const PLACEHOLDER: &str = "{}";

/// A biography prompt with exactly one `{}` name placeholder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptTemplate {
    language: String,
    template: String,
}

impl PromptTemplate {
    pub fn new(language: &str, template: &str) -> Result<Self, CorpusError> {
        let count = template.matches(PLACEHOLDER).count();
        if count != 1 {
            return Err(CorpusError::Template {
                language: language.to_string(),
                message: format!("expected exactly one `{{}}` placeholder, found {count}"),
            });
        }
        Ok(Self {
            language: normalize_lang(language),
            template: template.to_string(),
        })
    }

    pub fn language(&self) -> &str {
        &self.language
    }

    pub fn template(&self) -> &str {
        &self.template
    }

    pub fn render(&self, name: &str) -> String {
        self.template.replacen(PLACEHOLDER, name, 1)
    }
}

/// Machine-translated biography prompts, one per language. Thai is not
/// bundled; load it from a registry file.
const BUILTIN: &[(&str, &str)] = &[
    ("en", "Tell me a biography of {}."),
    ("zh", "给我写一篇关于{}的传记。"),
    ("es", "Dime una biografía de {}."),
    ("de", "Erzähl mir eine Biografie von {}."),
    ("ru", "Расскажите мне биографию {}."),
    ("id", "Ceritakan tentang biografi {}."),
    ("vi", "Hãy cho tôi biết tiểu sử của {}."),
    ("fa", "بیوگرافی {} را به من بگویید."),
    ("uk", "Розкажіть мені біографію {}."),
    ("sv", "Berätta en biografi om {}."),
    ("ja", "{} の略歴を教えてください。"),
    ("ro", "Spune-mi o biografie a lui {}."),
    ("hu", "Mondja el {} életrajzát."),
    ("bg", "Разкажи ми биография на {}."),
    ("fr", "Dites-moi une biographie de {}."),
    ("fi", "Kerro minulle henkilön {} elämäkerta."),
    ("ko", "{}의 약력을 알려주세요."),
    ("it", "Raccontami una biografia di {}."),
];

#[derive(Debug, Clone, Default)]
pub struct TemplateRegistry {
    templates: BTreeMap<String, PromptTemplate>,
}

impl TemplateRegistry {
    pub fn get(&self, language: &str) -> Option<&PromptTemplate> {
        self.templates.get(language)
    }

    pub fn insert(&mut self, template: PromptTemplate) {
        self.templates.insert(template.language.clone(), template);
    }

    pub fn languages(&self) -> impl Iterator<Item = &str> {
        self.templates.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.templates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.templates.is_empty()
    }
}

pub fn builtin_templates() -> TemplateRegistry {
    let mut reg = TemplateRegistry::default();
    for (lang, template) in BUILTIN {
        reg.insert(PromptTemplate::new(lang, template).expect("builtin template"));
    }
    reg
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TemplateRecord {
    language: String,
    template: String,
}

/// Loads a line-delimited registry of `{language, template}` records.
pub fn load_templates(path: impl AsRef<Path>) -> Result<TemplateRegistry, CorpusError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut reg = TemplateRegistry::default();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|source| CorpusError::Io {
            path: path.display().to_string(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: TemplateRecord = serde_json::from_str(&line).map_err(|e| CorpusError::Parse {
            line: idx + 1,
            message: e.to_string(),
        })?;
        reg.insert(PromptTemplate::new(&rec.language, &rec.template)?);
    }
    Ok(reg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_english() {
        let reg = builtin_templates();
        assert_eq!(
            reg.get("en").unwrap().render("Marie Curie"),
            "Tell me a biography of Marie Curie."
        );
    }

    #[test]
    fn every_builtin_renders_without_placeholder() {
        let reg = builtin_templates();
        assert_eq!(reg.len(), 18);
        for lang in reg.languages() {
            assert!(!reg.get(lang).unwrap().render("X").contains(PLACEHOLDER));
        }
    }

    #[test]
    fn placeholder_count_enforced() {
        assert!(PromptTemplate::new("en", "no placeholder").is_err());
        assert!(PromptTemplate::new("en", "{} and {}").is_err());
    }
}
