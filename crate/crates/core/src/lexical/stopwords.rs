use std::collections::{HashMap, HashSet};
use std::fs;
use std::io;
use std::path::Path;

const BUNDLED: &[(&str, &str)] = &[
    ("de", include_str!("../../stopwords/de.stop")),
    ("en", include_str!("../../stopwords/en.stop")),
    ("es", include_str!("../../stopwords/es.stop")),
    ("fr", include_str!("../../stopwords/fr.stop")),
    ("it", include_str!("../../stopwords/it.stop")),
    ("ru", include_str!("../../stopwords/ru.stop")),
    ("zh", include_str!("../../stopwords/zh.stop")),
];

/// Lowercased stopwords for one language. Languages without a list use the
/// empty set, so nothing is removed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StopwordSet {
    words: HashSet<String>,
}

impl StopwordSet {
    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Self {
            words: words
                .into_iter()
                .map(|w| w.as_ref().trim().to_lowercase())
                .filter(|w| !w.is_empty())
                .collect(),
        }
    }

    /// Parses the `<lang>.stop` format: one token per line.
    pub fn parse(text: &str) -> Self {
        Self::from_words(text.lines())
    }

    pub fn bundled(language: &str) -> Self {
        BUNDLED
            .iter()
            .find(|(lang, _)| *lang == language)
            .map(|(_, text)| Self::parse(text))
            .unwrap_or_default()
    }

    pub fn bundled_languages() -> impl Iterator<Item = &'static str> {
        BUNDLED.iter().map(|(lang, _)| *lang)
    }

    /// Loads `<dir>/<lang>.stop`, falling back to the bundled list (or the
    /// empty set) when the file does not exist.
    pub fn load(dir: &Path, language: &str) -> io::Result<Self> {
        match fs::read_to_string(dir.join(format!("{language}.stop"))) {
            Ok(text) => Ok(Self::parse(&text)),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(Self::bundled(language)),
            Err(e) => Err(e),
        }
    }

    pub fn contains(&self, token: &str) -> bool {
        self.words.contains(token)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Stopword sets for several languages, loaded once.
#[derive(Debug, Clone, Default)]
pub struct StopwordBank {
    sets: HashMap<String, StopwordSet>,
    empty: StopwordSet,
}

impl StopwordBank {
    /// Lists from `dir` where present, bundled lists otherwise.
    pub fn load<'a>(dir: Option<&Path>, languages: impl IntoIterator<Item = &'a str>) -> io::Result<Self> {
        let mut sets = HashMap::new();
        for lang in languages {
            let set = match dir {
                Some(d) => StopwordSet::load(d, lang)?,
                None => StopwordSet::bundled(lang),
            };
            sets.insert(lang.to_string(), set);
        }
        Ok(Self {
            sets,
            empty: StopwordSet::default(),
        })
    }

    pub fn get(&self, language: &str) -> &StopwordSet {
        self.sets.get(language).unwrap_or(&self.empty)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_lists_load() {
        assert!(StopwordSet::bundled("en").contains("the"));
        assert!(StopwordSet::bundled("zh").contains("的"));
        assert!(StopwordSet::bundled("ko").is_empty());
    }

    #[test]
    fn directory_overrides_bundled() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("en.stop"), "Foo\n\nbar\n").unwrap();
        let set = StopwordSet::load(dir.path(), "en").unwrap();
        assert_eq!(set.len(), 2);
        assert!(set.contains("foo"));
        assert!(StopwordSet::load(dir.path(), "fr").unwrap().contains("le"));
    }
}
