use std::collections::BTreeSet;

use unicode_normalization::UnicodeNormalization;

use super::Prf;

/// NFC, lowercase, trimmed, internal whitespace collapsed to single spaces.
pub fn normalize_entity(surface: &str) -> String {
    let nfc: String = surface.nfc().collect::<String>().to_lowercase();
    nfc.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// A set of normalized entity surface strings.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EntitySet {
    entities: BTreeSet<String>,
}

impl EntitySet {
    pub fn from_surfaces<I, S>(surfaces: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Self {
            entities: surfaces
                .into_iter()
                .map(|s| normalize_entity(s.as_ref()))
                .filter(|s| !s.is_empty())
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.entities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty()
    }

    pub fn contains(&self, entity: &str) -> bool {
        self.entities.contains(entity)
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.entities.iter().map(String::as_str)
    }

    pub fn union(&self, other: &EntitySet) -> EntitySet {
        EntitySet {
            entities: self.entities.union(&other.entities).cloned().collect(),
        }
    }
}

/// Set overlap between candidate and reference entities.
pub fn entity_overlap(candidate: &EntitySet, reference: &EntitySet) -> Prf {
    let shared = candidate.entities.intersection(&reference.entities).count();
    Prf::from_counts(shared, candidate.len(), reference.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hand_set_arithmetic() {
        let cand = EntitySet::from_surfaces(["Paris", "Marie  Curie"]);
        let refs = EntitySet::from_surfaces(["marie curie", "Warsaw", "Sorbonne"]);
        let prf = entity_overlap(&cand, &refs);
        assert!((prf.precision - 0.5).abs() < 1e-12);
        assert!((prf.recall - 1.0 / 3.0).abs() < 1e-12);
        assert!((prf.f1 - 0.4).abs() < 1e-12);
    }

    #[test]
    fn identical_and_empty() {
        let a = EntitySet::from_surfaces(["Juventus", "Del Piero"]);
        assert_eq!(entity_overlap(&a, &a), Prf::new(1.0, 1.0));
        assert_eq!(entity_overlap(&EntitySet::default(), &a), Prf::ZERO);
        assert_eq!(entity_overlap(&a, &EntitySet::default()), Prf::ZERO);
    }

    #[test]
    fn normalization() {
        // Decomposed é (e + U+0301) composes to the precomposed form.
        assert_eq!(normalize_entity("  Ecole  Normale\tSupe\u{301}rieure "), "ecole normale supérieure");
        let set = EntitySet::from_surfaces(["Juventus", "JUVENTUS", "  "]);
        assert_eq!(set.len(), 1);
    }

    proptest! {
        #[test]
        fn swap_symmetry(a in proptest::collection::vec("[a-d]{1,2}", 0..6), b in proptest::collection::vec("[a-d]{1,2}", 0..6)) {
            let (sa, sb) = (EntitySet::from_surfaces(&a), EntitySet::from_surfaces(&b));
            prop_assert_eq!(entity_overlap(&sa, &sb).precision, entity_overlap(&sb, &sa).recall);
        }
    }
}
