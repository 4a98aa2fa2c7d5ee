use std::collections::HashMap;

use super::{Prf, StopwordSet};
use crate::corpus::SegmentedText;

fn lowered(tokens: &[String]) -> Vec<String> {
    tokens.iter().map(|t| t.to_lowercase()).collect()
}

/// Unigram overlap with clipped counts after removing stopwords.
///
/// Tokens are compared case-insensitively; the stopword set is expected in
/// lowercase.
pub fn rouge1(candidate: &SegmentedText, reference: &SegmentedText, stopwords: &StopwordSet) -> Prf {
    let filter = |tokens: &[String]| -> Vec<String> {
        lowered(tokens)
            .into_iter()
            .filter(|t| !stopwords.contains(t))
            .collect()
    };
    let cand = filter(&candidate.tokens);
    let refs = filter(&reference.tokens);
    if cand.is_empty() || refs.is_empty() {
        return Prf::ZERO;
    }
    let mut ref_counts: HashMap<&str, usize> = HashMap::new();
    for t in &refs {
        *ref_counts.entry(t.as_str()).or_default() += 1;
    }
    let mut cand_counts: HashMap<&str, usize> = HashMap::new();
    for t in &cand {
        *cand_counts.entry(t.as_str()).or_default() += 1;
    }
    let matched: usize = cand_counts
        .iter()
        .map(|(t, &c)| c.min(ref_counts.get(t).copied().unwrap_or(0)))
        .sum();
    Prf::from_counts(matched, cand.len(), refs.len())
}

/// Length of the longest common subsequence, O(|a|·|b|) time, O(|b|) space.
pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y {
                prev[j] + 1
            } else {
                cur[j].max(prev[j + 1])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// ROUGE-L over the full token sequences (no stopword removal).
pub fn rouge_l(candidate: &SegmentedText, reference: &SegmentedText) -> Prf {
    let cand = lowered(&candidate.tokens);
    let refs = lowered(&reference.tokens);
    if cand.is_empty() || refs.is_empty() {
        return Prf::ZERO;
    }
    Prf::from_counts(lcs_len(&cand, &refs), cand.len(), refs.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::segment;
    use proptest::prelude::*;

    fn seg(s: &str) -> SegmentedText {
        segment(s, "en")
    }

    fn close(a: Prf, p: f64, r: f64, f: f64) {
        assert!((a.precision - p).abs() < 1e-12, "{a:?}");
        assert!((a.recall - r).abs() < 1e-12, "{a:?}");
        assert!((a.f1 - f).abs() < 1e-12, "{a:?}");
    }

    #[test]
    fn rouge1_hand_count() {
        // cand {cat, sat}, ref {cat, ran} after removing {the, a}: one match.
        let stop = StopwordSet::from_words(["the", "a"]);
        close(rouge1(&seg("the cat sat"), &seg("a cat ran"), &stop), 0.5, 0.5, 0.5);
    }

    #[test]
    fn rouge1_identity_and_disjoint() {
        let stop = StopwordSet::default();
        close(rouge1(&seg("Marie Curie physicist"), &seg("marie curie physicist"), &stop), 1.0, 1.0, 1.0);
        close(rouge1(&seg("alpha beta"), &seg("gamma delta"), &stop), 0.0, 0.0, 0.0);
    }

    #[test]
    fn rouge1_clips_repeats() {
        let stop = StopwordSet::default();
        // cand has "x" three times, ref once: one clipped match of 3 tokens.
        close(rouge1(&seg("x x x"), &seg("x y"), &stop), 1.0 / 3.0, 0.5, 0.4);
    }

    #[test]
    fn rouge1_all_stopwords_is_zero() {
        let stop = StopwordSet::from_words(["the"]);
        assert_eq!(rouge1(&seg("the the"), &seg("the cat"), &stop), Prf::ZERO);
    }

    #[test]
    fn rouge_l_hand_count() {
        close(rouge_l(&seg("a b c"), &seg("a c d")), 2.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0);
        close(rouge_l(&seg("a b c"), &seg("a b c")), 1.0, 1.0, 1.0);
        assert_eq!(rouge_l(&seg(""), &seg("a")), Prf::ZERO);
    }

    fn words() -> impl Strategy<Value = String> {
        proptest::collection::vec(prop_oneof![Just("a"), Just("b"), Just("c"), Just("the"), Just("d")], 0..10)
            .prop_map(|v| v.join(" "))
    }

    proptest! {
        #[test]
        fn swap_symmetry(a in words(), b in words()) {
            let stop = StopwordSet::from_words(["the"]);
            let (sa, sb) = (seg(&a), seg(&b));
            prop_assert_eq!(rouge1(&sa, &sb, &stop).precision, rouge1(&sb, &sa, &stop).recall);
            prop_assert_eq!(rouge_l(&sa, &sb).precision, rouge_l(&sb, &sa).recall);
        }

        #[test]
        fn bounded_and_f1_between(a in words(), b in words()) {
            let stop = StopwordSet::from_words(["the"]);
            for prf in [rouge1(&seg(&a), &seg(&b), &stop), rouge_l(&seg(&a), &seg(&b))] {
                for v in [prf.precision, prf.recall, prf.f1] {
                    prop_assert!((0.0..=1.0).contains(&v));
                }
                let lo = prf.precision.min(prf.recall);
                let hi = prf.precision.max(prf.recall);
                prop_assert!(prf.f1 == 0.0 || (lo - 1e-12 <= prf.f1 && prf.f1 <= hi + 1e-12));
            }
        }

        #[test]
        fn recall_monotone_when_adding_reference_token(a in words(), b in words(), pick in 0usize..10) {
            let stop = StopwordSet::from_words(["the"]);
            let refs = seg(&b);
            let content: Vec<&String> = refs.tokens.iter().filter(|t| !stop.contains(t)).collect();
            prop_assume!(!content.is_empty());
            let extra = content[pick % content.len()];
            let before = rouge1(&seg(&a), &refs, &stop).recall;
            let after = rouge1(&seg(&format!("{a} {extra}")), &refs, &stop).recall;
            prop_assert!(after >= before);
        }
    }
}
