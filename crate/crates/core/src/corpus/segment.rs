//! Sentence segmentation and tokenization.
//!
//! Sentences end at a run of terminators (`. ! ? ؟ …`) followed by optional
//! closing quotes/brackets and then whitespace or end of text. Full-width
//! terminators (`。！？`) end a sentence unconditionally since CJK text does
//! not put spaces between sentences. A period after a single-letter word
//! does not end a sentence when the next word looks like a name or another
//! initial (`J. K. Rowling`). Blank lines always separate sentences, and for
//! Thai whitespace between two Thai-script chunks is a boundary.
//!
//! Tokens are Unicode words (UAX #29). Han, kana, Thai and Hangul
//! characters become one token per code point.

use unicode_segmentation::UnicodeSegmentation;

/// A text split into sentences and tokens.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SegmentedText {
    pub raw: String,
    pub sentences: Vec<String>,
    pub tokens: Vec<String>,
}

impl SegmentedText {
    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }
}

const TERMINATORS: &[char] = &['.', '!', '?', '؟', '…'];
const FULLWIDTH_TERMINATORS: &[char] = &['。', '！', '？'];
const CLOSERS: &[char] = &[
    '"', '\'', '”', '’', '»', ')', ']', '}', '」', '』', '）', '】', '〉', '》', '］',
];

fn is_terminator(c: char) -> bool {
    TERMINATORS.contains(&c) || FULLWIDTH_TERMINATORS.contains(&c)
}

fn is_thai(c: char) -> bool {
    ('\u{0E00}'..='\u{0E7F}').contains(&c)
}

/// Scripts written without spaces between words; tokenized per code point.
fn is_per_codepoint_script(c: char) -> bool {
    matches!(c,
        '\u{3005}'..='\u{3007}'
        | '\u{3040}'..='\u{30FF}'
        | '\u{31F0}'..='\u{31FF}'
        | '\u{3400}'..='\u{4DBF}'
        | '\u{4E00}'..='\u{9FFF}'
        | '\u{F900}'..='\u{FAFF}'
        | '\u{FF66}'..='\u{FF9F}'
        | '\u{20000}'..='\u{2FA1F}'
        | '\u{0E00}'..='\u{0E7F}'
        | '\u{1100}'..='\u{11FF}'
        | '\u{3130}'..='\u{318F}'
        | '\u{A960}'..='\u{A97F}'
        | '\u{AC00}'..='\u{D7AF}'
        | '\u{D7B0}'..='\u{D7FF}')
}

/// True when the period at `dot` closes a single-letter initial that is
/// followed by a capitalized word or another initial.
fn is_initial(chars: &[(usize, char)], dot: usize, after: usize) -> bool {
    if dot == 0 || !chars[dot - 1].1.is_alphabetic() {
        return false;
    }
    if dot >= 2 && chars[dot - 2].1.is_alphanumeric() {
        return false;
    }
    let mut k = after;
    while k < chars.len() && chars[k].1.is_whitespace() {
        k += 1;
    }
    match (chars.get(k), chars.get(k + 1)) {
        (Some(&(_, first)), Some(&(_, second))) => {
            first.is_uppercase() && (second.is_alphabetic() || second == '.')
        }
        _ => false,
    }
}

fn boundaries(text: &str, language: &str) -> Vec<usize> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let offset = |i: usize| chars.get(i).map_or(text.len(), |&(b, _)| b);
    let thai = language == "th";
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i].1;
        if is_terminator(c) {
            let mut end = i;
            let mut fullwidth = false;
            while end < chars.len() && is_terminator(chars[end].1) {
                fullwidth |= FULLWIDTH_TERMINATORS.contains(&chars[end].1);
                end += 1;
            }
            let run_len = end - i;
            while end < chars.len() && CLOSERS.contains(&chars[end].1) {
                end += 1;
            }
            let at_gap = chars.get(end).map_or(true, |&(_, n)| n.is_whitespace());
            let split = fullwidth
                || (at_gap && !(run_len == 1 && c == '.' && is_initial(&chars, i, end)));
            if split {
                out.push(offset(end));
            }
            i = end;
        } else if c.is_whitespace() {
            let mut end = i;
            let mut newlines = 0;
            while end < chars.len() && chars[end].1.is_whitespace() {
                if chars[end].1 == '\n' {
                    newlines += 1;
                }
                end += 1;
            }
            let thai_gap = thai
                && i > 0
                && is_thai(chars[i - 1].1)
                && chars.get(end).is_some_and(|&(_, n)| is_thai(n));
            if newlines >= 2 || thai_gap {
                out.push(offset(i));
            }
            i = end;
        } else {
            i += 1;
        }
    }
    out
}

fn split_sentences(text: &str, language: &str) -> Vec<String> {
    let mut sentences = Vec::new();
    let mut start = 0;
    for end in boundaries(text, language)
        .into_iter()
        .chain(std::iter::once(text.len()))
    {
        if end < start {
            continue;
        }
        let piece = text[start..end].trim();
        if !piece.is_empty() {
            sentences.push(piece.to_string());
        }
        start = end;
    }
    sentences
}

/// Splits `text` into surface tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    for word in text.unicode_words() {
        let mut buf = String::new();
        for c in word.chars() {
            if is_per_codepoint_script(c) {
                if !buf.is_empty() {
                    tokens.push(std::mem::take(&mut buf));
                }
                tokens.push(c.to_string());
            } else {
                buf.push(c);
            }
        }
        if !buf.is_empty() {
            tokens.push(buf);
        }
    }
    tokens
}

/// Segments `text` into sentences and tokens using the rules for `language`.
/// Unknown languages use the default rules.
pub fn segment(text: &str, language: &str) -> SegmentedText {
    SegmentedText {
        raw: text.to_string(),
        sentences: split_sentences(text, language),
        tokens: tokenize(text),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_text() {
        let s = segment("", "en");
        assert!(s.sentences.is_empty());
        assert!(s.tokens.is_empty());
    }

    #[test]
    fn three_terminators() {
        assert_eq!(segment("A. B? C!", "en").sentences, vec!["A.", "B?", "C!"]);
    }

    #[test]
    fn chinese_sentences_and_codepoint_tokens() {
        // Hand application of the rules: each 。 ends a sentence; Han
        // characters are single tokens, the digit run stays one word.
        let s = segment("他出生于1976年。他是球员。", "zh");
        assert_eq!(s.sentences, vec!["他出生于1976年。", "他是球员。"]);
        assert_eq!(
            s.tokens,
            vec!["他", "出", "生", "于", "1976", "年", "他", "是", "球", "员"]
        );
    }

    #[test]
    fn initials_do_not_split() {
        let s = segment("J. K. Rowling wrote books. She lives in Edinburgh.", "en");
        assert_eq!(
            s.sentences,
            vec!["J. K. Rowling wrote books.", "She lives in Edinburgh."]
        );
    }

    #[test]
    fn decimals_and_closing_quotes() {
        let s = segment("He scored 1.5 goals. \"Great!\" he said.", "en");
        assert_eq!(s.sentences, vec!["He scored 1.5 goals.", "\"Great!\"", "he said."]);
    }

    #[test]
    fn thai_spaces_separate_chunks() {
        let s = segment("เขาเป็นนักฟุตบอล เขาเกิดที่อิตาลี", "th");
        assert_eq!(s.sentences.len(), 2);
        // Not applied to other languages.
        assert_eq!(segment("เขาเป็นนักฟุตบอล เขาเกิดที่อิตาลี", "en").sentences.len(), 1);
    }

    #[test]
    fn blank_line_is_a_boundary() {
        let s = segment("Early life\n\nHe was born in Conegliano.", "en");
        assert_eq!(s.sentences, vec!["Early life", "He was born in Conegliano."]);
    }

    #[test]
    fn arabic_question_mark() {
        assert_eq!(segment("چرا؟ بله.", "fa").sentences.len(), 2);
    }

    #[test]
    fn latin_tokens_drop_punctuation() {
        assert_eq!(tokenize("Del Piero, born 1974."), vec!["Del", "Piero", "born", "1974"]);
    }

    #[test]
    fn hangul_and_kana_per_codepoint() {
        assert_eq!(tokenize("한국어"), vec!["한", "국", "어"]);
        assert_eq!(tokenize("カタカナ"), vec!["カ", "タ", "カ", "ナ"]);
    }

    fn strip_ws(s: &str) -> String {
        s.chars().filter(|c| !c.is_whitespace()).collect()
    }

    proptest! {
        #[test]
        fn sentences_reassemble_raw(text in "[A-Za-z .!?。\n]{0,60}") {
            let s = segment(&text, "en");
            prop_assert!(s.sentences.iter().all(|x| !x.is_empty()));
            prop_assert!(s.tokens.iter().all(|x| !x.is_empty()));
            prop_assert_eq!(strip_ws(&s.sentences.concat()), strip_ws(&text));
        }

        #[test]
        fn sentence_resegments_to_itself(text in "[A-Za-zé0-9 .,!?…。！\"\n]{0,80}", lang in "(en|zh|th)") {
            for sentence in segment(&text, &lang).sentences {
                prop_assert_eq!(segment(&sentence, &lang).sentences, vec![sentence.clone()]);
            }
        }
    }
}
