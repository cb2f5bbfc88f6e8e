//! Deterministic text processing: tokens, sentence spans, and the reference
//! TF-IDF embedder used for every similarity computation in the crate.

mod embed;

pub use embed::{cosine, fit_embedder, Embedder, EmbedderModel, EmbeddingVector};

use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

/// A normalized word: lowercase and purely alphanumeric.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Token(String);

impl Token {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl AsRef<str> for Token {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl PartialEq<&str> for Token {
    fn eq(&self, other: &&str) -> bool {
        self.0 == *other
    }
}

/// Splits `text` on every maximal run of non-alphanumeric characters and
/// lowercases the pieces.
pub fn tokenize(text: &str) -> Vec<Token> {
    token_spans(text).map(|(tok, _)| tok).collect()
}

/// Like [`tokenize`], but also yields the byte range of each token in the
/// original text.
pub fn token_spans(text: &str) -> impl Iterator<Item = (Token, Range<usize>)> + '_ {
    let mut chars = text.char_indices().peekable();
    std::iter::from_fn(move || loop {
        // skip separators
        while let Some(&(_, c)) = chars.peek() {
            if c.is_alphanumeric() {
                break;
            }
            chars.next();
        }
        let &(start, _) = chars.peek()?;
        let mut end = start;
        while let Some(&(i, c)) = chars.peek() {
            if !c.is_alphanumeric() {
                break;
            }
            end = i + c.len_utf8();
            chars.next();
        }
        if let Some(tok) = normalize(&text[start..end]) {
            return Some((tok, start..end));
        }
    })
}

// Lowercasing can introduce combining marks (e.g. U+0130), which are then
// dropped so that tokens stay purely alphanumeric.
fn normalize(piece: &str) -> Option<Token> {
    let lowered: String = piece
        .chars()
        .flat_map(char::to_lowercase)
        .filter(|c| c.is_alphanumeric())
        .collect();
    (!lowered.is_empty()).then_some(Token(lowered))
}

/// Byte range of one sentence inside its parent document text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceSpan {
    pub index: usize,
    pub start: usize,
    pub end: usize,
}

impl SentenceSpan {
    pub fn text<'a>(&self, parent: &'a str) -> &'a str {
        &parent[self.start..self.end]
    }
}

/// Splits text into sentences at `.`, `!` or `?` followed by whitespace or
/// end of text. The terminator stays with its sentence; surrounding
/// whitespace is excluded. Abbreviations are not special-cased, so
/// `"Dr. Who?"` yields two sentences.
pub fn split_sentences(text: &str) -> Vec<SentenceSpan> {
    let mut spans = Vec::new();
    let mut start: Option<usize> = None;
    let mut last_non_ws = 0;
    let mut chars = text.char_indices().peekable();

    while let Some((i, c)) = chars.next() {
        if c.is_whitespace() {
            continue;
        }
        start.get_or_insert(i);
        last_non_ws = i + c.len_utf8();
        let at_boundary = chars.peek().is_none_or(|(_, n)| n.is_whitespace());
        if matches!(c, '.' | '!' | '?') && at_boundary {
            if let Some(s) = start.take() {
                spans.push(SentenceSpan {
                    index: spans.len(),
                    start: s,
                    end: last_non_ws,
                });
            }
        }
    }
    if let Some(s) = start {
        spans.push(SentenceSpan {
            index: spans.len(),
            start: s,
            end: last_non_ws,
        });
    }
    spans
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(text: &str) -> Vec<String> {
        tokenize(text).into_iter().map(Token::into_string).collect()
    }

    fn sentences(text: &str) -> Vec<&str> {
        split_sentences(text).iter().map(|s| s.text(text)).collect()
    }

    #[test]
    fn tokenize_examples() {
        assert_eq!(toks("Heart Disease!"), ["heart", "disease"]);
        assert!(toks("").is_empty());
        assert_eq!(toks("obesity-related risk"), ["obesity", "related", "risk"]);
    }

    #[test]
    fn tokenize_unicode() {
        assert_eq!(toks("Café—ÜBER  42x"), ["café", "über", "42x"]);
        // U+0130 lowercases to `i` plus a combining dot, which is dropped
        assert_eq!(toks("İstanbul"), ["istanbul"]);
        assert!(toks("...,;!? \t\n").is_empty());
    }

    #[test]
    fn token_spans_point_into_source() {
        let text = "  Heart, disease ";
        let spans: Vec<_> = token_spans(text).collect();
        assert_eq!(spans.len(), 2);
        assert_eq!(&text[spans[0].1.clone()], "Heart");
        assert_eq!(&text[spans[1].1.clone()], "disease");
    }

    #[test]
    fn split_examples() {
        assert_eq!(sentences("A b. C d."), ["A b.", "C d."]);
        assert_eq!(sentences("no terminator"), ["no terminator"]);
        assert_eq!(sentences("Dr. Who?"), ["Dr.", "Who?"]);
    }

    #[test]
    fn split_edge_cases() {
        assert!(split_sentences("").is_empty());
        assert!(split_sentences("  \n\t").is_empty());
        assert_eq!(sentences("  Pi is 3.14 exactly.  "), ["Pi is 3.14 exactly."]);
        assert_eq!(sentences("Really?! Yes.\nTail"), ["Really?!", "Yes.", "Tail"]);
        assert_eq!(sentences("..."), ["..."]);
        let spans = split_sentences("One. Two. Three.");
        let idx: Vec<_> = spans.iter().map(|s| s.index).collect();
        assert_eq!(idx, [0, 1, 2]);
    }
}
