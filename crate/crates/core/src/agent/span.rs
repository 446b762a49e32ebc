//! Supporting-fact span codec.
//!
//! A fact is emitted as `[s]` + its first N characters + `[e]` + its last N
//! characters. Facts shorter than 2N are emitted whole as `[s]fact[e]`.
//! Decoding searches the window the fact was quoted from; when the segments
//! occur more than once the longest matching span wins.

use std::fmt;
use std::ops::Range;

use thiserror::Error;

pub const START_MARKER: &str = "[s]";
pub const END_MARKER: &str = "[e]";

/// Default number of characters kept at each end of a fact.
pub const DEFAULT_EDGE_CHARS: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpanError {
    #[error("invalid span: {0}")]
    InvalidSpan(String),
    #[error("malformed span encoding: {0:?}")]
    Malformed(String),
    #[error("span not found in window")]
    SpanNotFound,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SpanEncoding {
    /// The whole fact.
    Literal(String),
    /// Leading and trailing characters of the fact.
    Edges { start: String, end: String },
}

impl SpanEncoding {
    pub fn parse(text: &str) -> Result<Self, SpanError> {
        let text = text.trim_matches(|c| c == '\n' || c == '\r');
        let malformed = || SpanError::Malformed(text.to_string());
        let rest = text.strip_prefix(START_MARKER).ok_or_else(malformed)?;
        if let Some(literal) = rest.strip_suffix(END_MARKER) {
            if literal.is_empty() {
                return Err(malformed());
            }
            return Ok(SpanEncoding::Literal(literal.to_string()));
        }
        let (start, end) = rest.split_once(END_MARKER).ok_or_else(malformed)?;
        if start.is_empty() || end.is_empty() {
            return Err(malformed());
        }
        Ok(SpanEncoding::Edges { start: start.to_string(), end: end.to_string() })
    }
}

impl fmt::Display for SpanEncoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpanEncoding::Literal(s) => write!(f, "{START_MARKER}{s}{END_MARKER}"),
            SpanEncoding::Edges { start, end } => write!(f, "{START_MARKER}{start}{END_MARKER}{end}"),
        }
    }
}

/// Encode the characters `span` of `window` keeping `edge_chars` at each end.
pub fn encode_fact_span(window: &str, span: Range<usize>, edge_chars: usize) -> Result<SpanEncoding, SpanError> {
    if edge_chars == 0 {
        return Err(SpanError::InvalidSpan("edge length must be positive".into()));
    }
    let len = window.chars().count();
    if span.start >= span.end || span.end > len {
        return Err(SpanError::InvalidSpan(format!("{span:?} in a window of {len} characters")));
    }
    let fact: Vec<char> = window.chars().skip(span.start).take(span.end - span.start).collect();
    if fact.len() < 2 * edge_chars {
        return Ok(SpanEncoding::Literal(fact.into_iter().collect()));
    }
    Ok(SpanEncoding::Edges {
        start: fact[..edge_chars].iter().collect(),
        end: fact[fact.len() - edge_chars..].iter().collect(),
    })
}

fn char_index(s: &str, byte: usize) -> usize {
    s[..byte].chars().count()
}

/// Locate an encoded fact in `window`, as a character range.
///
/// For edge encodings the span runs from the first occurrence of the start
/// segment to the last occurrence of the end segment, which is the longest
/// candidate whenever any candidate exists.
pub fn decode_fact_span(window: &str, enc: &SpanEncoding) -> Result<Range<usize>, SpanError> {
    match enc {
        SpanEncoding::Literal(lit) => {
            let at = window.find(lit.as_str()).ok_or(SpanError::SpanNotFound)?;
            let i = char_index(window, at);
            Ok(i..i + lit.chars().count())
        }
        SpanEncoding::Edges { start, end } => {
            let s_at = window.find(start.as_str()).ok_or(SpanError::SpanNotFound)?;
            let e_at = window.rfind(end.as_str()).ok_or(SpanError::SpanNotFound)?;
            if e_at < s_at + start.len() {
                return Err(SpanError::SpanNotFound);
            }
            let i = char_index(window, s_at);
            let j = char_index(window, e_at) + end.chars().count();
            Ok(i..j)
        }
    }
}

fn occurrences(window: &[char], needle: &[char]) -> Vec<usize> {
    if needle.is_empty() || needle.len() > window.len() {
        return Vec::new();
    }
    (0..=window.len() - needle.len()).filter(|&i| window[i..i + needle.len()] == *needle).collect()
}

/// Number of distinct spans in `window` consistent with `enc`.
/// Greater than one means the decode had to break a tie.
pub fn candidate_count(window: &str, enc: &SpanEncoding) -> usize {
    let w: Vec<char> = window.chars().collect();
    match enc {
        SpanEncoding::Literal(lit) => occurrences(&w, &lit.chars().collect::<Vec<_>>()).len(),
        SpanEncoding::Edges { start, end } => {
            let s: Vec<char> = start.chars().collect();
            let e: Vec<char> = end.chars().collect();
            let starts = occurrences(&w, &s);
            let ends = occurrences(&w, &e);
            starts.iter().map(|&i| ends.iter().filter(|&&j| j >= i + s.len()).count()).sum()
        }
    }
}
