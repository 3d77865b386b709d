//! Token-sequence matching, span pooling and the quote-wrapping transform.

use log::warn;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum AlignError {
    #[error("empty needle")]
    EmptyNeedle,
    #[error("span {start}..{end} out of range for {rows} rows")]
    SpanOutOfRange {
        start: usize,
        end: usize,
        rows: usize,
    },
    #[error("matrix rows have unequal lengths")]
    RaggedMatrix,
    #[error("target `{target}` not found in sentence")]
    TargetNotFound { target: String },
}

/// A contiguous run of `len >= 1` items starting at `start`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub len: usize,
}

impl Span {
    pub fn end(&self) -> usize {
        self.start + self.len
    }

    pub fn range(&self) -> std::ops::Range<usize> {
        self.start..self.end()
    }
}

/// KMP failure table: `table[i]` is the length of the longest proper prefix of
/// `needle[..=i]` that is also its suffix.
fn failure_table<T: PartialEq>(needle: &[T]) -> Vec<usize> {
    let mut table = vec![0; needle.len()];
    let mut k = 0;
    for i in 1..needle.len() {
        while k > 0 && needle[i] != needle[k] {
            k = table[k - 1];
        }
        if needle[i] == needle[k] {
            k += 1;
        }
        table[i] = k;
    }
    table
}

/// Finds the first occurrence of `needle` in `haystack` in
/// `O(|haystack| + |needle|)` comparisons.
pub fn kmp_find<T: PartialEq>(haystack: &[T], needle: &[T]) -> Result<Option<Span>, AlignError> {
    if needle.is_empty() {
        return Err(AlignError::EmptyNeedle);
    }
    let table = failure_table(needle);
    let mut matched = 0;
    for (i, item) in haystack.iter().enumerate() {
        while matched > 0 && *item != needle[matched] {
            matched = table[matched - 1];
        }
        if *item == needle[matched] {
            matched += 1;
        }
        if matched == needle.len() {
            return Ok(Some(Span {
                start: i + 1 - needle.len(),
                len: needle.len(),
            }));
        }
    }
    Ok(None)
}

/// Componentwise mean of the rows covered by `span`.
pub fn mean_pool<R: AsRef<[f64]>>(matrix: &[R], span: Span) -> Result<Vec<f64>, AlignError> {
    if span.len == 0 || span.end() > matrix.len() {
        return Err(AlignError::SpanOutOfRange {
            start: span.start,
            end: span.end(),
            rows: matrix.len(),
        });
    }
    let rows = &matrix[span.range()];
    let dim = rows[0].as_ref().len();
    let mut acc = vec![0.0; dim];
    for row in rows {
        let row = row.as_ref();
        if row.len() != dim {
            return Err(AlignError::RaggedMatrix);
        }
        for (a, v) in acc.iter_mut().zip(row) {
            *a += v;
        }
    }
    let n = span.len as f64;
    acc.iter_mut().for_each(|a| *a /= n);
    Ok(acc)
}

/// How [`quote_target`] located the target.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchKind {
    WholeWord,
    Substring,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quoted {
    pub text: String,
    pub kind: MatchKind,
}

/// Byte ranges of whitespace-delimited words.
fn word_spans(text: &str) -> Vec<(usize, usize)> {
    let mut spans = Vec::new();
    let mut start = None;
    for (i, ch) in text.char_indices() {
        match (ch.is_whitespace(), start) {
            (true, Some(s)) => {
                spans.push((s, i));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        spans.push((s, text.len()));
    }
    spans
}

fn wrap(sentence: &str, from: usize, to: usize) -> String {
    let mut out = String::with_capacity(sentence.len() + 2);
    out.push_str(&sentence[..from]);
    out.push('\'');
    out.push_str(&sentence[from..to]);
    out.push('\'');
    out.push_str(&sentence[to..]);
    out
}

/// Wraps the first occurrence of `target` in single quotes, reporting whether a
/// whole-word match was found or the substring fallback was used.
pub fn quote_target(sentence: &str, target: &str) -> Result<Quoted, AlignError> {
    let target_words: Vec<&str> = target.split_whitespace().collect();
    if target_words.is_empty() {
        return Err(AlignError::EmptyNeedle);
    }
    let spans = word_spans(sentence);
    let words: Vec<&str> = spans.iter().map(|&(s, e)| &sentence[s..e]).collect();
    if let Some(span) = kmp_find(&words, &target_words)? {
        let from = spans[span.start].0;
        let to = spans[span.end() - 1].1;
        return Ok(Quoted {
            text: wrap(sentence, from, to),
            kind: MatchKind::WholeWord,
        });
    }
    let needle = target.trim();
    match sentence.find(needle) {
        Some(from) => Ok(Quoted {
            text: wrap(sentence, from, from + needle.len()),
            kind: MatchKind::Substring,
        }),
        None => Err(AlignError::TargetNotFound {
            target: target.to_string(),
        }),
    }
}

/// Marks the target for an encoder by wrapping its first occurrence as
/// `'target'`. Falls back to a plain substring match (with a warning) when the
/// target is not a whole-word sequence of the sentence.
pub fn apply_weak_signal(sentence: &str, target: &str) -> Result<String, AlignError> {
    let quoted = quote_target(sentence, target)?;
    if quoted.kind == MatchKind::Substring {
        warn!("target `{target}` matched only as a substring of `{sentence}`");
    }
    Ok(quoted.text)
}
