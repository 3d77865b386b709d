//! Static word vectors (GloVe text format) and precomputed contextual
//! sub-token embeddings (JSON Lines).

use std::collections::HashMap;
use std::io::BufRead;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::align::{self, AlignError};

pub const DEFAULT_GLOVE_DIM: usize = 200;

#[derive(Debug, Error)]
pub enum EmbeddingError {
    #[error("line {line}: expected {expected} components, found {found}")]
    WrongArity {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: cannot parse `{raw}` as a number")]
    BadNumber { line: usize, raw: String },
    #[error("dimension must be positive")]
    ZeroDim,
    #[error("empty target")]
    EmptyTarget,
    #[error("line {line}: malformed record: {source}")]
    MalformedRecord {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("line {line} (id {id}): {reason}")]
    BadRecord {
        line: usize,
        id: String,
        reason: String,
    },
    #[error("line {line} (id {id}): dimension {found} differs from store dimension {expected}")]
    DimMismatch {
        line: usize,
        id: String,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: duplicate id `{id}`")]
    DuplicateId { line: usize, id: String },
    #[error("no contextual record for id `{0}`")]
    MissingId(String),
    #[error("id {id}: sub-tokens {needle:?} not found in record")]
    NeedleNotFound { id: String, needle: Vec<String> },
    #[error(transparent)]
    Align(#[from] AlignError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Word → vector table. Lookups never fail: unknown words map to zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct WordVecStore {
    dim: usize,
    table: HashMap<String, Vec<f64>>,
}

impl WordVecStore {
    pub fn new(dim: usize) -> Result<Self, EmbeddingError> {
        if dim == 0 {
            return Err(EmbeddingError::ZeroDim);
        }
        Ok(Self {
            dim,
            table: HashMap::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// Inserts or replaces a vector.
    pub fn insert(&mut self, word: impl Into<String>, vec: Vec<f64>) -> Result<(), EmbeddingError> {
        if vec.len() != self.dim {
            return Err(EmbeddingError::WrongArity {
                line: 0,
                expected: self.dim,
                found: vec.len(),
            });
        }
        self.table.insert(word.into(), vec);
        Ok(())
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.table.get(word).map(Vec::as_slice)
    }

    /// Exact word, then its lowercase form, then zeros.
    pub fn lookup_word(&self, word: &str) -> Vec<f64> {
        self.table
            .get(word)
            .or_else(|| self.table.get(&word.to_lowercase()))
            .cloned()
            .unwrap_or_else(|| vec![0.0; self.dim])
    }

    /// Vector for a target phrase: the word's vector for a single word, the
    /// componentwise mean of the per-word lookups for an expression. Absent
    /// words contribute zeros.
    pub fn lookup_token(&self, target: &str) -> Result<Vec<f64>, EmbeddingError> {
        let words: Vec<&str> = target.split_whitespace().collect();
        match words.as_slice() {
            [] => Err(EmbeddingError::EmptyTarget),
            [w] => Ok(self.lookup_word(w)),
            _ => {
                let mut acc = vec![0.0; self.dim];
                for w in &words {
                    for (a, v) in acc.iter_mut().zip(self.lookup_word(w)) {
                        *a += v;
                    }
                }
                let n = words.len() as f64;
                acc.iter_mut().for_each(|a| *a /= n);
                Ok(acc)
            }
        }
    }
}

/// Loads `word v1 ... v_dim` lines. Later duplicates overwrite earlier ones.
pub fn load_glove<R: BufRead>(reader: R, dim: usize) -> Result<WordVecStore, EmbeddingError> {
    let mut store = WordVecStore::new(dim)?;
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let mut parts = line.split_ascii_whitespace();
        let Some(word) = parts.next() else {
            continue;
        };
        let mut vec = Vec::with_capacity(dim);
        for raw in parts {
            let v: f64 = raw.parse().map_err(|_| EmbeddingError::BadNumber {
                line: line_no,
                raw: raw.to_string(),
            })?;
            vec.push(v);
        }
        if vec.len() != dim {
            return Err(EmbeddingError::WrongArity {
                line: line_no,
                expected: dim,
                found: vec.len(),
            });
        }
        store.table.insert(word.to_string(), vec);
    }
    Ok(store)
}

/// Per-instance encoder output: sub-tokens of the sentence and one vector per
/// sub-token. `target_tokens`, when present, is the encoder's tokenization of
/// the target phrase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CtxEmbeddingRecord {
    pub id: String,
    pub tokens: Vec<String>,
    pub vectors: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_tokens: Option<Vec<String>>,
}

impl CtxEmbeddingRecord {
    pub fn dim(&self) -> usize {
        self.vectors.first().map_or(0, Vec::len)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CtxStore {
    dim: usize,
    records: HashMap<String, CtxEmbeddingRecord>,
}

impl CtxStore {
    /// Shared row dimension; 0 for an empty store.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&CtxEmbeddingRecord> {
        self.records.get(id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.records.contains_key(id)
    }

    /// Mean of the record rows covered by the first occurrence of `needle`.
    pub fn context_vector<S: AsRef<str>>(
        &self,
        id: &str,
        needle: &[S],
    ) -> Result<Vec<f64>, EmbeddingError> {
        let record = self
            .records
            .get(id)
            .ok_or_else(|| EmbeddingError::MissingId(id.to_string()))?;
        let hay: Vec<&str> = record.tokens.iter().map(String::as_str).collect();
        let needle: Vec<&str> = needle.iter().map(AsRef::as_ref).collect();
        let span =
            align::kmp_find(&hay, &needle)?.ok_or_else(|| EmbeddingError::NeedleNotFound {
                id: id.to_string(),
                needle: needle.iter().map(|s| s.to_string()).collect(),
            })?;
        Ok(align::mean_pool(&record.vectors, span)?)
    }

    fn insert(&mut self, line: usize, record: CtxEmbeddingRecord) -> Result<(), EmbeddingError> {
        let bad = |reason: String| EmbeddingError::BadRecord {
            line,
            id: record.id.clone(),
            reason,
        };
        if record.tokens.is_empty() {
            return Err(bad("no tokens".into()));
        }
        if record.tokens.len() != record.vectors.len() {
            return Err(bad(format!(
                "{} tokens but {} vectors",
                record.tokens.len(),
                record.vectors.len()
            )));
        }
        let d = record.dim();
        if d == 0 {
            return Err(bad("zero-length vectors".into()));
        }
        if let Some(row) = record.vectors.iter().find(|r| r.len() != d) {
            return Err(EmbeddingError::DimMismatch {
                line,
                id: record.id.clone(),
                expected: d,
                found: row.len(),
            });
        }
        if self.records.is_empty() {
            self.dim = d;
        } else if d != self.dim {
            return Err(EmbeddingError::DimMismatch {
                line,
                id: record.id.clone(),
                expected: self.dim,
                found: d,
            });
        }
        if self.records.contains_key(&record.id) {
            return Err(EmbeddingError::DuplicateId {
                line,
                id: record.id,
            });
        }
        self.records.insert(record.id.clone(), record);
        Ok(())
    }
}

impl TryFrom<Vec<CtxEmbeddingRecord>> for CtxStore {
    type Error = EmbeddingError;

    fn try_from(records: Vec<CtxEmbeddingRecord>) -> Result<Self, Self::Error> {
        let mut store = CtxStore::default();
        for (i, r) in records.into_iter().enumerate() {
            store.insert(i + 1, r)?;
        }
        Ok(store)
    }
}

/// Loads a JSON Lines file with one `{"id", "tokens", "vectors"[, "target_tokens"]}`
/// object per line.
pub fn load_contextual<R: BufRead>(reader: R) -> Result<CtxStore, EmbeddingError> {
    let mut store = CtxStore::default();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: CtxEmbeddingRecord =
            serde_json::from_str(&line).map_err(|source| EmbeddingError::MalformedRecord {
                line: line_no,
                source,
            })?;
        store.insert(line_no, record)?;
    }
    Ok(store)
}
