//! CompLex-style TSV instance files.
//!
//! Columns are `id`, `corpus`, `sentence`, `token` and, for labeled files,
//! `complexity`. A header row is optional.

use std::collections::HashSet;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::util::format_score;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: expected {expected} tab-separated columns, found {found}")]
    MalformedRow {
        line: usize,
        expected: &'static str,
        found: usize,
    },
    #[error("line {line} (id {id}): complexity `{raw}` is not a number")]
    BadComplexity {
        line: usize,
        id: String,
        raw: String,
    },
    #[error("line {line} (id {id}): complexity {value} outside [0, 1]")]
    ComplexityOutOfRange { line: usize, id: String, value: f64 },
    #[error("line {line} (id {id}): target `{target}` must have 1 or 2 words")]
    BadTarget {
        line: usize,
        id: String,
        target: String,
    },
    #[error("line {line} (id {id}): empty {field}")]
    EmptyField {
        line: usize,
        id: String,
        field: &'static str,
    },
    #[error("line {line} (id {id}): {found}-word target in a {expected}-word dataset")]
    MixedSubtask {
        line: usize,
        id: String,
        expected: usize,
        found: usize,
    },
    #[error("id {id}: no complexity to write")]
    MissingLabel { id: String },
    #[error("line {line}: duplicate id `{id}`")]
    DuplicateId { line: usize, id: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusTag {
    Bible,
    Biomed,
    Europarl,
    Other,
}

impl CorpusTag {
    pub fn as_str(self) -> &'static str {
        match self {
            CorpusTag::Bible => "bible",
            CorpusTag::Biomed => "biomed",
            CorpusTag::Europarl => "europarl",
            CorpusTag::Other => "other",
        }
    }
}

impl FromStr for CorpusTag {
    type Err = std::convert::Infallible;

    /// Unknown names map to [`CorpusTag::Other`].
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "bible" => CorpusTag::Bible,
            "biomed" => CorpusTag::Biomed,
            "europarl" => CorpusTag::Europarl,
            _ => CorpusTag::Other,
        })
    }
}

impl fmt::Display for CorpusTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Single-word targets or two-word expressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subtask {
    #[default]
    Single,
    Mwe,
}

impl Subtask {
    pub fn word_count(self) -> usize {
        match self {
            Subtask::Single => 1,
            Subtask::Mwe => 2,
        }
    }

    fn from_word_count(n: usize) -> Option<Self> {
        match n {
            1 => Some(Subtask::Single),
            2 => Some(Subtask::Mwe),
            _ => None,
        }
    }
}

/// One (sentence, target, optional gold score) record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub id: String,
    pub corpus: CorpusTag,
    pub sentence: String,
    pub target: String,
    pub gold: Option<f64>,
}

impl Instance {
    pub fn target_words(&self) -> impl Iterator<Item = &str> {
        self.target.split_whitespace()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    instances: Vec<Instance>,
    subtask: Subtask,
}

impl Dataset {
    /// Validates `instances` with the same rules the parser applies. Line
    /// numbers in errors are 1-based positions in `instances`.
    pub fn new(instances: Vec<Instance>) -> Result<Self, CorpusError> {
        let mut subtask = None;
        let mut seen = HashSet::new();
        for (i, inst) in instances.iter().enumerate() {
            let line = i + 1;
            let st = validate(inst, line)?;
            check_row(&mut subtask, &mut seen, inst, st, line)?;
        }
        Ok(Self {
            instances,
            subtask: subtask.unwrap_or_default(),
        })
    }

    pub fn instances(&self) -> &[Instance] {
        &self.instances
    }

    pub fn subtask(&self) -> Subtask {
        self.subtask
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Instance> {
        self.instances.iter().find(|i| i.id == id)
    }

    pub fn is_labeled(&self) -> bool {
        self.instances.iter().all(|i| i.gold.is_some())
    }

    pub fn into_instances(self) -> Vec<Instance> {
        self.instances
    }
}

fn validate(inst: &Instance, line: usize) -> Result<Subtask, CorpusError> {
    let empty = |field| CorpusError::EmptyField {
        line,
        id: inst.id.clone(),
        field,
    };
    if inst.id.trim().is_empty() {
        return Err(empty("id"));
    }
    if inst.sentence.trim().is_empty() {
        return Err(empty("sentence"));
    }
    if inst.target.trim().is_empty() {
        return Err(empty("target"));
    }
    if let Some(g) = inst.gold {
        if !(0.0..=1.0).contains(&g) {
            return Err(CorpusError::ComplexityOutOfRange {
                line,
                id: inst.id.clone(),
                value: g,
            });
        }
    }
    Subtask::from_word_count(inst.target_words().count()).ok_or_else(|| CorpusError::BadTarget {
        line,
        id: inst.id.clone(),
        target: inst.target.clone(),
    })
}

fn check_row(
    subtask: &mut Option<Subtask>,
    seen: &mut HashSet<String>,
    inst: &Instance,
    st: Subtask,
    line: usize,
) -> Result<(), CorpusError> {
    match *subtask {
        None => *subtask = Some(st),
        Some(expected) if expected != st => {
            return Err(CorpusError::MixedSubtask {
                line,
                id: inst.id.clone(),
                expected: expected.word_count(),
                found: st.word_count(),
            })
        }
        Some(_) => {}
    }
    if !seen.insert(inst.id.clone()) {
        return Err(CorpusError::DuplicateId {
            line,
            id: inst.id.clone(),
        });
    }
    Ok(())
}

const HEADER: [&str; 5] = ["id", "corpus", "sentence", "token", "complexity"];

fn is_header(cols: &[&str], has_labels: bool) -> bool {
    if has_labels && cols.len() == 5 {
        return cols[4].trim().parse::<f64>().is_err();
    }
    cols.len() >= 4
        && cols
            .iter()
            .zip(HEADER)
            .all(|(c, h)| c.trim().eq_ignore_ascii_case(h))
}

/// Parses a CompLex TSV stream.
///
/// With `has_labels` every row must carry a complexity column. Without it,
/// rows may have four or five columns and any complexity column is dropped.
pub fn parse_complex_tsv<R: BufRead>(reader: R, has_labels: bool) -> Result<Dataset, CorpusError> {
    let mut instances = Vec::new();
    let mut subtask = None;
    let mut seen = HashSet::new();
    let mut first = true;

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if std::mem::take(&mut first) && is_header(&cols, has_labels) {
            continue;
        }
        let ok = if has_labels {
            cols.len() == 5
        } else {
            cols.len() == 4 || cols.len() == 5
        };
        if !ok {
            return Err(CorpusError::MalformedRow {
                line: line_no,
                expected: if has_labels { "5" } else { "4 or 5" },
                found: cols.len(),
            });
        }

        let id = cols[0].trim().to_string();
        let gold = if has_labels {
            let raw = cols[4].trim();
            let v: f64 = raw.parse().map_err(|_| CorpusError::BadComplexity {
                line: line_no,
                id: id.clone(),
                raw: raw.to_string(),
            })?;
            Some(v)
        } else {
            None
        };
        let inst = Instance {
            id,
            corpus: cols[1].parse().unwrap_or(CorpusTag::Other),
            sentence: cols[2].to_string(),
            target: cols[3].trim().to_string(),
            gold,
        };
        let st = validate(&inst, line_no)?;
        check_row(&mut subtask, &mut seen, &inst, st, line_no)?;
        instances.push(inst);
    }

    Ok(Dataset {
        instances,
        subtask: subtask.unwrap_or_default(),
    })
}

/// Parses a TSV whose labeled-ness is decided by the first data row's column
/// count.
pub fn parse_complex_tsv_auto<R: BufRead>(mut reader: R) -> Result<Dataset, CorpusError> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    let mut rows = text.lines().filter(|l| !l.trim().is_empty());
    let has_labels = match rows.next() {
        Some(first) => {
            let cols: Vec<&str> = first.split('\t').collect();
            let data_row = if is_header(&cols, true) {
                rows.next().map(|l| l.split('\t').collect::<Vec<_>>())
            } else {
                Some(cols)
            };
            data_row.is_some_and(|c| c.len() == 5)
        }
        None => false,
    };
    parse_complex_tsv(text.as_bytes(), has_labels)
}

/// Writes `dataset` with a header row. Scores keep at least six decimals and
/// re-parse to the same value.
pub fn write_tsv<W: Write>(
    dataset: &Dataset,
    mut out: W,
    include_labels: bool,
) -> Result<(), CorpusError> {
    let cols = if include_labels { 5 } else { 4 };
    writeln!(out, "{}", HEADER[..cols].join("\t"))?;
    for inst in &dataset.instances {
        write!(
            out,
            "{}\t{}\t{}\t{}",
            inst.id, inst.corpus, inst.sentence, inst.target
        )?;
        if include_labels {
            let g = inst.gold.ok_or_else(|| CorpusError::MissingLabel {
                id: inst.id.clone(),
            })?;
            write!(out, "\t{}", format_score(g))?;
        }
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str, labels: bool) -> Result<Dataset, CorpusError> {
        parse_complex_tsv(s.as_bytes(), labels)
    }

    #[test]
    fn maps_fields_directly() {
        let ds = parse("7\tbible\tBe gracious to me\tgracious\t0.25\n", true).unwrap();
        assert_eq!(ds.len(), 1);
        assert_eq!(ds.subtask(), Subtask::Single);
        assert_eq!(
            ds.instances()[0],
            Instance {
                id: "7".into(),
                corpus: CorpusTag::Bible,
                sentence: "Be gracious to me".into(),
                target: "gracious".into(),
                gold: Some(0.25),
            }
        );
    }

    #[test]
    fn rejects_out_of_range_complexity() {
        let err = parse("7\tbible\tBe gracious to me\tgracious\t1.5\n", true).unwrap_err();
        assert!(matches!(err, CorpusError::ComplexityOutOfRange { value, .. } if value == 1.5));
    }

    #[test]
    fn rejects_three_columns() {
        let err = parse("7\tbible\tBe gracious to me\n", true).unwrap_err();
        assert!(matches!(err, CorpusError::MalformedRow { found: 3, .. }));
        let err = parse("7\tbible\tBe gracious to me\n", false).unwrap_err();
        assert!(matches!(err, CorpusError::MalformedRow { found: 3, .. }));
    }

    #[test]
    fn skips_header_and_maps_unknown_corpus() {
        let src = "id\tcorpus\tsentence\ttoken\tcomplexity\n\
                   a\tbiomed\tThe gene is expressed\tgene\t0.5\n\
                   b\tWiki\tA cat sat\tcat\t0.0\n";
        let ds = parse(src, true).unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.instances()[1].corpus, CorpusTag::Other);
    }

    #[test]
    fn detects_mwe_and_rejects_mixing() {
        let ds = parse(
            "1\teuroparl\tthe member states agree\tmember states\t0.3\n",
            true,
        )
        .unwrap();
        assert_eq!(ds.subtask(), Subtask::Mwe);
        let err = parse(
            "1\teuroparl\tthe member states agree\tmember states\t0.3\n\
             2\teuroparl\tthe states agree\tstates\t0.3\n",
            true,
        )
        .unwrap_err();
        assert!(matches!(err, CorpusError::MixedSubtask { line: 2, .. }));
    }

    #[test]
    fn rejects_three_word_target_and_duplicate_ids() {
        let err = parse("1\tbible\ta b c d\ta b c\t0.3\n", true).unwrap_err();
        assert!(matches!(err, CorpusError::BadTarget { .. }));
        let err = parse("1\tbible\ta b\ta\t0.3\n1\tbible\ta b\tb\t0.4\n", true).unwrap_err();
        assert!(matches!(err, CorpusError::DuplicateId { line: 2, .. }));
    }

    #[test]
    fn duplicate_sentence_token_pairs_are_distinct_instances() {
        let ds = parse("1\tbible\ta b\ta\t0.3\n2\tbible\ta b\ta\t0.4\n", true).unwrap();
        assert_eq!(ds.len(), 2);
    }

    #[test]
    fn unlabeled_parse_drops_complexity() {
        let ds = parse("1\tbible\ta b\ta\t0.3\n2\tbible\ta b\tb\n", false).unwrap();
        assert!(ds.instances().iter().all(|i| i.gold.is_none()));
        let ds = parse("id\tcorpus\tsentence\ttoken\n1\tbible\ta b\ta\n", false).unwrap();
        assert_eq!(ds.len(), 1);
    }

    #[test]
    fn empty_dataset_round_trips() {
        let mut buf = Vec::new();
        write_tsv(&Dataset::default(), &mut buf, true).unwrap();
        let back = parse(std::str::from_utf8(&buf).unwrap(), true).unwrap();
        assert!(back.is_empty());
        assert!(parse("", true).unwrap().is_empty());
    }

    #[test]
    fn write_without_labels_drops_column() {
        let ds = parse("7\tbible\tBe gracious to me\tgracious\t0.25\n", true).unwrap();
        let mut buf = Vec::new();
        write_tsv(&ds, &mut buf, false).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "id\tcorpus\tsentence\ttoken\n7\tbible\tBe gracious to me\tgracious\n"
        );
    }

    #[test]
    fn written_scores_have_six_decimals() {
        let ds = parse("7\tbible\tBe gracious to me\tgracious\t0.25\n", true).unwrap();
        let mut buf = Vec::new();
        write_tsv(&ds, &mut buf, true).unwrap();
        assert!(String::from_utf8(buf).unwrap().ends_with("\t0.250000\n"));
    }

    #[test]
    fn auto_detects_labels() {
        let ds = parse_complex_tsv_auto("1\tbible\ta b\ta\t0.3\n".as_bytes()).unwrap();
        assert!(ds.is_labeled());
        let ds = parse_complex_tsv_auto("1\tbible\ta b\ta\n".as_bytes()).unwrap();
        assert!(!ds.is_labeled());
    }
}
