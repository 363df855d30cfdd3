//! Record ingestion: JSON-lines parsing, author-name canonicalisation and the
//! train/test split by publication year.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::Deserialize;
use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};

pub const MIN_YEAR: i32 = 1000;
pub const MAX_YEAR: i32 = 3000;

/// One author occurrence on a record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuthorRef {
    pub source_id: Option<String>,
    pub raw_name: String,
    pub canonical_key: String,
}

impl AuthorRef {
    pub fn new(source_id: Option<String>, raw_name: impl Into<String>) -> Self {
        let raw_name = raw_name.into();
        let canonical_key = canonicalize_name(&raw_name);
        let source_id = source_id.map(|s| s.trim().to_owned()).filter(|s| !s.is_empty());
        AuthorRef {
            source_id,
            raw_name,
            canonical_key,
        }
    }

    /// Pre-disambiguated id when present, otherwise the canonical name key.
    pub fn identity(&self) -> &str {
        self.source_id.as_deref().unwrap_or(&self.canonical_key)
    }

    pub fn is_identifiable(&self) -> bool {
        !self.identity().is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopicTag {
    /// Label as it appeared in the source, trimmed.
    pub label: String,
    pub weight: f64,
}

impl TopicTag {
    pub fn new(label: &str, weight: Option<f64>) -> Option<Self> {
        let label = label.trim();
        if label.is_empty() {
            return None;
        }
        let weight = weight.filter(|w| w.is_finite() && *w > 0.0).unwrap_or(1.0);
        Some(TopicTag {
            label: label.to_owned(),
            weight,
        })
    }

    pub fn key(&self) -> String {
        topic_key(&self.label)
    }
}

/// Comparison key for topic labels: lowercase with whitespace runs collapsed.
pub fn topic_key(label: &str) -> String {
    label
        .split_whitespace()
        .map(|w| w.to_lowercase())
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Debug, Clone, PartialEq)]
pub struct BiblioRecord {
    pub record_id: String,
    pub year: i32,
    pub authors: Vec<AuthorRef>,
    pub topics: Vec<TopicTag>,
}

impl BiblioRecord {
    /// Builds a record, collapsing repeated authors (by identity) and topics
    /// (by key) to their first occurrence and dropping unidentifiable authors.
    /// Returns the record and the number of dropped authors.
    pub fn new(
        record_id: impl Into<String>,
        year: i32,
        authors: impl IntoIterator<Item = AuthorRef>,
        topics: impl IntoIterator<Item = TopicTag>,
    ) -> (Self, usize) {
        let mut seen = HashSet::new();
        let mut dropped = 0;
        let authors = authors
            .into_iter()
            .filter(|a| {
                if !a.is_identifiable() {
                    dropped += 1;
                    return false;
                }
                seen.insert(a.identity().to_owned())
            })
            .collect();
        let mut seen = HashSet::new();
        let topics = topics.into_iter().filter(|t| seen.insert(t.key())).collect();
        let record = BiblioRecord {
            record_id: record_id.into(),
            year,
            authors,
            topics,
        };
        (record, dropped)
    }
}

/// Canonical comparison key for an author name.
///
/// NFKC-normalised, lowercased, punctuation stripped from token ends and
/// whitespace collapsed. A name with exactly one comma is read as
/// `Last, First` and reordered to `first last`; with more commas they are
/// treated as separators. Idempotent.
pub fn canonicalize_name(raw_name: &str) -> String {
    let lowered: String = raw_name.nfkc().collect::<String>().to_lowercase().nfkc().collect();
    let reordered = match lowered.matches(',').count() {
        0 => lowered,
        1 => {
            let (last, first) = lowered.split_once(',').expect("one comma");
            format!("{first} {last}")
        }
        _ => lowered.replace(',', " "),
    };
    reordered
        .split_whitespace()
        .map(|tok| tok.trim_matches(|c: char| !c.is_alphanumeric()))
        .filter(|tok| !tok.is_empty())
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordFormat {
    JsonLines,
    /// Pre-built network as a `layer,source,target,weight` edge list; see
    /// [`crate::network::BiLayerNetwork::read_csv_edges`].
    CsvEdges,
}

impl std::str::FromStr for RecordFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jsonl" | "json" => Ok(RecordFormat::JsonLines),
            "csv" => Ok(RecordFormat::CsvEdges),
            other => Err(Error::Invalid(format!("unknown input format `{other}`"))),
        }
    }
}

/// Outcome of parsing a record file.
#[derive(Debug, Clone, Default)]
pub struct ParsedCorpus {
    pub records: Vec<BiblioRecord>,
    /// Entries that were malformed, lacked an id or year, had a year out of
    /// range, or repeated an earlier record id.
    pub skipped: usize,
    /// Author occurrences dropped because neither an id nor a usable name was
    /// present.
    pub dropped_authors: usize,
    /// First few skip reasons, for diagnostics.
    pub warnings: Vec<String>,
}

const MAX_WARNINGS: usize = 20;

#[derive(Deserialize)]
#[serde(untagged)]
enum IdValue {
    Str(String),
    Int(i64),
    Float(f64),
}

impl IdValue {
    fn into_string(self) -> String {
        match self {
            IdValue::Str(s) => s.trim().to_owned(),
            IdValue::Int(i) => i.to_string(),
            IdValue::Float(f) => f.to_string(),
        }
    }
}

#[derive(Deserialize)]
struct RawAuthor {
    #[serde(default)]
    id: Option<IdValue>,
    #[serde(default)]
    name: Option<String>,
}

#[derive(Deserialize)]
struct RawTopic {
    name: String,
    #[serde(default)]
    w: Option<f64>,
}

#[derive(Deserialize)]
struct RawRecord {
    #[serde(default)]
    id: Option<IdValue>,
    #[serde(default)]
    year: Option<IdValue>,
    #[serde(default)]
    authors: Vec<RawAuthor>,
    #[serde(default)]
    fos: Vec<RawTopic>,
}

enum LineOutcome {
    Record(BiblioRecord, usize),
    Skip(String),
}

fn parse_line(line: &str) -> LineOutcome {
    let raw: RawRecord = match serde_json::from_str(line) {
        Ok(r) => r,
        Err(e) => return LineOutcome::Skip(format!("malformed entry: {e}")),
    };
    let Some(id) = raw.id.map(IdValue::into_string).filter(|s| !s.is_empty()) else {
        return LineOutcome::Skip("missing id".into());
    };
    let year = match raw.year {
        Some(IdValue::Int(y)) => y,
        Some(IdValue::Str(s)) => match s.trim().parse::<i64>() {
            Ok(y) => y,
            Err(_) => return LineOutcome::Skip(format!("record {id}: bad year `{s}`")),
        },
        Some(IdValue::Float(f)) if f.fract() == 0.0 => f as i64,
        _ => return LineOutcome::Skip(format!("record {id}: missing year")),
    };
    if !(MIN_YEAR as i64..=MAX_YEAR as i64).contains(&year) {
        return LineOutcome::Skip(format!("record {id}: year {year} out of range"));
    }
    let authors = raw.authors.into_iter().map(|a| {
        AuthorRef::new(a.id.map(IdValue::into_string), a.name.unwrap_or_default())
    });
    let topics = raw.fos.iter().filter_map(|t| TopicTag::new(&t.name, t.w));
    let (record, dropped) = BiblioRecord::new(id, year as i32, authors, topics);
    LineOutcome::Record(record, dropped)
}

/// Parses a JSON-lines record file (`id`, `year`, `authors[]{id?,name}`,
/// `fos[]{name,w?}`). Output order equals file order.
pub fn parse_jsonl(path: &Path) -> Result<ParsedCorpus> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_jsonl_reader(BufReader::new(file), path)
}

pub fn parse_jsonl_reader(reader: impl BufRead, path: &Path) -> Result<ParsedCorpus> {
    let mut out = ParsedCorpus::default();
    let mut ids = HashSet::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let reason = match parse_line(&line) {
            LineOutcome::Record(record, dropped) => {
                if ids.insert(record.record_id.clone()) {
                    out.dropped_authors += dropped;
                    out.records.push(record);
                    continue;
                }
                format!("duplicate record id {}", record.record_id)
            }
            LineOutcome::Skip(reason) => reason,
        };
        out.skipped += 1;
        if out.warnings.len() < MAX_WARNINGS {
            out.warnings.push(format!("line {}: {reason}", lineno + 1));
        }
    }
    if out.skipped > 0 {
        log::warn!("{}: skipped {} entries", path.display(), out.skipped);
    }
    Ok(out)
}

/// One record as a JSON line in the input format. Authors keep their id
/// when present and their raw name; topics keep their weight.
pub fn record_to_json(record: &BiblioRecord) -> String {
    let authors: Vec<serde_json::Value> = record
        .authors
        .iter()
        .map(|a| match &a.source_id {
            Some(id) => serde_json::json!({ "id": id, "name": a.raw_name }),
            None => serde_json::json!({ "name": a.raw_name }),
        })
        .collect();
    let fos: Vec<serde_json::Value> = record
        .topics
        .iter()
        .map(|t| serde_json::json!({ "name": t.label, "w": t.weight }))
        .collect();
    serde_json::json!({
        "id": record.record_id,
        "year": record.year,
        "authors": authors,
        "fos": fos,
    })
    .to_string()
}

/// Records as a JSON-lines document, one line each.
pub fn records_to_jsonl(records: &[BiblioRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&record_to_json(r));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone)]
pub struct CorpusSplit {
    pub cutoff_year: i32,
    pub train: Vec<BiblioRecord>,
    pub test: Vec<BiblioRecord>,
}

impl CorpusSplit {
    pub fn total(&self) -> usize {
        self.train.len() + self.test.len()
    }

    /// Percentage of records in the training part.
    pub fn train_pct(&self) -> f64 {
        pct(self.train.len(), self.total())
    }

    pub fn test_pct(&self) -> f64 {
        pct(self.test.len(), self.total())
    }

    /// Evaluation needs both parts to be non-empty.
    pub fn is_evaluable(&self) -> bool {
        !self.train.is_empty() && !self.test.is_empty()
    }
}

fn pct(part: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        100.0 * part as f64 / total as f64
    }
}

/// Records published in `cutoff_year` or before go to training, later ones to
/// testing. Relative order is preserved in both parts.
pub fn split_by_year(corpus: &[BiblioRecord], cutoff_year: i32) -> CorpusSplit {
    let (train, test): (Vec<_>, Vec<_>) = corpus
        .iter()
        .cloned()
        .partition(|r| r.year <= cutoff_year);
    let split = CorpusSplit {
        cutoff_year,
        train,
        test,
    };
    if !split.is_evaluable() {
        log::warn!(
            "split at {cutoff_year}: {} train / {} test records; evaluation impossible",
            split.train.len(),
            split.test.len()
        );
    }
    split
}
