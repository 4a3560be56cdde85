//! File-based ingestion of short-text records, hashtag filtering, and
//! deterministic train/test splitting.

use std::collections::BTreeSet;
use std::collections::HashSet;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Posts longer than this many code points are rejected at ingest.
pub const MAX_TEXT_CODE_POINTS: usize = 280;

/// One raw ingested post.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TweetRecord {
    pub id: String,
    pub text: String,
    /// Lowercase hashtags without the leading '#'.
    #[serde(default)]
    pub hashtags: Vec<String>,
    /// Gold category name, when the dataset carries one. Never used for
    /// training; evaluation only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

/// An ordered collection of records. Record order equals file order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub records: Vec<TweetRecord>,
    pub source_path: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataFormat {
    Jsonl,
    Csv,
}

impl std::str::FromStr for DataFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jsonl" => Ok(DataFormat::Jsonl),
            "csv" => Ok(DataFormat::Csv),
            other => Err(Error::validation(format!(
                "unknown dataset format {other:?}, expected jsonl or csv"
            ))),
        }
    }
}

/// Pull `#`-prefixed maximal runs of `[A-Za-z0-9_]` out of raw text,
/// lowercased, first occurrence order, deduplicated.
pub fn hashtags_from_text(text: &str) -> Vec<String> {
    let mut found = Vec::new();
    let mut seen = HashSet::new();
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        if c != '#' {
            continue;
        }
        let mut tag = String::new();
        while let Some(&n) = chars.peek() {
            if n.is_ascii_alphanumeric() || n == '_' {
                tag.push(n.to_ascii_lowercase());
                chars.next();
            } else {
                break;
            }
        }
        if !tag.is_empty() && seen.insert(tag.clone()) {
            found.push(tag);
        }
    }
    found
}

fn validate_record(record: &mut TweetRecord, seen_ids: &mut HashSet<String>) -> Result<()> {
    if record.id.is_empty() {
        return Err(Error::validation("record has an empty id"));
    }
    if !seen_ids.insert(record.id.clone()) {
        return Err(Error::validation(format!(
            "duplicate record id {:?}",
            record.id
        )));
    }
    let code_points = record.text.chars().count();
    if code_points > MAX_TEXT_CODE_POINTS {
        return Err(Error::validation(format!(
            "record {:?}: text is {code_points} code points, maximum is {MAX_TEXT_CODE_POINTS}",
            record.id
        )));
    }
    if record.hashtags.is_empty() {
        record.hashtags = hashtags_from_text(&record.text);
    } else {
        let mut tags = Vec::with_capacity(record.hashtags.len());
        for raw in &record.hashtags {
            let tag = raw.strip_prefix('#').unwrap_or(raw).to_lowercase();
            if tag.is_empty() {
                return Err(Error::validation(format!(
                    "record {:?}: empty hashtag entry",
                    record.id
                )));
            }
            if tag.contains('#') {
                return Err(Error::validation(format!(
                    "record {:?}: hashtag {raw:?} contains '#'",
                    record.id
                )));
            }
            tags.push(tag);
        }
        record.hashtags = tags;
    }
    Ok(())
}

/// Read a dataset from a jsonl or CSV file.
///
/// Records come back in file order. Hashtags are taken from the dedicated
/// field/column when it is non-empty, otherwise recovered from the text.
pub fn read_dataset(path: &Path, format: DataFormat) -> Result<Dataset> {
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let records = match format {
        DataFormat::Jsonl => parse_jsonl(&content, path)?,
        DataFormat::Csv => parse_csv(&content, path)?,
    };
    Ok(Dataset {
        records,
        source_path: path.display().to_string(),
    })
}

fn parse_jsonl(content: &str, path: &Path) -> Result<Vec<TweetRecord>> {
    let mut records = Vec::new();
    let mut seen_ids = HashSet::new();
    for (idx, line) in content.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            return Err(Error::parse(path, line_no, "empty line"));
        }
        let mut record: TweetRecord = serde_json::from_str(line)
            .map_err(|e| Error::parse(path, line_no, e.to_string()))?;
        validate_record(&mut record, &mut seen_ids)?;
        records.push(record);
    }
    Ok(records)
}

fn parse_csv(content: &str, path: &Path) -> Result<Vec<TweetRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(content.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::parse(path, 1, e.to_string()))?
        .clone();
    let column = |name: &str| headers.iter().position(|h| h == name);
    let id_col = column("id")
        .ok_or_else(|| Error::parse(path, 1, "missing required column \"id\""))?;
    let text_col = column("text")
        .ok_or_else(|| Error::parse(path, 1, "missing required column \"text\""))?;
    let hashtags_col = column("hashtags");
    let label_col = column("label");

    let mut records = Vec::new();
    let mut seen_ids = HashSet::new();
    for (idx, row) in reader.records().enumerate() {
        let line_no = idx + 2; // header occupies line 1
        let row = row.map_err(|e| Error::parse(path, line_no, e.to_string()))?;
        let field = |col: usize| -> Result<&str> {
            row.get(col)
                .ok_or_else(|| Error::parse(path, line_no, format!("missing column {col}")))
        };
        let hashtags = match hashtags_col {
            Some(col) => field(col)?
                .split(';')
                .filter(|t| !t.is_empty())
                .map(str::to_string)
                .collect(),
            None => Vec::new(),
        };
        let label = match label_col {
            Some(col) => {
                let value = field(col)?;
                (!value.is_empty()).then(|| value.to_string())
            }
            None => None,
        };
        let mut record = TweetRecord {
            id: field(id_col)?.to_string(),
            text: field(text_col)?.to_string(),
            hashtags,
            label,
        };
        validate_record(&mut record, &mut seen_ids)?;
        records.push(record);
    }
    Ok(records)
}

/// Keep exactly the records whose hashtags intersect `wanted`, preserving order.
pub fn filter_by_hashtags(dataset: &Dataset, wanted: &BTreeSet<String>) -> Result<Dataset> {
    if wanted.is_empty() {
        return Err(Error::validation("hashtag filter set is empty"));
    }
    for tag in wanted {
        if tag.is_empty() || tag.contains('#') || *tag != tag.to_lowercase() {
            return Err(Error::validation(format!(
                "wanted hashtag {tag:?} must be lowercase and '#'-free"
            )));
        }
    }
    let records = dataset
        .records
        .iter()
        .filter(|r| r.hashtags.iter().any(|t| wanted.contains(t)))
        .cloned()
        .collect();
    Ok(Dataset {
        records,
        source_path: dataset.source_path.clone(),
    })
}

/// Deterministic train/test split keyed by `seed`.
///
/// `|test| = round(test_fraction * n)`, remainder goes to train. Both halves
/// keep the original file order of their records.
pub fn split(dataset: &Dataset, test_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    let n = dataset.records.len();
    if n < 2 {
        return Err(Error::validation(format!(
            "split needs at least 2 records, got {n}"
        )));
    }
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::validation(format!(
            "test_fraction must lie in (0, 1), got {test_fraction}"
        )));
    }
    let mut indices: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    indices.shuffle(&mut rng);
    let test_count = (test_fraction * n as f64).round() as usize;
    let mut test_indices: Vec<usize> = indices[..test_count].to_vec();
    let mut train_indices: Vec<usize> = indices[test_count..].to_vec();
    test_indices.sort_unstable();
    train_indices.sort_unstable();
    let pick = |idx: &[usize]| Dataset {
        records: idx.iter().map(|&i| dataset.records[i].clone()).collect(),
        source_path: dataset.source_path.clone(),
    };
    Ok((pick(&train_indices), pick(&test_indices)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        file.write_all(content.as_bytes()).unwrap();
        file
    }

    fn record(id: &str, hashtags: &[&str]) -> TweetRecord {
        TweetRecord {
            id: id.to_string(),
            text: String::new(),
            hashtags: hashtags.iter().map(|t| t.to_string()).collect(),
            label: None,
        }
    }

    fn dataset(records: Vec<TweetRecord>) -> Dataset {
        Dataset {
            records,
            source_path: "test".to_string(),
        }
    }

    #[test]
    fn jsonl_line_with_empty_hashtags_field_parses_tags_from_text() {
        let file = write_temp(
            "{\"id\":\"1\",\"text\":\"RT @a #EngineeringProblems exams\",\"hashtags\":[]}\n",
        );
        let ds = read_dataset(file.path(), DataFormat::Jsonl).unwrap();
        assert_eq!(ds.records.len(), 1);
        assert_eq!(ds.records[0].hashtags, vec!["engineeringproblems"]);
    }

    #[test]
    fn empty_file_gives_empty_dataset() {
        let file = write_temp("");
        let ds = read_dataset(file.path(), DataFormat::Jsonl).unwrap();
        assert!(ds.records.is_empty());
    }

    #[test]
    fn duplicate_id_is_rejected() {
        let file = write_temp(
            "{\"id\":\"7\",\"text\":\"a\"}\n{\"id\":\"7\",\"text\":\"b\"}\n",
        );
        let err = read_dataset(file.path(), DataFormat::Jsonl).unwrap_err();
        match err {
            Error::Validation(msg) => assert!(msg.contains("\"7\""), "{msg}"),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_line_names_line_number() {
        let file = write_temp("{\"id\":\"1\",\"text\":\"ok\"}\nnot json\n");
        let err = read_dataset(file.path(), DataFormat::Jsonl).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn missing_file_is_io_error() {
        let err =
            read_dataset(Path::new("/nonexistent/ds.jsonl"), DataFormat::Jsonl).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }

    #[test]
    fn overlong_text_is_rejected() {
        let text = "x".repeat(MAX_TEXT_CODE_POINTS + 1);
        let file = write_temp(&format!("{{\"id\":\"1\",\"text\":\"{text}\"}}\n"));
        let err = read_dataset(file.path(), DataFormat::Jsonl).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn text_at_cap_is_accepted() {
        let text = "x".repeat(MAX_TEXT_CODE_POINTS);
        let file = write_temp(&format!("{{\"id\":\"1\",\"text\":\"{text}\"}}\n"));
        assert_eq!(
            read_dataset(file.path(), DataFormat::Jsonl)
                .unwrap()
                .records
                .len(),
            1
        );
    }

    #[test]
    fn csv_with_optional_columns() {
        let file = write_temp(
            "id,text,hashtags,label\n1,hello #Food,food;Travel,snacks\n2,plain text,,\n",
        );
        let ds = read_dataset(file.path(), DataFormat::Csv).unwrap();
        assert_eq!(ds.records[0].hashtags, vec!["food", "travel"]);
        assert_eq!(ds.records[0].label.as_deref(), Some("snacks"));
        // empty hashtags column falls back to text extraction; none present here
        assert!(ds.records[1].hashtags.is_empty());
        assert_eq!(ds.records[1].label, None);
    }

    #[test]
    fn csv_missing_required_header_is_parse_error() {
        let file = write_temp("id,body\n1,hello\n");
        let err = read_dataset(file.path(), DataFormat::Csv).unwrap_err();
        match err {
            Error::Parse { line, message, .. } => {
                assert_eq!(line, 1);
                assert!(message.contains("text"), "{message}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn hashtag_field_is_normalized() {
        let file = write_temp("{\"id\":\"1\",\"text\":\"t\",\"hashtags\":[\"#Food\"]}\n");
        let ds = read_dataset(file.path(), DataFormat::Jsonl).unwrap();
        assert_eq!(ds.records[0].hashtags, vec!["food"]);
    }

    #[test]
    fn filter_keeps_matching_records_in_order() {
        let ds = dataset(vec![
            record("1", &["engineeringproblems"]),
            record("2", &["food"]),
            record("3", &["engineeringperks"]),
        ]);
        let wanted: BTreeSet<String> = ["engineeringproblems", "engineeringperks"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let kept = filter_by_hashtags(&ds, &wanted).unwrap();
        let ids: Vec<&str> = kept.records.iter().map(|r| r.id.as_str()).collect();
        assert_eq!(ids, vec!["1", "3"]);
    }

    #[test]
    fn filter_with_empty_wanted_set_errors() {
        let ds = dataset(vec![record("1", &["a"])]);
        assert!(matches!(
            filter_by_hashtags(&ds, &BTreeSet::new()),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn split_sizes_follow_fraction() {
        let ds = dataset((0..10).map(|i| record(&i.to_string(), &[])).collect());
        let (train, test) = split(&ds, 0.2, 42).unwrap();
        assert_eq!(train.records.len(), 8);
        assert_eq!(test.records.len(), 2);
        let mut all: Vec<&str> = train
            .records
            .iter()
            .chain(test.records.iter())
            .map(|r| r.id.as_str())
            .collect();
        all.sort_unstable();
        let mut expected: Vec<String> = (0..10).map(|i| i.to_string()).collect();
        expected.sort();
        assert_eq!(all, expected.iter().map(String::as_str).collect::<Vec<_>>());
    }

    #[test]
    fn split_is_deterministic() {
        let ds = dataset((0..10).map(|i| record(&i.to_string(), &[])).collect());
        let a = split(&ds, 0.2, 42).unwrap();
        let b = split(&ds, 0.2, 42).unwrap();
        assert_eq!(a.0.records, b.0.records);
        assert_eq!(a.1.records, b.1.records);
    }

    #[test]
    fn split_of_single_record_errors() {
        let ds = dataset(vec![record("1", &[])]);
        assert!(matches!(split(&ds, 0.5, 1), Err(Error::Validation(_))));
    }

    #[test]
    fn hashtag_text_extraction_handles_punctuation_and_duplicates() {
        assert_eq!(
            hashtags_from_text("#Exam_2024! #exam_2024 ## #b,c"),
            vec!["exam_2024", "b"]
        );
    }
}
