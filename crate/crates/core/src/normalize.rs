//! Text normalization: uniform casing, notation/emoticon/URL stripping,
//! stop-word removal, elongation compression, and slang expansion, applied
//! in that order.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::TweetRecord;

/// Upper bound on joint run-reduction candidates tried per token before
/// falling back to reducing every run to length 1. A 280-code-point post
/// can hold ~90 elongation runs, far past what can be enumerated.
const ELONGATION_CANDIDATE_LIMIT: usize = 4096;

/// Immutable configuration for the normalization pipeline.
#[derive(Debug, Clone)]
pub struct NormalizeConfig {
    stopwords: BTreeSet<String>,
    slang: BTreeMap<String, Vec<String>>,
    reference_vocab: BTreeSet<String>,
    emoticon_patterns: Vec<String>,
}

impl NormalizeConfig {
    /// Validates the config invariants:
    /// slang keys are lowercase, never expand to themselves, and no
    /// replacement token is itself a key (expansion terminates in one
    /// pass); replacement tokens are clean lowercase words; stopwords
    /// include at least "is", "are", "am".
    pub fn new(
        stopwords: BTreeSet<String>,
        slang: BTreeMap<String, Vec<String>>,
        reference_vocab: BTreeSet<String>,
        emoticon_patterns: Vec<String>,
    ) -> Result<Self> {
        for required in ["is", "are", "am"] {
            if !stopwords.contains(required) {
                return Err(Error::validation(format!(
                    "stopword list must contain {required:?}"
                )));
            }
        }
        for word in &stopwords {
            if word.is_empty() || *word != word.to_lowercase() {
                return Err(Error::validation(format!(
                    "stopword {word:?} must be non-empty lowercase"
                )));
            }
        }
        for (key, replacements) in &slang {
            if key.is_empty() || *key != key.to_lowercase() {
                return Err(Error::validation(format!(
                    "slang key {key:?} must be non-empty lowercase"
                )));
            }
            if replacements.is_empty() {
                return Err(Error::validation(format!(
                    "slang key {key:?} has no replacement words"
                )));
            }
            for token in replacements {
                if token == key {
                    return Err(Error::validation(format!(
                        "slang key {key:?} expands to itself"
                    )));
                }
                if slang.contains_key(token) {
                    return Err(Error::validation(format!(
                        "slang replacement {token:?} (under key {key:?}) is itself a slang key"
                    )));
                }
                if token.is_empty() || *token != token.to_lowercase() {
                    return Err(Error::validation(format!(
                        "slang replacement {token:?} must be non-empty lowercase"
                    )));
                }
                if has_elongation_run(token) {
                    return Err(Error::validation(format!(
                        "slang replacement {token:?} contains an elongation run"
                    )));
                }
            }
        }
        Ok(NormalizeConfig {
            stopwords,
            slang,
            reference_vocab,
            emoticon_patterns,
        })
    }

    pub fn stopwords(&self) -> &BTreeSet<String> {
        &self.stopwords
    }

    pub fn slang(&self) -> &BTreeMap<String, Vec<String>> {
        &self.slang
    }

    pub fn reference_vocab(&self) -> &BTreeSet<String> {
        &self.reference_vocab
    }

    pub fn emoticon_patterns(&self) -> &[String] {
        &self.emoticon_patterns
    }
}

/// A normalized document: the record id plus its clean token sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizedDoc {
    pub id: String,
    pub tokens: Vec<String>,
}

/// Lowercase every cased character; everything else is unchanged.
pub fn to_uniform_case(text: &str) -> String {
    text.to_lowercase()
}

fn is_notation(token: &str, cfg: &NormalizeConfig) -> bool {
    token.starts_with('#')
        || token.starts_with('@')
        || token == "rt"
        || token.starts_with("http://")
        || token.starts_with("https://")
        || token.starts_with("www.")
        || cfg.emoticon_patterns.iter().any(|p| p == token)
}

/// Remove, as whole whitespace-delimited tokens: hashtags, mentions, "rt",
/// URLs, and exact emoticon matches. Survivors are re-joined by single
/// spaces. Expects uniform-cased input.
pub fn strip_notations(text: &str, cfg: &NormalizeConfig) -> String {
    text.split_whitespace()
        .filter(|token| !is_notation(token, cfg))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Order-preserving filter dropping exact stopword matches.
pub fn remove_stopwords(tokens: Vec<String>, stopwords: &BTreeSet<String>) -> Vec<String> {
    tokens
        .into_iter()
        .filter(|t| !stopwords.contains(t))
        .collect()
}

/// A maximal run of >= 3 identical letters within a token.
struct Run {
    start: usize,
    len: usize,
    ch: char,
}

fn find_runs(chars: &[char]) -> Vec<Run> {
    let mut runs = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        let mut j = i + 1;
        while j < chars.len() && chars[j] == ch {
            j += 1;
        }
        if ch.is_alphabetic() && j - i >= 3 {
            runs.push(Run {
                start: i,
                len: j - i,
                ch,
            });
        }
        i = j;
    }
    runs
}

fn has_elongation_run(token: &str) -> bool {
    !find_runs(&token.chars().collect::<Vec<_>>()).is_empty()
}

fn rebuild_with_choices(chars: &[char], runs: &[Run], choices: &[usize]) -> String {
    let mut out = String::with_capacity(chars.len());
    let mut pos = 0;
    for (run, &keep) in runs.iter().zip(choices) {
        out.extend(&chars[pos..run.start]);
        for _ in 0..keep {
            out.push(run.ch);
        }
        pos = run.start + run.len;
    }
    out.extend(&chars[pos..]);
    out
}

/// Compress elongated letter runs (>= 3 identical letters) in a lowercase
/// token.
///
/// Joint assignments of each run to length 2 or 1 are tried in preference
/// order (left-to-right runs, 2 before 1); the first candidate found in the
/// reference vocabulary wins. When no candidate is in the vocabulary, every
/// run collapses to a single letter.
pub fn compress_elongation(token: &str, reference_vocab: &BTreeSet<String>) -> String {
    let chars: Vec<char> = token.chars().collect();
    let runs = find_runs(&chars);
    if runs.is_empty() {
        return token.to_string();
    }
    let k = runs.len();
    if !reference_vocab.is_empty() {
        let combos = 1usize.checked_shl(k as u32).unwrap_or(usize::MAX);
        for mask in 0..combos.min(ELONGATION_CANDIDATE_LIMIT) {
            // bit 0 of the leftmost run varies slowest: leftmost tries 2 first
            let choices: Vec<usize> = (0..k)
                .map(|r| if mask >> (k - 1 - r) & 1 == 0 { 2 } else { 1 })
                .collect();
            let candidate = rebuild_with_choices(&chars, &runs, &choices);
            if reference_vocab.contains(&candidate) {
                return candidate;
            }
        }
    }
    rebuild_with_choices(&chars, &runs, &vec![1; k])
}

/// Single left-to-right pass replacing slang keys by their replacement
/// lists; non-keys pass through untouched.
pub fn expand_slang(tokens: Vec<String>, slang: &BTreeMap<String, Vec<String>>) -> Vec<String> {
    let mut out = Vec::with_capacity(tokens.len());
    for token in tokens {
        match slang.get(&token) {
            Some(replacements) => out.extend(replacements.iter().cloned()),
            None => out.push(token),
        }
    }
    out
}

/// Whitespace tokenization with leading/trailing non-alphanumeric characters
/// trimmed from each token; internal characters (apostrophes included) stay.
fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .filter_map(|raw| {
            let trimmed = raw.trim_matches(|c: char| !c.is_alphanumeric());
            (!trimmed.is_empty()).then(|| trimmed.to_string())
        })
        .collect()
}

fn violates_token_constraints(token: &str) -> bool {
    token.contains('#') || token.contains('@') || token.contains("://") || token.starts_with("www.")
}

/// Full normalization pipeline over one record:
/// uniform case -> notation stripping -> tokenization -> stop-word removal
/// -> elongation compression -> slang expansion. Empty token lists are valid
/// output.
///
/// Compression can reveal an elongated stopword ("beee" -> "be"); those are
/// dropped the same way their plain forms were. Stop words introduced by
/// slang expansion are kept.
pub fn normalize(record: &TweetRecord, cfg: &NormalizeConfig) -> NormalizedDoc {
    let lowered = to_uniform_case(&record.text);
    let stripped = strip_notations(&lowered, cfg);
    let tokens = tokenize(&stripped);
    let tokens = remove_stopwords(tokens, &cfg.stopwords);
    let tokens: Vec<String> = tokens
        .iter()
        .map(|t| compress_elongation(t, &cfg.reference_vocab))
        .collect();
    let tokens = remove_stopwords(tokens, &cfg.stopwords);
    let tokens = expand_slang(tokens, &cfg.slang);
    let tokens = tokens
        .into_iter()
        .filter(|t| !t.is_empty() && !violates_token_constraints(t))
        .collect();
    NormalizedDoc {
        id: record.id.clone(),
        tokens,
    }
}

fn read_source(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Parse a stopword list: one token per line, '#'-prefixed comment lines
/// ignored.
pub fn parse_stopwords(content: &str) -> BTreeSet<String> {
    content
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

pub fn load_stopwords(path: &Path) -> Result<BTreeSet<String>> {
    Ok(parse_stopwords(&read_source(path)?))
}

/// Parse a slang table: `key<TAB>replacement words space-separated`.
pub fn parse_slang(content: &str, source: &Path) -> Result<BTreeMap<String, Vec<String>>> {
    let mut slang = BTreeMap::new();
    for (idx, line) in content.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let (key, rest) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(source, line_no, "expected `key<TAB>replacements`"))?;
        let replacements: Vec<String> =
            rest.split_whitespace().map(str::to_string).collect();
        if key.is_empty() || replacements.is_empty() {
            return Err(Error::parse(source, line_no, "empty key or replacement list"));
        }
        if slang.insert(key.to_string(), replacements).is_some() {
            return Err(Error::parse(
                source,
                line_no,
                format!("duplicate slang key {key:?}"),
            ));
        }
    }
    Ok(slang)
}

pub fn load_slang(path: &Path) -> Result<BTreeMap<String, Vec<String>>> {
    parse_slang(&read_source(path)?, path)
}

/// Parse a reference vocabulary: one word per line.
pub fn parse_reference_vocab(content: &str) -> BTreeSet<String> {
    content
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect()
}

pub fn load_reference_vocab(path: &Path) -> Result<BTreeSet<String>> {
    Ok(parse_reference_vocab(&read_source(path)?))
}

/// Parse an emoticon list: one literal per line. Literals are matched
/// against lowercased text, so cased emoticons belong here in their
/// lowercase form (":d", "xd").
pub fn parse_emoticons(content: &str) -> Vec<String> {
    content
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(str::to_string)
        .collect()
}

pub fn load_emoticons(path: &Path) -> Result<Vec<String>> {
    Ok(parse_emoticons(&read_source(path)?))
}
