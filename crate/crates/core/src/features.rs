//! Bag-of-words features: a frozen lexicographic vocabulary and sparse
//! count vectors over it.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::normalize::NormalizedDoc;

/// Frozen word -> index map; indices are a bijection onto `[0, V)` assigned
/// in lexicographic word order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    word_to_index: BTreeMap<String, usize>,
}

impl Vocabulary {
    pub fn size(&self) -> usize {
        self.word_to_index.len()
    }

    pub fn index_of(&self, word: &str) -> Option<usize> {
        self.word_to_index.get(word).copied()
    }

    /// Words in index order (lexicographic).
    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.word_to_index.keys().map(String::as_str)
    }

    /// Serialize as `word<TAB>index` lines in lexicographic order.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (word, index) in &self.word_to_index {
            out.push_str(word);
            out.push('\t');
            out.push_str(&index.to_string());
            out.push('\n');
        }
        out
    }

    pub fn parse(content: &str, source: &Path) -> Result<Self> {
        let mut word_to_index = BTreeMap::new();
        for (idx, line) in content.lines().enumerate() {
            let line_no = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let (word, index) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(source, line_no, "expected `word<TAB>index`"))?;
            let index: usize = index
                .parse()
                .map_err(|_| Error::parse(source, line_no, format!("bad index {index:?}")))?;
            if word.is_empty() {
                return Err(Error::parse(source, line_no, "empty word"));
            }
            if word_to_index.insert(word.to_string(), index).is_some() {
                return Err(Error::parse(
                    source,
                    line_no,
                    format!("word {word:?} listed twice"),
                ));
            }
        }
        let vocab = Vocabulary { word_to_index };
        for (expect, (_, &index)) in vocab.word_to_index.iter().enumerate().map(|(i, e)| (i, e)) {
            if index != expect {
                return Err(Error::parse(
                    source,
                    0,
                    format!("indices are not the lexicographic bijection at index {index}"),
                ));
            }
        }
        Ok(vocab)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&content, path)
    }
}

/// Sparse count vector for one document. Absent index means count 0;
/// present counts are >= 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureVector {
    pub doc_id: String,
    counts: BTreeMap<usize, u32>,
}

impl FeatureVector {
    pub fn iter(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.counts.iter().map(|(&i, &c)| (i, c))
    }

    pub fn count(&self, index: usize) -> u32 {
        self.counts.get(&index).copied().unwrap_or(0)
    }

    /// Number of in-vocabulary tokens (sum of counts).
    pub fn total(&self) -> u64 {
        self.counts.values().map(|&c| u64::from(c)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.counts.keys().next_back().copied()
    }

    #[cfg(test)]
    pub fn from_pairs(doc_id: &str, pairs: &[(usize, u32)]) -> Self {
        FeatureVector {
            doc_id: doc_id.to_string(),
            counts: pairs.iter().copied().collect(),
        }
    }
}

/// Build the vocabulary of words whose total corpus count is at least
/// `min_count`, indexed lexicographically.
pub fn fit_vocabulary(docs: &[NormalizedDoc], min_count: usize) -> Result<Vocabulary> {
    if docs.is_empty() {
        return Err(Error::validation("cannot fit a vocabulary on zero documents"));
    }
    if min_count == 0 {
        return Err(Error::validation("min_count must be positive"));
    }
    let mut totals: BTreeMap<&str, usize> = BTreeMap::new();
    for doc in docs {
        for token in &doc.tokens {
            *totals.entry(token.as_str()).or_default() += 1;
        }
    }
    let word_to_index: BTreeMap<String, usize> = totals
        .into_iter()
        .filter(|(_, count)| *count >= min_count)
        .map(|(word, _)| word.to_string())
        .enumerate()
        .map(|(index, word)| (word, index))
        .collect();
    if word_to_index.is_empty() {
        return Err(Error::validation(
            "vocabulary is empty after applying min_count",
        ));
    }
    Ok(Vocabulary { word_to_index })
}

/// Count vocabulary words in the document; out-of-vocabulary tokens are
/// dropped silently.
pub fn vectorize(doc: &NormalizedDoc, vocab: &Vocabulary) -> FeatureVector {
    let mut counts: BTreeMap<usize, u32> = BTreeMap::new();
    for token in &doc.tokens {
        if let Some(index) = vocab.index_of(token) {
            *counts.entry(index).or_default() += 1;
        }
    }
    FeatureVector {
        doc_id: doc.id.clone(),
        counts,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(id: &str, tokens: &[&str]) -> NormalizedDoc {
        NormalizedDoc {
            id: id.to_string(),
            tokens: tokens.iter().map(|t| t.to_string()).collect(),
        }
    }

    #[test]
    fn vocabulary_is_lexicographic() {
        let docs = vec![doc("1", &["exam", "exam"]), doc("2", &["fail"])];
        let vocab = fit_vocabulary(&docs, 1).unwrap();
        assert_eq!(vocab.index_of("exam"), Some(0));
        assert_eq!(vocab.index_of("fail"), Some(1));
        assert_eq!(vocab.size(), 2);
    }

    #[test]
    fn min_count_threshold_applies_to_corpus_totals() {
        let docs = vec![doc("1", &["exam", "exam"]), doc("2", &["fail"])];
        let vocab = fit_vocabulary(&docs, 2).unwrap();
        assert_eq!(vocab.index_of("exam"), Some(0));
        assert_eq!(vocab.index_of("fail"), None);
        assert_eq!(vocab.size(), 1);
    }

    #[test]
    fn degenerate_inputs_error() {
        assert!(fit_vocabulary(&[], 1).is_err());
        assert!(fit_vocabulary(&[doc("1", &[])], 1).is_err());
        assert!(fit_vocabulary(&[doc("1", &["a"])], 0).is_err());
    }

    #[test]
    fn vectorize_counts_and_drops_oov() {
        let docs = vec![doc("1", &["exam", "fail"])];
        let vocab = fit_vocabulary(&docs, 1).unwrap();

        let v = vectorize(&doc("x", &["exam", "exam", "fail"]), &vocab);
        assert_eq!(v.count(0), 2);
        assert_eq!(v.count(1), 1);
        assert_eq!(v.total(), 3);

        let oov = vectorize(&doc("y", &["pizza"]), &vocab);
        assert!(oov.is_empty());

        let empty = vectorize(&doc("z", &[]), &vocab);
        assert!(empty.is_empty());
    }

    #[test]
    fn vocabulary_dump_round_trips() {
        let docs = vec![doc("1", &["beta", "alpha"])];
        let vocab = fit_vocabulary(&docs, 1).unwrap();
        assert_eq!(vocab.dump(), "alpha\t0\nbeta\t1\n");
        let parsed = Vocabulary::parse(&vocab.dump(), Path::new("test")).unwrap();
        assert_eq!(parsed, vocab);
    }

    #[test]
    fn vocabulary_parse_rejects_broken_bijection() {
        assert!(Vocabulary::parse("alpha\t1\nbeta\t0\n", Path::new("test")).is_err());
        assert!(Vocabulary::parse("alpha\t0\nbeta\t2\n", Path::new("test")).is_err());
    }
}
