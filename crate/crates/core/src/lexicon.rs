//! Lexicon-driven category corpora: expand manually collected seed words
//! over a synonym/antonym graph into disjoint per-category word sets, then
//! weak-label documents by counting corpus hits.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normalize::NormalizedDoc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Problem,
    Perk,
}

impl std::str::FromStr for Polarity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "problem" => Ok(Polarity::Problem),
            "perk" => Ok(Polarity::Perk),
            other => Err(Error::validation(format!(
                "unknown polarity {other:?}, expected problem or perk"
            ))),
        }
    }
}

/// One category: a name, its polarity, manually collected seed words, and
/// optionally the same-topic category of opposite polarity that antonym
/// edges flip into.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategorySpec {
    pub name: String,
    pub polarity: Polarity,
    pub counterpart: Option<String>,
    pub seeds: BTreeSet<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    Synonym,
    Antonym,
}

/// Undirected word graph with synonym/antonym edge labels. At most one edge
/// per unordered word pair, no self-loops.
#[derive(Debug, Clone, Default)]
pub struct SynonymGraph {
    adjacency: BTreeMap<String, Vec<(String, EdgeKind)>>,
    edge_count: usize,
}

impl SynonymGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_edge(&mut self, a: &str, b: &str, kind: EdgeKind) -> Result<()> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::validation("graph words must be non-empty"));
        }
        if a == b {
            return Err(Error::validation(format!("self-loop on {a:?}")));
        }
        if a != a.to_lowercase() || b != b.to_lowercase() {
            return Err(Error::validation(format!(
                "graph words must be lowercase: {a:?}, {b:?}"
            )));
        }
        if self
            .adjacency
            .get(a)
            .is_some_and(|nbrs| nbrs.iter().any(|(w, _)| w == b))
        {
            return Err(Error::validation(format!(
                "duplicate edge between {a:?} and {b:?}"
            )));
        }
        self.adjacency
            .entry(a.to_string())
            .or_default()
            .push((b.to_string(), kind));
        self.adjacency
            .entry(b.to_string())
            .or_default()
            .push((a.to_string(), kind));
        self.edge_count += 1;
        Ok(())
    }

    pub fn neighbors(&self, word: &str) -> &[(String, EdgeKind)] {
        self.adjacency.get(word).map_or(&[], Vec::as_slice)
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Parse lines of `word1<TAB>word2<TAB>synonym|antonym`.
    pub fn parse(content: &str, source: &Path) -> Result<Self> {
        let mut graph = SynonymGraph::new();
        for (idx, line) in content.lines().enumerate() {
            let line_no = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 {
                return Err(Error::parse(
                    source,
                    line_no,
                    "expected `word1<TAB>word2<TAB>synonym|antonym`",
                ));
            }
            let kind = match fields[2] {
                "synonym" => EdgeKind::Synonym,
                "antonym" => EdgeKind::Antonym,
                other => {
                    return Err(Error::parse(
                        source,
                        line_no,
                        format!("unknown edge kind {other:?}"),
                    ))
                }
            };
            graph
                .add_edge(fields[0], fields[1], kind)
                .map_err(|e| Error::parse(source, line_no, e.to_string()))?;
        }
        Ok(graph)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&content, path)
    }
}

/// A word's resolved membership: the category claiming it and the BFS depth
/// at which the claim was made.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Claim {
    pub word: String,
    pub category: String,
    pub depth: usize,
}

/// Word -> (category, depth) with every word in exactly one category.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CategoryCorpus {
    entries: BTreeMap<String, (String, usize)>,
}

impl CategoryCorpus {
    pub fn get(&self, word: &str) -> Option<(&str, usize)> {
        self.entries.get(word).map(|(c, d)| (c.as_str(), *d))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, usize)> {
        self.entries.iter().map(|(w, (c, d))| (w.as_str(), c.as_str(), *d))
    }

    /// Category names present in the corpus, sorted.
    pub fn categories(&self) -> BTreeSet<&str> {
        self.entries.values().map(|(c, _)| c.as_str()).collect()
    }

    /// Drop every entry whose word is not in `keep` (dataset-vocabulary
    /// intersection).
    pub fn retain_words(&mut self, keep: &BTreeSet<String>) {
        self.entries.retain(|word, _| keep.contains(word));
    }

    /// Serialize as `word<TAB>category<TAB>depth` lines sorted by word.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (word, (category, depth)) in &self.entries {
            out.push_str(word);
            out.push('\t');
            out.push_str(category);
            out.push('\t');
            out.push_str(&depth.to_string());
            out.push('\n');
        }
        out
    }

    pub fn parse(content: &str, source: &Path) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (idx, line) in content.lines().enumerate() {
            let line_no = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 {
                return Err(Error::parse(
                    source,
                    line_no,
                    "expected `word<TAB>category<TAB>depth`",
                ));
            }
            if fields[0].is_empty() || fields[1].is_empty() {
                return Err(Error::parse(source, line_no, "empty word or category"));
            }
            let depth: usize = fields[2]
                .parse()
                .map_err(|_| Error::parse(source, line_no, format!("bad depth {:?}", fields[2])))?;
            if entries
                .insert(fields[0].to_string(), (fields[1].to_string(), depth))
                .is_some()
            {
                return Err(Error::parse(
                    source,
                    line_no,
                    format!("word {:?} listed twice", fields[0]),
                ));
            }
        }
        Ok(CategoryCorpus { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&content, path)
    }
}

/// Weak label for one document: the winning category (or none when every
/// score is zero) plus the per-category hit counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeakLabel {
    #[serde(rename = "id")]
    pub doc_id: String,
    pub category: Option<String>,
    pub scores: BTreeMap<String, u64>,
}

fn validate_specs(specs: &[CategorySpec]) -> Result<()> {
    if specs.is_empty() {
        return Err(Error::validation("no category specs given"));
    }
    let mut names = BTreeMap::new();
    for spec in specs {
        if spec.name.is_empty() {
            return Err(Error::validation("category name must be non-empty"));
        }
        if names.insert(spec.name.as_str(), spec.polarity).is_some() {
            return Err(Error::validation(format!(
                "duplicate category name {:?}",
                spec.name
            )));
        }
        if spec.seeds.is_empty() {
            return Err(Error::validation(format!(
                "category {:?} has no seed words",
                spec.name
            )));
        }
        for seed in &spec.seeds {
            if seed.is_empty() || *seed != seed.to_lowercase() {
                return Err(Error::validation(format!(
                    "category {:?}: seed {seed:?} must be non-empty lowercase",
                    spec.name
                )));
            }
        }
    }
    for spec in specs {
        if let Some(counterpart) = &spec.counterpart {
            match names.get(counterpart.as_str()) {
                None => {
                    return Err(Error::validation(format!(
                        "category {:?} names missing counterpart {counterpart:?}",
                        spec.name
                    )))
                }
                Some(polarity) if *polarity == spec.polarity => {
                    return Err(Error::validation(format!(
                        "category {:?} and counterpart {counterpart:?} share polarity",
                        spec.name
                    )))
                }
                Some(_) => {}
            }
        }
    }
    Ok(())
}

/// Grow one category's seed set over the graph.
///
/// Multi-source BFS over synonym edges claims words for `spec` at their
/// shortest synonym distance from any seed. An antonym edge from a word at
/// depth `d` claims the neighbor for the declared counterpart at `d + 1`
/// without extending traversal through it; with no counterpart declared,
/// antonym edges are ignored. A word reachable both ways is reported once at
/// its minimal depth, the same-category claim winning depth ties.
pub fn expand_seeds(
    spec: &CategorySpec,
    specs: &[CategorySpec],
    graph: &SynonymGraph,
    max_depth: usize,
) -> Result<Vec<Claim>> {
    validate_specs(specs)?;
    if !specs.iter().any(|s| s.name == spec.name) {
        return Err(Error::validation(format!(
            "spec {:?} missing from the spec list",
            spec.name
        )));
    }

    // synonym-only distances from the nearest seed
    let mut synonym_depth: BTreeMap<&str, usize> = BTreeMap::new();
    let mut queue: VecDeque<&str> = VecDeque::new();
    for seed in &spec.seeds {
        synonym_depth.insert(seed.as_str(), 0);
        queue.push_back(seed.as_str());
    }
    while let Some(word) = queue.pop_front() {
        let depth = synonym_depth[word];
        if depth == max_depth {
            continue;
        }
        for (neighbor, kind) in graph.neighbors(word) {
            if *kind == EdgeKind::Synonym && !synonym_depth.contains_key(neighbor.as_str()) {
                synonym_depth.insert(neighbor.as_str(), depth + 1);
                queue.push_back(neighbor.as_str());
            }
        }
    }

    // antonym flips into the counterpart, one terminal hop
    let mut flip_depth: BTreeMap<&str, usize> = BTreeMap::new();
    if spec.counterpart.is_some() {
        for (&word, &depth) in &synonym_depth {
            if depth == max_depth {
                continue;
            }
            for (neighbor, kind) in graph.neighbors(word) {
                if *kind == EdgeKind::Antonym {
                    let entry = flip_depth.entry(neighbor.as_str()).or_insert(depth + 1);
                    *entry = (*entry).min(depth + 1);
                }
            }
        }
    }

    let mut claims = Vec::new();
    let mut words: BTreeSet<&str> = synonym_depth.keys().copied().collect();
    words.extend(flip_depth.keys().copied());
    for word in words {
        let ds = synonym_depth.get(word).copied();
        let df = flip_depth.get(word).copied();
        let (category, depth) = match (ds, df) {
            (Some(ds), Some(df)) if df < ds => (spec.counterpart.clone().unwrap(), df),
            (Some(ds), _) => (spec.name.clone(), ds),
            (None, Some(df)) => (spec.counterpart.clone().unwrap(), df),
            (None, None) => unreachable!(),
        };
        claims.push(Claim {
            word: word.to_string(),
            category,
            depth,
        });
    }
    Ok(claims)
}

/// Output of [`build_corpus`]: the disjoint corpus plus the words excluded
/// because two categories claimed them at the same minimal depth.
#[derive(Debug, Clone)]
pub struct CorpusBuild {
    pub corpus: CategoryCorpus,
    pub conflicts: Vec<String>,
}

/// Union all per-spec expansions into one disjoint corpus. The claim with
/// the smallest depth wins a contested word; equal smallest depths from
/// different categories exclude the word entirely.
pub fn build_corpus(
    specs: &[CategorySpec],
    graph: &SynonymGraph,
    max_depth: usize,
) -> Result<CorpusBuild> {
    validate_specs(specs)?;
    // word -> category -> minimal claim depth
    let mut claims: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
    for spec in specs {
        for claim in expand_seeds(spec, specs, graph, max_depth)? {
            let per_category = claims.entry(claim.word).or_default();
            let entry = per_category.entry(claim.category).or_insert(claim.depth);
            *entry = (*entry).min(claim.depth);
        }
    }
    let mut entries = BTreeMap::new();
    let mut conflicts = Vec::new();
    for (word, per_category) in claims {
        let best = *per_category.values().min().expect("at least one claim");
        let winners: Vec<&String> = per_category
            .iter()
            .filter(|(_, &d)| d == best)
            .map(|(c, _)| c)
            .collect();
        if winners.len() == 1 {
            entries.insert(word, (winners[0].clone(), best));
        } else {
            conflicts.push(word);
        }
    }
    Ok(CorpusBuild {
        corpus: CategoryCorpus { entries },
        conflicts,
    })
}

/// Per-category hit counts, with token multiplicity, over the corpus's
/// categories.
pub fn score(doc: &NormalizedDoc, corpus: &CategoryCorpus) -> BTreeMap<String, u64> {
    let mut scores: BTreeMap<String, u64> = corpus
        .categories()
        .into_iter()
        .map(|c| (c.to_string(), 0))
        .collect();
    for token in &doc.tokens {
        if let Some((category, _)) = corpus.get(token) {
            *scores.get_mut(category).expect("category known") += 1;
        }
    }
    scores
}

/// Argmax of [`score`] with ties broken by earliest position in
/// `spec_order`; all-zero scores leave the document unlabeled.
///
/// `spec_order` must cover every category in the corpus.
pub fn weak_label(
    doc: &NormalizedDoc,
    corpus: &CategoryCorpus,
    spec_order: &[String],
) -> WeakLabel {
    debug_assert!(
        corpus
            .categories()
            .iter()
            .all(|c| spec_order.iter().any(|s| s == c)),
        "spec_order must cover all corpus categories"
    );
    let hit_counts = score(doc, corpus);
    let mut scores: BTreeMap<String, u64> = BTreeMap::new();
    let mut best: Option<(&str, u64)> = None;
    for name in spec_order {
        let count = hit_counts.get(name).copied().unwrap_or(0);
        scores.insert(name.clone(), count);
        match best {
            Some((_, top)) if count <= top => {}
            _ if count == 0 => {}
            _ => best = Some((name, count)),
        }
    }
    WeakLabel {
        doc_id: doc.id.clone(),
        category: best.map(|(name, _)| name.to_string()),
        scores,
    }
}

/// Parse category spec lines:
/// `name<TAB>polarity<TAB>counterpart-or-"-"<TAB>seed words space-separated`.
pub fn parse_category_specs(content: &str, source: &Path) -> Result<Vec<CategorySpec>> {
    let mut specs = Vec::new();
    for (idx, line) in content.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(Error::parse(
                source,
                line_no,
                "expected `name<TAB>polarity<TAB>counterpart<TAB>seeds`",
            ));
        }
        let polarity: Polarity = fields[1]
            .parse()
            .map_err(|e: Error| Error::parse(source, line_no, e.to_string()))?;
        let counterpart = (fields[2] != "-").then(|| fields[2].to_string());
        let seeds: BTreeSet<String> =
            fields[3].split_whitespace().map(str::to_string).collect();
        specs.push(CategorySpec {
            name: fields[0].to_string(),
            polarity,
            counterpart,
            seeds,
        });
    }
    validate_specs(&specs).map_err(|e| match e {
        Error::Validation(msg) => Error::parse(source, 0, msg),
        other => other,
    })?;
    Ok(specs)
}

pub fn load_category_specs(path: &Path) -> Result<Vec<CategorySpec>> {
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_category_specs(&content, path)
}
