//! Built-in configuration data, compiled into the library so the CLI works
//! out of the box. Every file can be overridden with an explicit path.

use std::path::Path;

use crate::error::Result;
use crate::lexicon::{parse_category_specs, CategorySpec, SynonymGraph};
use crate::normalize::{
    parse_emoticons, parse_reference_vocab, parse_slang, parse_stopwords, NormalizeConfig,
};

pub const STOPWORDS: &str = include_str!("../data/stopwords.txt");
pub const SLANG: &str = include_str!("../data/slang.tsv");
pub const REFERENCE_VOCAB: &str = include_str!("../data/reference_vocab.txt");
pub const EMOTICONS: &str = include_str!("../data/emoticons.txt");
pub const CATEGORIES: &str = include_str!("../data/categories.tsv");
pub const SYNONYM_GRAPH: &str = include_str!("../data/synonym_graph.tsv");

const BUILTIN: &str = "<builtin>";

pub fn normalize_config() -> Result<NormalizeConfig> {
    NormalizeConfig::new(
        parse_stopwords(STOPWORDS),
        parse_slang(SLANG, Path::new(BUILTIN))?,
        parse_reference_vocab(REFERENCE_VOCAB),
        parse_emoticons(EMOTICONS),
    )
}

pub fn category_specs() -> Result<Vec<CategorySpec>> {
    parse_category_specs(CATEGORIES, Path::new(BUILTIN))
}

pub fn synonym_graph() -> Result<SynonymGraph> {
    SynonymGraph::parse(SYNONYM_GRAPH, Path::new(BUILTIN))
}
