//! Data files embedded in the library: the default grammar and a small
//! annotated corpus used by examples, tests, and benchmarks.

/// Ten-sentence annotated sample corpus.
pub const SAMPLE_CORPUS: &str = include_str!("../assets/sample_corpus.txt");

/// Source text of the built-in grammar (see [`crate::grammar::default_grammar`]).
pub const DEFAULT_GRAMMAR: &str = include_str!("../assets/myanmar.grammar");
