//! Statistical function tagging and CFG parsing for chunk-annotated Myanmar
//! text.
//!
//! The pipeline: read a corpus of chunk-annotated sentences ([`corpus`]),
//! train a Naive Bayes model of prior and transition probabilities
//! ([`model`]), assign a function tag to every content chunk ([`tagger`]),
//! check the tag sequence against a context-free grammar and extract parse
//! trees and leftmost derivations ([`grammar`], [`parser`]), and score
//! tagged/parsed output against gold annotations ([`eval`]).
//!
//! ```
//! use funtag_core::{load_corpus, train, tag_greedy, TrainOptions};
//!
//! let text = "NC@Subj[သူ/pron.person]#VC@Active[စား/v.common]#SFC@Null[သည်/sf]။";
//! let corpus = load_corpus(text.as_bytes(), true)?;
//! let model = train(&corpus.into_sentences(), &TrainOptions::default())?;
//!
//! let input = funtag_core::parse_sentence_line("NC[သူ/pron.person]#VC[စား/v.common]#SFC[သည်/sf]။")?;
//! let tagged = tag_greedy(&model, &input);
//! assert_eq!(tagged.tags(), vec![funtag_core::FunctionTag::Subj, funtag_core::FunctionTag::Active]);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod assets;
pub mod corpus;
pub mod eval;
pub mod grammar;
pub mod model;
pub mod parser;
pub mod tagger;

pub use corpus::{
    load_corpus, normalize, parse_sentence_line, serialize_sentence, AnnotatedSentence, Chunk,
    ChunkType, Corpus, CorpusError, CorpusStats, FunctionTag, PosFeature, Token,
};
pub use eval::{
    evaluate, metrics, Correctness, EvalCounts, EvalError, EvalOptions, EvalReport, Metrics,
};
pub use grammar::{
    default_grammar, load_grammar, serialize_grammar, Grammar, GrammarError, GrammarLoad,
    GrammarWarning, Production, Symbol,
};
pub use model::{train, CountTables, Model, ModelError, TagDistribution, TrainOptions};
pub use parser::{
    classify_sentence_type, derivation, longest_recognized_prefix, parse, parse_with_cap,
    recognize, render_derivation, render_tree, validate_tree, DerivationStep, ParseOutcome,
    ParseTree, SentenceType, TreeError, TreeFormat, DEFAULT_TREE_CAP,
};
pub use tagger::{
    decode, parse_tagged_line, render_tagged_line, tag_exact, tag_greedy, tagged_to_json,
    DecodeMode, DecodeOptions, TaggedItem, TaggedSentence,
};
