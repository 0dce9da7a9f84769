//! End-to-end workflows behind the CLI: labeled corpus generation, evaluation, and the
//! model-vs-baseline comparator with its feedback store.

pub mod compare;
pub mod corpus;
pub mod evaluate;

pub use compare::{compare, CompareOutcome, FeedbackStore, Winner};
pub use corpus::{generate_corpus, write_manifest, Corpus, CorpusConfig, ManifestEntry};
pub use evaluate::{evaluate, EvalBuckets, GraphEval};
