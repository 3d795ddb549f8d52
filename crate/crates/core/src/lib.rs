//! Cross-lingual alignment of web pages with latent semantic indexing.
//!
//! Pages of two languages are folded into a joint low-rank space learned
//! from known translation pairs. Candidate pairs within a web site are
//! scored by cosine, domain-centered cosine and URL similarity, combined,
//! and resolved into 1:1 links by competitive linking. Recall is measured
//! strictly (exact URL pairs) and softly (near-identical page content).
//!
//! | module | role |
//! |---|---|
//! | [`corpus`] | documents, pair lists, text and URL tokenizers |
//! | [`vectorizer`] | vocabulary, per-domain idf, term-document matrix |
//! | [`rsvd`] | randomized truncated SVD |
//! | [`lsi`] | model, fold-in, model file |
//! | [`scoring`] | cos, lcos, URL similarity |
//! | [`linking`] | candidates, score combination, competitive linking |
//! | [`eval`] | strict and soft recall, miss reports |
//! | [`pipeline`] | train / align / evaluate and exclusion regimes |
//! | [`synth`] | synthetic bilingual sites with planted pairs |
//!
//! The `examples/` directory has one runnable program per capability.

pub mod config;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod linking;
pub mod lsi;
pub mod pipeline;
pub mod rsvd;
pub mod scoring;
pub mod sparse;
pub mod synth;
pub mod vectorizer;

pub use config::{Exclusion, PipelineConfig};
pub use corpus::{load_corpus, load_pairs, tokenize_text, tokenize_url, Corpus, DocId, Document, PairList, UrlTokens};
pub use error::{Error, Result};
pub use eval::{evaluate, soft_doc_similarity, soft_recall, strict_recall, EvalReport, SoftMatchMode};
pub use linking::{competitive_link, AlignmentHypothesis, LinkConfig, Normalization, WeightConfig};
pub use lsi::{embed_corpus, fold_in, train_lsi, Embedding, EmbeddingScaling, LsiModel};
pub use rsvd::{randomized_svd, RsvdParams, TruncatedSvd};
pub use scoring::{cosine, local_cosine, url_similarity, DomainUrlStats, ScoreTriple};
pub use vectorizer::{build_term_doc_matrix, build_vocabulary, DomainIdf, TermDocMatrix, Vocabulary};
