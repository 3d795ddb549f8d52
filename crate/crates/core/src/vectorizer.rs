//! Language-partitioned vocabulary, per-domain idf and the bilingual
//! term-document matrix.
//!
//! A training column is the sum of the weighted count vectors of the two
//! documents of a known pair. Because every vocabulary row belongs to one
//! language, the two halves of a column never overlap.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use log::warn;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::corpus::{tokenize_text, Corpus, Document, PairList};
use crate::error::{Error, Result};
use crate::sparse::{CscMatrix, SparseVector};

/// A vocabulary entry: a surface form qualified by its language.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term {
    pub lang: String,
    pub token: String,
}

impl Term {
    pub fn new(lang: impl Into<String>, token: impl Into<String>) -> Self {
        Term {
            lang: lang.into(),
            token: token.into(),
        }
    }
}

/// Case-folds a text token into its matrix term form (simple lowercase,
/// one character in, one character out).
pub fn fold_case(token: &str) -> String {
    token.chars().map(|c| c.to_lowercase().next().unwrap_or(c)).collect()
}

/// Occurrence count of every term of a document.
pub fn term_counts(doc: &Document) -> HashMap<Term, u32> {
    let mut counts = HashMap::new();
    for token in tokenize_text(&doc.text) {
        *counts
            .entry(Term::new(doc.lang.as_str(), fold_case(token)))
            .or_insert(0) += 1;
    }
    counts
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    terms: Vec<Term>,
    index: HashMap<Term, usize>,
}

impl Vocabulary {
    /// Rows are assigned in `(lang, token)` order.
    pub fn from_terms(terms: impl IntoIterator<Item = Term>) -> Self {
        let sorted: BTreeSet<Term> = terms.into_iter().collect();
        let terms: Vec<Term> = sorted.into_iter().collect();
        let index = terms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Vocabulary { terms, index }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn row(&self, term: &Term) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn term(&self, row: usize) -> &Term {
        &self.terms[row]
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// SHA-256 over the terms in row order; binds a model to this vocabulary.
    pub fn fingerprint(&self) -> [u8; 32] {
        let mut hasher = Sha256::new();
        for term in &self.terms {
            hasher.update(term.lang.as_bytes());
            hasher.update([0u8]);
            hasher.update(term.token.as_bytes());
            hasher.update(b"\n");
        }
        hasher.finalize().into()
    }
}

pub fn build_vocabulary(corpus: &Corpus) -> Result<Vocabulary> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut terms = BTreeSet::new();
    for doc in corpus.documents() {
        for token in tokenize_text(&doc.text) {
            terms.insert(Term::new(doc.lang.as_str(), fold_case(token)));
        }
    }
    Ok(Vocabulary::from_terms(terms))
}

/// idf statistics of one domain (or of the whole collection in global mode).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IdfEntry {
    pub doc_count: usize,
    pub idf: HashMap<Term, f64>,
}

impl IdfEntry {
    pub fn get(&self, term: &Term) -> Option<f64> {
        self.idf.get(term).copied()
    }

    fn from_documents<'a>(docs: impl Iterator<Item = &'a Document>) -> Self {
        let mut doc_count = 0usize;
        let mut df: HashMap<Term, usize> = HashMap::new();
        for doc in docs {
            doc_count += 1;
            for term in term_counts(doc).into_keys() {
                *df.entry(term).or_insert(0) += 1;
            }
        }
        let n = doc_count as f64;
        let idf = df
            .into_iter()
            .map(|(term, count)| {
                let value = if count == doc_count {
                    0.0
                } else {
                    (n / count as f64).ln()
                };
                (term, value)
            })
            .collect();
        IdfEntry { doc_count, idf }
    }
}

/// Which documents idf is counted over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IdfScope {
    #[default]
    Domain,
    /// Whole collection; ablation only.
    Global,
}

/// idf tables keyed by domain.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DomainIdf {
    tables: HashMap<String, Arc<IdfEntry>>,
}

impl DomainIdf {
    /// Tables for every domain in the corpus. Each domain counts all of its
    /// documents, in both languages.
    pub fn build(corpus: &Corpus, scope: IdfScope) -> Self {
        let tables = match scope {
            IdfScope::Domain => corpus
                .domains()
                .map(|d| {
                    let entry = IdfEntry::from_documents(corpus.domain_docs(d).iter().map(|&id| corpus.get(id)));
                    (d.to_string(), Arc::new(entry))
                })
                .collect(),
            IdfScope::Global => {
                let shared = Arc::new(IdfEntry::from_documents(corpus.documents().iter()));
                corpus.domains().map(|d| (d.to_string(), Arc::clone(&shared))).collect()
            }
        };
        DomainIdf { tables }
    }

    pub fn domain(&self, domain: &str) -> Result<&IdfEntry> {
        self.tables
            .get(domain)
            .map(Arc::as_ref)
            .ok_or_else(|| Error::UnknownDomain(domain.to_string()))
    }
}

/// idf table of a single domain.
pub fn compute_domain_idf(corpus: &Corpus, domain: &str) -> Result<IdfEntry> {
    let docs = corpus.domain_docs(domain);
    if docs.is_empty() {
        return Err(Error::UnknownDomain(domain.to_string()));
    }
    Ok(IdfEntry::from_documents(docs.iter().map(|&id| corpus.get(id))))
}

/// Log-normalised tf times idf: `(1 + ln count) * idf`.
pub fn weight_term(count: u32, idf: f64) -> Result<f64> {
    if count == 0 {
        return Err(Error::ZeroCount);
    }
    Ok((1.0 + f64::from(count).ln()) * idf)
}

/// Weighted count vector of a document, using its own domain's idf.
/// Out-of-vocabulary tokens are skipped.
pub fn doc_to_column(doc: &Document, vocab: &Vocabulary, idf: &DomainIdf) -> Result<SparseVector> {
    let table = idf.domain(&doc.domain)?;
    let mut entries = Vec::new();
    for (term, count) in term_counts(doc) {
        let Some(row) = vocab.row(&term) else {
            continue;
        };
        let Some(term_idf) = table.get(&term) else {
            continue;
        };
        let w = weight_term(count, term_idf)?;
        if w != 0.0 {
            entries.push((row, w));
        }
    }
    SparseVector::from_entries(vocab.len(), entries)
}

/// Bilingual term-document matrix: one column per training pair.
#[derive(Debug, Clone, PartialEq)]
pub struct TermDocMatrix {
    pub matrix: CscMatrix,
    pub pairs: Vec<(String, String)>,
    pub vocab_fingerprint: [u8; 32],
}

impl TermDocMatrix {
    pub fn nrows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.matrix.ncols()
    }

    /// Text dump: `m n nnz` header, then `row col weight` per entry.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{} {} {}",
            self.matrix.nrows(),
            self.matrix.ncols(),
            self.matrix.nnz()
        );
        for (i, j, v) in self.matrix.triplets() {
            let _ = writeln!(out, "{i} {j} {v:.16e}");
        }
        out
    }

    pub fn write_dump(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.dump()).map_err(|e| Error::io(path, e))
    }
}

pub fn build_term_doc_matrix(
    corpus: &Corpus,
    train_pairs: &PairList,
    vocab: &Vocabulary,
    idf: &DomainIdf,
) -> Result<TermDocMatrix> {
    if train_pairs.is_empty() {
        return Err(Error::EmptyPairs);
    }
    let resolved: Vec<(usize, usize)> = train_pairs
        .iter()
        .map(|(s, t)| Ok((corpus.resolve(s)?, corpus.resolve(t)?)))
        .collect::<Result<_>>()?;
    let columns: Vec<SparseVector> = resolved
        .par_iter()
        .map(|&(s, t)| {
            let src = doc_to_column(corpus.get(s), vocab, idf)?;
            let tgt = doc_to_column(corpus.get(t), vocab, idf)?;
            src.add(&tgt)
        })
        .collect::<Result<_>>()?;
    let empty = columns.iter().filter(|c| c.is_empty()).count();
    if empty > 0 {
        warn!(
            "{empty} of {} training columns are empty (every term has idf 0)",
            columns.len()
        );
    }
    Ok(TermDocMatrix {
        matrix: CscMatrix::from_columns(vocab.len(), &columns)?,
        pairs: train_pairs.pairs().to_vec(),
        vocab_fingerprint: vocab.fingerprint(),
    })
}
