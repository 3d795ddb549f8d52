//! Cross-lingual LSI model: truncated term factors, fold-in of arbitrary
//! documents, and the binary model container.
//!
//! Model file layout (little endian):
//!
//! ```text
//! "LSI1" | u32 m | u32 r | T (m*r f64, column-major) | S (r f64) | fingerprint (32 bytes)
//! ```

use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::rsvd::{randomized_svd, RsvdParams, TruncatedSvd};
use crate::sparse::SparseVector;
use crate::vectorizer::{doc_to_column, DomainIdf, TermDocMatrix, Vocabulary};

const MAGIC: &[u8; 4] = b"LSI1";

/// A document's position in the joint space.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding(pub Vec<f64>);

impl Embedding {
    pub fn zeros(dim: usize) -> Self {
        Embedding(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0.0)
    }
}

/// How fold-in vectors are scaled before cosine similarity is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EmbeddingScaling {
    /// `qᵀ T S⁻¹`, the raw fold-in row.
    None,
    /// `qᵀ T S⁻¹ · S`; cosines between training documents then follow the
    /// geometry of the term-document columns.
    #[default]
    SingularValues,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LsiModel {
    /// m × r term factors, orthonormal columns.
    pub terms: DMatrix<f64>,
    /// r singular values, descending.
    pub singular: DVector<f64>,
    pub vocab_fingerprint: [u8; 32],
}

impl LsiModel {
    pub fn from_svd(svd: &TruncatedSvd, vocab_fingerprint: [u8; 32]) -> Self {
        LsiModel {
            terms: svd.left.clone(),
            singular: svd.singular.clone(),
            vocab_fingerprint,
        }
    }

    pub fn rank(&self) -> usize {
        self.singular.len()
    }

    pub fn vocab_size(&self) -> usize {
        self.terms.nrows()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let m = self.terms.nrows();
        let r = self.rank();
        let mut out = Vec::with_capacity(12 + 8 * (m * r + r) + 32);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&(m as u32).to_le_bytes());
        out.extend_from_slice(&(r as u32).to_le_bytes());
        // nalgebra storage is column-major already
        for x in self.terms.iter() {
            out.extend_from_slice(&x.to_le_bytes());
        }
        for x in self.singular.iter() {
            out.extend_from_slice(&x.to_le_bytes());
        }
        out.extend_from_slice(&self.vocab_fingerprint);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 12 || &bytes[..4] != MAGIC {
            return Err(Error::BadModel("missing LSI1 header".into()));
        }
        let read_u32 = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4 bytes")) as usize;
        let m = read_u32(4);
        let r = read_u32(8);
        let expected = 12 + 8 * (m * r + r) + 32;
        if bytes.len() != expected {
            return Err(Error::BadModel(format!(
                "expected {expected} bytes for m={m}, r={r}, found {}",
                bytes.len()
            )));
        }
        let floats: Vec<f64> = bytes[12..12 + 8 * (m * r + r)]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect();
        let terms = DMatrix::from_column_slice(m, r, &floats[..m * r]);
        let singular = DVector::from_column_slice(&floats[m * r..]);
        let vocab_fingerprint = bytes[expected - 32..].try_into().expect("32 bytes");
        Ok(LsiModel {
            terms,
            singular,
            vocab_fingerprint,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        LsiModel::from_bytes(&bytes)
    }

    /// Index of the first singular value that is zero at working precision.
    fn first_vanishing_singular_value(&self) -> Option<usize> {
        let top = self.singular.iter().copied().fold(0.0, f64::max);
        let tol = top * f64::EPSILON * self.terms.nrows().max(1) as f64;
        self.singular.iter().position(|&s| s <= tol)
    }
}

/// Factorizes the training matrix into a rank-`params.rank` model.
pub fn train_lsi(matrix: &TermDocMatrix, params: RsvdParams) -> Result<LsiModel> {
    let svd = randomized_svd(&matrix.matrix, params)?;
    Ok(LsiModel::from_svd(&svd, matrix.vocab_fingerprint))
}

/// Maps a weighted count vector into the joint space: `qᵀ T S⁻¹`.
pub fn fold_in(q: &SparseVector, model: &LsiModel) -> Result<Embedding> {
    if q.dim() != model.vocab_size() {
        return Err(Error::DimensionMismatch {
            expected: model.vocab_size(),
            actual: q.dim(),
        });
    }
    if let Some(index) = model.first_vanishing_singular_value() {
        return Err(Error::SingularValueZero { index });
    }
    let r = model.rank();
    let mut out = vec![0.0; r];
    for (k, slot) in out.iter_mut().enumerate() {
        let col = model.terms.column(k);
        let dot: f64 = q.iter().map(|(i, w)| w * col[i]).sum();
        *slot = dot / model.singular[k];
    }
    Ok(Embedding(out))
}

/// Fold-in followed by the configured scaling.
pub fn embed(q: &SparseVector, model: &LsiModel, scaling: EmbeddingScaling) -> Result<Embedding> {
    let mut e = fold_in(q, model)?;
    if scaling == EmbeddingScaling::SingularValues {
        for (x, s) in e.0.iter_mut().zip(model.singular.iter()) {
            *x *= s;
        }
    }
    Ok(e)
}

/// One embedding per document, indexed by document id.
pub fn embed_corpus(
    corpus: &Corpus,
    model: &LsiModel,
    vocab: &Vocabulary,
    idf: &DomainIdf,
    scaling: EmbeddingScaling,
) -> Result<Vec<Embedding>> {
    if model.vocab_fingerprint != vocab.fingerprint() || model.vocab_size() != vocab.len() {
        return Err(Error::FingerprintMismatch);
    }
    corpus
        .documents()
        .par_iter()
        .map(|doc| embed(&doc_to_column(doc, vocab, idf)?, model, scaling))
        .collect()
}
