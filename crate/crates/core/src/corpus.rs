//! Document collection, gold/training pair lists and tokenizers.
//!
//! The documents file is a four-column TSV: `domain`, `lang`, `url` and the
//! page text encoded as standard padded base64. Pairs files hold two URLs per
//! line.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::LazyLock;

use base64::engine::general_purpose::STANDARD;
use base64::Engine as _;
use regex::Regex;

use crate::error::{Error, Result};

/// Index of a document inside its [`Corpus`].
pub type DocId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub domain: String,
    pub lang: String,
    pub url: String,
    pub text: String,
}

/// An immutable, indexed collection of documents.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    documents: Vec<Document>,
    by_domain: BTreeMap<String, Vec<DocId>>,
    by_url: HashMap<String, DocId>,
}

impl Corpus {
    /// Builds the indexes, rejecting empty fields and duplicate URLs.
    pub fn new(documents: Vec<Document>) -> Result<Self> {
        let mut by_domain: BTreeMap<String, Vec<DocId>> = BTreeMap::new();
        let mut by_url = HashMap::with_capacity(documents.len());
        for (id, doc) in documents.iter().enumerate() {
            if doc.url.is_empty() || doc.domain.is_empty() || doc.lang.is_empty() {
                return Err(Error::Config(format!("document {id} has an empty domain, lang or url")));
            }
            if by_url.insert(doc.url.clone(), id).is_some() {
                return Err(Error::DuplicateUrl(doc.url.clone()));
            }
            by_domain.entry(doc.domain.clone()).or_default().push(id);
        }
        Ok(Corpus {
            documents,
            by_domain,
            by_url,
        })
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn get(&self, id: DocId) -> &Document {
        &self.documents[id]
    }

    pub fn id_of(&self, url: &str) -> Option<DocId> {
        self.by_url.get(url).copied()
    }

    pub fn resolve(&self, url: &str) -> Result<DocId> {
        self.id_of(url).ok_or_else(|| Error::UnknownUrl(url.to_string()))
    }

    pub fn by_url(&self, url: &str) -> Option<&Document> {
        self.id_of(url).map(|id| &self.documents[id])
    }

    /// Domains in lexicographic order.
    pub fn domains(&self) -> impl Iterator<Item = &str> {
        self.by_domain.keys().map(String::as_str)
    }

    /// Document ids of a domain, in file order.
    pub fn domain_docs(&self, domain: &str) -> &[DocId] {
        self.by_domain.get(domain).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Checks that every document is labelled with one of the two languages.
    pub fn check_languages(&self, source_lang: &str, target_lang: &str) -> Result<()> {
        for doc in &self.documents {
            if doc.lang != source_lang && doc.lang != target_lang {
                return Err(Error::UnexpectedLanguage {
                    url: doc.url.clone(),
                    lang: doc.lang.clone(),
                });
            }
        }
        Ok(())
    }

    /// Serializes to the documents TSV format.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for doc in &self.documents {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}",
                doc.domain,
                doc.lang,
                doc.url,
                STANDARD.encode(doc.text.as_bytes())
            );
        }
        out
    }

    pub fn parse_tsv(input: &str) -> Result<Self> {
        let mut documents = Vec::new();
        for (idx, line) in input.lines().enumerate() {
            let line_no = idx + 1;
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 4 {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected 4 tab-separated fields, found {}", fields.len()),
                });
            }
            let bytes = STANDARD.decode(fields[3]).map_err(|e| Error::Parse {
                line: line_no,
                message: format!("invalid base64: {e}"),
            })?;
            let text = String::from_utf8(bytes).map_err(|e| Error::Parse {
                line: line_no,
                message: format!("text is not valid UTF-8: {e}"),
            })?;
            if fields[..3].iter().any(|f| f.is_empty()) {
                return Err(Error::Parse {
                    line: line_no,
                    message: "domain, lang and url must be non-empty".into(),
                });
            }
            documents.push(Document {
                domain: fields[0].to_string(),
                lang: fields[1].to_string(),
                url: fields[2].to_string(),
                text,
            });
        }
        Corpus::new(documents)
    }
}

/// Reads a documents TSV file.
pub fn load_corpus(path: impl AsRef<Path>) -> Result<Corpus> {
    let path = path.as_ref();
    let input = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Corpus::parse_tsv(&input)
}

pub fn save_corpus(corpus: &Corpus, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, corpus.to_tsv()).map_err(|e| Error::io(path, e))
}

/// Known translation pairs as `(source_url, target_url)`; 1:1 on both sides.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PairList {
    pairs: Vec<(String, String)>,
}

impl PairList {
    pub fn new(pairs: Vec<(String, String)>) -> Result<Self> {
        let mut sources = HashSet::with_capacity(pairs.len());
        let mut targets = HashSet::with_capacity(pairs.len());
        for (src, tgt) in &pairs {
            if !sources.insert(src.as_str()) {
                return Err(Error::RepeatedPairUrl {
                    side: "source",
                    url: src.clone(),
                });
            }
            if !targets.insert(tgt.as_str()) {
                return Err(Error::RepeatedPairUrl {
                    side: "target",
                    url: tgt.clone(),
                });
            }
        }
        Ok(PairList { pairs })
    }

    pub fn pairs(&self) -> &[(String, String)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.pairs.iter().map(|(s, t)| (s.as_str(), t.as_str()))
    }

    /// Keeps the pairs for which `keep(source, target)` holds.
    pub fn filter(&self, mut keep: impl FnMut(&str, &str) -> bool) -> PairList {
        PairList {
            pairs: self.pairs.iter().filter(|(s, t)| keep(s, t)).cloned().collect(),
        }
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (s, t) in &self.pairs {
            let _ = writeln!(out, "{s}\t{t}");
        }
        out
    }

    pub fn parse_tsv(input: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        let mut sources: HashMap<String, usize> = HashMap::new();
        let mut targets: HashMap<String, usize> = HashMap::new();
        for (idx, line) in input.lines().enumerate() {
            let line_no = idx + 1;
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 2 {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected 2 tab-separated urls, found {}", fields.len()),
                });
            }
            if let Some(first) = sources.insert(fields[0].to_string(), line_no) {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("source url {} repeats line {first}", fields[0]),
                });
            }
            if let Some(first) = targets.insert(fields[1].to_string(), line_no) {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("target url {} repeats line {first}", fields[1]),
                });
            }
            pairs.push((fields[0].to_string(), fields[1].to_string()));
        }
        Ok(PairList { pairs })
    }
}

pub fn load_pairs(path: impl AsRef<Path>) -> Result<PairList> {
    let path = path.as_ref();
    let input = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    PairList::parse_tsv(&input)
}

pub fn save_pairs(pairs: &PairList, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, pairs.to_tsv()).map_err(|e| Error::io(path, e))
}

/// Whitespace tokenization, no normalization of any kind.
pub fn tokenize_text(text: &str) -> Vec<&str> {
    text.split_whitespace().collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UrlTokens {
    pub url: String,
    pub tokens: Vec<String>,
}

static URL_TOKEN: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\p{L}+|\p{Nd}+").expect("static regex"));
static NUMERIC: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^\p{Nd}+$").expect("static regex"));

/// Splits a URL into maximal runs of letters (`L*`) or decimal digits (`Nd`).
/// Everything else, underscore included, is a separator.
pub fn tokenize_url(url: &str) -> UrlTokens {
    UrlTokens {
        url: url.to_string(),
        tokens: URL_TOKEN.find_iter(url).map(|m| m.as_str().to_string()).collect(),
    }
}

/// True when the token is a run of decimal digits.
pub fn is_numeric_token(token: &str) -> bool {
    NUMERIC.is_match(token)
}
