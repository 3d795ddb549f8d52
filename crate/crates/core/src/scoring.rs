//! Pairwise scorers: cosine, domain-centered ("local") cosine, and URL
//! similarity.
//!
//! URL similarity aligns the two token sequences with Needleman-Wunsch. Gaps
//! cost nothing and every substitution score is non-negative, so the optimum
//! is the maximum-weight monotone matching of tokens. Token pair scores are
//! discounted by how often the tokens occur in the URLs of the domain.

use std::collections::HashMap;
use std::sync::Arc;

use crate::corpus::{is_numeric_token, tokenize_url, Corpus, UrlTokens};
use crate::error::{Error, Result};
use crate::lsi::Embedding;

/// Scores of one candidate pair. `None` marks an undefined cosine (one of
/// the operands is the zero vector).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ScoreTriple {
    pub cos: Option<f64>,
    pub lcos: Option<f64>,
    pub url: f64,
}

/// Cosine of the angle between `a` and `b`, or `None` if either is zero.
pub fn cosine(a: &[f64], b: &[f64]) -> Option<f64> {
    debug_assert_eq!(a.len(), b.len());
    let mut dot = 0.0;
    let mut na = 0.0;
    let mut nb = 0.0;
    for (x, y) in a.iter().zip(b) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return None;
    }
    Some((dot / (na.sqrt() * nb.sqrt())).clamp(-1.0, 1.0))
}

/// Arithmetic mean of all embeddings of a domain.
pub fn domain_mean<'a>(embeddings: impl IntoIterator<Item = &'a Embedding>) -> Result<Vec<f64>> {
    let mut iter = embeddings.into_iter();
    let first = iter.next().ok_or(Error::Empty("embedding list"))?;
    let mut sum = first.0.clone();
    let mut count = 1usize;
    for e in iter {
        for (s, x) in sum.iter_mut().zip(&e.0) {
            *s += x;
        }
        count += 1;
    }
    let n = count as f64;
    sum.iter_mut().for_each(|s| *s /= n);
    Ok(sum)
}

/// Cosine after moving the origin to `mean`.
pub fn local_cosine(a: &[f64], b: &[f64], mean: &[f64]) -> Option<f64> {
    let ca: Vec<f64> = a.iter().zip(mean).map(|(x, m)| x - m).collect();
    let cb: Vec<f64> = b.iter().zip(mean).map(|(x, m)| x - m).collect();
    cosine(&ca, &cb)
}

/// Length of the longest common subsequence.
pub fn lcss_len<T: PartialEq>(x: &[T], y: &[T]) -> usize {
    if x.is_empty() || y.is_empty() {
        return 0;
    }
    let mut prev = vec![0usize; y.len() + 1];
    let mut cur = vec![0usize; y.len() + 1];
    for xi in x {
        for (j, yj) in y.iter().enumerate() {
            cur[j + 1] = if xi == yj { prev[j] + 1 } else { cur[j].max(prev[j + 1]) };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[y.len()]
}

/// Position-independent token counts over a set of URLs.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct UrlCounts {
    counts: HashMap<String, u32>,
}

impl UrlCounts {
    pub fn from_urls<'a>(urls: impl IntoIterator<Item = &'a str>) -> Self {
        let mut counts = HashMap::new();
        for url in urls {
            for token in tokenize_url(url).tokens {
                *counts.entry(token).or_insert(0) += 1;
            }
        }
        UrlCounts { counts }
    }

    pub fn get(&self, token: &str) -> Option<u32> {
        self.counts.get(token).copied()
    }

    fn require(&self, token: &str) -> Result<f64> {
        self.get(token)
            .map(f64::from)
            .ok_or_else(|| Error::MissingTokenCount(token.to_string()))
    }
}

impl<const N: usize> From<[(&str, u32); N]> for UrlCounts {
    fn from(entries: [(&str, u32); N]) -> Self {
        UrlCounts {
            counts: entries.iter().map(|&(t, c)| (t.to_string(), c)).collect(),
        }
    }
}

/// Which URLs token counts are taken over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UrlCountScope {
    #[default]
    Domain,
    /// All URLs of the collection; ablation only.
    Global,
}

/// URL token counts per domain, over the URLs of both languages.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DomainUrlStats {
    tables: HashMap<String, Arc<UrlCounts>>,
}

impl DomainUrlStats {
    pub fn build(corpus: &Corpus, scope: UrlCountScope) -> Self {
        let tables = match scope {
            UrlCountScope::Domain => corpus
                .domains()
                .map(|d| {
                    let counts =
                        UrlCounts::from_urls(corpus.domain_docs(d).iter().map(|&id| corpus.get(id).url.as_str()));
                    (d.to_string(), Arc::new(counts))
                })
                .collect(),
            UrlCountScope::Global => {
                let shared = Arc::new(UrlCounts::from_urls(corpus.documents().iter().map(|d| d.url.as_str())));
                corpus.domains().map(|d| (d.to_string(), Arc::clone(&shared))).collect()
            }
        };
        DomainUrlStats { tables }
    }

    pub fn domain(&self, domain: &str) -> Result<&UrlCounts> {
        self.tables
            .get(domain)
            .map(Arc::as_ref)
            .ok_or_else(|| Error::UnknownDomain(domain.to_string()))
    }
}

/// Match score of two URL tokens:
///
/// * equal tokens: `1 / cnt(t)²`
/// * different, at least one numeric: `0`
/// * two letter tokens: `2·lcss / (len₁ + len₂) · 1 / (cnt(t₁)·cnt(t₂))`
pub fn url_token_match_score(t1: &str, t2: &str, counts: &UrlCounts) -> Result<f64> {
    let c1 = counts.require(t1)?;
    if t1 == t2 {
        return Ok(1.0 / (c1 * c1));
    }
    let c2 = counts.require(t2)?;
    if is_numeric_token(t1) || is_numeric_token(t2) {
        return Ok(0.0);
    }
    let a: Vec<char> = t1.chars().collect();
    let b: Vec<char> = t2.chars().collect();
    let common = lcss_len(&a, &b) as f64;
    Ok(2.0 * common / (a.len() + b.len()) as f64 / (c1 * c2))
}

/// Cumulative score of the best monotone token alignment of two URLs.
pub fn url_similarity(u1: &UrlTokens, u2: &UrlTokens, counts: &UrlCounts) -> Result<f64> {
    let (a, b) = (&u1.tokens, &u2.tokens);
    if a.is_empty() || b.is_empty() {
        return Ok(0.0);
    }
    let width = b.len() + 1;
    let mut dp = vec![0.0f64; (a.len() + 1) * width];
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let matched = dp[(i - 1) * width + j - 1] + url_token_match_score(&a[i - 1], &b[j - 1], counts)?;
            let skipped = dp[(i - 1) * width + j].max(dp[i * width + j - 1]);
            dp[i * width + j] = matched.max(skipped);
        }
    }
    Ok(dp[a.len() * width + b.len()])
}
