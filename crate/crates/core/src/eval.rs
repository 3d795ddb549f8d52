//! Strict and soft recall against a gold pair list.
//!
//! Strict recall counts exact URL pairs. Soft recall also credits a gold pair
//! `(s, t)` when the document predicted for `s` has text close enough to `t`
//! (or the document predicted for `t` is close enough to `s`), measured as
//! `2·lcss / (|a| + |b|)` over whitespace tokens.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::corpus::{tokenize_text, Corpus, PairList};
use crate::error::{Error, Result};
use crate::scoring::lcss_len;

/// Thresholds reported by default, highest first.
pub const DEFAULT_THRESHOLDS: [f64; 4] = [1.00, 0.99, 0.95, 0.90];

/// Threshold at which per-domain misses are reported.
pub const MISS_THRESHOLD: f64 = 0.95;

/// Token-level LCS similarity of two texts. Two empty texts are identical;
/// one empty text matches nothing.
pub fn soft_doc_similarity(text1: &str, text2: &str) -> f64 {
    token_similarity(&tokenize_text(text1), &tokenize_text(text2))
}

fn token_similarity(a: &[&str], b: &[&str]) -> f64 {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => 1.0,
        (true, false) | (false, true) => 0.0,
        _ => 2.0 * lcss_len(a, b) as f64 / (a.len() + b.len()) as f64,
    }
}

/// Whether one side passing the threshold is enough to credit a gold pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SoftMatchMode {
    #[default]
    Either,
    /// The prediction for the source and the prediction for the target must
    /// both pass.
    Both,
}

pub fn strict_recall(predicted: &[(String, String)], gold: &PairList) -> Result<f64> {
    if gold.is_empty() {
        return Err(Error::Empty("gold pair list"));
    }
    let predicted: HashSet<(&str, &str)> = predicted.iter().map(|(s, t)| (s.as_str(), t.as_str())).collect();
    let hits = gold.iter().filter(|p| predicted.contains(p)).count();
    Ok(hits as f64 / gold.len() as f64)
}

/// Best soft similarity achieved by the predictions for every gold pair, in
/// gold order.
pub fn gold_similarities(
    predicted: &[(String, String)],
    gold: &PairList,
    corpus: &Corpus,
    mode: SoftMatchMode,
) -> Result<Vec<f64>> {
    let mut by_src: HashMap<&str, Vec<&str>> = HashMap::new();
    let mut by_tgt: HashMap<&str, Vec<&str>> = HashMap::new();
    for (s, t) in predicted {
        corpus.resolve(s)?;
        corpus.resolve(t)?;
        by_src.entry(s).or_default().push(t);
        by_tgt.entry(t).or_default().push(s);
    }
    for (s, t) in gold.iter() {
        corpus.resolve(s)?;
        corpus.resolve(t)?;
    }

    let text = |url: &str| corpus.by_url(url).map(|d| d.text.as_str()).unwrap_or("");
    let best_against = |expected: &str, candidates: Option<&Vec<&str>>| -> f64 {
        let Some(candidates) = candidates else {
            return 0.0;
        };
        let expected_tokens = tokenize_text(text(expected));
        candidates
            .iter()
            .map(|c| {
                if *c == expected {
                    1.0
                } else {
                    token_similarity(&tokenize_text(text(c)), &expected_tokens)
                }
            })
            .fold(0.0, f64::max)
    };

    Ok(gold
        .pairs()
        .par_iter()
        .map(|(s, t)| {
            let target_side = best_against(t, by_src.get(s.as_str()));
            let source_side = best_against(s, by_tgt.get(t.as_str()));
            match mode {
                SoftMatchMode::Either => target_side.max(source_side),
                SoftMatchMode::Both => target_side.min(source_side),
            }
        })
        .collect())
}

fn recall_at(similarities: &[f64], threshold: f64) -> f64 {
    let hits = similarities.iter().filter(|&&s| s >= threshold).count();
    hits as f64 / similarities.len() as f64
}

pub fn soft_recall(
    predicted: &[(String, String)],
    gold: &PairList,
    corpus: &Corpus,
    threshold: f64,
    mode: SoftMatchMode,
) -> Result<f64> {
    if gold.is_empty() {
        return Err(Error::Empty("gold pair list"));
    }
    let sims = gold_similarities(predicted, gold, corpus, mode)?;
    Ok(recall_at(&sims, threshold))
}

/// Gold pairs not recovered at `threshold`, counted by the source document's
/// domain.
pub fn miss_report(
    predicted: &[(String, String)],
    gold: &PairList,
    corpus: &Corpus,
    threshold: f64,
    mode: SoftMatchMode,
) -> Result<BTreeMap<String, usize>> {
    let sims = gold_similarities(predicted, gold, corpus, mode)?;
    Ok(misses_from(&sims, gold, corpus, threshold))
}

fn misses_from(sims: &[f64], gold: &PairList, corpus: &Corpus, threshold: f64) -> BTreeMap<String, usize> {
    let mut misses = BTreeMap::new();
    for ((s, _), sim) in gold.iter().zip(sims) {
        if *sim < threshold {
            let domain = corpus.by_url(s).map(|d| d.domain.clone()).unwrap_or_default();
            *misses.entry(domain).or_insert(0) += 1;
        }
    }
    misses
}

/// Miss table: domains by descending count (ties by name), single-miss
/// domains folded into a trailing `other` row.
pub fn render_misses(misses: &BTreeMap<String, usize>) -> String {
    let mut rows: Vec<(&str, usize)> = misses
        .iter()
        .filter(|(_, &n)| n > 1)
        .map(|(d, &n)| (d.as_str(), n))
        .collect();
    rows.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    let other: usize = misses.values().filter(|&&n| n == 1).sum();
    let width = rows.iter().map(|(d, _)| d.len()).max().unwrap_or(0).max("domain".len());
    let mut out = String::new();
    let _ = writeln!(out, "{:<width$}  missed pairs", "domain");
    for (d, n) in rows {
        let _ = writeln!(out, "{d:<width$}  {n}");
    }
    if other > 0 {
        let _ = writeln!(out, "{:<width$}  {other}", "other");
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub strict_recall: f64,
    /// `(threshold, recall)` in the order the thresholds were given.
    pub soft_recall: Vec<(f64, f64)>,
    pub miss_threshold: f64,
    pub per_domain_misses: BTreeMap<String, usize>,
    pub total_gold: usize,
}

impl EvalReport {
    pub fn soft_at(&self, threshold: f64) -> Option<f64> {
        self.soft_recall
            .iter()
            .find(|(t, _)| (t - threshold).abs() < 1e-12)
            .map(|&(_, r)| r)
    }

    /// Table row with recall percentages: `strict  1.00  0.99 ...`.
    pub fn render_table(&self, label: &str) -> String {
        let mut header = format!("{:<16}{:>8}", "features", "strict");
        let mut row = format!("{label:<16}{:>8.1}", 100.0 * self.strict_recall);
        for (t, r) in &self.soft_recall {
            let _ = write!(header, "{t:>8.2}");
            let _ = write!(row, "{:>8.1}", 100.0 * r);
        }
        format!("{header}\n{row}\n")
    }

    /// One metric per line, `name\tvalue`.
    pub fn render_key_values(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "total_gold\t{}", self.total_gold);
        let _ = writeln!(out, "strict_recall\t{:.6}", self.strict_recall);
        for (t, r) in &self.soft_recall {
            let _ = writeln!(out, "soft_recall@{t:.2}\t{r:.6}");
        }
        let mut rows: Vec<(&String, &usize)> = self.per_domain_misses.iter().collect();
        rows.sort_by(|a, b| b.1.cmp(a.1).then(a.0.cmp(b.0)));
        for (d, n) in rows {
            let _ = writeln!(out, "missed@{:.2}[{d}]\t{n}", self.miss_threshold);
        }
        out
    }
}

/// Strict recall, soft recall at every threshold and per-domain misses.
pub fn evaluate(
    predicted: &[(String, String)],
    gold: &PairList,
    corpus: &Corpus,
    thresholds: &[f64],
    mode: SoftMatchMode,
) -> Result<EvalReport> {
    let strict = strict_recall(predicted, gold)?;
    let sims = gold_similarities(predicted, gold, corpus, mode)?;
    let soft_recall = thresholds.iter().map(|&t| (t, recall_at(&sims, t))).collect();
    Ok(EvalReport {
        strict_recall: strict,
        soft_recall,
        miss_threshold: MISS_THRESHOLD,
        per_domain_misses: misses_from(&sims, gold, corpus, MISS_THRESHOLD),
        total_gold: gold.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Document;
    use proptest::prelude::*;

    fn pairs(items: &[(&str, &str)]) -> Vec<(String, String)> {
        items.iter().map(|(s, t)| (s.to_string(), t.to_string())).collect()
    }

    fn gold(items: &[(&str, &str)]) -> PairList {
        PairList::new(pairs(items)).unwrap()
    }

    fn corpus(items: &[(&str, &str, &str, &str)]) -> Corpus {
        Corpus::new(
            items
                .iter()
                .map(|&(domain, lang, url, text)| Document {
                    domain: domain.into(),
                    lang: lang.into(),
                    url: url.into(),
                    text: text.into(),
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn strict_examples() {
        let g = gold(&[("a", "1"), ("b", "2"), ("c", "3"), ("d", "4")]);
        assert_eq!(
            strict_recall(&pairs(&[("a", "1"), ("b", "2"), ("c", "3"), ("d", "4")]), &g).unwrap(),
            1.0
        );
        assert_eq!(strict_recall(&pairs(&[("a", "2")]), &g).unwrap(), 0.0);
        assert_eq!(
            strict_recall(&pairs(&[("a", "1"), ("b", "2"), ("c", "3"), ("d", "5")]), &g).unwrap(),
            0.75
        );
        assert!(strict_recall(&[], &PairList::default()).is_err());
    }

    #[test]
    fn similarity_examples() {
        assert_eq!(soft_doc_similarity("x y z", "x y z"), 1.0);
        assert_eq!(soft_doc_similarity("a b c d", "a b x d"), 0.75);
        assert_eq!(soft_doc_similarity("a b", "c d"), 0.0);
        assert_eq!(soft_doc_similarity("", ""), 1.0);
        assert_eq!(soft_doc_similarity("a", ""), 0.0);
        // tokens are not case folded
        assert_eq!(soft_doc_similarity("A", "a"), 0.0);
    }

    fn dup_corpus() -> Corpus {
        corpus(&[
            ("d", "en", "e1", "one two three"),
            ("d", "en", "e2", "four five six"),
            ("d", "fr", "f1", "un deux trois"),
            ("d", "fr", "f1dup", "un deux trois"),
            ("d", "fr", "f2", "quatre cinq six sept huit neuf dix onze douze treize"),
            (
                "d",
                "fr",
                "f2near",
                "quatre cinq six sept huit neuf dix onze douze XIII",
            ),
            ("x", "en", "x1", "alpha"),
            ("x", "fr", "y1", "beta"),
        ])
    }

    #[test]
    fn duplicates_count_as_soft_matches() {
        let c = dup_corpus();
        let g = gold(&[("e1", "f1"), ("e2", "f2"), ("x1", "y1")]);
        let predicted = pairs(&[("e1", "f1dup"), ("e2", "f2near"), ("x1", "y1")]);
        assert!((strict_recall(&predicted, &g).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let at = |t| soft_recall(&predicted, &g, &c, t, SoftMatchMode::Either).unwrap();
        assert!((at(1.0) - 2.0 / 3.0).abs() < 1e-15);
        // f2near shares 9 of 10 tokens: 0.9, below 0.95
        assert!((at(0.95) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(at(0.9), 1.0);

        let misses = miss_report(&predicted, &g, &c, 0.95, SoftMatchMode::Either).unwrap();
        assert_eq!(misses, BTreeMap::from([("d".to_string(), 1)]));
        assert!(miss_report(
            &pairs(&[("e1", "f1"), ("e2", "f2"), ("x1", "y1")]),
            &g,
            &c,
            0.95,
            SoftMatchMode::Either
        )
        .unwrap()
        .is_empty());
    }

    #[test]
    fn source_side_and_both_mode() {
        let c = dup_corpus();
        let g = gold(&[("e1", "f1")]);
        // f1 is predicted only for e2, whose text shares nothing with e1
        let predicted = pairs(&[("e2", "f1")]);
        assert_eq!(
            soft_recall(&predicted, &g, &c, 0.5, SoftMatchMode::Either).unwrap(),
            0.0
        );
        let predicted = pairs(&[("e1", "f1dup")]);
        assert_eq!(
            soft_recall(&predicted, &g, &c, 1.0, SoftMatchMode::Either).unwrap(),
            1.0
        );
        // the target side has no prediction at all
        assert_eq!(soft_recall(&predicted, &g, &c, 1.0, SoftMatchMode::Both).unwrap(), 0.0);
        let exact = pairs(&[("e1", "f1")]);
        assert_eq!(soft_recall(&exact, &g, &c, 1.0, SoftMatchMode::Both).unwrap(), 1.0);
        assert!(matches!(
            soft_recall(&pairs(&[("e1", "nope")]), &g, &c, 1.0, SoftMatchMode::Either),
            Err(Error::UnknownUrl(_))
        ));
    }

    #[test]
    fn report_rendering() {
        let c = dup_corpus();
        let g = gold(&[("e1", "f1"), ("e2", "f2"), ("x1", "y1")]);
        let predicted = pairs(&[("e1", "f1dup"), ("e2", "f2near"), ("x1", "y1")]);
        let report = evaluate(&predicted, &g, &c, &DEFAULT_THRESHOLDS, SoftMatchMode::Either).unwrap();
        let table = report.render_table("cos+lcos+url");
        let header: Vec<&str> = table.lines().next().unwrap().split_whitespace().collect();
        assert_eq!(header, vec!["features", "strict", "1.00", "0.99", "0.95", "0.90"]);
        assert!(table.lines().nth(1).unwrap().contains("33.3"));
        let kv = report.render_key_values();
        assert!(kv.contains("strict_recall\t0.333333\n"));
        assert!(kv.contains("soft_recall@0.90\t1.000000\n"));
        assert!(kv.contains("missed@0.95[d]\t1\n"));
        assert_eq!(report.soft_at(0.95), Some(2.0 / 3.0));
    }

    #[test]
    fn miss_table_shape() {
        let misses = BTreeMap::from([
            ("www.lagardere.com".to_string(), 20),
            ("b.org".to_string(), 1),
            ("a.org".to_string(), 3),
            ("c.org".to_string(), 1),
        ]);
        let rendered = render_misses(&misses);
        let rows: Vec<Vec<&str>> = rendered.lines().map(|l| l.split_whitespace().collect()).collect();
        assert_eq!(rows[1], vec!["www.lagardere.com", "20"]);
        assert_eq!(rows[2], vec!["a.org", "3"]);
        assert_eq!(rows[3], vec!["other", "2"]);
        assert_eq!(rows.len(), 4);
    }

    proptest! {
        #[test]
        fn similarity_symmetric_and_bounded(a in proptest::collection::vec("[a-d]", 0..12), b in proptest::collection::vec("[a-d]", 0..12)) {
            let (ta, tb) = (a.join(" "), b.join(" "));
            let s = soft_doc_similarity(&ta, &tb);
            prop_assert!((0.0..=1.0).contains(&s));
            prop_assert_eq!(s, soft_doc_similarity(&tb, &ta));
            prop_assert_eq!(s == 1.0, a == b);
        }
    }
}
