//! Candidate generation, score combination and competitive linking.
//!
//! Candidates are all cross-lingual pairs inside one domain. Each enabled
//! scorer is min-max normalized over the domain's candidate set before the
//! weighted mean is taken, so the unbounded URL score and the cosines share
//! a scale.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::corpus::{tokenize_url, Corpus, DocId, UrlTokens};
use crate::error::{Error, Result};
use crate::lsi::Embedding;
use crate::scoring::{cosine, domain_mean, local_cosine, url_similarity, DomainUrlStats, ScoreTriple};

#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentHypothesis {
    pub src: DocId,
    pub tgt: DocId,
    pub scores: ScoreTriple,
    pub combined: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    #[default]
    MinMax,
    /// Raw weighted sum; ablation only.
    None,
}

/// Scorer weights. A weight of zero disables the scorer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightConfig {
    pub cos: f64,
    pub lcos: f64,
    pub url: f64,
    pub normalization: Normalization,
}

impl Default for WeightConfig {
    fn default() -> Self {
        WeightConfig::uniform(true, true, true)
    }
}

impl WeightConfig {
    /// Equal weights over the chosen scorers.
    pub fn uniform(cos: bool, lcos: bool, url: bool) -> Self {
        let w = |on: bool| if on { 1.0 } else { 0.0 };
        WeightConfig {
            cos: w(cos),
            lcos: w(lcos),
            url: w(url),
            normalization: Normalization::MinMax,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ws = [self.cos, self.lcos, self.url];
        if ws.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Config("scorer weights must be finite and non-negative".into()));
        }
        if ws.iter().all(|&w| w == 0.0) {
            return Err(Error::Config("at least one scorer weight must be positive".into()));
        }
        Ok(())
    }

    /// Short label such as `cos+lcos+url`.
    pub fn label(&self) -> String {
        let mut parts = Vec::new();
        if self.cos > 0.0 {
            parts.push("cos");
        }
        if self.lcos > 0.0 {
            parts.push("lcos");
        }
        if self.url > 0.0 {
            parts.push("url");
        }
        parts.join("+")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkConfig {
    pub source_lang: String,
    pub target_lang: String,
    pub weights: WeightConfig,
    /// Keep only candidates among the `top_k` cosine neighbours of either
    /// side. 0 keeps all pairs.
    pub top_k: usize,
}

impl Default for LinkConfig {
    fn default() -> Self {
        LinkConfig {
            source_lang: "en".into(),
            target_lang: "fr".into(),
            weights: WeightConfig::default(),
            top_k: 0,
        }
    }
}

/// Scores every source/target pair of one domain with the enabled scorers.
pub fn generate_hypotheses(
    domain: &str,
    corpus: &Corpus,
    embeddings: &[Embedding],
    stats: &DomainUrlStats,
    config: &LinkConfig,
) -> Result<Vec<AlignmentHypothesis>> {
    let docs = corpus.domain_docs(domain);
    let sources: Vec<DocId> = docs
        .iter()
        .copied()
        .filter(|&id| corpus.get(id).lang == config.source_lang)
        .collect();
    let targets: Vec<DocId> = docs
        .iter()
        .copied()
        .filter(|&id| corpus.get(id).lang == config.target_lang)
        .collect();
    if sources.is_empty() || targets.is_empty() {
        return Ok(Vec::new());
    }
    if let Some(&missing) = docs.iter().find(|&&id| id >= embeddings.len()) {
        return Err(Error::DimensionMismatch {
            expected: missing + 1,
            actual: embeddings.len(),
        });
    }

    let w = &config.weights;
    let need_cos = w.cos > 0.0 || config.top_k > 0;
    let mean = if w.lcos > 0.0 {
        Some(domain_mean(docs.iter().map(|&id| &embeddings[id]))?)
    } else {
        None
    };
    let (counts, url_tokens) = if w.url > 0.0 {
        let counts = stats.domain(domain)?;
        let tokens: HashMap<DocId, UrlTokens> =
            docs.iter().map(|&id| (id, tokenize_url(&corpus.get(id).url))).collect();
        (Some(counts), tokens)
    } else {
        (None, HashMap::new())
    };
    let tokens_of = |id: DocId| -> &UrlTokens { &url_tokens[&id] };

    let mut hyps = Vec::with_capacity(sources.len() * targets.len());
    for &s in &sources {
        for &t in &targets {
            let (a, b) = (embeddings[s].as_slice(), embeddings[t].as_slice());
            let mut scores = ScoreTriple::default();
            if need_cos {
                scores.cos = cosine(a, b);
            }
            if let Some(mean) = &mean {
                scores.lcos = local_cosine(a, b, mean);
            }
            if let Some(counts) = counts {
                scores.url = url_similarity(tokens_of(s), tokens_of(t), counts)?;
            }
            hyps.push(AlignmentHypothesis {
                src: s,
                tgt: t,
                scores,
                combined: 0.0,
            });
        }
    }
    if config.top_k > 0 {
        hyps = prune_top_k(hyps, config.top_k);
    }
    Ok(hyps)
}

fn prune_top_k(hyps: Vec<AlignmentHypothesis>, k: usize) -> Vec<AlignmentHypothesis> {
    let key = |h: &AlignmentHypothesis| h.scores.cos.unwrap_or(f64::NEG_INFINITY);
    let mut keep = HashSet::new();
    for by_src in [true, false] {
        let mut order: Vec<usize> = (0..hyps.len()).collect();
        order.sort_by(|&i, &j| {
            let (a, b) = (&hyps[i], &hyps[j]);
            let group = if by_src { a.src.cmp(&b.src) } else { a.tgt.cmp(&b.tgt) };
            group
                .then(key(b).total_cmp(&key(a)))
                .then(a.src.cmp(&b.src))
                .then(a.tgt.cmp(&b.tgt))
        });
        let mut current = None;
        let mut taken = 0;
        for i in order {
            let g = if by_src { hyps[i].src } else { hyps[i].tgt };
            if current != Some(g) {
                current = Some(g);
                taken = 0;
            }
            if taken < k {
                keep.insert(i);
                taken += 1;
            }
        }
    }
    hyps.into_iter()
        .enumerate()
        .filter(|(i, _)| keep.contains(i))
        .map(|(_, h)| h)
        .collect()
}

/// Normalized (or raw) values of one scorer; undefined entries take the
/// scorer's minimum.
fn scorer_values(raw: &[Option<f64>], normalization: Normalization) -> Vec<f64> {
    let defined = raw.iter().flatten().copied();
    let (lo, hi) = defined.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
    if lo > hi {
        // nothing defined
        let fill = match normalization {
            Normalization::MinMax => 0.5,
            Normalization::None => 0.0,
        };
        return vec![fill; raw.len()];
    }
    match normalization {
        Normalization::None => raw.iter().map(|v| v.unwrap_or(lo)).collect(),
        Normalization::MinMax if hi == lo => vec![0.5; raw.len()],
        Normalization::MinMax => raw.iter().map(|v| (v.unwrap_or(lo) - lo) / (hi - lo)).collect(),
    }
}

type Getter = fn(&AlignmentHypothesis) -> Option<f64>;

/// Fills in `combined` as the weighted mean of the enabled scorers.
pub fn combine_scores(hyps: &mut [AlignmentHypothesis], weights: &WeightConfig) {
    let total = weights.cos + weights.lcos + weights.url;
    let mut combined = vec![0.0; hyps.len()];
    let scorers: [(f64, Getter); 3] = [
        (weights.cos, |h| h.scores.cos),
        (weights.lcos, |h| h.scores.lcos),
        (weights.url, |h| Some(h.scores.url)),
    ];
    for (w, get) in scorers.iter() {
        if *w <= 0.0 {
            continue;
        }
        let raw: Vec<Option<f64>> = hyps.iter().map(get).collect();
        for (c, v) in combined.iter_mut().zip(scorer_values(&raw, weights.normalization)) {
            *c += w * v;
        }
    }
    for (h, c) in hyps.iter_mut().zip(combined) {
        h.combined = if total > 0.0 { c / total } else { 0.0 };
    }
}

fn rank_order(a: &AlignmentHypothesis, b: &AlignmentHypothesis, corpus: &Corpus) -> Ordering {
    b.combined
        .total_cmp(&a.combined)
        .then_with(|| corpus.get(a.src).url.cmp(&corpus.get(b.src).url))
        .then_with(|| corpus.get(a.tgt).url.cmp(&corpus.get(b.tgt).url))
}

/// Sorts by descending combined score, ties by source then target URL.
pub fn rank_hypotheses(hyps: &mut [AlignmentHypothesis], corpus: &Corpus) {
    hyps.sort_by(|a, b| rank_order(a, b, corpus));
}

/// Greedy 1:1 selection over an already ranked list: a hypothesis is kept
/// unless its source or target was taken by an earlier one.
pub fn competitive_link(ranked: &[AlignmentHypothesis]) -> Vec<AlignmentHypothesis> {
    let mut used_src = HashSet::new();
    let mut used_tgt = HashSet::new();
    let mut kept = Vec::new();
    for h in ranked {
        if used_src.contains(&h.src) || used_tgt.contains(&h.tgt) {
            continue;
        }
        used_src.insert(h.src);
        used_tgt.insert(h.tgt);
        kept.push(h.clone());
    }
    kept
}

/// Scored, combined and ranked hypotheses of one domain.
pub fn score_domain(
    domain: &str,
    corpus: &Corpus,
    embeddings: &[Embedding],
    stats: &DomainUrlStats,
    config: &LinkConfig,
) -> Result<Vec<AlignmentHypothesis>> {
    let mut hyps = generate_hypotheses(domain, corpus, embeddings, stats, config)?;
    combine_scores(&mut hyps, &config.weights);
    rank_hypotheses(&mut hyps, corpus);
    Ok(hyps)
}

/// What an alignment run produces for the whole collection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputMode {
    /// 1:1 links from competitive linking.
    #[default]
    Links,
    /// Every scored hypothesis.
    RankedList,
}

/// Runs every domain (in parallel) and merges the results into one list,
/// ranked globally.
pub fn align_corpus(
    corpus: &Corpus,
    embeddings: &[Embedding],
    stats: &DomainUrlStats,
    config: &LinkConfig,
    mode: OutputMode,
) -> Result<Vec<AlignmentHypothesis>> {
    config.weights.validate()?;
    let domains: Vec<&str> = corpus.domains().collect();
    let per_domain: Vec<Vec<AlignmentHypothesis>> = domains
        .par_iter()
        .map(|d| {
            let ranked = score_domain(d, corpus, embeddings, stats, config)?;
            Ok(match mode {
                OutputMode::Links => competitive_link(&ranked),
                OutputMode::RankedList => ranked,
            })
        })
        .collect::<Result<_>>()?;
    let mut all: Vec<AlignmentHypothesis> = per_domain.into_iter().flatten().collect();
    rank_hypotheses(&mut all, corpus);
    Ok(all)
}

/// Alignment TSV: `score\tsrc_url\ttgt_url`, six decimals, in list order.
pub fn format_alignments(hyps: &[AlignmentHypothesis], corpus: &Corpus) -> String {
    let mut out = String::new();
    for h in hyps {
        let _ = writeln!(
            out,
            "{:.6}\t{}\t{}",
            h.combined,
            corpus.get(h.src).url,
            corpus.get(h.tgt).url
        );
    }
    out
}

/// Writes hypotheses ranked by descending score.
pub fn emit_ranked_list(hyps: &[AlignmentHypothesis], corpus: &Corpus, path: impl AsRef<Path>) -> Result<()> {
    let mut ranked = hyps.to_vec();
    rank_hypotheses(&mut ranked, corpus);
    let path = path.as_ref();
    fs::write(path, format_alignments(&ranked, corpus)).map_err(|e| Error::io(path, e))
}

/// Reads the `(src_url, tgt_url)` pairs of an alignment file, in file order.
pub fn parse_alignments(input: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 || fields[0].parse::<f64>().is_err() {
            return Err(Error::Parse {
                line: idx + 1,
                message: "expected score\\tsrc_url\\ttgt_url".into(),
            });
        }
        out.push((fields[1].to_string(), fields[2].to_string()));
    }
    Ok(out)
}

pub fn load_alignments(path: impl AsRef<Path>) -> Result<Vec<(String, String)>> {
    let path = path.as_ref();
    let input = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_alignments(&input)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Document;
    use crate::scoring::UrlCountScope;

    fn doc(domain: &str, lang: &str, url: &str) -> Document {
        Document {
            domain: domain.into(),
            lang: lang.into(),
            url: url.into(),
            text: String::new(),
        }
    }

    fn hyp(src: DocId, tgt: DocId, combined: f64) -> AlignmentHypothesis {
        AlignmentHypothesis {
            src,
            tgt,
            scores: ScoreTriple::default(),
            combined,
        }
    }

    fn two_by_three() -> (Corpus, Vec<Embedding>) {
        let corpus = Corpus::new(vec![
            doc("d", "en", "http://d/en/a"),
            doc("d", "en", "http://d/en/b"),
            doc("d", "fr", "http://d/fr/a"),
            doc("d", "fr", "http://d/fr/b"),
            doc("d", "fr", "http://d/fr/c"),
            doc("e", "en", "http://e/en/a"),
        ])
        .unwrap();
        let emb = vec![
            Embedding(vec![1.0, 0.0]),
            Embedding(vec![0.0, 1.0]),
            Embedding(vec![0.9, 0.1]),
            Embedding(vec![0.1, 0.9]),
            Embedding(vec![0.6, 0.3]),
            Embedding(vec![1.0, 1.0]),
        ];
        (corpus, emb)
    }

    #[test]
    fn hypotheses_are_cross_lingual_and_within_domain() {
        let (corpus, emb) = two_by_three();
        let stats = DomainUrlStats::build(&corpus, UrlCountScope::Domain);
        let config = LinkConfig::default();
        let hyps = generate_hypotheses("d", &corpus, &emb, &stats, &config).unwrap();
        assert_eq!(hyps.len(), 6);
        for h in &hyps {
            assert_eq!(corpus.get(h.src).lang, "en");
            assert_eq!(corpus.get(h.tgt).lang, "fr");
            assert!(h.scores.cos.is_some() && h.scores.lcos.is_some());
        }
        assert!(generate_hypotheses("e", &corpus, &emb, &stats, &config)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn top_k_pruning_keeps_nearest() {
        let (corpus, emb) = two_by_three();
        let stats = DomainUrlStats::build(&corpus, UrlCountScope::Domain);
        let config = LinkConfig {
            top_k: 1,
            ..LinkConfig::default()
        };
        let hyps = generate_hypotheses("d", &corpus, &emb, &stats, &config).unwrap();
        let pairs: HashSet<(DocId, DocId)> = hyps.iter().map(|h| (h.src, h.tgt)).collect();
        assert!(pairs.contains(&(0, 2)) && pairs.contains(&(1, 3)));
        assert!(pairs.len() < 6);
    }

    #[test]
    fn combination_examples() {
        let mut hyps = vec![hyp(0, 2, 0.0), hyp(1, 3, 0.0)];
        hyps[0].scores = ScoreTriple {
            cos: Some(0.2),
            lcos: None,
            url: 4.0,
        };
        hyps[1].scores = ScoreTriple {
            cos: Some(0.8),
            lcos: None,
            url: 1.0,
        };
        combine_scores(&mut hyps, &WeightConfig::uniform(true, false, true));
        assert_eq!(hyps[0].combined, 0.5);
        assert_eq!(hyps[1].combined, 0.5);

        combine_scores(&mut hyps, &WeightConfig::uniform(true, false, false));
        assert_eq!((hyps[0].combined, hyps[1].combined), (0.0, 1.0));

        // lcos undefined everywhere: treated as a constant scorer
        combine_scores(&mut hyps, &WeightConfig::uniform(false, true, false));
        assert_eq!((hyps[0].combined, hyps[1].combined), (0.5, 0.5));

        let mut raw = WeightConfig::uniform(true, false, true);
        raw.normalization = Normalization::None;
        combine_scores(&mut hyps, &raw);
        assert!((hyps[0].combined - 2.1).abs() < 1e-15);
        assert!((hyps[1].combined - 0.9).abs() < 1e-15);
    }

    #[test]
    fn undefined_cosine_is_minimum() {
        let mut hyps = vec![hyp(0, 2, 0.0), hyp(1, 3, 0.0), hyp(0, 3, 0.0)];
        hyps[0].scores.cos = None;
        hyps[1].scores.cos = Some(-0.5);
        hyps[2].scores.cos = Some(0.5);
        combine_scores(&mut hyps, &WeightConfig::uniform(true, false, false));
        assert_eq!(hyps.iter().map(|h| h.combined).collect::<Vec<_>>(), vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn weight_validation() {
        assert!(WeightConfig::uniform(false, false, false).validate().is_err());
        let w = WeightConfig {
            url: -1.0,
            ..WeightConfig::default()
        };
        assert!(w.validate().is_err());
        assert_eq!(WeightConfig::default().label(), "cos+lcos+url");
    }

    #[test]
    fn greedy_trace() {
        // e1=0, e2=1, f1=2, f2=3
        let ranked = vec![hyp(0, 2, 0.9), hyp(1, 2, 0.85), hyp(0, 3, 0.8), hyp(1, 3, 0.2)];
        let kept: Vec<(DocId, DocId)> = competitive_link(&ranked).iter().map(|h| (h.src, h.tgt)).collect();
        assert_eq!(kept, vec![(0, 2), (1, 3)]);
        assert_eq!(competitive_link(&[hyp(4, 5, 0.1)]).len(), 1);
    }

    #[test]
    fn ties_broken_by_urls() {
        let (corpus, _) = two_by_three();
        let mut hyps = vec![hyp(1, 2, 0.5), hyp(0, 2, 0.5)];
        rank_hypotheses(&mut hyps, &corpus);
        let kept = competitive_link(&hyps);
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].src, 0);
    }

    #[test]
    fn alignment_file_format() {
        let (corpus, _) = two_by_three();
        let hyps = vec![hyp(1, 3, 0.25), hyp(0, 2, 0.875), hyp(0, 4, 0.5)];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.tsv");
        emit_ranked_list(&hyps, &corpus, &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(
            text,
            "0.875000\thttp://d/en/a\thttp://d/fr/a\n\
             0.500000\thttp://d/en/a\thttp://d/fr/c\n\
             0.250000\thttp://d/en/b\thttp://d/fr/b\n"
        );
        assert_eq!(
            parse_alignments(&text).unwrap()[2],
            ("http://d/en/b".into(), "http://d/fr/b".into())
        );
        emit_ranked_list(&[], &corpus, &path).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "");
        assert!(parse_alignments("x\ty\n").is_err());
    }
}
