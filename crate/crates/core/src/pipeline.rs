//! End-to-end runs: train, align, evaluate, and the included / held-out /
//! leave-one-domain-out regimes.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use log::info;
use rayon::prelude::*;

use crate::config::{Exclusion, PipelineConfig};
use crate::corpus::{load_corpus, load_pairs, Corpus, PairList};
use crate::error::{Error, Result};
use crate::eval::{evaluate, EvalReport};
use crate::linking::{
    align_corpus, competitive_link, format_alignments, load_alignments, rank_hypotheses, score_domain,
    AlignmentHypothesis, LinkConfig, OutputMode,
};
use crate::lsi::{embed, embed_corpus, train_lsi, Embedding, LsiModel};
use crate::scoring::DomainUrlStats;
use crate::vectorizer::{build_term_doc_matrix, build_vocabulary, doc_to_column, DomainIdf, Vocabulary};

/// Corpus-wide statistics shared by every model trained on the collection.
#[derive(Debug, Clone)]
pub struct Features {
    pub vocab: Vocabulary,
    pub idf: DomainIdf,
    pub url_stats: DomainUrlStats,
}

impl Features {
    pub fn build(corpus: &Corpus, config: &PipelineConfig) -> Result<Self> {
        corpus.check_languages(&config.src_lang, &config.tgt_lang)?;
        Ok(Features {
            vocab: build_vocabulary(corpus)?,
            idf: DomainIdf::build(corpus, config.idf_scope),
            url_stats: DomainUrlStats::build(corpus, config.url_count_scope),
        })
    }
}

/// Builds the bilingual matrix over `pairs` and factorizes it.
pub fn train_model(
    corpus: &Corpus,
    features: &Features,
    pairs: &PairList,
    config: &PipelineConfig,
) -> Result<LsiModel> {
    let matrix = build_term_doc_matrix(corpus, pairs, &features.vocab, &features.idf)?;
    info!(
        "term-document matrix: {} terms x {} pairs, {} nonzeros",
        matrix.nrows(),
        matrix.ncols(),
        matrix.matrix.nnz()
    );
    if let Some(path) = &config.dump_matrix {
        matrix.write_dump(path)?;
    }
    let model = train_lsi(&matrix, config.svd_params())?;
    let head: Vec<String> = model.singular.iter().take(5).map(|s| format!("{s:.4}")).collect();
    info!(
        "rank {} model, leading singular values [{}]",
        model.rank(),
        head.join(", ")
    );
    Ok(model)
}

/// Aligns every domain of the corpus with one model.
pub fn align_with_model(
    corpus: &Corpus,
    features: &Features,
    model: &LsiModel,
    config: &PipelineConfig,
) -> Result<Vec<AlignmentHypothesis>> {
    let embeddings = embed_corpus(corpus, model, &features.vocab, &features.idf, config.embedding_scaling)?;
    align_corpus(
        corpus,
        &embeddings,
        &features.url_stats,
        &config.link_config(),
        config.output_mode,
    )
}

/// Embeddings for one domain's documents; every other slot is left zero.
fn embed_domain(
    corpus: &Corpus,
    features: &Features,
    model: &LsiModel,
    domain: &str,
    config: &PipelineConfig,
) -> Result<Vec<Embedding>> {
    if model.vocab_fingerprint != features.vocab.fingerprint() {
        return Err(Error::FingerprintMismatch);
    }
    let mut out = vec![Embedding::zeros(model.rank()); corpus.len()];
    for &id in corpus.domain_docs(domain) {
        let column = doc_to_column(corpus.get(id), &features.vocab, &features.idf)?;
        out[id] = embed(&column, model, config.embedding_scaling)?;
    }
    Ok(out)
}

fn align_domain(
    corpus: &Corpus,
    features: &Features,
    model: &LsiModel,
    domain: &str,
    config: &PipelineConfig,
    link: &LinkConfig,
) -> Result<Vec<AlignmentHypothesis>> {
    let embeddings = embed_domain(corpus, features, model, domain, config)?;
    let ranked = score_domain(domain, corpus, &embeddings, &features.url_stats, link)?;
    Ok(match config.output_mode {
        OutputMode::Links => competitive_link(&ranked),
        OutputMode::RankedList => ranked,
    })
}

pub fn hypotheses_to_pairs(hyps: &[AlignmentHypothesis], corpus: &Corpus) -> Vec<(String, String)> {
    hyps.iter()
        .map(|h| (corpus.get(h.src).url.clone(), corpus.get(h.tgt).url.clone()))
        .collect()
}

/// Domain of each pair's source document; every URL must resolve.
fn pair_domains(pairs: &PairList, corpus: &Corpus) -> Result<Vec<String>> {
    pairs
        .iter()
        .map(|(s, t)| {
            corpus.resolve(t)?;
            Ok(corpus.get(corpus.resolve(s)?).domain.clone())
        })
        .collect()
}

/// Links of one left-out domain and the size of its training set.
type DomainRun = (Vec<AlignmentHypothesis>, (String, usize));

/// Result of one alignment-plus-evaluation run.
#[derive(Debug, Clone)]
pub struct RegimeOutcome {
    pub alignments: Vec<AlignmentHypothesis>,
    pub report: EvalReport,
    /// Number of training pairs behind each model, in training order.
    pub training_pairs: Vec<(String, usize)>,
}

/// Trains, aligns and evaluates under the configured exclusion regime.
///
/// * `None`: one model over all training pairs.
/// * `Heldout`: one model over the training pairs outside every gold domain.
/// * `Loo`: for each gold domain, a model over the training pairs of all
///   other domains; that model aligns only its domain.
pub fn run_regime(
    corpus: &Corpus,
    features: &Features,
    train: &PairList,
    gold: &PairList,
    config: &PipelineConfig,
) -> Result<RegimeOutcome> {
    config.validate()?;
    let train_domains = pair_domains(train, corpus)?;
    let gold_domains: BTreeSet<String> = pair_domains(gold, corpus)?.into_iter().collect();
    let without = |excluded: &dyn Fn(&str) -> bool| -> PairList {
        let mut i = 0;
        train.filter(|_, _| {
            let keep = !excluded(&train_domains[i]);
            i += 1;
            keep
        })
    };

    let (alignments, training_pairs) = match config.exclusion {
        Exclusion::None => {
            let model = train_model(corpus, features, train, config)?;
            let aligned = align_with_model(corpus, features, &model, config)?;
            (aligned, vec![("all".to_string(), train.len())])
        }
        Exclusion::Heldout => {
            let subset = without(&|d| gold_domains.contains(d));
            info!("held-out training: {} of {} pairs", subset.len(), train.len());
            if subset.is_empty() {
                return Err(Error::Config("no training pairs outside the evaluation domains".into()));
            }
            let model = train_model(corpus, features, &subset, config)?;
            let aligned = align_with_model(corpus, features, &model, config)?;
            (aligned, vec![("heldout".to_string(), subset.len())])
        }
        Exclusion::Loo => {
            if gold_domains.len() < 2 {
                return Err(Error::Config(
                    "leave-one-domain-out needs gold pairs from at least two domains".into(),
                ));
            }
            let link = config.link_config();
            let run = || -> Result<Vec<DomainRun>> {
                gold_domains
                    .par_iter()
                    .map(|domain| {
                        let subset = without(&|d| d == domain);
                        info!("domain {domain}: training on {} of {} pairs", subset.len(), train.len());
                        let model = train_model(corpus, features, &subset, config)?;
                        let aligned = align_domain(corpus, features, &model, domain, config, &link)?;
                        Ok((aligned, (domain.clone(), subset.len())))
                    })
                    .collect()
            };
            let per_domain = if config.workers > 0 {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(config.workers)
                    .build()
                    .map_err(|e| Error::Config(e.to_string()))?
                    .install(run)?
            } else {
                run()?
            };
            let mut aligned = Vec::new();
            let mut counts = Vec::new();
            for (hyps, count) in per_domain {
                aligned.extend(hyps);
                counts.push(count);
            }
            rank_hypotheses(&mut aligned, corpus);
            (aligned, counts)
        }
    };

    let predicted = hypotheses_to_pairs(&alignments, corpus);
    let report = evaluate(&predicted, gold, corpus, &config.thresholds, config.soft_match)?;
    Ok(RegimeOutcome {
        alignments,
        report,
        training_pairs,
    })
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// `train`: builds the matrix over `--train-pairs` and writes `--model`.
pub fn cmd_train(config: &PipelineConfig) -> Result<LsiModel> {
    config.validate()?;
    let corpus = load_corpus(config.require(&config.docs, "docs")?)?;
    let pairs = load_pairs(config.require(&config.train_pairs, "train-pairs")?)?;
    let model_path = config.require(&config.model, "model")?;
    let features = Features::build(&corpus, config)?;
    let model = train_model(&corpus, &features, &pairs, config)?;
    model.save(model_path)?;
    Ok(model)
}

/// `align`: embeds the collection with `--model` and writes the alignment
/// TSV to `--out`.
pub fn cmd_align(config: &PipelineConfig) -> Result<Vec<AlignmentHypothesis>> {
    config.validate()?;
    let corpus = load_corpus(config.require(&config.docs, "docs")?)?;
    let model = LsiModel::load(config.require(&config.model, "model")?)?;
    let out = config.require(&config.out, "out")?;
    let features = Features::build(&corpus, config)?;
    let aligned = align_with_model(&corpus, &features, &model, config)?;
    write(out, &format_alignments(&aligned, &corpus))?;
    Ok(aligned)
}

/// `evaluate`: scores `--alignment` against `--gold-pairs`. The key-value
/// report goes to `--out` when given.
pub fn cmd_evaluate(config: &PipelineConfig) -> Result<EvalReport> {
    config.validate()?;
    let corpus = load_corpus(config.require(&config.docs, "docs")?)?;
    let gold = load_pairs(config.require(&config.gold_pairs, "gold-pairs")?)?;
    let predicted = load_alignments(config.require(&config.alignment, "alignment")?)?;
    let report = evaluate(&predicted, &gold, &corpus, &config.thresholds, config.soft_match)?;
    if let Some(out) = &config.out {
        write(out, &report.render_key_values())?;
    }
    Ok(report)
}

/// `loo`: runs the `--exclusion` regime end to end. Writes the key-value
/// report to `--out` and, when `--alignment` is set, the alignments there.
pub fn cmd_loo(config: &PipelineConfig) -> Result<RegimeOutcome> {
    config.validate()?;
    let corpus = load_corpus(config.require(&config.docs, "docs")?)?;
    let gold = load_pairs(config.require(&config.gold_pairs, "gold-pairs")?)?;
    let train = match &config.train_pairs {
        Some(path) => load_pairs(path)?,
        None => gold.clone(),
    };
    let features = Features::build(&corpus, config)?;
    let outcome = run_regime(&corpus, &features, &train, &gold, config)?;
    if let Some(out) = &config.out {
        write(out, &outcome.report.render_key_values())?;
    }
    if let Some(path) = &config.alignment {
        write(path, &format_alignments(&outcome.alignments, &corpus))?;
    }
    Ok(outcome)
}
