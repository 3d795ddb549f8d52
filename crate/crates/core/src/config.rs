//! Pipeline configuration: flat `key=value` files whose keys are the CLI
//! flag names (`rank = 32`, `train-pairs = data/train.tsv`, ...).

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::eval::{SoftMatchMode, DEFAULT_THRESHOLDS};
use crate::linking::{LinkConfig, Normalization, OutputMode, WeightConfig};
use crate::lsi::EmbeddingScaling;
use crate::rsvd::RsvdParams;
use crate::scoring::UrlCountScope;
use crate::vectorizer::IdfScope;

/// How known pairs of the evaluated domains enter the training matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exclusion {
    /// All training pairs are used ("included").
    #[default]
    None,
    /// One model trained without any pair from an evaluation domain.
    Heldout,
    /// One model per evaluation domain, trained without that domain's pairs.
    Loo,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub docs: Option<PathBuf>,
    pub train_pairs: Option<PathBuf>,
    pub gold_pairs: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub alignment: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub dump_matrix: Option<PathBuf>,
    pub rank: usize,
    pub seed: u64,
    pub oversample: usize,
    pub power_iters: usize,
    pub weights: WeightConfig,
    pub thresholds: Vec<f64>,
    pub exclusion: Exclusion,
    pub src_lang: String,
    pub tgt_lang: String,
    pub top_k: usize,
    /// 0 lets the thread pool decide.
    pub workers: usize,
    pub embedding_scaling: EmbeddingScaling,
    pub idf_scope: IdfScope,
    pub url_count_scope: UrlCountScope,
    pub soft_match: SoftMatchMode,
    pub output_mode: OutputMode,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let svd = RsvdParams::default();
        PipelineConfig {
            docs: None,
            train_pairs: None,
            gold_pairs: None,
            model: None,
            alignment: None,
            out: None,
            dump_matrix: None,
            rank: svd.rank,
            seed: svd.seed,
            oversample: svd.oversample,
            power_iters: svd.power_iters,
            weights: WeightConfig::default(),
            thresholds: DEFAULT_THRESHOLDS.to_vec(),
            exclusion: Exclusion::None,
            src_lang: "en".into(),
            tgt_lang: "fr".into(),
            top_k: 0,
            workers: 0,
            embedding_scaling: EmbeddingScaling::default(),
            idf_scope: IdfScope::default(),
            url_count_scope: UrlCountScope::default(),
            soft_match: SoftMatchMode::default(),
            output_mode: OutputMode::default(),
        }
    }
}

fn bad(key: &str, value: &str) -> Error {
    Error::Config(format!("invalid value {value:?} for {key}"))
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.trim().parse().map_err(|_| bad(key, value))
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>> {
    value.split(',').map(|v| parse_num(key, v)).collect()
}

impl PipelineConfig {
    /// Sets one option. Keys are flag names without the leading dashes;
    /// underscores are accepted in place of dashes.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        let key = key.as_str();
        match key {
            "docs" => self.docs = Some(value.into()),
            "train-pairs" => self.train_pairs = Some(value.into()),
            "gold-pairs" => self.gold_pairs = Some(value.into()),
            "model" => self.model = Some(value.into()),
            "alignment" => self.alignment = Some(value.into()),
            "out" => self.out = Some(value.into()),
            "dump-matrix" => self.dump_matrix = Some(value.into()),
            "rank" => self.rank = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "oversample" => self.oversample = parse_num(key, value)?,
            "power-iters" => self.power_iters = parse_num(key, value)?,
            "weights" => {
                let ws = parse_list(key, value)?;
                let [cos, lcos, url] = ws[..] else {
                    return Err(bad(key, value));
                };
                self.weights = WeightConfig {
                    cos,
                    lcos,
                    url,
                    normalization: self.weights.normalization,
                };
            }
            "normalize" => {
                self.weights.normalization = match value {
                    "minmax" => Normalization::MinMax,
                    "none" => Normalization::None,
                    _ => return Err(bad(key, value)),
                }
            }
            "thresholds" => self.thresholds = parse_list(key, value)?,
            "exclusion" => {
                self.exclusion = match value {
                    "none" => Exclusion::None,
                    "heldout" => Exclusion::Heldout,
                    "loo" => Exclusion::Loo,
                    _ => return Err(bad(key, value)),
                }
            }
            "src-lang" => self.src_lang = value.to_string(),
            "tgt-lang" => self.tgt_lang = value.to_string(),
            "top-k" => self.top_k = parse_num(key, value)?,
            "workers" => self.workers = parse_num(key, value)?,
            "embedding-scaling" => {
                self.embedding_scaling = match value {
                    "none" => EmbeddingScaling::None,
                    "singular-values" | "singular_values" => EmbeddingScaling::SingularValues,
                    _ => return Err(bad(key, value)),
                }
            }
            "idf-scope" => {
                self.idf_scope = match value {
                    "domain" => IdfScope::Domain,
                    "global" => IdfScope::Global,
                    _ => return Err(bad(key, value)),
                }
            }
            "url-count-scope" => {
                self.url_count_scope = match value {
                    "domain" => UrlCountScope::Domain,
                    "global" => UrlCountScope::Global,
                    _ => return Err(bad(key, value)),
                }
            }
            "soft-match" => {
                self.soft_match = match value {
                    "either" => SoftMatchMode::Either,
                    "both" => SoftMatchMode::Both,
                    _ => return Err(bad(key, value)),
                }
            }
            "output" => {
                self.output_mode = match value {
                    "links" => OutputMode::Links,
                    "ranked" => OutputMode::RankedList,
                    _ => return Err(bad(key, value)),
                }
            }
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Applies a `key=value` text; blank lines and `#` comments are skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: idx + 1,
                message: "expected key=value".into(),
            })?;
            self.set(key, value).map_err(|e| Error::Parse {
                line: idx + 1,
                message: e.to_string(),
            })?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        self.apply_text(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rank == 0 {
            return Err(Error::Config("rank must be at least 1".into()));
        }
        if self.thresholds.is_empty() || self.thresholds.iter().any(|&t| !(t > 0.0 && t <= 1.0)) {
            return Err(Error::Config("thresholds must lie in (0, 1]".into()));
        }
        if self.src_lang == self.tgt_lang {
            return Err(Error::Config("source and target languages must differ".into()));
        }
        self.weights.validate()
    }

    pub fn svd_params(&self) -> RsvdParams {
        RsvdParams {
            rank: self.rank,
            oversample: self.oversample,
            power_iters: self.power_iters,
            seed: self.seed,
        }
    }

    pub fn link_config(&self) -> LinkConfig {
        LinkConfig {
            source_lang: self.src_lang.clone(),
            target_lang: self.tgt_lang.clone(),
            weights: self.weights,
            top_k: self.top_k,
        }
    }

    pub(crate) fn require<'a>(&self, path: &'a Option<PathBuf>, name: &str) -> Result<&'a Path> {
        path.as_deref()
            .ok_or_else(|| Error::Config(format!("--{name} is required")))
    }
}
