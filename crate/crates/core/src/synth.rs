//! Synthetic bilingual web-site generator with planted ground truth.
//!
//! Every domain gets a topic (a subset of a shared content vocabulary), a
//! fixed boilerplate block, and a URL scheme. Target-language pages are word
//! by word dictionary images of their source pages, with a configurable rate
//! of substituted tokens. The dictionary maps each word to a "cognate" that
//! shares most of its letters, so URL slugs built from words stay
//! recognizable across languages.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{save_corpus, save_pairs, Corpus, Document, PairList};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub seed: u64,
    pub domains: usize,
    pub docs_per_lang: usize,
    /// Size of the content vocabulary shared by all domains.
    pub vocab_size: usize,
    /// Content words available to one domain.
    pub topic_size: usize,
    /// Payload tokens per page.
    pub payload_len: usize,
    /// Fraction of each page's tokens that are domain boilerplate.
    pub boilerplate: f64,
    /// Probability that a translated payload token is replaced by a random
    /// target-language word of the domain.
    pub noise: f64,
    /// Exact-duplicate target pages per domain, each under a new URL.
    pub duplicates: usize,
    /// Unpaired pages per language per domain.
    pub distractors: usize,
    pub source_lang: String,
    pub target_lang: String,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 1,
            domains: 20,
            docs_per_lang: 30,
            vocab_size: 4000,
            topic_size: 600,
            payload_len: 80,
            boilerplate: 0.3,
            noise: 0.1,
            duplicates: 0,
            distractors: 0,
            source_lang: "en".into(),
            target_lang: "fr".into(),
        }
    }
}

/// URL layout of a synthetic site.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UrlScheme {
    /// Same numeric article id in both languages.
    SharedId,
    /// Slug from the page's leading payload words in each language.
    Slug,
    /// Unrelated page numbers in the two languages.
    Opaque,
}

impl UrlScheme {
    fn for_domain(index: usize) -> Self {
        match index % 3 {
            0 => UrlScheme::SharedId,
            1 => UrlScheme::Slug,
            _ => UrlScheme::Opaque,
        }
    }
}

/// A generated collection and its ground truth.
#[derive(Debug, Clone)]
pub struct SynthCorpus {
    pub corpus: Corpus,
    /// Planted translation pairs, in generation order.
    pub pairs: PairList,
    /// `(original target url, duplicate url)`.
    pub duplicates: Vec<(String, String)>,
    pub distractors: Vec<String>,
    pub schemes: Vec<(String, UrlScheme)>,
}

impl SynthCorpus {
    /// Planted pairs whose source page's domain satisfies `keep`.
    pub fn pairs_in(&self, mut keep: impl FnMut(&str) -> bool) -> PairList {
        self.pairs
            .filter(|s, _| self.corpus.by_url(s).is_some_and(|d| keep(d.domain.as_str())))
    }

    pub fn manifest(&self) -> String {
        let mut out = String::new();
        for (domain, scheme) in &self.schemes {
            let _ = writeln!(out, "scheme\t{domain}\t{scheme:?}");
        }
        for (s, t) in self.pairs.iter() {
            let _ = writeln!(out, "pair\t{s}\t{t}");
        }
        for (orig, dup) in &self.duplicates {
            let _ = writeln!(out, "duplicate\t{orig}\t{dup}");
        }
        for url in &self.distractors {
            let _ = writeln!(out, "distractor\t{url}");
        }
        out
    }

    /// Writes `docs.tsv`, `pairs.tsv` and `manifest.tsv` into `dir`.
    pub fn write_to(&self, dir: impl AsRef<Path>) -> Result<[PathBuf; 3]> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let docs = dir.join("docs.tsv");
        let pairs = dir.join("pairs.tsv");
        let manifest = dir.join("manifest.tsv");
        save_corpus(&self.corpus, &docs)?;
        save_pairs(&self.pairs, &pairs)?;
        fs::write(&manifest, self.manifest()).map_err(|e| Error::io(&manifest, e))?;
        Ok([docs, pairs, manifest])
    }
}

const CONSONANTS: &[u8] = b"bcdfghjklmnprstvz";
const VOWELS: &[u8] = b"aeiou";

fn pseudo_word(rng: &mut ChaCha8Rng) -> String {
    let syllables = rng.random_range(2..=4);
    let mut w = String::new();
    for _ in 0..syllables {
        w.push(*CONSONANTS.choose(rng).expect("non-empty") as char);
        w.push(*VOWELS.choose(rng).expect("non-empty") as char);
    }
    if rng.random_bool(0.4) {
        w.push(*CONSONANTS.choose(rng).expect("non-empty") as char);
    }
    w
}

/// Target-language cognate: shift the last vowel and add an ending.
fn cognate(word: &str, rng: &mut ChaCha8Rng) -> String {
    let mut chars: Vec<char> = word.chars().collect();
    if let Some(pos) = chars.iter().rposition(|c| VOWELS.contains(&(*c as u8))) {
        let v = VOWELS.iter().position(|&x| x as char == chars[pos]).expect("vowel");
        chars[pos] = VOWELS[(v + 1) % VOWELS.len()] as char;
    }
    let mut out: String = chars.into_iter().collect();
    out.push_str(["e", "es", "ie", "on"].choose(rng).expect("non-empty"));
    out
}

/// A bijective source→target word list.
struct Dictionary {
    source: Vec<String>,
    target: Vec<String>,
}

impl Dictionary {
    fn generate(size: usize, rng: &mut ChaCha8Rng, taken: &mut HashSet<String>) -> Self {
        let mut source = Vec::with_capacity(size);
        let mut target = Vec::with_capacity(size);
        while source.len() < size {
            let w = pseudo_word(rng);
            let c = cognate(&w, rng);
            if w == c || taken.contains(&w) || taken.contains(&c) {
                continue;
            }
            taken.insert(w.clone());
            taken.insert(c.clone());
            source.push(w);
            target.push(c);
        }
        Dictionary { source, target }
    }
}

pub fn generate(config: &SynthConfig) -> Result<SynthCorpus> {
    if config.domains == 0 || config.docs_per_lang == 0 {
        return Err(Error::Config(
            "synthetic corpus needs at least one domain and one page".into(),
        ));
    }
    if !(0.0..1.0).contains(&config.boilerplate) || !(0.0..=1.0).contains(&config.noise) {
        return Err(Error::Config(
            "boilerplate must be in [0, 1) and noise in [0, 1]".into(),
        ));
    }
    let topic_size = config.topic_size.min(config.vocab_size).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut taken = HashSet::new();
    let content = Dictionary::generate(config.vocab_size.max(1), &mut rng, &mut taken);
    let boiler_len = (config.payload_len as f64 * config.boilerplate / (1.0 - config.boilerplate)).round() as usize;
    let zipf: Vec<f64> = (0..topic_size).map(|r| 1.0 / (r as f64 + 1.0)).collect();
    let zipf = WeightedIndex::new(&zipf).map_err(|e| Error::Config(e.to_string()))?;

    let (src_lang, tgt_lang) = (config.source_lang.as_str(), config.target_lang.as_str());
    let mut documents = Vec::new();
    let mut pairs = Vec::new();
    let mut duplicates = Vec::new();
    let mut distractors = Vec::new();
    let mut schemes = Vec::new();

    for d in 0..config.domains {
        let domain = format!("www.site{d:02}.example");
        let scheme = UrlScheme::for_domain(d);
        schemes.push((domain.clone(), scheme));

        let mut topic: Vec<usize> = (0..content.source.len()).collect();
        topic.shuffle(&mut rng);
        topic.truncate(topic_size);
        let boiler = Dictionary::generate(12.min(boiler_len.max(1)), &mut rng, &mut taken);
        let boiler_seq: Vec<usize> = (0..boiler_len)
            .map(|_| rng.random_range(0..boiler.source.len()))
            .collect();
        let (head, tail) = boiler_seq.split_at(boiler_len / 2);

        let mut page_ids: Vec<u32> = (0..(config.docs_per_lang + config.distractors) as u32 * 2)
            .map(|i| 1000 + 37 * i)
            .collect();
        page_ids.shuffle(&mut rng);
        let mut next_id = page_ids.into_iter();

        let page =
            |rng: &mut ChaCha8Rng| -> Vec<usize> { (0..config.payload_len).map(|_| topic[zipf.sample(rng)]).collect() };
        let render = |words: &[String], lang_boiler: &[String]| -> String {
            let mut tokens: Vec<&str> = head.iter().map(|&i| lang_boiler[i].as_str()).collect();
            tokens.extend(words.iter().map(String::as_str));
            tokens.extend(tail.iter().map(|&i| lang_boiler[i].as_str()));
            capitalize_first(&tokens.join(" "))
        };
        let slug = |words: &[String]| words.iter().take(3).cloned().collect::<Vec<_>>().join("-");

        for i in 0..config.docs_per_lang + config.distractors {
            let payload = page(&mut rng);
            let src_words: Vec<String> = payload.iter().map(|&w| content.source[w].clone()).collect();
            let tgt_words: Vec<String> = payload
                .iter()
                .map(|&w| {
                    if rng.random_bool(config.noise) {
                        content.target[topic[rng.random_range(0..topic.len())]].clone()
                    } else {
                        content.target[w].clone()
                    }
                })
                .collect();
            let shared = next_id.next().expect("enough ids");
            let other = next_id.next().expect("enough ids");
            let (src_url, tgt_url) = match scheme {
                UrlScheme::SharedId => (
                    format!("http://{domain}/{src_lang}/article/{shared}.html"),
                    format!("http://{domain}/{tgt_lang}/article/{shared}.html"),
                ),
                UrlScheme::Slug => (
                    format!("http://{domain}/{src_lang}/{}-{i}", slug(&src_words)),
                    format!("http://{domain}/{tgt_lang}/{}-{i}", slug(&tgt_words)),
                ),
                UrlScheme::Opaque => (
                    format!("http://{domain}/{src_lang}/page{shared}"),
                    format!("http://{domain}/{tgt_lang}/p/{other}"),
                ),
            };
            let is_distractor = i >= config.docs_per_lang;
            documents.push(Document {
                domain: domain.clone(),
                lang: src_lang.to_string(),
                url: src_url.clone(),
                text: render(&src_words, &boiler.source),
            });
            if is_distractor {
                // an unrelated target page instead of a translation
                let unrelated: Vec<String> = page(&mut rng).iter().map(|&w| content.target[w].clone()).collect();
                let url = format!("http://{domain}/{tgt_lang}/extra/{other}");
                documents.push(Document {
                    domain: domain.clone(),
                    lang: tgt_lang.to_string(),
                    url: url.clone(),
                    text: render(&unrelated, &boiler.target),
                });
                distractors.push(src_url);
                distractors.push(url);
                continue;
            }
            documents.push(Document {
                domain: domain.clone(),
                lang: tgt_lang.to_string(),
                url: tgt_url.clone(),
                text: render(&tgt_words, &boiler.target),
            });
            pairs.push((src_url, tgt_url.clone()));
            if i < config.duplicates {
                let dup_url = format!("{tgt_url}?print=1");
                let text = documents.last().expect("just pushed").text.clone();
                documents.push(Document {
                    domain: domain.clone(),
                    lang: tgt_lang.to_string(),
                    url: dup_url.clone(),
                    text,
                });
                duplicates.push((tgt_url, dup_url));
            }
        }
    }

    Ok(SynthCorpus {
        corpus: Corpus::new(documents)?,
        pairs: PairList::new(pairs)?,
        duplicates,
        distractors,
        schemes,
    })
}

fn capitalize_first(text: &str) -> String {
    let mut chars = text.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}
