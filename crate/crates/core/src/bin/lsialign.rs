use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lsialign::config::PipelineConfig;
use lsialign::eval::render_misses;
use lsialign::pipeline::{cmd_align, cmd_evaluate, cmd_loo, cmd_train};
use lsialign::synth::{generate, SynthConfig};

#[derive(Parser)]
#[command(name = "lsialign", version, about = "Cross-lingual LSI document alignment")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the bilingual matrix from known pairs and write a model file.
    Train(Options),
    /// Align all pages of the collection with a trained model.
    Align(Options),
    /// Score an alignment file against gold pairs.
    Evaluate(Options),
    /// Train, align and evaluate under an exclusion regime.
    Loo(Options),
    /// Generate a synthetic bilingual collection with planted pairs.
    Synth(SynthOptions),
}

/// Every flag overrides the key of the same name in `--config`.
#[derive(Args, Default)]
struct Options {
    /// Flat key=value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    docs: Option<String>,
    #[arg(long = "train-pairs")]
    train_pairs: Option<String>,
    #[arg(long = "gold-pairs")]
    gold_pairs: Option<String>,
    #[arg(long)]
    model: Option<String>,
    /// Alignment file read by `evaluate` (written by `loo`).
    #[arg(long)]
    alignment: Option<String>,
    #[arg(long)]
    out: Option<String>,
    #[arg(long = "dump-matrix")]
    dump_matrix: Option<String>,
    #[arg(long)]
    rank: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    oversample: Option<String>,
    #[arg(long = "power-iters")]
    power_iters: Option<String>,
    /// cos,lcos,url weights.
    #[arg(long)]
    weights: Option<String>,
    /// minmax or none.
    #[arg(long)]
    normalize: Option<String>,
    #[arg(long)]
    thresholds: Option<String>,
    /// none, heldout or loo.
    #[arg(long)]
    exclusion: Option<String>,
    #[arg(long = "src-lang")]
    src_lang: Option<String>,
    #[arg(long = "tgt-lang")]
    tgt_lang: Option<String>,
    /// Cosine top-k candidate pruning; 0 is exact.
    #[arg(long = "top-k")]
    top_k: Option<String>,
    #[arg(long)]
    workers: Option<String>,
    /// none or singular-values.
    #[arg(long = "embedding-scaling")]
    embedding_scaling: Option<String>,
    /// domain or global.
    #[arg(long = "idf-scope")]
    idf_scope: Option<String>,
    /// domain or global.
    #[arg(long = "url-count-scope")]
    url_count_scope: Option<String>,
    /// either or both.
    #[arg(long = "soft-match")]
    soft_match: Option<String>,
    /// links or ranked.
    #[arg(long)]
    output: Option<String>,
}

impl Options {
    fn resolve(&self) -> lsialign::Result<PipelineConfig> {
        let mut config = PipelineConfig::default();
        if let Some(path) = &self.config {
            config.apply_file(path)?;
        }
        let flags = [
            ("docs", &self.docs),
            ("train-pairs", &self.train_pairs),
            ("gold-pairs", &self.gold_pairs),
            ("model", &self.model),
            ("alignment", &self.alignment),
            ("out", &self.out),
            ("dump-matrix", &self.dump_matrix),
            ("rank", &self.rank),
            ("seed", &self.seed),
            ("oversample", &self.oversample),
            ("power-iters", &self.power_iters),
            ("weights", &self.weights),
            ("normalize", &self.normalize),
            ("thresholds", &self.thresholds),
            ("exclusion", &self.exclusion),
            ("src-lang", &self.src_lang),
            ("tgt-lang", &self.tgt_lang),
            ("top-k", &self.top_k),
            ("workers", &self.workers),
            ("embedding-scaling", &self.embedding_scaling),
            ("idf-scope", &self.idf_scope),
            ("url-count-scope", &self.url_count_scope),
            ("soft-match", &self.soft_match),
            ("output", &self.output),
        ];
        for (key, value) in flags {
            if let Some(value) = value {
                config.set(key, value)?;
            }
        }
        Ok(config)
    }
}

#[derive(Args)]
struct SynthOptions {
    /// Output directory for docs.tsv, pairs.tsv and manifest.tsv.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    domains: usize,
    #[arg(long = "docs-per-lang", default_value_t = 30)]
    docs_per_lang: usize,
    #[arg(long = "vocab-size", default_value_t = 4000)]
    vocab_size: usize,
    #[arg(long = "topic-size", default_value_t = 600)]
    topic_size: usize,
    #[arg(long = "payload-len", default_value_t = 80)]
    payload_len: usize,
    #[arg(long, default_value_t = 0.3)]
    boilerplate: f64,
    #[arg(long, default_value_t = 0.1)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    duplicates: usize,
    #[arg(long, default_value_t = 0)]
    distractors: usize,
    #[arg(long = "src-lang", default_value = "en")]
    src_lang: String,
    #[arg(long = "tgt-lang", default_value = "fr")]
    tgt_lang: String,
}

fn run(cli: Cli) -> lsialign::Result<()> {
    match cli.command {
        Command::Train(opts) => {
            let model = cmd_train(&opts.resolve()?)?;
            println!("trained rank {} model over {} terms", model.rank(), model.vocab_size());
        }
        Command::Align(opts) => {
            let aligned = cmd_align(&opts.resolve()?)?;
            println!("{} alignments written", aligned.len());
        }
        Command::Evaluate(opts) => {
            let config = opts.resolve()?;
            let report = cmd_evaluate(&config)?;
            print!("{}", report.render_table(&config.weights.label()));
            println!();
            print!("{}", render_misses(&report.per_domain_misses));
        }
        Command::Loo(opts) => {
            let config = opts.resolve()?;
            let outcome = cmd_loo(&config)?;
            for (name, count) in &outcome.training_pairs {
                println!("model {name}: {count} training pairs");
            }
            print!("{}", outcome.report.render_table(&config.weights.label()));
            println!();
            print!("{}", render_misses(&outcome.report.per_domain_misses));
        }
        Command::Synth(opts) => {
            let config = SynthConfig {
                seed: opts.seed,
                domains: opts.domains,
                docs_per_lang: opts.docs_per_lang,
                vocab_size: opts.vocab_size,
                topic_size: opts.topic_size,
                payload_len: opts.payload_len,
                boilerplate: opts.boilerplate,
                noise: opts.noise,
                duplicates: opts.duplicates,
                distractors: opts.distractors,
                source_lang: opts.src_lang,
                target_lang: opts.tgt_lang,
            };
            let synth = generate(&config)?;
            let [docs, pairs, manifest] = synth.write_to(&opts.out)?;
            println!(
                "{} documents, {} pairs: {}, {}, {}",
                synth.corpus.len(),
                synth.pairs.len(),
                docs.display(),
                pairs.display(),
                manifest.display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
