//! Generates a synthetic bilingual crawl and reports recall for every
//! uniform combination of the three scorers, with in-domain pairs included
//! in the training matrix.
//!
//! ```bash
//! cargo run --release -p lsialign --example synthetic_end_to_end -- [seed]
//! ```

use std::time::Instant;

use lsialign::pipeline::{run_regime, Features};
use lsialign::synth::{generate, SynthConfig};
use lsialign::{Exclusion, PipelineConfig, WeightConfig};

fn main() -> lsialign::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let start = Instant::now();
    let synth = generate(&SynthConfig {
        seed,
        ..SynthConfig::default()
    })?;
    println!(
        "{} documents in {} domains, {} planted pairs",
        synth.corpus.len(),
        synth.corpus.domains().count(),
        synth.pairs.len()
    );

    let mut config = PipelineConfig {
        rank: 32,
        seed,
        exclusion: Exclusion::None,
        ..PipelineConfig::default()
    };
    let features = Features::build(&synth.corpus, &config)?;

    let combos = [
        (true, false, false),
        (false, true, false),
        (false, false, true),
        (true, true, false),
        (true, false, true),
        (false, true, true),
        (true, true, true),
    ];
    let mut header_done = false;
    for (cos, lcos, url) in combos {
        config.weights = WeightConfig::uniform(cos, lcos, url);
        let outcome = run_regime(&synth.corpus, &features, &synth.pairs, &synth.pairs, &config)?;
        let table = outcome.report.render_table(&config.weights.label());
        let mut lines = table.lines();
        let header = lines.next().unwrap_or_default();
        if !header_done {
            println!("{header}");
            header_done = true;
        }
        println!("{}", lines.next().unwrap_or_default());
    }
    println!("elapsed {:.2?}", start.elapsed());
    Ok(())
}
