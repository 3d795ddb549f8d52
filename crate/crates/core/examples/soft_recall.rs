//! Strict and soft recall on a site with exact-duplicate pages. The gold
//! standard names the duplicate copies while the aligner links the
//! originals, so strict recall undercounts.
//!
//! ```bash
//! cargo run --release -p lsialign --example soft_recall
//! ```

use std::collections::HashMap;

use lsialign::eval::render_misses;
use lsialign::pipeline::{run_regime, Features};
use lsialign::synth::{generate, SynthConfig};
use lsialign::{PairList, PipelineConfig, SoftMatchMode};

fn main() -> lsialign::Result<()> {
    let synth = generate(&SynthConfig {
        domains: 6,
        duplicates: 4,
        ..SynthConfig::default()
    })?;
    let copies: HashMap<&str, &str> = synth.duplicates.iter().map(|(o, d)| (o.as_str(), d.as_str())).collect();
    let gold = PairList::new(
        synth
            .pairs
            .iter()
            .map(|(s, t)| (s.to_string(), copies.get(t).copied().unwrap_or(t).to_string()))
            .collect(),
    )?;
    println!("{} gold pairs, {} point at a duplicate", gold.len(), copies.len());

    for mode in [SoftMatchMode::Either, SoftMatchMode::Both] {
        let config = PipelineConfig {
            rank: 32,
            soft_match: mode,
            ..PipelineConfig::default()
        };
        let features = Features::build(&synth.corpus, &config)?;
        let outcome = run_regime(&synth.corpus, &features, &synth.pairs, &gold, &config)?;
        println!("\n{mode:?}");
        print!("{}", outcome.report.render_table(&config.weights.label()));
        print!("{}", render_misses(&outcome.report.per_domain_misses));
    }
    Ok(())
}
