//! Included vs. excluded training: half of the synthetic sites are held out
//! and evaluated three ways.
//!
//! * included: the model is trained on every known pair
//! * heldout: one model trained without any pair of the held-out sites
//! * loo: one model per held-out site, trained without that site's pairs
//!
//! ```bash
//! cargo run --release -p lsialign --example excluded_regime -- [seed]
//! ```

use lsialign::pipeline::{run_regime, Features};
use lsialign::synth::{generate, SynthConfig};
use lsialign::{Exclusion, PipelineConfig};

fn main() -> lsialign::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let synth = generate(&SynthConfig {
        seed,
        ..SynthConfig::default()
    })?;
    let held_out: Vec<String> = synth.corpus.domains().skip(1).step_by(2).map(str::to_string).collect();
    let gold = synth.pairs_in(|d| held_out.iter().any(|h| h == d));
    println!("{} held-out sites, {} gold pairs", held_out.len(), gold.len());

    let base = PipelineConfig {
        rank: 32,
        seed,
        ..PipelineConfig::default()
    };
    let features = Features::build(&synth.corpus, &base)?;
    for (name, exclusion) in [
        ("included", Exclusion::None),
        ("heldout", Exclusion::Heldout),
        ("loo", Exclusion::Loo),
    ] {
        let config = PipelineConfig {
            exclusion,
            ..base.clone()
        };
        let outcome = run_regime(&synth.corpus, &features, &synth.pairs, &gold, &config)?;
        let pairs: usize = outcome.training_pairs.iter().map(|(_, n)| n).sum::<usize>() / outcome.training_pairs.len();
        println!(
            "\n{name} ({} model(s), ~{pairs} training pairs each)",
            outcome.training_pairs.len()
        );
        print!("{}", outcome.report.render_table(&config.weights.label()));
    }
    Ok(())
}
