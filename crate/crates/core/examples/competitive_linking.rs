//! Scores, combines and links the pages of one small site.
//!
//! ```bash
//! cargo run -p lsialign --example competitive_linking
//! ```

use lsialign::linking::{format_alignments, score_domain};
use lsialign::scoring::UrlCountScope;
use lsialign::{competitive_link, Corpus, Document, DomainUrlStats, Embedding, LinkConfig};

fn main() -> lsialign::Result<()> {
    let pages = [
        ("en", "about", [0.9, 0.1, 0.2]),
        ("en", "contact", [0.2, 0.9, 0.1]),
        ("en", "news/2016", [0.5, 0.5, 0.6]),
        ("fr", "a-propos", [0.8, 0.2, 0.2]),
        ("fr", "contact", [0.3, 0.8, 0.2]),
        ("fr", "nouvelles/2016", [0.6, 0.4, 0.5]),
    ];
    let corpus = Corpus::new(
        pages
            .iter()
            .map(|(lang, path, _)| Document {
                domain: "site.example".into(),
                lang: (*lang).into(),
                url: format!("http://site.example/{lang}/{path}"),
                text: "-".into(),
            })
            .collect(),
    )?;
    let embeddings: Vec<Embedding> = pages.iter().map(|(_, _, v)| Embedding(v.to_vec())).collect();
    let stats = DomainUrlStats::build(&corpus, UrlCountScope::Domain);

    let ranked = score_domain("site.example", &corpus, &embeddings, &stats, &LinkConfig::default())?;
    println!("{:>6} {:>6} {:>6} {:>8}", "cos", "lcos", "url", "combined");
    for h in &ranked {
        let show = |v: Option<f64>| v.map_or("-".into(), |v| format!("{v:.3}"));
        println!(
            "{:>6} {:>6} {:>6.3} {:>8.3}  {} -> {}",
            show(h.scores.cos),
            show(h.scores.lcos),
            h.scores.url,
            h.combined,
            corpus.get(h.src).url,
            corpus.get(h.tgt).url
        );
    }
    println!("\nlinks:");
    print!("{}", format_alignments(&competitive_link(&ranked), &corpus));
    Ok(())
}
