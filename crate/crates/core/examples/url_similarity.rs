//! URL tokenization and the cognate-aware URL scorer.
//!
//! ```bash
//! cargo run -p lsialign --example url_similarity
//! ```

use lsialign::scoring::{url_token_match_score, UrlCounts};
use lsialign::{tokenize_url, url_similarity};

fn main() -> lsialign::Result<()> {
    let pair = [
        "http://www.example.com/en/London_2016.html",
        "http://www.example.com/fr/Londres_2016.html",
    ];
    for url in pair {
        println!("{url}\n  -> {:?}", tokenize_url(url).tokens);
    }

    let unit = UrlCounts::from([("London", 1), ("Londres", 1), ("Paris", 1)]);
    for (a, b) in [("London", "Londres"), ("London", "Paris"), ("London", "London")] {
        println!(
            "token score {a:>7} / {b:<7} = {:.4}",
            url_token_match_score(a, b, &unit)?
        );
    }

    // Counts come from every URL of the site; tokens seen everywhere weigh little.
    let site = [
        pair[0],
        pair[1],
        "http://www.example.com/en/Paris_2016.html",
        "http://www.example.com/fr/Paris_2016.html",
    ];
    let counts = UrlCounts::from_urls(site);
    println!();
    for (a, b) in [(site[0], site[1]), (site[0], site[3]), (site[2], site[3])] {
        let score = url_similarity(&tokenize_url(a), &tokenize_url(b), &counts)?;
        println!("{score:.4}  {a}  {b}");
    }
    Ok(())
}
