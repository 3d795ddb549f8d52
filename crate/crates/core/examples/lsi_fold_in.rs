//! Trains a tiny bilingual LSI model from three known pairs and folds in
//! pages that were not part of training.
//!
//! ```bash
//! cargo run -p lsialign --example lsi_fold_in
//! ```

use lsialign::lsi::embed;
use lsialign::vectorizer::{doc_to_column, IdfScope};
use lsialign::{
    build_term_doc_matrix, build_vocabulary, cosine, train_lsi, Corpus, Document, DomainIdf, EmbeddingScaling,
    PairList, RsvdParams,
};

fn doc(lang: &str, path: &str, text: &str) -> Document {
    Document {
        domain: "shop.example".into(),
        lang: lang.into(),
        url: format!("http://shop.example/{lang}/{path}"),
        text: text.into(),
    }
}

fn main() -> lsialign::Result<()> {
    let corpus = Corpus::new(vec![
        doc("en", "cheese", "home shop cheese milk goat cheese"),
        doc("fr", "fromage", "accueil boutique fromage lait chevre fromage"),
        doc("en", "wine", "home shop wine red grape"),
        doc("fr", "vin", "accueil boutique vin rouge raisin"),
        doc("en", "bread", "home shop bread flour"),
        doc("fr", "pain", "accueil boutique pain farine"),
        // not in the training pairs
        doc("en", "goat", "home goat milk"),
        doc("fr", "chevre", "accueil chevre lait"),
        doc("fr", "rouge", "boutique vin rouge"),
    ])?;
    let train = PairList::new(
        [("cheese", "fromage"), ("wine", "vin"), ("bread", "pain")]
            .iter()
            .map(|(e, f)| {
                (
                    format!("http://shop.example/en/{e}"),
                    format!("http://shop.example/fr/{f}"),
                )
            })
            .collect(),
    )?;

    let vocab = build_vocabulary(&corpus)?;
    let idf = DomainIdf::build(&corpus, IdfScope::Domain);
    let matrix = build_term_doc_matrix(&corpus, &train, &vocab, &idf)?;
    println!(
        "{} terms x {} pairs, {} nonzeros",
        matrix.nrows(),
        matrix.ncols(),
        matrix.matrix.nnz()
    );

    let model = train_lsi(
        &matrix,
        RsvdParams {
            rank: 3,
            ..RsvdParams::default()
        },
    )?;
    println!("singular values {:.3?}", model.singular.as_slice());

    let embedded: Vec<_> = corpus
        .documents()
        .iter()
        .map(|d| {
            embed(
                &doc_to_column(d, &vocab, &idf)?,
                &model,
                EmbeddingScaling::SingularValues,
            )
        })
        .collect::<lsialign::Result<_>>()?;
    let goat = 6;
    println!("\ncosine of {} with", corpus.get(goat).url);
    for (id, e) in embedded
        .iter()
        .enumerate()
        .filter(|(id, _)| corpus.get(*id).lang == "fr")
    {
        let c = cosine(embedded[goat].as_slice(), e.as_slice());
        println!(
            "  {:<32} {}",
            corpus.get(id).url,
            c.map_or("undefined".into(), |c| format!("{c:.3}"))
        );
    }
    Ok(())
}
