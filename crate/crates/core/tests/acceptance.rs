//! Acceptance suite. Prints one `PASS`/`FAIL` line per criterion and exits
//! non-zero if any criterion fails.
//!
//! ```bash
//! cargo test --release -p lsialign --test acceptance
//! ```

use std::collections::{HashMap, HashSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use lsialign::linking::rank_hypotheses;
use lsialign::pipeline::{run_regime, Features};
use lsialign::scoring::{lcss_len, url_token_match_score, UrlCounts};
use lsialign::sparse::CscMatrix;
use lsialign::synth::{generate, SynthConfig, SynthCorpus};
use lsialign::{
    competitive_link, evaluate, fold_in, randomized_svd, soft_doc_similarity, url_similarity, AlignmentHypothesis,
    Corpus, Document, Exclusion, LsiModel, PairList, PipelineConfig, RsvdParams, ScoreTriple, SoftMatchMode, UrlTokens,
    WeightConfig,
};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn fixture(seed: u64) -> SynthCorpus {
    generate(&SynthConfig {
        seed,
        domains: 20,
        docs_per_lang: 30,
        boilerplate: 0.3,
        noise: 0.1,
        ..SynthConfig::default()
    })
    .expect("synthetic fixture")
}

fn base_config(seed: u64) -> PipelineConfig {
    PipelineConfig {
        rank: 32,
        seed,
        ..PipelineConfig::default()
    }
}

fn synthetic_end_to_end() -> Outcome {
    let start = Instant::now();
    let synth = fixture(7);
    let config = base_config(7);
    let features = Features::build(&synth.corpus, &config).map_err(|e| e.to_string())?;
    let recall = |weights: WeightConfig| -> Result<f64, String> {
        let config = PipelineConfig {
            weights,
            exclusion: Exclusion::None,
            ..config.clone()
        };
        run_regime(&synth.corpus, &features, &synth.pairs, &synth.pairs, &config)
            .map(|o| o.report.strict_recall)
            .map_err(|e| e.to_string())
    };
    let combined = recall(WeightConfig::uniform(true, true, true))?;
    let elapsed = start.elapsed().as_secs_f64();
    let singles = [
        ("cos", recall(WeightConfig::uniform(true, false, false))?),
        ("lcos", recall(WeightConfig::uniform(false, true, false))?),
        ("url", recall(WeightConfig::uniform(false, false, true))?),
    ];
    let dominates = singles.iter().all(|(_, r)| combined >= r - 0.02);
    let singles_text: Vec<String> = singles.iter().map(|(n, r)| format!("{n} {r:.3}")).collect();
    check(
        combined >= 0.95 && dominates && elapsed < 60.0,
        format!(
            "cos+lcos+url strict {combined:.3} (>= 0.95), singles [{}] (combined >= each - 0.02), {elapsed:.1}s (< 60s)",
            singles_text.join(", ")
        ),
    )
}

fn included_vs_heldout() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for seed in [11, 12, 13] {
        let synth = fixture(seed);
        let held: HashSet<String> = synth.corpus.domains().skip(1).step_by(2).map(str::to_string).collect();
        let gold = synth.pairs_in(|d| held.contains(d));
        let config = base_config(seed);
        let features = Features::build(&synth.corpus, &config).map_err(|e| e.to_string())?;
        let recall = |exclusion| -> Result<f64, String> {
            let config = PipelineConfig {
                exclusion,
                ..config.clone()
            };
            run_regime(&synth.corpus, &features, &synth.pairs, &gold, &config)
                .map(|o| o.report.strict_recall)
                .map_err(|e| e.to_string())
        };
        let included = recall(Exclusion::None)?;
        let heldout = recall(Exclusion::Heldout)?;
        ok &= heldout <= included && heldout >= 0.80 && included >= 0.80;
        lines.push(format!("seed {seed}: included {included:.3} heldout {heldout:.3}"));
    }
    check(ok, format!("{} (heldout <= included, both >= 0.80)", lines.join("; ")))
}

fn random_sparse(rng: &mut ChaCha8Rng, rows: usize, cols: usize, density: f64) -> CscMatrix {
    let mut dense = DMatrix::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            if rng.random_bool(density) {
                dense[(i, j)] = rng.random_range(0.1..5.0);
            }
        }
        // keep every column non-empty
        let i = rng.random_range(0..rows);
        dense[(i, j)] = rng.random_range(0.1..5.0);
    }
    CscMatrix::from_dense(&dense)
}

fn svd_fixtures() -> Outcome {
    let diag = CscMatrix::from_dense(&DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        3.0, 2.0, 1.0,
    ])));
    let params = RsvdParams {
        rank: 2,
        oversample: 20,
        power_iters: 2,
        seed: 0,
    };
    let svd = randomized_svd(&diag, params).map_err(|e| e.to_string())?;
    let s_err = (svd.singular[0] - 3.0).abs().max((svd.singular[1] - 2.0).abs());

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for trial in 0..10 {
        let rows = rng.random_range(20..80);
        let cols = rng.random_range(10..60);
        let m = random_sparse(&mut rng, rows, cols, 0.1);
        let rank = rng.random_range(2..=cols.min(rows).min(20));
        let svd = randomized_svd(
            &m,
            RsvdParams {
                rank,
                seed: trial,
                ..RsvdParams::default()
            },
        )
        .map_err(|e| e.to_string())?;
        let gram = svd.left.transpose() * &svd.left - DMatrix::identity(rank, rank);
        worst = worst.max(gram.amax());
    }
    check(
        svd.rank() == 2 && s_err <= 1e-8 && worst <= 1e-6,
        format!("diag(3,2,1) r=2: S error {s_err:.1e} (<= 1e-8); max |TᵀT - I| over 10 matrices {worst:.1e} (<= 1e-6)"),
    )
}

fn fold_in_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst = 0.0f64;
    for trial in 0..10 {
        let rows = rng.random_range(10..=50);
        let cols = rng.random_range(5..=50);
        let k = rng.random_range(1..=rows.min(cols).min(8));
        let a = DMatrix::from_fn(rows, k, |_, _| rng.random_range(-1.0..1.0));
        let b = DMatrix::from_fn(k, cols, |_, _| rng.random_range(-1.0..1.0));
        let m = CscMatrix::from_dense(&(a * b));
        let svd = randomized_svd(
            &m,
            RsvdParams {
                rank: k,
                seed: trial,
                ..RsvdParams::default()
            },
        )
        .map_err(|e| e.to_string())?;
        let model = LsiModel::from_svd(&svd, [0; 32]);
        for i in 0..cols {
            let folded = fold_in(&m.column(i), &model).map_err(|e| e.to_string())?;
            let expected = svd.right.row(i);
            let diff: f64 = folded
                .0
                .iter()
                .zip(expected.iter())
                .map(|(x, y)| (x - y).powi(2))
                .sum::<f64>()
                .sqrt();
            worst = worst.max(diff / expected.norm());
        }
    }
    check(
        worst <= 1e-8,
        format!("max ‖fold_in(M_i) - D'_i‖ / ‖D'_i‖ over 10 fixtures {worst:.1e} (<= 1e-8)"),
    )
}

const URL_POOL: [&str; 12] = [
    "london",
    "londres",
    "paris",
    "news",
    "nouvelles",
    "page",
    "pages",
    "en",
    "fr",
    "12",
    "2016",
    "x",
];

/// Best sum over every strictly increasing matching of positions, summed in
/// position order.
fn brute_force_alignment(a: &[String], b: &[String], counts: &UrlCounts) -> f64 {
    fn go(a: &[String], b: &[String], i: usize, j: usize, acc: f64, counts: &UrlCounts, best: &mut f64) {
        *best = best.max(acc);
        for ii in i..a.len() {
            for jj in j..b.len() {
                let s = url_token_match_score(&a[ii], &b[jj], counts).expect("counted token");
                go(a, b, ii + 1, jj + 1, acc + s, counts, best);
            }
        }
    }
    let mut best = 0.0;
    go(a, b, 0, 0, 0.0, counts, &mut best);
    best
}

fn url_scorer_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut mismatches = 0;
    for _ in 0..1000 {
        let occurrences: Vec<&str> = URL_POOL
            .iter()
            .flat_map(|t| std::iter::repeat_n(*t, rng.random_range(1..=3)))
            .collect();
        let table = UrlCounts::from_urls(occurrences);
        let mut seq = || -> Vec<String> {
            let len = rng.random_range(0..=8);
            (0..len)
                .map(|_| URL_POOL[rng.random_range(0..URL_POOL.len())].to_string())
                .collect()
        };
        let (a, b) = (seq(), seq());
        let dp = url_similarity(
            &UrlTokens {
                url: a.join("/"),
                tokens: a.clone(),
            },
            &UrlTokens {
                url: b.join("/"),
                tokens: b.clone(),
            },
            &table,
        )
        .map_err(|e| e.to_string())?;
        if dp != brute_force_alignment(&a, &b, &table) {
            mismatches += 1;
        }
    }
    check(
        mismatches == 0,
        format!("{mismatches} of 1000 random pairs differ from brute force"),
    )
}

fn london_londres() -> Outcome {
    let counts = UrlCounts::from(["London", "Londres"].map(|t| (t, 1)));
    let s = url_token_match_score("London", "Londres", &counts).map_err(|e| e.to_string())?;
    let err = (s - 8.0 / 13.0).abs();
    check(
        err <= 1e-9,
        format!("score {s:.9}, |score - 8/13| = {err:.1e} (<= 1e-9)"),
    )
}

fn naive_lcss(a: &[u8], b: &[u8]) -> usize {
    fn go(a: &[u8], b: &[u8], i: usize, j: usize, memo: &mut HashMap<(usize, usize), usize>) -> usize {
        if i == a.len() || j == b.len() {
            return 0;
        }
        if let Some(&v) = memo.get(&(i, j)) {
            return v;
        }
        let v = if a[i] == b[j] {
            1 + go(a, b, i + 1, j + 1, memo)
        } else {
            go(a, b, i + 1, j, memo).max(go(a, b, i, j + 1, memo))
        };
        memo.insert((i, j), v);
        v
    }
    go(a, b, 0, 0, &mut HashMap::new())
}

fn lcss_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut mismatches = 0;
    for _ in 0..1000 {
        let mut seq = || -> Vec<u8> {
            let len = rng.random_range(0..=10);
            (0..len).map(|_| rng.random_range(b'a'..=b'd')).collect()
        };
        let (a, b) = (seq(), seq());
        if lcss_len(&a, &b) != naive_lcss(&a, &b) {
            mismatches += 1;
        }
    }
    let soft = soft_doc_similarity("a b c d", "a b x d");
    check(
        mismatches == 0 && soft == 0.75,
        format!("{mismatches} of 1000 random pairs differ from the recursion; soft(\"a b c d\", \"a b x d\") = {soft}"),
    )
}

fn linking_instance(rng: &mut ChaCha8Rng) -> (Corpus, Vec<AlignmentHypothesis>) {
    let (n_src, n_tgt) = (rng.random_range(1..=5), rng.random_range(1..=5));
    let mut docs = Vec::new();
    for (lang, n) in [("en", n_src), ("fr", n_tgt)] {
        for i in 0..n {
            docs.push(Document {
                domain: "d".into(),
                lang: lang.into(),
                url: format!("http://d/{lang}/{}", (i * 7 + 3) % 10),
                text: "t".into(),
            });
        }
    }
    let corpus = Corpus::new(docs).expect("distinct urls");
    let mut hyps = Vec::new();
    for s in 0..n_src {
        for t in 0..n_tgt {
            // few distinct values so that ties are common
            let combined = rng.random_range(0..4) as f64 / 4.0;
            hyps.push(AlignmentHypothesis {
                src: s,
                tgt: n_src + t,
                scores: ScoreTriple::default(),
                combined,
            });
        }
    }
    (corpus, hyps)
}

/// Repeatedly takes the best remaining pair whose source and target are both
/// unused, breaking ties by source URL then target URL.
fn exhaustive_greedy(corpus: &Corpus, hyps: &[AlignmentHypothesis]) -> Vec<(usize, usize)> {
    let mut remaining: Vec<&AlignmentHypothesis> = hyps.iter().collect();
    let mut out = Vec::new();
    while !remaining.is_empty() {
        let mut best = remaining[0];
        for h in &remaining[1..] {
            let key = |x: &AlignmentHypothesis| (corpus.get(x.src).url.clone(), corpus.get(x.tgt).url.clone());
            if h.combined > best.combined || (h.combined == best.combined && key(h) < key(best)) {
                best = h;
            }
        }
        let (s, t) = (best.src, best.tgt);
        out.push((s, t));
        remaining.retain(|h| h.src != s && h.tgt != t);
    }
    out
}

fn competitive_linking_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut mismatches, mut not_one_to_one) = (0, 0);
    for _ in 0..500 {
        let (corpus, mut hyps) = linking_instance(&mut rng);
        let expected = exhaustive_greedy(&corpus, &hyps);
        rank_hypotheses(&mut hyps, &corpus);
        let linked: Vec<(usize, usize)> = competitive_link(&hyps).iter().map(|h| (h.src, h.tgt)).collect();
        if linked != expected {
            mismatches += 1;
        }
        let srcs: HashSet<usize> = linked.iter().map(|p| p.0).collect();
        let tgts: HashSet<usize> = linked.iter().map(|p| p.1).collect();
        if srcs.len() != linked.len() || tgts.len() != linked.len() {
            not_one_to_one += 1;
        }
    }
    check(
        mismatches == 0 && not_one_to_one == 0,
        format!("{mismatches} of 500 instances differ from exhaustive greedy; {not_one_to_one} not 1:1"),
    )
}

fn evaluation_monotonicity() -> Outcome {
    let synth = generate(&SynthConfig {
        seed: 4,
        domains: 4,
        docs_per_lang: 12,
        duplicates: 2,
        noise: 0.3,
        ..SynthConfig::default()
    })
    .map_err(|e| e.to_string())?;
    let corpus = &synth.corpus;
    let thresholds = [1.00, 0.99, 0.95, 0.90];
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut violations = 0;
    for _ in 0..200 {
        let mut predicted = Vec::new();
        for domain in corpus.domains() {
            let docs = corpus.domain_docs(domain);
            let en: Vec<&str> = docs
                .iter()
                .map(|&i| corpus.get(i))
                .filter(|d| d.lang == "en")
                .map(|d| d.url.as_str())
                .collect();
            let fr: Vec<&str> = docs
                .iter()
                .map(|&i| corpus.get(i))
                .filter(|d| d.lang == "fr")
                .map(|d| d.url.as_str())
                .collect();
            for s in &en {
                if rng.random_bool(0.8) {
                    predicted.push((s.to_string(), fr[rng.random_range(0..fr.len())].to_string()));
                }
            }
        }
        for mode in [SoftMatchMode::Either, SoftMatchMode::Both] {
            let report = evaluate(&predicted, &synth.pairs, corpus, &thresholds, mode).map_err(|e| e.to_string())?;
            let soft: Vec<f64> = report.soft_recall.iter().map(|&(_, r)| r).collect();
            if soft[0] < report.strict_recall || soft.windows(2).any(|w| w[1] < w[0]) {
                violations += 1;
            }
        }
    }
    check(
        violations == 0,
        format!("{violations} of 400 random prediction sets violate strict <= soft@1.00 <= soft@0.99 <= soft@0.95 <= soft@0.90"),
    )
}

fn duplicate_urls() -> Outcome {
    let synth = generate(&SynthConfig {
        duplicates: 3,
        ..SynthConfig::default()
    })
    .map_err(|e| e.to_string())?;
    // Gold annotators picked the duplicate copy; the aligner sees both.
    let dup_of: HashMap<&str, &str> = synth.duplicates.iter().map(|(o, d)| (o.as_str(), d.as_str())).collect();
    let gold = PairList::new(
        synth
            .pairs
            .iter()
            .map(|(s, t)| (s.to_string(), dup_of.get(t).copied().unwrap_or(t).to_string()))
            .collect(),
    )
    .map_err(|e| e.to_string())?;
    let config = base_config(1);
    let features = Features::build(&synth.corpus, &config).map_err(|e| e.to_string())?;
    let report = run_regime(&synth.corpus, &features, &synth.pairs, &gold, &config)
        .map_err(|e| e.to_string())?
        .report;
    let soft = report.soft_at(1.00).unwrap_or(0.0);
    check(
        report.strict_recall < soft,
        format!(
            "{} duplicate pages: strict {:.3} < soft@1.00 {soft:.3}",
            synth.duplicates.len(),
            report.strict_recall
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("synthetic end-to-end", synthetic_end_to_end),
        ("included vs heldout regime", included_vs_heldout),
        ("svd fixtures", svd_fixtures),
        ("fold-in identity", fold_in_identity),
        ("url scorer oracle", url_scorer_oracle),
        ("London/Londres token score", london_londres),
        ("lcss oracle", lcss_oracle),
        ("competitive linking oracle", competitive_linking_oracle),
        ("evaluation monotonicity", evaluation_monotonicity),
        ("duplicate-url fixture", duplicate_urls),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".to_string()));
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
