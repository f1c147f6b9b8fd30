mod support;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scholarec_core::engine::{recommend, recommend_by_usage};
use scholarec_core::matrix::{build_citation_matrix, sessionize};
use scholarec_core::similarity::{build_similarity_index, build_usage_index, Neighborhood};
use scholarec_core::Corpus;

const TOLERANCE: f64 = 1e-12;

#[test]
fn citation_engine_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..50 {
        let articles = rng.random_range(1..=40);
        let external = rng.random_range(0..=10);
        let density = rng.random_range(0.02..0.4);
        let corpus = support::citation_corpus(&mut rng, articles, external, density);
        let index = build_similarity_index(&build_citation_matrix(&corpus), Neighborhood::All);
        let sets = support::citation_sets(&corpus);
        for article in corpus.articles() {
            for n in [1, 5, 100] {
                let got = recommend(article.id.as_str(), n, &index, &corpus).unwrap();
                let want = support::oracle_citation(&corpus, &sets, article.id.as_str(), n);
                support::compare(&got, &want, TOLERANCE).unwrap_or_else(|e| panic!("seed {}: {e}", article.id));
            }
        }
    }
}

#[test]
fn usage_engine_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let empty = Corpus::from_articles(Vec::new()).unwrap();
    for round in 0..50 {
        let sessions = rng.random_range(1..=50);
        let items = rng.random_range(1..=50);
        let density = rng.random_range(0.02..0.4);
        let events = support::session_events(&mut rng, sessions, items, density);
        let matrix = sessionize(&events, 1800).unwrap();
        let sets = support::session_sets(&events);
        let min = 1 + round % 3;
        let index = build_usage_index(&matrix, Neighborhood::All, min as u32).unwrap();
        for item in sets.keys() {
            let got = recommend_by_usage(item, 100, &index, &empty).unwrap();
            let want = support::oracle_usage(&sets, item, 100, min);
            support::compare(&got, &want, TOLERANCE).unwrap_or_else(|e| panic!("seed {item}: {e}"));
        }
    }
}
