mod oracles;

use factcheck_core::dense::{cosine_sim, knn, mmr_select, EmbeddingVector, MmrCandidate, MmrConfig, VectorIndex};
use factcheck_core::lexical::{bm25_top, build_index, Bm25Params};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn vocab() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["cat", "dog", "sat", "mat", "the", "on", "a", "ran", "fast", "blue"])
        .prop_map(str::to_string)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn bm25_matches_naive_scan(
        docs in prop::collection::vec(prop::collection::vec(vocab(), 0..12), 1..50),
        query in prop::collection::vec(vocab(), 0..6),
        omega in 1usize..60,
    ) {
        prop_assume!(docs.iter().any(|d| !d.is_empty()));
        let index = build_index(&docs, Bm25Params::default()).unwrap();
        let got = bm25_top(&index, &query, omega);
        let want = oracles::bm25::naive_top(&docs, &query, 1.2, 0.75, omega);
        prop_assert_eq!(got, want);
    }
}

#[test]
fn bm25_hand_case() {
    let docs = vec![vec!["cat".to_string(), "sat".to_string()]];
    let index = build_index(&docs, Bm25Params::default()).unwrap();
    let hits = bm25_top(&index, &["cat"], 10);
    assert_eq!(hits.len(), 1);
    assert!((hits[0].1 - 0.2877).abs() < 1e-4);
    assert!((hits[0].1 - (4.0f64 / 3.0).ln()).abs() < 1e-12);
}

fn random_vector(rng: &mut StdRng, dim: usize) -> EmbeddingVector {
    loop {
        let v: Vec<f32> = (0..dim).map(|_| rng.gen_range(-1.0f32..1.0)).collect();
        if v.iter().any(|x| *x != 0.0) {
            return EmbeddingVector::new(v).unwrap();
        }
    }
}

#[test]
fn knn_matches_brute_force() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..300 {
        let dim = rng.gen_range(2..16);
        let n = rng.gen_range(1..30);
        let vectors: Vec<EmbeddingVector> = (0..n).map(|_| random_vector(&mut rng, dim)).collect();
        let query = random_vector(&mut rng, dim);
        let mut index = VectorIndex::new();
        for (i, v) in vectors.iter().enumerate() {
            index.insert(i, v).unwrap();
        }
        let p = rng.gen_range(1..n + 3);
        let got = knn(&index, &query, p).unwrap();
        let mut want: Vec<(usize, f64)> = vectors
            .iter()
            .enumerate()
            .map(|(i, v)| (i, cosine_sim(v, &query).unwrap()))
            .collect();
        want.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        want.truncate(p);
        assert_eq!(got.len(), want.len());
        for (g, w) in got.iter().zip(&want) {
            // normalized f32 copies shift the similarity slightly
            assert!((g.1 - w.1).abs() < 1e-6, "{g:?} vs {w:?}");
        }
        let got_sims: Vec<f64> = got.iter().map(|g| g.1).collect();
        assert!(got_sims.windows(2).all(|w| w[0] >= w[1]));
    }
}

/// Candidate set with occasional duplicate vectors and equal similarities.
pub fn random_mmr_case(rng: &mut StdRng) -> (Vec<EmbeddingVector>, Vec<f64>) {
    let dim = rng.gen_range(4..=64);
    let n = rng.gen_range(1..=12);
    let query = random_vector(rng, dim);
    let mut vectors: Vec<EmbeddingVector> = Vec::new();
    for _ in 0..n {
        if !vectors.is_empty() && rng.gen_bool(0.2) {
            let i = rng.gen_range(0..vectors.len());
            vectors.push(vectors[i].clone());
        } else {
            vectors.push(random_vector(rng, dim));
        }
    }
    let sims = vectors.iter().map(|v| cosine_sim(v, &query).unwrap()).collect();
    (vectors, sims)
}

#[test]
fn mmr_matches_greedy_oracle() {
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..500 {
        let (vectors, sims) = random_mmr_case(&mut rng);
        let lambda = [0.0, 0.25, 0.5, 0.75, 1.0][rng.gen_range(0..5)];
        let k = rng.gen_range(1..=vectors.len());
        let candidates: Vec<MmrCandidate> = vectors
            .iter()
            .zip(&sims)
            .enumerate()
            .map(|(id, (v, &s))| MmrCandidate {
                id,
                vector: v.clone(),
                sim_to_query: s,
            })
            .collect();
        let cfg = MmrConfig {
            lambda,
            pool_size: 40,
            select_size: k,
        };
        assert_eq!(mmr_select(&candidates, &cfg), oracles::mmr::greedy(&vectors, &sims, lambda, k));
    }
}

#[test]
fn mmr_without_diversity_is_knn_order() {
    let mut rng = StdRng::seed_from_u64(8);
    for _ in 0..200 {
        let (vectors, _) = random_mmr_case(&mut rng);
        let query = random_vector(&mut rng, vectors[0].dim());
        let mut index = VectorIndex::new();
        for (i, v) in vectors.iter().enumerate() {
            index.insert(i, v).unwrap();
        }
        let pool = knn(&index, &query, 40).unwrap();
        let candidates: Vec<MmrCandidate> = pool
            .iter()
            .map(|&(id, s)| MmrCandidate {
                id,
                vector: vectors[id].clone(),
                sim_to_query: s,
            })
            .collect();
        let cfg = MmrConfig {
            lambda: 1.0,
            pool_size: 40,
            select_size: vectors.len(),
        };
        let order: Vec<usize> = pool.iter().map(|p| p.0).collect();
        assert_eq!(mmr_select(&candidates, &cfg), order);
    }
}
