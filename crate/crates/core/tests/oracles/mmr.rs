use factcheck_core::dense::EmbeddingVector;

fn cosine(a: &EmbeddingVector, b: &EmbeddingVector) -> f64 {
    let dot: f64 = a.values().iter().zip(b.values()).map(|(&x, &y)| x as f64 * y as f64).sum();
    let na = a.values().iter().map(|&x| x as f64 * x as f64).sum::<f64>().sqrt();
    let nb = b.values().iter().map(|&x| x as f64 * x as f64).sum::<f64>().sqrt();
    if na * nb == 0.0 {
        0.0
    } else {
        (dot / (na * nb)).clamp(-1.0, 1.0)
    }
}

/// Greedy MMR recomputing every redundancy term from scratch at each step.
/// Returns positions into `vectors`.
pub fn greedy(vectors: &[EmbeddingVector], sims: &[f64], lambda: f64, k: usize) -> Vec<usize> {
    let mut selected: Vec<usize> = Vec::new();
    while selected.len() < k.min(vectors.len()) {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..vectors.len() {
            if selected.contains(&i) {
                continue;
            }
            let redundancy = selected
                .iter()
                .map(|&s| cosine(&vectors[i], &vectors[s]))
                .fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.max(x))))
                .unwrap_or(0.0);
            let score = lambda * sims[i] - (1.0 - lambda) * redundancy;
            let take = match best {
                None => true,
                Some((b, s)) => score > s || (score == s && sims[i] > sims[b]),
            };
            if take {
                best = Some((i, score));
            }
        }
        selected.push(best.unwrap().0);
    }
    selected
}
