/// Scores every document by scanning it in full for each query token.
pub fn naive_scores(docs: &[Vec<String>], query: &[String], k1: f64, b: f64) -> Vec<f64> {
    let n = docs.len() as f64;
    let avgdl = docs.iter().map(Vec::len).sum::<usize>() as f64 / n;
    let mut scores = vec![0.0; docs.len()];
    for q in query {
        let df = docs.iter().filter(|d| d.contains(q)).count() as f64;
        if df == 0.0 {
            continue;
        }
        let idf = (1.0 + (n - df + 0.5) / (df + 0.5)).ln();
        for (i, d) in docs.iter().enumerate() {
            let tf = d.iter().filter(|t| *t == q).count() as f64;
            if tf == 0.0 {
                continue;
            }
            let dl = d.len() as f64;
            scores[i] += idf * (tf * (k1 + 1.0)) / (tf + k1 * (1.0 - b + b * dl / avgdl));
        }
    }
    scores
}

/// Positive-scoring documents by descending score, then ascending index.
pub fn naive_top(docs: &[Vec<String>], query: &[String], k1: f64, b: f64, omega: usize) -> Vec<(usize, f64)> {
    let scores = naive_scores(docs, query, k1, b);
    let mut order: Vec<usize> = (0..docs.len()).filter(|&i| scores[i] > 0.0).collect();
    // insertion sort keeps the comparison explicit
    for i in 1..order.len() {
        let mut j = i;
        while j > 0 {
            let (a, c) = (order[j - 1], order[j]);
            let swap = scores[c] > scores[a] || (scores[c] == scores[a] && c < a);
            if !swap {
                break;
            }
            order.swap(j - 1, j);
            j -= 1;
        }
    }
    order.into_iter().take(omega).map(|i| (i, scores[i])).collect()
}
