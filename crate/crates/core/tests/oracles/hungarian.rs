fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Every assignment of `min(rows, cols)` pairs as `(row, col)` sorted by row.
pub fn all_assignments(rows: usize, cols: usize) -> Vec<Vec<(usize, usize)>> {
    let n = rows.max(cols);
    let mut out = Vec::new();
    for perm in permutations(n) {
        let pairs: Vec<(usize, usize)> = (0..rows)
            .map(|r| (r, perm[r]))
            .filter(|&(_, c)| c < cols)
            .collect();
        if !out.contains(&pairs) {
            out.push(pairs);
        }
    }
    out
}

/// Sum in row order of the entries picked by `pairs`.
pub fn total(matrix: &[Vec<f64>], pairs: &[(usize, usize)]) -> f64 {
    pairs.iter().map(|&(r, c)| matrix[r][c]).sum()
}

/// Best total and the optimal assignments.
pub fn brute_force(matrix: &[Vec<f64>]) -> (f64, Vec<Vec<(usize, usize)>>) {
    let rows = matrix.len();
    let cols = matrix[0].len();
    let mut best = f64::NEG_INFINITY;
    let mut winners = Vec::new();
    for a in all_assignments(rows, cols) {
        let t = total(matrix, &a);
        if t > best {
            best = t;
            winners = vec![a];
        } else if t == best {
            winners.push(a);
        }
    }
    (best, winners)
}
