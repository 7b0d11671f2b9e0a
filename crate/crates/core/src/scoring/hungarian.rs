//! Maximum-weight assignment via Kuhn-Munkres with potentials.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    /// `(row, col)` pairs sorted by row; `min(rows, cols)` of them.
    pub pairs: Vec<(usize, usize)>,
    /// Sum of the assigned entries.
    pub total: f64,
}

/// Minimum-cost perfect matching of a square matrix. Returns the column of
/// each row and the cost.
fn solve_min(cost: &[Vec<f64>]) -> (Vec<usize>, f64) {
    let n = cost.len();
    if n == 0 {
        return (Vec::new(), 0.0);
    }
    // 1-based potentials; column 0 is a sentinel
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut col_of = vec![0; n];
    for j in 1..=n {
        col_of[p[j] - 1] = j - 1;
    }
    let total = (0..n).map(|r| cost[r][col_of[r]]).sum();
    (col_of, total)
}

fn minor(cost: &[Vec<f64>], rows: &[usize], cols: &[usize]) -> Vec<Vec<f64>> {
    rows.iter()
        .map(|&r| cols.iter().map(|&c| cost[r][c]).collect())
        .collect()
}

/// Optimal assignment maximizing the sum of `matrix` entries.
///
/// Rectangular input is zero-padded to square. Among optimal assignments
/// the one whose column sequence, read row by row, is lexicographically
/// smallest is returned.
pub fn hungarian_max(matrix: &[Vec<f64>]) -> Result<Assignment> {
    let rows = matrix.len();
    if rows == 0 {
        return Err(Error::Validation("assignment matrix has no rows".into()));
    }
    let cols = matrix[0].len();
    if cols == 0 {
        return Err(Error::Validation("assignment matrix has no columns".into()));
    }
    for (r, row) in matrix.iter().enumerate() {
        if row.len() != cols {
            return Err(Error::Validation(format!(
                "assignment matrix row {r} has {} entries, expected {cols}",
                row.len()
            )));
        }
        if let Some(c) = row.iter().position(|x| !x.is_finite()) {
            return Err(Error::Validation(format!(
                "assignment matrix entry ({r}, {c}) is {}",
                row[c]
            )));
        }
    }
    let n = rows.max(cols);
    let mut cost = vec![vec![0.0; n]; n];
    for (r, row) in matrix.iter().enumerate() {
        for (c, &x) in row.iter().enumerate() {
            cost[r][c] = -x;
        }
    }

    let (mut col_of, optimum) = solve_min(&cost);
    let tol = 1e-9 * optimum.abs().max(1.0);
    let mut fixed_cost = 0.0;
    let mut free_cols: Vec<usize> = (0..n).collect();
    for r in 0..n {
        let rest_rows: Vec<usize> = (r + 1..n).collect();
        for &c in free_cols.iter().take_while(|&&c| c < col_of[r]) {
            let rest_cols: Vec<usize> = free_cols.iter().copied().filter(|&x| x != c).collect();
            let (sub_cols, sub_cost) = solve_min(&minor(&cost, &rest_rows, &rest_cols));
            if fixed_cost + cost[r][c] + sub_cost <= optimum + tol {
                col_of[r] = c;
                for (k, &rr) in rest_rows.iter().enumerate() {
                    col_of[rr] = rest_cols[sub_cols[k]];
                }
                break;
            }
        }
        fixed_cost += cost[r][col_of[r]];
        free_cols.retain(|&x| x != col_of[r]);
    }

    let pairs: Vec<(usize, usize)> = (0..rows)
        .map(|r| (r, col_of[r]))
        .filter(|&(_, c)| c < cols)
        .collect();
    let total = pairs.iter().map(|&(r, c)| matrix[r][c]).sum();
    Ok(Assignment { pairs, total })
}
