use factcheck_core::scoring::porter_stem;

/// Objective of an alignment, smaller is better.
pub type Rank = (isize, usize, isize, usize, usize);

fn crossings(pairs: &[(usize, usize)]) -> usize {
    let mut n = 0;
    for a in 0..pairs.len() {
        for b in 0..pairs.len() {
            if pairs[a].0 < pairs[b].0 && pairs[a].1 > pairs[b].1 {
                n += 1;
            }
        }
    }
    n
}

pub fn chunks(pairs: &[(usize, usize)]) -> usize {
    let mut p = pairs.to_vec();
    p.sort();
    let mut n = 0;
    for i in 0..p.len() {
        if i == 0 || p[i].0 != p[i - 1].0 + 1 || p[i].1 != p[i - 1].1 + 1 {
            n += 1;
        }
    }
    n
}

/// Lexicographic objective: most exact matches, fewest crossings among
/// them, most stem matches, fewest crossings overall, fewest chunks.
pub fn rank(cand: &[String], refr: &[String], pairs: &[(usize, usize)]) -> Rank {
    let exact: Vec<(usize, usize)> = pairs.iter().copied().filter(|&(i, j)| cand[i] == refr[j]).collect();
    let stem = pairs.len() - exact.len();
    (
        -(exact.len() as isize),
        crossings(&exact),
        -(stem as isize),
        crossings(pairs),
        chunks(pairs),
    )
}

fn search(
    cand: &[String],
    refr: &[String],
    stemming: bool,
    i: usize,
    used: &mut Vec<bool>,
    cur: &mut Vec<(usize, usize)>,
    best: &mut Option<Rank>,
) {
    if i == cand.len() {
        let r = rank(cand, refr, cur);
        if best.is_none_or(|b| r < b) {
            *best = Some(r);
        }
        return;
    }
    search(cand, refr, stemming, i + 1, used, cur, best);
    for j in 0..refr.len() {
        if used[j] {
            continue;
        }
        let ok = cand[i] == refr[j] || (stemming && porter_stem(&cand[i]) == porter_stem(&refr[j]));
        if ok {
            used[j] = true;
            cur.push((i, j));
            search(cand, refr, stemming, i + 1, used, cur, best);
            cur.pop();
            used[j] = false;
        }
    }
}

/// Best objective over every partial matching of equal or same-stem tokens.
pub fn best_rank(cand: &[String], refr: &[String], stemming: bool) -> Rank {
    let mut best = None;
    search(cand, refr, stemming, 0, &mut vec![false; refr.len()], &mut Vec::new(), &mut best);
    best.unwrap()
}

/// Score from the formula given match and chunk counts.
pub fn score(cand_len: usize, ref_len: usize, matches: usize, chunk_count: usize) -> f64 {
    if matches == 0 {
        return 0.0;
    }
    let (alpha, beta, gamma) = (0.9, 3.0, 0.5);
    let p = matches as f64 / cand_len as f64;
    let r = matches as f64 / ref_len as f64;
    let f = p * r / (alpha * p + (1.0 - alpha) * r);
    f * (1.0 - gamma * (chunk_count as f64 / matches as f64).powf(beta))
}
