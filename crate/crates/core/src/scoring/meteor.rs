//! Unigram METEOR with exact and Porter-stem matching stages.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::stemmer::porter_stem;
use crate::error::{Error, Result};
use crate::lexical::{tokenize, TokenizerConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MeteorParams {
    /// Recall weight of the harmonic mean, in (0, 1).
    pub alpha: f64,
    /// Fragmentation exponent.
    pub beta: f64,
    /// Maximum fragmentation penalty, in [0, 1].
    pub gamma: f64,
    /// Enables the stem-matching stage.
    pub stemming: bool,
}

impl Default for MeteorParams {
    fn default() -> Self {
        MeteorParams {
            alpha: 0.9,
            beta: 3.0,
            gamma: 0.5,
            stemming: true,
        }
    }
}

impl MeteorParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Validation(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::Validation(format!("gamma must lie in [0, 1], got {}", self.gamma)));
        }
        if !self.beta.is_finite() || self.beta < 0.0 {
            return Err(Error::Validation(format!("beta must be finite and >= 0, got {}", self.beta)));
        }
        Ok(())
    }
}

/// Upper bound on alignments enumerated per stage before falling back to a
/// nearest-relative-position choice.
const SEARCH_BUDGET: u64 = 2048;

/// Tokens of one match class on both sides, in increasing position.
struct Group {
    cand: Vec<usize>,
    refr: Vec<usize>,
}

impl Group {
    fn choices(&self) -> u64 {
        let (n, k) = (self.cand.len().max(self.refr.len()), self.cand.len().min(self.refr.len()));
        binomial(n as u64, k as u64)
    }

    /// Order-preserving pairing using `pick`, the chosen positions of the
    /// longer side.
    fn pairs(&self, pick: &[usize]) -> Vec<(usize, usize)> {
        let cand_short = self.cand.len() <= self.refr.len();
        pick.iter().enumerate().map(move |(i, &p)| {
            if cand_short {
                (self.cand[i], self.refr[p])
            } else {
                (self.cand[p], self.refr[i])
            }
        })
        .collect()
    }

    fn short_long(&self) -> (usize, usize) {
        (self.cand.len().min(self.refr.len()), self.cand.len().max(self.refr.len()))
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
        if acc >= u64::MAX / 2 {
            return u64::MAX;
        }
    }
    acc
}

/// All k-subsets of 0..n in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else {
            return out;
        };
        cur[i] += 1;
        for t in i + 1..k {
            cur[t] = cur[t - 1] + 1;
        }
    }
}

/// Positions of the longer side chosen by minimizing the summed distance in
/// relative sentence position.
fn nearest_pick(g: &Group, cand_len: usize, ref_len: usize) -> Vec<usize> {
    let cand_short = g.cand.len() <= g.refr.len();
    let (short, long, short_len, long_len) = if cand_short {
        (&g.cand, &g.refr, cand_len, ref_len)
    } else {
        (&g.refr, &g.cand, ref_len, cand_len)
    };
    let (s, l) = (short.len(), long.len());
    let rel = |p: usize, len: usize| p as f64 / len as f64;
    // cost[i][j]: best cost placing short[..i] into long[..j]
    let mut cost = vec![vec![f64::INFINITY; l + 1]; s + 1];
    cost[0].iter_mut().for_each(|c| *c = 0.0);
    for i in 1..=s {
        for j in i..=l {
            let take = cost[i - 1][j - 1] + (rel(short[i - 1], short_len) - rel(long[j - 1], long_len)).abs();
            cost[i][j] = take.min(cost[i][j - 1]);
        }
    }
    let mut pick = vec![0; s];
    let (mut i, mut j) = (s, l);
    while i > 0 {
        if cost[i][j - 1] <= cost[i][j] && j > i {
            j -= 1;
        } else {
            pick[i - 1] = j - 1;
            i -= 1;
            j -= 1;
        }
    }
    pick
}

/// Every combination of per-group picks, or `None` beyond the budget.
fn enumerate(groups: &[Group], budget: u64) -> Option<Vec<Vec<(usize, usize)>>> {
    let total = groups.iter().try_fold(1u64, |acc, g| acc.checked_mul(g.choices()))?;
    if total > budget {
        return None;
    }
    let mut out = vec![Vec::new()];
    for g in groups {
        let (short, long) = g.short_long();
        let picks = combinations(long, short);
        let mut next = Vec::with_capacity(out.len() * picks.len());
        for partial in &out {
            for pick in &picks {
                let mut a = partial.clone();
                a.extend(g.pairs(pick));
                next.push(a);
            }
        }
        out = next;
    }
    Some(out)
}

fn fallback(groups: &[Group], cand_len: usize, ref_len: usize) -> Vec<(usize, usize)> {
    groups
        .iter()
        .flat_map(|g| {
            g.pairs(&nearest_pick(g, cand_len, ref_len))
        })
        .collect()
}

fn build_groups<K: Ord>(
    cand: &[String],
    refr: &[String],
    cand_free: &[bool],
    ref_free: &[bool],
    key: impl Fn(&str) -> K,
) -> Vec<Group> {
    let mut map: BTreeMap<K, Group> = BTreeMap::new();
    for (i, t) in cand.iter().enumerate().filter(|(i, _)| cand_free[*i]) {
        map.entry(key(t))
            .or_insert_with(|| Group { cand: Vec::new(), refr: Vec::new() })
            .cand
            .push(i);
    }
    for (j, t) in refr.iter().enumerate().filter(|(j, _)| ref_free[*j]) {
        if let Some(g) = map.get_mut(&key(t)) {
            g.refr.push(j);
        }
    }
    map.into_values().filter(|g| !g.refr.is_empty()).collect()
}

/// Pairs `(i, j)` and `(i', j')` that cross, i.e. disagree on order.
pub fn count_crossings(pairs: &[(usize, usize)]) -> usize {
    let mut n = 0;
    for (a, &(i, j)) in pairs.iter().enumerate() {
        for &(i2, j2) in &pairs[a + 1..] {
            if (i < i2) != (j < j2) {
                n += 1;
            }
        }
    }
    n
}

/// Runs of matches adjacent on both sides.
pub fn count_chunks(pairs: &[(usize, usize)]) -> usize {
    let mut sorted = pairs.to_vec();
    sorted.sort_unstable();
    if sorted.is_empty() {
        return 0;
    }
    1 + sorted
        .windows(2)
        .filter(|w| !(w[1].0 == w[0].0 + 1 && w[1].1 == w[0].1 + 1))
        .count()
}

/// Unigram alignment of two token lists.
///
/// Exact matches come first, then matches on Porter stems among the tokens
/// still free. Each stage maximizes its match count; ties go to fewer
/// crossings in the exact stage, then fewer crossings overall, then fewer
/// chunks. Pairs are returned sorted.
pub fn align(cand: &[String], refr: &[String], stemming: bool) -> Vec<(usize, usize)> {
    let all_cand = vec![true; cand.len()];
    let all_ref = vec![true; refr.len()];
    let exact_groups = build_groups(cand, refr, &all_cand, &all_ref, |t| t.to_string());

    let stage1: Vec<Vec<(usize, usize)>> = match enumerate(&exact_groups, SEARCH_BUDGET) {
        Some(options) => {
            let best = options.iter().map(|a| count_crossings(a)).min().unwrap_or(0);
            options.into_iter().filter(|a| count_crossings(a) == best).collect()
        }
        None => vec![fallback(&exact_groups, cand.len(), refr.len())],
    };

    type Ranked = ((usize, usize), Vec<(usize, usize)>);
    let mut best: Option<Ranked> = None;
    let mut consider = |pairs: Vec<(usize, usize)>| {
        let rank = (count_crossings(&pairs), count_chunks(&pairs));
        if best.as_ref().is_none_or(|(r, _)| rank < *r) {
            best = Some((rank, pairs));
        }
    };
    let budget_per_stage1 = (SEARCH_BUDGET / stage1.len() as u64).max(1);
    for exact in stage1 {
        if !stemming {
            consider(exact);
            continue;
        }
        let mut cand_free = all_cand.clone();
        let mut ref_free = all_ref.clone();
        for &(i, j) in &exact {
            cand_free[i] = false;
            ref_free[j] = false;
        }
        let stem_groups = build_groups(cand, refr, &cand_free, &ref_free, porter_stem);
        let stage2 = enumerate(&stem_groups, budget_per_stage1)
            .unwrap_or_else(|| vec![fallback(&stem_groups, cand.len(), refr.len())]);
        for extra in stage2 {
            let mut pairs = exact.clone();
            pairs.extend(extra);
            consider(pairs);
        }
    }
    let mut pairs = best.map(|(_, p)| p).unwrap_or_default();
    pairs.sort_unstable();
    pairs
}

/// Score of a candidate token list against a reference token list.
pub fn meteor_tokens(cand: &[String], refr: &[String], p: &MeteorParams) -> f64 {
    if cand.is_empty() || refr.is_empty() {
        return 0.0;
    }
    let pairs = align(cand, refr, p.stemming);
    let m = pairs.len();
    if m == 0 {
        return 0.0;
    }
    let precision = m as f64 / cand.len() as f64;
    let recall = m as f64 / refr.len() as f64;
    let f_mean = precision * recall / (p.alpha * precision + (1.0 - p.alpha) * recall);
    let penalty = p.gamma * (count_chunks(&pairs) as f64 / m as f64).powf(p.beta);
    f_mean * (1.0 - penalty)
}

/// Tokenizes both strings (lowercase, alphanumeric runs) and scores them.
pub fn meteor_lite(candidate: &str, reference: &str, p: &MeteorParams) -> f64 {
    let cfg = TokenizerConfig::default();
    meteor_tokens(&tokenize(candidate, &cfg), &tokenize(reference, &cfg), p)
}
