//! Straightforward reference implementations used to check the library.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap, HashSet};

/// Every `(i, j)` whose text starts with `start` and ends with `end`, the
/// two segments not overlapping.
pub fn span_candidates(window: &[char], start: &[char], end: &[char]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..window.len() {
        for j in i..=window.len() {
            if j - i >= start.len() + end.len() && window[i..].starts_with(start) && window[..j].ends_with(end) {
                out.push((i, j));
            }
        }
    }
    out
}

/// Longest candidate, earliest start on ties.
pub fn longest_span(window: &[char], start: &[char], end: &[char]) -> Option<(usize, usize)> {
    span_candidates(window, start, end).into_iter().max_by(|a, b| (a.1 - a.0).cmp(&(b.1 - b.0)).then(b.0.cmp(&a.0)))
}

pub fn literal_positions(window: &[char], lit: &[char]) -> Vec<usize> {
    (0..window.len()).filter(|&i| window[i..].starts_with(lit)).collect()
}

pub fn lcs_dp(a: &[char], b: &[char]) -> usize {
    let mut t = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            t[i][j] = if a[i - 1] == b[j - 1] { t[i - 1][j - 1] + 1 } else { t[i - 1][j].max(t[i][j - 1]) };
        }
    }
    t[a.len()][b.len()]
}

/// F-measure over the LCS with equal weight on precision and recall.
pub fn rouge_l_dp(c: &str, r: &str) -> f64 {
    let a: Vec<char> = c.chars().collect();
    let b: Vec<char> = r.chars().collect();
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let l = lcs_dp(&a, &b) as f64;
    if l == 0.0 {
        return 0.0;
    }
    let p = l / a.len() as f64;
    let rec = l / b.len() as f64;
    2.0 * p * rec / (p + rec)
}

pub fn accuracy<T: PartialEq>(gold: &[T], pred: &[T]) -> f64 {
    gold.iter().zip(pred).filter(|(g, p)| g == p).count() as f64 / gold.len() as f64
}

/// Per-class F1 averaged over classes seen in gold or pred.
pub fn macro_f1<T: Ord + Clone>(gold: &[T], pred: &[T]) -> f64 {
    let mut classes: BTreeMap<T, (usize, usize, usize)> = BTreeMap::new();
    for (g, p) in gold.iter().zip(pred) {
        if g == p {
            classes.entry(g.clone()).or_default().0 += 1;
        } else {
            classes.entry(p.clone()).or_default().1 += 1;
            classes.entry(g.clone()).or_default().2 += 1;
        }
    }
    let f1s: Vec<f64> = classes
        .values()
        .map(|&(tp, fp, fn_)| if tp == 0 { 0.0 } else { 2.0 * tp as f64 / (2 * tp + fp + fn_) as f64 })
        .collect();
    f1s.iter().sum::<f64>() / f1s.len() as f64
}

fn grams(s: &str, n: usize) -> Vec<String> {
    let c: Vec<char> = s.chars().collect();
    if c.len() < n {
        return Vec::new();
    }
    (0..=c.len() - n).map(|i| c[i..i + n].iter().collect()).collect()
}

/// Share of distinct candidate n-grams absent from the joined facts, averaged over n = 2, 3, 4.
pub fn novelty_oracle(candidate: &str, facts: &[&str]) -> f64 {
    let joined = facts.concat();
    let mut total = 0.0;
    for n in 2..=4 {
        let cand: HashSet<String> = grams(candidate, n).into_iter().collect();
        let known: HashSet<String> = grams(&joined, n).into_iter().collect();
        let novel = cand.iter().filter(|g| !known.contains(*g)).count();
        total += novel as f64 / cand.len() as f64;
    }
    total / 3.0
}

/// Cosine similarity of bigram TF-IDF vectors, idf = ln(1 + N/df).
pub fn tfidf_scores(question: &str, paragraphs: &[String]) -> Vec<f64> {
    let bag = |s: &str| {
        let mut m: HashMap<String, f64> = HashMap::new();
        for g in grams(s, 2) {
            *m.entry(g).or_default() += 1.0;
        }
        m
    };
    let bags: Vec<_> = paragraphs.iter().map(|p| bag(p)).collect();
    let n = paragraphs.len() as f64;
    let idf = |g: &str| {
        let df = bags.iter().filter(|b| b.contains_key(g)).count() as f64;
        if df == 0.0 {
            0.0
        } else {
            (1.0 + n / df).ln()
        }
    };
    let weigh = |b: &HashMap<String, f64>| -> HashMap<String, f64> {
        b.iter().map(|(g, tf)| (g.clone(), tf * idf(g))).collect()
    };
    let q = weigh(&bag(question));
    let norm = |v: &HashMap<String, f64>| v.values().map(|x| x * x).sum::<f64>().sqrt();
    bags.iter()
        .map(|b| {
            let d = weigh(b);
            let dot: f64 = q.iter().map(|(g, x)| x * d.get(g).copied().unwrap_or(0.0)).sum();
            let (nq, nd) = (norm(&q), norm(&d));
            if nq == 0.0 || nd == 0.0 {
                0.0
            } else {
                dot / (nq * nd)
            }
        })
        .collect()
}
