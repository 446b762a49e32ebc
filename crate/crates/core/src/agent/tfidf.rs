//! Non-interactive retrieval baseline: one search with the raw question,
//! every paragraph of every result page ranked by TF-IDF cosine similarity
//! over character bigrams, then packed greedily into a character budget.

use std::collections::BTreeMap;

use tracing::warn;

use crate::backend::{fetch_and_extract, search, BackendError, SearchProvider, RESULTS_PER_WINDOW};
use crate::par::{self, Execution};

pub const DEFAULT_CHAR_BUDGET: usize = 3072;

#[derive(Debug, Clone, Copy)]
pub struct TfidfConfig {
    /// Characters of selected paragraphs; packing stops before the first
    /// paragraph that would exceed it.
    pub char_budget: usize,
    /// Search windows (of three results) to read.
    pub result_windows: usize,
}

impl Default for TfidfConfig {
    fn default() -> Self {
        TfidfConfig { char_budget: DEFAULT_CHAR_BUDGET, result_windows: 4 }
    }
}

type Vector = BTreeMap<(char, char), f64>;

fn bigram_counts(text: &str) -> BTreeMap<(char, char), usize> {
    let chars: Vec<char> = text.chars().collect();
    let mut counts = BTreeMap::new();
    for w in chars.windows(2) {
        *counts.entry((w[0], w[1])).or_insert(0) += 1;
    }
    counts
}

fn weigh(counts: &BTreeMap<(char, char), usize>, idf: &BTreeMap<(char, char), f64>) -> Vector {
    counts.iter().filter_map(|(g, &tf)| idf.get(g).map(|w| (*g, tf as f64 * w))).collect()
}

fn cosine(a: &Vector, b: &Vector) -> f64 {
    let dot: f64 = a.iter().filter_map(|(g, x)| b.get(g).map(|y| x * y)).sum();
    let na = a.values().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.values().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

/// `(paragraph index, score)` sorted by descending score; ties keep input order.
///
/// Document frequencies come from `paragraphs`; idf is `ln(1 + N / df)` and
/// the question's bigrams that never occur in the collection are ignored.
pub fn rank_paragraphs(question: &str, paragraphs: &[String], exec: Execution) -> Vec<(usize, f64)> {
    let counts: Vec<_> = par::map(exec, paragraphs, |p| bigram_counts(p));
    let mut df: BTreeMap<(char, char), usize> = BTreeMap::new();
    for c in &counts {
        for g in c.keys() {
            *df.entry(*g).or_insert(0) += 1;
        }
    }
    let n = paragraphs.len() as f64;
    let idf: BTreeMap<_, _> = df.into_iter().map(|(g, d)| (g, (1.0 + n / d as f64).ln())).collect();
    let q = weigh(&bigram_counts(question), &idf);
    let scores = par::map(exec, &counts, |c| cosine(&q, &weigh(c, &idf)));
    let mut ranked: Vec<(usize, f64)> = scores.into_iter().enumerate().collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    ranked
}

/// Take ranked paragraphs while the running character total stays within `budget`.
pub fn select_within_budget(paragraphs: &[String], ranked: &[(usize, f64)], budget: usize) -> Vec<String> {
    let mut used = 0;
    let mut out = Vec::new();
    for &(i, _) in ranked {
        let len = paragraphs[i].chars().count();
        if used + len > budget {
            break;
        }
        used += len;
        out.push(paragraphs[i].clone());
    }
    out
}

/// Newline-separated, trimmed, non-empty paragraphs.
pub fn split_paragraphs(body: &str) -> Vec<String> {
    body.lines().map(str::trim).filter(|l| !l.is_empty()).map(str::to_string).collect()
}

pub fn tfidf_baseline_retrieve(
    question: &str,
    provider: &dyn SearchProvider,
    config: &TfidfConfig,
) -> Result<Vec<String>, BackendError> {
    assert!(config.char_budget >= 1, "budget must be positive");
    let mut urls = Vec::new();
    for w in 0..config.result_windows {
        let results = search(provider, question, w * RESULTS_PER_WINDOW)?;
        let done = results.len() < RESULTS_PER_WINDOW;
        urls.extend(results.into_iter().map(|r| r.url));
        if done {
            break;
        }
    }
    let mut paragraphs = Vec::new();
    for url in urls {
        match fetch_and_extract(provider, &url) {
            Ok(snap) => paragraphs.extend(split_paragraphs(&snap.document.body)),
            Err(e) => warn!(%url, error = %e, "skipping page"),
        }
    }
    let ranked = rank_paragraphs(question, &paragraphs, Execution::default());
    Ok(select_within_budget(&paragraphs, &ranked, config.char_budget))
}
