use std::collections::HashSet;

use super::MetricError;

/// How `Novelty_n` is normalised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoveltyVariant {
    /// Share of the candidate's distinct n-grams absent from the facts. Always in [0, 1].
    #[default]
    CandidateShare,
    /// Distinct novel candidate n-grams over the number of n-grams in the
    /// facts. Can exceed 1; infinite when the facts have no n-grams.
    FactNormalized,
}

fn grams(chars: &[char], n: usize) -> HashSet<&[char]> {
    if chars.len() < n {
        return HashSet::new();
    }
    chars.windows(n).collect()
}

/// `Novelty_n` of `candidate` against the facts joined in order, so an
/// answer that copies consecutive facts verbatim scores 0.
pub fn novelty_n(candidate: &str, facts: &[String], n: usize, variant: NoveltyVariant) -> f64 {
    let cand: Vec<char> = candidate.chars().collect();
    let source: Vec<char> = facts.concat().chars().collect();
    let cand_grams = grams(&cand, n);
    let source_grams = grams(&source, n);
    let novel = cand_grams.iter().filter(|g| !source_grams.contains(*g)).count();
    match variant {
        NoveltyVariant::CandidateShare => {
            if cand_grams.is_empty() {
                0.0
            } else {
                novel as f64 / cand_grams.len() as f64
            }
        }
        NoveltyVariant::FactNormalized => {
            let total = source.len().saturating_sub(n - 1);
            novel as f64 / total as f64
        }
    }
}

/// Mean of `Novelty_2`, `Novelty_3` and `Novelty_4`.
pub fn novelty(candidate: &str, facts: &[String], variant: NoveltyVariant) -> Result<f64, MetricError> {
    let len = candidate.chars().count();
    if len < 4 {
        return Err(MetricError::Undefined(len));
    }
    Ok((2..=4).map(|n| novelty_n(candidate, facts, n, variant)).sum::<f64>() / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn anchors() {
        let facts = v(&["麦田怪圈是", "人为制造的"]);
        assert_eq!(novelty("麦田怪圈是人为制造的", &facts, NoveltyVariant::default()).unwrap(), 0.0);
        assert_eq!(novelty("wxyz", &facts, NoveltyVariant::default()).unwrap(), 1.0);
        let n = novelty("ABCDE", &v(&["ABC"]), NoveltyVariant::default()).unwrap();
        assert!((n - (0.5 + 2.0 / 3.0 + 1.0) / 3.0).abs() < 1e-12);
    }

    #[test]
    fn short_candidate_is_undefined() {
        assert_eq!(novelty("abc", &v(&["abc"]), NoveltyVariant::default()), Err(MetricError::Undefined(3)));
    }

    #[test]
    fn fact_normalized_variant() {
        // facts "ABC": 2 bigrams; candidate novel bigrams CD, DE
        assert_eq!(novelty_n("ABCDE", &v(&["ABC"]), 2, NoveltyVariant::FactNormalized), 1.0);
        assert!(novelty_n("ABCDE", &v(&["AB"]), 3, NoveltyVariant::FactNormalized).is_infinite());
    }
}
