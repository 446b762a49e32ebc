use std::collections::HashMap;

use crate::par::{self, Execution};

/// Length of the longest common subsequence of two character sequences.
///
/// Bit-parallel (Allison-Dix / Hyyrö): one bit per character of `a`, one
/// sweep per character of `b`, so O(|b| * |a| / 64) word operations.
pub fn lcs_len(a: &[char], b: &[char]) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let words = a.len().div_ceil(64);
    let mut masks: HashMap<char, Vec<u64>> = HashMap::new();
    for (i, c) in a.iter().enumerate() {
        masks.entry(*c).or_insert_with(|| vec![0; words])[i / 64] |= 1 << (i % 64);
    }
    let mut v = vec![u64::MAX; words];
    for c in b {
        let Some(m) = masks.get(c) else { continue };
        let mut carry = 0u64;
        for k in 0..words {
            let u = v[k] & m[k];
            let (s1, c1) = v[k].overflowing_add(u);
            let (s2, c2) = s1.overflowing_add(carry);
            carry = (c1 || c2) as u64;
            v[k] = s2 | (v[k] - u);
        }
    }
    // LCS length is the number of zero bits among the first `a.len()`
    v.iter()
        .enumerate()
        .map(|(k, w)| {
            let bits = (a.len() - k * 64).min(64);
            let valid = if bits == 64 { u64::MAX } else { (1u64 << bits) - 1 };
            (!w & valid).count_ones() as usize
        })
        .sum()
}

/// Character-level Rouge-L F1. Either string empty gives 0.
pub fn rouge_l(candidate: &str, reference: &str) -> f64 {
    let c: Vec<char> = candidate.chars().collect();
    let r: Vec<char> = reference.chars().collect();
    let lcs = lcs_len(&c, &r);
    if lcs == 0 {
        return 0.0;
    }
    let p = lcs as f64 / c.len() as f64;
    let rec = lcs as f64 / r.len() as f64;
    2.0 * p * rec / (p + rec)
}

pub fn rouge_l_batch(pairs: &[(String, String)], exec: Execution) -> Vec<f64> {
    par::map(exec, pairs, |(c, r)| rouge_l(c, r))
}
