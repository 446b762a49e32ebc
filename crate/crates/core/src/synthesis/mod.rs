//! Training-data corruption for the answer synthesis task.
//!
//! Two procedures: injecting unrelated facts drawn from other instances
//! (the target answer never mentions them, so a model learns to ignore
//! noise), and erasing punctuation-delimited sub-sentences of the real facts
//! (so a model learns to fill gaps rather than copy).
//!
//! All randomness comes from `ChaCha8Rng::seed_from_u64(seed)`; batch
//! corruption gives instance `i` its own ChaCha stream `i` of that seed, so
//! output does not depend on thread scheduling.

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::par::{self, Execution};
use crate::trajectory::Trajectory;

pub const DEFAULT_PUNCTUATION: &str = "，。！？；、,.;!?";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthesisError {
    #[error("need {needed} other instances with facts, pool has {available}")]
    InsufficientPool { needed: usize, available: usize },
    #[error("erasure probability {0} is outside [0, 1]")]
    InvalidProbability(f64),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynthesisInstance {
    pub question: String,
    pub facts: Vec<String>,
    pub answer: String,
}

impl SynthesisInstance {
    /// `None` when the trajectory carries no answer.
    pub fn from_trajectory(t: &Trajectory) -> Option<Self> {
        Some(SynthesisInstance {
            question: t.question.clone(),
            facts: t.facts.iter().map(|f| f.text.clone()).collect(),
            answer: t.answer.clone()?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynthesisRecord {
    pub question: String,
    pub facts: Vec<String>,
    /// `true` marks an injected fact.
    pub noise_mask: Vec<bool>,
    pub answer: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseCount {
    Fixed(usize),
    /// Uniform in `1..=max(1, ceil(N / 2))` for an instance with N facts.
    Auto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorruptionConfig {
    pub noise: NoiseCount,
    pub erase_p: f64,
    pub punctuation: String,
    pub seed: u64,
}

impl Default for CorruptionConfig {
    fn default() -> Self {
        CorruptionConfig { noise: NoiseCount::Auto, erase_p: 0.0, punctuation: DEFAULT_PUNCTUATION.into(), seed: 0 }
    }
}

/// Split after every punctuation mark; the mark stays with the text on its left.
pub fn split_subsentences(text: &str, punctuation: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut current = String::new();
    for c in text.chars() {
        current.push(c);
        if punctuation.contains(c) {
            out.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        out.push(current);
    }
    out
}

/// Drop each sub-sentence independently with probability `p` (one
/// `gen::<f64>()` draw per sub-sentence, dropped when the draw is below `p`)
/// and rejoin the survivors in order.
pub fn erase_subsentences_with<R: Rng + ?Sized>(
    facts: &[String],
    p: f64,
    punctuation: &str,
    rng: &mut R,
) -> Result<Vec<String>, SynthesisError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(SynthesisError::InvalidProbability(p));
    }
    Ok(facts
        .iter()
        .map(|f| split_subsentences(f, punctuation).into_iter().filter(|_| rng.gen::<f64>() >= p).collect::<String>())
        .collect())
}

pub fn erase_subsentences(facts: &[String], p: f64, seed: u64) -> Result<Vec<String>, SynthesisError> {
    erase_subsentences_with(facts, p, DEFAULT_PUNCTUATION, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Choose the number of noise facts for an instance with `n_facts` facts.
pub fn noise_count<R: Rng + ?Sized>(noise: NoiseCount, n_facts: usize, rng: &mut R) -> usize {
    match noise {
        NoiseCount::Fixed(n) => n,
        NoiseCount::Auto => rng.gen_range(1..=n_facts.div_ceil(2).max(1)),
    }
}

/// Add `n_noise` facts, one from each of `n_noise` distinct donors, then
/// shuffle everything uniformly. Donors without facts are never chosen.
fn inject<R: Rng + ?Sized>(
    instance: &SynthesisInstance,
    donors: &[&[String]],
    n_noise: usize,
    rng: &mut R,
) -> Result<SynthesisRecord, SynthesisError> {
    let eligible: Vec<&[String]> = donors.iter().copied().filter(|f| !f.is_empty()).collect();
    if eligible.len() < n_noise {
        return Err(SynthesisError::InsufficientPool { needed: n_noise, available: eligible.len() });
    }
    let mut tagged: Vec<(String, bool)> = instance.facts.iter().map(|f| (f.clone(), false)).collect();
    for d in index::sample(rng, eligible.len(), n_noise) {
        let facts = eligible[d];
        tagged.push((facts[rng.gen_range(0..facts.len())].clone(), true));
    }
    tagged.shuffle(rng);
    let (facts, noise_mask) = tagged.into_iter().unzip();
    Ok(SynthesisRecord { question: instance.question.clone(), facts, noise_mask, answer: instance.answer.clone() })
}

/// `pool` must not contain `instance` itself.
pub fn corrupt_with_noise(
    instance: &SynthesisInstance,
    pool: &[SynthesisInstance],
    n_noise: usize,
    seed: u64,
) -> Result<SynthesisRecord, SynthesisError> {
    let donors: Vec<&[String]> = pool.iter().map(|p| p.facts.as_slice()).collect();
    inject(instance, &donors, n_noise, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Corrupt every instance, drawing noise from all the other instances.
/// Erasure (when `erase_p > 0`) applies to the instance's own facts before
/// noise is added.
pub fn corrupt_dataset(
    instances: &[SynthesisInstance],
    config: &CorruptionConfig,
    exec: Execution,
) -> Result<Vec<SynthesisRecord>, SynthesisError> {
    if !(0.0..=1.0).contains(&config.erase_p) {
        return Err(SynthesisError::InvalidProbability(config.erase_p));
    }
    let all: Vec<&[String]> = instances.iter().map(|i| i.facts.as_slice()).collect();
    par::map_range(exec, 0..instances.len(), |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(i as u64);
        let mut own = instances[i].clone();
        if config.erase_p > 0.0 {
            own.facts = erase_subsentences_with(&own.facts, config.erase_p, &config.punctuation, &mut rng)?;
        }
        let n_noise = noise_count(config.noise, own.facts.len(), &mut rng);
        let donors: Vec<&[String]> = all.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, f)| *f).collect();
        inject(&own, &donors, n_noise, &mut rng)
    })
    .into_iter()
    .collect()
}
