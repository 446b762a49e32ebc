//! Sub-task metrics: Micro/Macro-F1 over the ten action classes,
//! character-level Rouge-L, and n-gram Novelty against supporting facts.

mod f1;
mod novelty;
mod rouge;

pub use f1::{micro_macro_f1, F1Scores};
pub use novelty::{novelty, novelty_n, NoveltyVariant};
pub use rouge::{lcs_len, rouge_l, rouge_l_batch};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("novelty is undefined for a candidate of {0} characters (need at least 4)")]
    Undefined(usize),
}

/// Scores for one evaluated sub-task. Fields that do not apply are omitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub v: String,
    pub task: String,
    pub count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub micro_f1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub macro_f1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rouge_l: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub novelty: Option<f64>,
    /// Pairs skipped by a metric (e.g. novelty on very short candidates).
    #[serde(default, skip_serializing_if = "is_zero")]
    pub skipped: usize,
}

fn is_zero(n: &usize) -> bool {
    *n == 0
}

impl MetricReport {
    pub fn new(task: impl Into<String>, count: usize) -> Self {
        MetricReport {
            v: crate::WIRE_VERSION.to_string(),
            task: task.into(),
            count,
            micro_f1: None,
            macro_f1: None,
            rouge_l: None,
            novelty: None,
            skipped: 0,
        }
    }
}
