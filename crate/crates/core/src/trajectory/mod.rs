//! Persisted (question, behaviour, facts, answer) records and the tools
//! that check, summarise and partition them.

mod split;
mod stats;
mod store;
mod validate;

pub use split::{split_dataset, DatasetSplit, SplitError};
pub use stats::{compute_stats, compute_stats_with, DatasetStats, StatsError};
pub use store::{read_jsonl, to_jsonl_line, write_jsonl, JsonlStore, StoreError};
pub use validate::{validate_all, validate_trajectory, Violation};

use serde::{Deserialize, Serialize};

use crate::backend::Snapshots;
use crate::env::{Action, ActionKind, Mode, SessionState, SupportingFact, Window};

pub const SCHEMA_VERSION: u32 = 1;

/// Compact record of what the window showed after a step. Full window
/// text is recoverable by replaying against the trajectory's snapshots.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObservationSummary {
    pub mode: Mode,
    pub window_digest: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub page_url: Option<String>,
    pub facts: usize,
    pub actions_remaining: usize,
}

impl ObservationSummary {
    pub fn of(state: &SessionState) -> Self {
        ObservationSummary {
            mode: state.mode(),
            window_digest: state.window.digest(),
            page_url: match &state.window {
                Window::Browsing(w) => Some(w.url.clone()),
                Window::Search(_) => None,
            },
            facts: state.facts.len(),
            actions_remaining: state.actions_remaining,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    /// Digest of the state the action was applied to.
    pub pre_state: String,
    pub action: Action,
    pub observation: ObservationSummary,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpisodeStatus {
    #[default]
    Completed,
    Failed {
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trajectory {
    pub schema_version: u32,
    #[serde(default)]
    pub id: Option<u64>,
    pub question: String,
    pub max_actions: usize,
    pub steps: Vec<Step>,
    pub facts: Vec<SupportingFact>,
    #[serde(default)]
    pub answer: Option<String>,
    /// Indices into `facts` that the answer cites.
    #[serde(default)]
    pub referenced_facts: Option<Vec<usize>>,
    pub snapshots: Snapshots,
    #[serde(default)]
    pub status: EpisodeStatus,
}

impl Trajectory {
    pub fn actions(&self) -> impl Iterator<Item = &Action> {
        self.steps.iter().map(|s| &s.action)
    }

    pub fn count(&self, kind: ActionKind) -> usize {
        self.actions().filter(|a| a.kind() == kind).count()
    }

    pub fn queries(&self) -> usize {
        self.count(ActionKind::Search)
    }

    pub fn page_loads(&self) -> usize {
        self.actions().filter(|a| a.kind().page_slot().is_some()).count()
    }
}
