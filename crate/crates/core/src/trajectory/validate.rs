use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{ObservationSummary, Trajectory, SCHEMA_VERSION};
use crate::backend::SnapshotStore;
use crate::env::{EnvError, Session};
use crate::par::{self, Execution};

/// One reason a trajectory cannot be accepted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "code", rename_all = "snake_case")]
pub enum Violation {
    UnsupportedSchema { found: u32 },
    EmptyQuestion,
    InvalidBudget,
    BudgetExceeded { steps: usize, max_actions: usize },
    IllegalStep { step: usize, reason: String },
    StateDigestMismatch { step: usize },
    ObservationMismatch { step: usize },
    NotTerminated,
    FactMismatch { index: usize },
    ReferenceOutOfRange { index: usize },
}

impl Violation {
    /// Stable short label.
    pub fn label(&self) -> &'static str {
        match self {
            Violation::UnsupportedSchema { .. } => "unsupported schema",
            Violation::EmptyQuestion => "empty question",
            Violation::InvalidBudget => "invalid budget",
            Violation::BudgetExceeded { .. } => "budget exceeded",
            Violation::IllegalStep { .. } => "illegal step",
            Violation::StateDigestMismatch { .. } => "state digest mismatch",
            Violation::ObservationMismatch { .. } => "observation mismatch",
            Violation::NotTerminated => "not terminated",
            Violation::FactMismatch { .. } => "fact mismatch",
            Violation::ReferenceOutOfRange { .. } => "reference out of range",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let label = self.label();
        match self {
            Violation::UnsupportedSchema { found } => write!(f, "{label}: version {found}"),
            Violation::BudgetExceeded { steps, max_actions } => {
                write!(f, "{label}: {steps} steps for a budget of {max_actions}")
            }
            Violation::IllegalStep { step, reason } => write!(f, "{label} {step}: {reason}"),
            Violation::StateDigestMismatch { step } | Violation::ObservationMismatch { step } => {
                write!(f, "{label} at step {step}")
            }
            Violation::FactMismatch { index } | Violation::ReferenceOutOfRange { index } => {
                write!(f, "{label}: fact {index}")
            }
            Violation::EmptyQuestion | Violation::InvalidBudget | Violation::NotTerminated => f.write_str(label),
        }
    }
}

/// Replay `t` from a fresh session over its own snapshots and list every
/// way it disagrees with the recorded data. Empty means valid.
pub fn validate_trajectory(t: &Trajectory) -> Vec<Violation> {
    let mut out = Vec::new();
    if t.schema_version != SCHEMA_VERSION {
        out.push(Violation::UnsupportedSchema { found: t.schema_version });
        return out;
    }
    let mut session = match Session::replaying(&t.question, t.max_actions, &t.snapshots) {
        Ok(s) => s,
        Err(EnvError::InvalidQuestion) => {
            out.push(Violation::EmptyQuestion);
            return out;
        }
        Err(_) => {
            out.push(Violation::InvalidBudget);
            return out;
        }
    };

    let replayable = if t.steps.len() > t.max_actions {
        out.push(Violation::BudgetExceeded { steps: t.steps.len(), max_actions: t.max_actions });
        &t.steps[..t.max_actions]
    } else {
        &t.steps[..]
    };

    let mut replay_ok = true;
    for (i, step) in replayable.iter().enumerate() {
        if session.state().digest() != step.pre_state {
            out.push(Violation::StateDigestMismatch { step: i });
        }
        if let Err(e) = session.apply(step.action.clone()) {
            out.push(Violation::IllegalStep { step: i, reason: format!("{}: {e}", step.action) });
            replay_ok = false;
            break;
        }
        if ObservationSummary::of(session.state()) != step.observation {
            out.push(Violation::ObservationMismatch { step: i });
        }
    }

    let mut bad_facts = BTreeSet::new();
    if replay_ok {
        if !session.state().is_closed() {
            out.push(Violation::NotTerminated);
        }
        let replayed = &session.state().facts;
        for i in 0..t.facts.len().max(replayed.len()) {
            if t.facts.get(i) != replayed.get(i) {
                bad_facts.insert(i);
            }
        }
    }
    let store = SnapshotStore::replay(&t.snapshots);
    for (i, fact) in t.facts.iter().enumerate() {
        if quoted_text(&store, fact).as_deref() != Some(fact.text.as_str()) {
            bad_facts.insert(i);
        }
    }
    out.extend(bad_facts.into_iter().map(|index| Violation::FactMismatch { index }));

    if let Some(refs) = &t.referenced_facts {
        for &index in refs {
            if index >= t.facts.len() {
                out.push(Violation::ReferenceOutOfRange { index });
            }
        }
    }
    out
}

/// The text a fact's sources point at, if every source resolves.
fn quoted_text(store: &SnapshotStore, fact: &crate::env::SupportingFact) -> Option<String> {
    let mut text = String::new();
    for src in &fact.sources {
        let page = store.page(&src.url).ok()?;
        let window = page.document.windows.get(src.window_index)?;
        if src.start >= src.end || src.end > window.chars().count() {
            return None;
        }
        text.extend(window.chars().skip(src.start).take(src.end - src.start));
    }
    Some(text)
}

/// Validate a batch; result order follows input order.
pub fn validate_all(trajectories: &[Trajectory], exec: Execution) -> Vec<Vec<Violation>> {
    par::map(exec, trajectories, validate_trajectory)
}
