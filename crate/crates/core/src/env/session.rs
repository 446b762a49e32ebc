use std::sync::Arc;

use super::action::{Action, ActionKind};
use super::state::{EnvError, Observation, SessionState};
use crate::backend::{SearchProvider, SnapshotStore, Snapshots};
use crate::trajectory::{EpisodeStatus, ObservationSummary, Step, Trajectory, SCHEMA_VERSION};

/// A live session: current state, undo stack, recorded steps, and the
/// snapshot cache that pins every backend response it has seen.
///
/// Actions on one session are applied strictly in sequence (`&mut self`);
/// the states it hands out are plain values.
#[derive(Debug)]
pub struct Session {
    initial: SessionState,
    state: SessionState,
    undo: Vec<SessionState>,
    steps: Vec<Step>,
    store: SnapshotStore,
}

impl Session {
    pub fn new(question: &str, max_actions: usize, provider: Arc<dyn SearchProvider>) -> Result<Self, EnvError> {
        Ok(Self::with_store(SessionState::new(question, max_actions)?, SnapshotStore::new(provider)))
    }

    /// A session served only from recorded snapshots.
    pub fn replaying(question: &str, max_actions: usize, snapshots: &Snapshots) -> Result<Self, EnvError> {
        Ok(Self::with_store(SessionState::new(question, max_actions)?, SnapshotStore::replay(snapshots)))
    }

    fn with_store(initial: SessionState, store: SnapshotStore) -> Self {
        Session { state: initial.clone(), initial, undo: Vec::new(), steps: Vec::new(), store }
    }

    pub fn state(&self) -> &SessionState {
        &self.state
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn store(&self) -> &SnapshotStore {
        &self.store
    }

    pub fn legal_actions(&self) -> Vec<ActionKind> {
        self.state.legal_actions()
    }

    /// Apply and record `action`. Rejected actions leave the session untouched.
    pub fn apply(&mut self, action: Action) -> Result<Observation, EnvError> {
        let (next, obs) = self.state.apply(&action, &self.store)?;
        let pre_state = self.state.digest();
        let prev = std::mem::replace(&mut self.state, next);
        self.undo.push(prev);
        self.steps.push(Step { pre_state, action, observation: ObservationSummary::of(&self.state) });
        Ok(obs)
    }

    /// Revoke the last recorded action and refund its budget. Not recorded.
    pub fn undo(&mut self) -> Result<&SessionState, EnvError> {
        let prev = self.undo.pop().ok_or(EnvError::NothingToUndo)?;
        self.steps.pop();
        self.state = prev;
        Ok(&self.state)
    }

    /// Back to the initial state. Not recorded; snapshots are kept.
    pub fn reset(&mut self) -> &SessionState {
        self.state = self.initial.clone();
        self.undo.clear();
        self.steps.clear();
        &self.state
    }

    pub fn trajectory(&self, answer: Option<String>, referenced_facts: Option<Vec<usize>>) -> Trajectory {
        Trajectory {
            schema_version: SCHEMA_VERSION,
            id: None,
            question: self.initial.question.clone(),
            max_actions: self.initial.max_actions,
            steps: self.steps.clone(),
            facts: self.state.facts.clone(),
            answer,
            referenced_facts,
            snapshots: self.store.snapshots(),
            status: EpisodeStatus::Completed,
        }
    }
}
