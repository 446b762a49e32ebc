//! The interface state machine: ten actions over a search mode (three
//! results per window) and a browsing mode (500-character windows).

mod action;
mod session;
mod state;
mod window;

pub use action::{Action, ActionKind};
pub use session::Session;
pub use state::{EnvError, FactSource, HistoryEntry, Observation, SessionState, SupportingFact, DEFAULT_MAX_ACTIONS};
pub use window::{paginate_text, BrowsingWindow, Mode, SearchWindow, Window, WINDOW_CHARS};

/// Fresh state for `question` with a budget of `max_actions`.
pub fn new_session(question: &str, max_actions: usize) -> Result<SessionState, EnvError> {
    SessionState::new(question, max_actions)
}

pub fn legal_actions(state: &SessionState) -> Vec<ActionKind> {
    state.legal_actions()
}

pub fn apply_action(
    state: &SessionState,
    action: &Action,
    store: &crate::backend::SnapshotStore,
) -> Result<(SessionState, Observation), EnvError> {
    state.apply(action, store)
}
