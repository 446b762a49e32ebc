use thiserror::Error;
use tracing::debug;

use super::serialize::{serialize_state, SerializeConfig};
use super::span::{decode_fact_span, SpanEncoding, DEFAULT_EDGE_CHARS};
use crate::env::{Action, ActionKind, EnvError, Session, Window};
use crate::trajectory::{EpisodeStatus, Trajectory};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AgentError {
    #[error("agent transport failed: {0}")]
    Transport(String),
}

/// The three text-to-text modules of a search agent. Each receives the
/// serialized state and answers with plain text: an action name, a query,
/// or a span encoding.
pub trait AgentModules {
    fn predict_action(&mut self, state: &str) -> Result<String, AgentError>;
    fn generate_query(&mut self, state: &str) -> Result<String, AgentError>;
    fn extract_fact(&mut self, state: &str) -> Result<String, AgentError>;
}

impl<A: AgentModules + ?Sized> AgentModules for &mut A {
    fn predict_action(&mut self, state: &str) -> Result<String, AgentError> {
        (**self).predict_action(state)
    }
    fn generate_query(&mut self, state: &str) -> Result<String, AgentError> {
        (**self).generate_query(state)
    }
    fn extract_fact(&mut self, state: &str) -> Result<String, AgentError> {
        (**self).extract_fact(state)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RunnerConfig {
    /// Consecutive unusable outputs tolerated before the episode is finished on the agent's behalf.
    pub max_retries: usize,
    pub edge_chars: usize,
    pub serialize: SerializeConfig,
}

impl Default for RunnerConfig {
    fn default() -> Self {
        RunnerConfig { max_retries: 3, edge_chars: DEFAULT_EDGE_CHARS, serialize: SerializeConfig::default() }
    }
}

#[derive(Debug, Error)]
pub enum ActionTextError {
    #[error("unparseable action {0:?}")]
    UnparseableAction(String),
}

/// Canonical action name to kind.
pub fn parse_action_text(text: &str) -> Result<ActionKind, ActionTextError> {
    ActionKind::from_name(text).ok_or_else(|| ActionTextError::UnparseableAction(text.to_string()))
}

enum Proposal {
    Act(Action),
    Unusable(String),
}

fn propose<A: AgentModules + ?Sized>(agent: &mut A, session: &Session, text: &str) -> Result<Proposal, AgentError> {
    let kind = match parse_action_text(&agent.predict_action(text)?) {
        Ok(k) => k,
        Err(e) => return Ok(Proposal::Unusable(e.to_string())),
    };
    if let Err(e) = session.state().check(kind) {
        return Ok(Proposal::Unusable(e.to_string()));
    }
    let action = match kind {
        ActionKind::Search => {
            let query = agent.generate_query(text)?;
            if query.trim().is_empty() {
                return Ok(Proposal::Unusable("empty query".into()));
            }
            Action::Search { query }
        }
        ActionKind::Quote => {
            let Window::Browsing(w) = &session.state().window else {
                return Ok(Proposal::Unusable("not browsing".into()));
            };
            let raw = agent.extract_fact(text)?;
            let range = SpanEncoding::parse(&raw).and_then(|enc| decode_fact_span(&w.text, &enc));
            match range {
                Ok(r) => Action::Quote { start: r.start, end: r.end },
                Err(e) => return Ok(Proposal::Unusable(e.to_string())),
            }
        }
        other => Action::bare(other).expect("payload-free kind"),
    };
    Ok(Proposal::Act(action))
}

/// Drive `session` with `agent` until Finish or budget exhaustion.
///
/// After `max_retries + 1` consecutive unusable outputs (unparseable, illegal
/// or undecodable) the runner applies Finish itself. Backend and transport
/// failures stop the episode and the partial trajectory is marked failed.
pub fn run_episode<A: AgentModules + ?Sized>(
    agent: &mut A,
    session: &mut Session,
    config: &RunnerConfig,
) -> Trajectory {
    let mut failures = 0;
    while !session.state().is_closed() {
        let text = serialize_state(session.state(), &config.serialize);
        let proposal = match propose(agent, session, &text) {
            Ok(p) => p,
            Err(e) => return failed(session, e.to_string()),
        };
        let outcome = match proposal {
            Proposal::Act(action) => match session.apply(action) {
                Ok(_) => Ok(()),
                Err(EnvError::Backend(e)) => return failed(session, e.to_string()),
                Err(e) => Err(e.to_string()),
            },
            Proposal::Unusable(reason) => Err(reason),
        };
        match outcome {
            Ok(()) => failures = 0,
            Err(reason) => {
                failures += 1;
                debug!(failures, %reason, "rejected agent output");
                if failures > config.max_retries {
                    session.apply(Action::Finish).expect("Finish is legal in any open state");
                }
            }
        }
    }
    session.trajectory(None, None)
}

fn failed(session: &Session, reason: String) -> Trajectory {
    let mut t = session.trajectory(None, None);
    t.status = EpisodeStatus::Failed { reason };
    t
}
