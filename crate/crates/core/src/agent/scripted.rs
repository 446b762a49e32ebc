use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::runner::{AgentError, AgentModules};
use super::span::{decode_fact_span, encode_fact_span, SpanEncoding};
use crate::env::{Action, ActionKind, EnvError, Session, Window};
use crate::trajectory::Trajectory;

/// One scripted decision: an action name plus the payload text the
/// query or fact module should return for it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptStep {
    pub action: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub query: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fact: Option<String>,
}

impl ScriptStep {
    pub fn act(kind: ActionKind) -> Self {
        ScriptStep { action: kind.name().to_string(), query: None, fact: None }
    }

    pub fn search(query: impl Into<String>) -> Self {
        ScriptStep { action: ActionKind::Search.name().into(), query: Some(query.into()), fact: None }
    }

    pub fn quote(encoding: impl Into<String>) -> Self {
        ScriptStep { action: ActionKind::Quote.name().into(), query: None, fact: Some(encoding.into()) }
    }
}

/// Plays back a fixed list of steps, then answers `Finish`.
#[derive(Debug, Clone, Default)]
pub struct ScriptedAgent {
    steps: VecDeque<ScriptStep>,
    current: Option<ScriptStep>,
}

impl ScriptedAgent {
    pub fn new(steps: impl IntoIterator<Item = ScriptStep>) -> Self {
        ScriptedAgent { steps: steps.into_iter().collect(), current: None }
    }

    /// A script that reproduces the actions of `t` over its own snapshots.
    ///
    /// Each quote is encoded with the shortest edge length that decodes
    /// back to exactly the recorded range.
    pub fn from_trajectory(t: &Trajectory) -> Result<Self, EnvError> {
        let mut session = Session::replaying(&t.question, t.max_actions, &t.snapshots)?;
        let mut steps = Vec::with_capacity(t.steps.len());
        for step in &t.steps {
            let script = match &step.action {
                Action::Search { query } => ScriptStep::search(query.clone()),
                Action::Quote { start, end } => {
                    let Window::Browsing(w) = &session.state().window else {
                        return Err(EnvError::IllegalAction {
                            kind: ActionKind::Quote,
                            reason: "requires browsing mode".into(),
                        });
                    };
                    ScriptStep::quote(exact_encoding(&w.text, *start..*end).to_string())
                }
                other => ScriptStep::act(other.kind()),
            };
            session.apply(step.action.clone())?;
            steps.push(script);
        }
        Ok(ScriptedAgent::new(steps))
    }
}

fn exact_encoding(window: &str, range: std::ops::Range<usize>) -> SpanEncoding {
    let len = range.end - range.start;
    for n in 1..=len.div_ceil(2) {
        if let Ok(enc) = encode_fact_span(window, range.clone(), n) {
            if decode_fact_span(window, &enc).ok() == Some(range.clone()) {
                return enc;
            }
        }
    }
    encode_fact_span(window, range.clone(), len).expect("range lies inside the window")
}

impl AgentModules for ScriptedAgent {
    fn predict_action(&mut self, _state: &str) -> Result<String, AgentError> {
        self.current = self.steps.pop_front();
        Ok(self.current.as_ref().map_or_else(|| ActionKind::Finish.name().to_string(), |s| s.action.clone()))
    }

    fn generate_query(&mut self, _state: &str) -> Result<String, AgentError> {
        Ok(self.current.as_ref().and_then(|s| s.query.clone()).unwrap_or_default())
    }

    fn extract_fact(&mut self, _state: &str) -> Result<String, AgentError> {
        Ok(self.current.as_ref().and_then(|s| s.fact.clone()).unwrap_or_default())
    }
}
