use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::action::{Action, ActionKind};
use super::window::{BrowsingWindow, Mode, SearchWindow, Window};
use crate::backend::{BackendError, PageSnapshot, SnapshotStore, RESULTS_PER_WINDOW};

/// Recorded-action cap used when none is configured.
pub const DEFAULT_MAX_ACTIONS: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnvError {
    #[error("question must not be empty")]
    InvalidQuestion,
    #[error("max_actions must be at least 1")]
    InvalidBudget,
    #[error("{kind} is not legal here: {reason}")]
    IllegalAction { kind: ActionKind, reason: String },
    #[error("session is closed")]
    SessionClosed,
    #[error("nothing to undo")]
    NothingToUndo,
    #[error(transparent)]
    Backend(#[from] BackendError),
}

fn illegal(kind: ActionKind, reason: impl Into<String>) -> EnvError {
    EnvError::IllegalAction { kind, reason: reason.into() }
}

/// Where a piece of fact text was quoted from: characters `start..end` of
/// browsing window `window_index` of the page at `url`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactSource {
    pub url: String,
    pub window_index: usize,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportingFact {
    pub text: String,
    pub source_url: String,
    /// In order; `text` is the concatenation of these ranges.
    pub sources: Vec<FactSource>,
    /// Index of the action that produced this fact (its Quote or Merge).
    pub step: usize,
}

/// One executed action as the agent sees it in its history: searches keep
/// their query, page loads keep the page title.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub action: ActionKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionState {
    pub question: String,
    pub query: String,
    pub history: Vec<HistoryEntry>,
    pub previous_window: Option<Window>,
    pub window: Window,
    pub facts: Vec<SupportingFact>,
    pub actions_remaining: usize,
    pub max_actions: usize,
    pub finished: bool,
    /// Search window that GoBack returns to; set while browsing a page.
    pub return_to: Option<SearchWindow>,
}

/// What the interface displays after an action.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Observation {
    pub mode: Mode,
    pub window: Window,
    pub facts: usize,
    pub actions_remaining: usize,
    pub finished: bool,
}

impl SessionState {
    pub fn new(question: &str, max_actions: usize) -> Result<Self, EnvError> {
        if question.trim().is_empty() {
            return Err(EnvError::InvalidQuestion);
        }
        if max_actions == 0 {
            return Err(EnvError::InvalidBudget);
        }
        Ok(SessionState {
            question: question.to_string(),
            query: String::new(),
            history: Vec::new(),
            previous_window: None,
            window: Window::Search(SearchWindow::empty()),
            facts: Vec::new(),
            actions_remaining: max_actions,
            max_actions,
            finished: false,
            return_to: None,
        })
    }

    pub fn mode(&self) -> Mode {
        self.window.mode()
    }

    /// No further actions are accepted.
    pub fn is_closed(&self) -> bool {
        self.finished || self.actions_remaining == 0
    }

    pub fn recorded_actions(&self) -> usize {
        self.history.len()
    }

    pub fn digest(&self) -> String {
        crate::digest::json_digest(self)
    }

    pub fn observation(&self) -> Observation {
        Observation {
            mode: self.mode(),
            window: self.window.clone(),
            facts: self.facts.len(),
            actions_remaining: self.actions_remaining,
            finished: self.finished,
        }
    }

    /// Why `kind` cannot be applied now, ignoring payload contents.
    pub fn check(&self, kind: ActionKind) -> Result<(), EnvError> {
        if self.is_closed() {
            return Err(EnvError::SessionClosed);
        }
        match (kind, &self.window) {
            (ActionKind::Search | ActionKind::Finish, _) => Ok(()),
            (ActionKind::Merge, _) if self.facts.len() >= 2 => Ok(()),
            (ActionKind::Merge, _) => Err(illegal(kind, "merge needs at least two facts")),
            (ActionKind::LoadPage1 | ActionKind::LoadPage2 | ActionKind::LoadPage3, Window::Search(w)) => {
                let slot = kind.page_slot().unwrap();
                if w.results.len() >= slot {
                    Ok(())
                } else {
                    Err(illegal(kind, format!("no result in slot {slot}")))
                }
            }
            (ActionKind::ScrollDown, Window::Search(w)) if w.has_more => Ok(()),
            (ActionKind::ScrollDown, Window::Search(_)) => Err(illegal(kind, "no more results")),
            (ActionKind::ScrollUp, Window::Search(w)) if w.offset > 0 => Ok(()),
            (ActionKind::ScrollUp, Window::Search(_)) => Err(illegal(kind, "already at the first results")),
            (ActionKind::ScrollDown, Window::Browsing(w)) if w.index + 1 < w.count => Ok(()),
            (ActionKind::ScrollDown, Window::Browsing(_)) => Err(illegal(kind, "already at the end of the page")),
            (ActionKind::ScrollUp, Window::Browsing(w)) if w.index > 0 => Ok(()),
            (ActionKind::ScrollUp, Window::Browsing(_)) => Err(illegal(kind, "already at the top of the page")),
            (ActionKind::Quote, Window::Browsing(w)) if !w.text.is_empty() => Ok(()),
            (ActionKind::Quote, Window::Browsing(_)) => Err(illegal(kind, "window is empty")),
            (ActionKind::GoBack, Window::Browsing(_)) => Ok(()),
            (ActionKind::Quote | ActionKind::GoBack, Window::Search(_)) => Err(illegal(kind, "requires browsing mode")),
            (ActionKind::LoadPage1 | ActionKind::LoadPage2 | ActionKind::LoadPage3, Window::Browsing(_)) => {
                Err(illegal(kind, "requires search mode"))
            }
        }
    }

    /// Action kinds whose preconditions hold, in canonical order.
    pub fn legal_actions(&self) -> Vec<ActionKind> {
        ActionKind::ALL.into_iter().filter(|k| self.check(*k).is_ok()).collect()
    }

    /// Successor state for `action`. The receiver is never modified; on
    /// error nothing is recorded.
    pub fn apply(&self, action: &Action, store: &SnapshotStore) -> Result<(SessionState, Observation), EnvError> {
        let kind = action.kind();
        self.check(kind)?;
        let mut next = self.clone();
        let step = self.history.len();
        let mut detail = None;

        match action {
            Action::Search { query } => {
                let query = query.trim();
                if query.is_empty() {
                    return Err(illegal(kind, "empty query"));
                }
                next.window = Window::Search(search_window(store, query, 0)?);
                next.query = query.to_string();
                next.return_to = None;
                detail = Some(query.to_string());
            }
            Action::LoadPage1 | Action::LoadPage2 | Action::LoadPage3 => {
                let Window::Search(w) = &self.window else { unreachable!() };
                let result = &w.results[kind.page_slot().unwrap() - 1];
                let page = store.page(&result.url)?;
                let title =
                    if page.document.title.is_empty() { result.title.clone() } else { page.document.title.clone() };
                next.window = Window::Browsing(browsing_window(&page, &title, 0));
                next.return_to = Some(w.clone());
                detail = Some(title);
            }
            Action::ScrollDown | Action::ScrollUp => {
                let down = kind == ActionKind::ScrollDown;
                next.window = match &self.window {
                    Window::Search(w) => {
                        let offset = if down { w.offset + RESULTS_PER_WINDOW } else { w.offset - RESULTS_PER_WINDOW };
                        Window::Search(search_window(store, &w.query, offset)?)
                    }
                    Window::Browsing(w) => {
                        let page = store.page(&w.url)?;
                        let index = if down { w.index + 1 } else { w.index - 1 };
                        Window::Browsing(browsing_window(&page, &w.title, index))
                    }
                };
            }
            Action::Quote { start, end } => {
                let Window::Browsing(w) = &self.window else { unreachable!() };
                let len = w.char_len();
                if start >= end {
                    return Err(illegal(kind, format!("empty range {start}..{end}")));
                }
                if *end > len {
                    return Err(illegal(kind, format!("range {start}..{end} exceeds window length {len}")));
                }
                let text: String = w.text.chars().skip(*start).take(end - start).collect();
                next.facts.push(SupportingFact {
                    text,
                    source_url: w.url.clone(),
                    sources: vec![FactSource { url: w.url.clone(), window_index: w.index, start: *start, end: *end }],
                    step,
                });
            }
            Action::GoBack => {
                let Some(back) = &self.return_to else {
                    return Err(illegal(kind, "no page was loaded from a search window"));
                };
                next.window = Window::Search(back.clone());
                next.return_to = None;
            }
            Action::Merge => {
                let second = next.facts.pop().unwrap();
                let first = next.facts.pop().unwrap();
                let mut sources = first.sources;
                sources.extend(second.sources);
                next.facts.push(SupportingFact {
                    text: first.text + &second.text,
                    source_url: first.source_url,
                    sources,
                    step,
                });
            }
            Action::Finish => next.finished = true,
        }

        next.previous_window = Some(self.window.clone());
        next.history.push(HistoryEntry { action: kind, detail });
        next.actions_remaining -= 1;
        let obs = next.observation();
        Ok((next, obs))
    }
}

fn search_window(store: &SnapshotStore, query: &str, offset: usize) -> Result<SearchWindow, BackendError> {
    let results = store.search(query, offset)?;
    let has_more = results.len() == RESULTS_PER_WINDOW && !store.search(query, offset + RESULTS_PER_WINDOW)?.is_empty();
    Ok(SearchWindow { query: query.to_string(), offset, results, has_more })
}

fn browsing_window(page: &PageSnapshot, title: &str, index: usize) -> BrowsingWindow {
    let doc = &page.document;
    let char_offset = doc.windows[..index].iter().map(|w| w.chars().count()).sum();
    BrowsingWindow {
        url: doc.url.clone(),
        title: title.to_string(),
        index,
        count: doc.windows.len(),
        char_offset,
        text: doc.windows[index].clone(),
    }
}
