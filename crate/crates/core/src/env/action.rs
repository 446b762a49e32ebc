use std::fmt;

use serde::{Deserialize, Serialize};

/// The ten interface actions, without payloads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionKind {
    Search,
    LoadPage1,
    LoadPage2,
    LoadPage3,
    ScrollDown,
    ScrollUp,
    Quote,
    GoBack,
    Merge,
    Finish,
}

impl ActionKind {
    pub const ALL: [ActionKind; 10] = [
        ActionKind::Search,
        ActionKind::LoadPage1,
        ActionKind::LoadPage2,
        ActionKind::LoadPage3,
        ActionKind::ScrollDown,
        ActionKind::ScrollUp,
        ActionKind::Quote,
        ActionKind::GoBack,
        ActionKind::Merge,
        ActionKind::Finish,
    ];

    /// Canonical text form, as emitted by an action-prediction module.
    pub fn name(self) -> &'static str {
        match self {
            ActionKind::Search => "Search",
            ActionKind::LoadPage1 => "Load Page <1>",
            ActionKind::LoadPage2 => "Load Page <2>",
            ActionKind::LoadPage3 => "Load Page <3>",
            ActionKind::ScrollDown => "Scroll Down",
            ActionKind::ScrollUp => "Scroll Up",
            ActionKind::Quote => "Quote",
            ActionKind::GoBack => "Go Back",
            ActionKind::Merge => "Merge",
            ActionKind::Finish => "Finish",
        }
    }

    /// Exact match against [`ActionKind::name`] after trimming whitespace.
    pub fn from_name(text: &str) -> Option<ActionKind> {
        let text = text.trim();
        ActionKind::ALL.into_iter().find(|k| k.name() == text)
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// 1-based result slot for the LoadPage kinds.
    pub fn page_slot(self) -> Option<usize> {
        match self {
            ActionKind::LoadPage1 => Some(1),
            ActionKind::LoadPage2 => Some(2),
            ActionKind::LoadPage3 => Some(3),
            _ => None,
        }
    }

    pub fn load_page(slot: usize) -> Option<ActionKind> {
        match slot {
            1 => Some(ActionKind::LoadPage1),
            2 => Some(ActionKind::LoadPage2),
            3 => Some(ActionKind::LoadPage3),
            _ => None,
        }
    }
}

impl fmt::Display for ActionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// An action with its payload. `Quote` carries a half-open character range
/// `start..end` into the current browsing window.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Action {
    Search { query: String },
    LoadPage1,
    LoadPage2,
    LoadPage3,
    ScrollDown,
    ScrollUp,
    Quote { start: usize, end: usize },
    GoBack,
    Merge,
    Finish,
}

impl Action {
    pub fn kind(&self) -> ActionKind {
        match self {
            Action::Search { .. } => ActionKind::Search,
            Action::LoadPage1 => ActionKind::LoadPage1,
            Action::LoadPage2 => ActionKind::LoadPage2,
            Action::LoadPage3 => ActionKind::LoadPage3,
            Action::ScrollDown => ActionKind::ScrollDown,
            Action::ScrollUp => ActionKind::ScrollUp,
            Action::Quote { .. } => ActionKind::Quote,
            Action::GoBack => ActionKind::GoBack,
            Action::Merge => ActionKind::Merge,
            Action::Finish => ActionKind::Finish,
        }
    }

    pub fn search(query: impl Into<String>) -> Action {
        Action::Search { query: query.into() }
    }

    pub fn quote(start: usize, end: usize) -> Action {
        Action::Quote { start, end }
    }

    /// The payload-free action for `kind`; `None` for Search and Quote.
    pub fn bare(kind: ActionKind) -> Option<Action> {
        Some(match kind {
            ActionKind::LoadPage1 => Action::LoadPage1,
            ActionKind::LoadPage2 => Action::LoadPage2,
            ActionKind::LoadPage3 => Action::LoadPage3,
            ActionKind::ScrollDown => Action::ScrollDown,
            ActionKind::ScrollUp => Action::ScrollUp,
            ActionKind::GoBack => Action::GoBack,
            ActionKind::Merge => Action::Merge,
            ActionKind::Finish => Action::Finish,
            ActionKind::Search | ActionKind::Quote => return None,
        })
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Search { query } => write!(f, "Search <{query}>"),
            Action::Quote { start, end } => write!(f, "Quote <{start}..{end}>"),
            other => f.write_str(other.kind().name()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for k in ActionKind::ALL {
            assert_eq!(ActionKind::from_name(k.name()), Some(k));
            assert_eq!(ActionKind::ALL[k.index()], k);
        }
        assert_eq!(ActionKind::from_name("  Load Page <2>\n"), Some(ActionKind::LoadPage2));
        assert_eq!(ActionKind::from_name("Browse"), None);
        assert_eq!(ActionKind::from_name("search"), None);
    }

    #[test]
    fn wire_shape() {
        let json = serde_json::to_string(&Action::search("麦田怪圈")).unwrap();
        assert_eq!(json, r#"{"kind":"search","query":"麦田怪圈"}"#);
        let back: Action = serde_json::from_str(r#"{"kind":"quote","start":1,"end":4}"#).unwrap();
        assert_eq!(back, Action::quote(1, 4));
        assert_eq!(serde_json::to_string(&Action::LoadPage3).unwrap(), r#"{"kind":"load_page3"}"#);
    }
}
