use serde::{Deserialize, Serialize};

use crate::backend::SearchResult;

/// Characters (Unicode scalar values) visible in one browsing window.
pub const WINDOW_CHARS: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Search,
    Browsing,
}

/// Cut `body` into consecutive slices of at most `window_size` characters.
///
/// The cut is hard, even mid-sentence; an empty body yields one empty slice.
pub fn paginate_text(body: &str, window_size: usize) -> Vec<String> {
    assert!(window_size >= 1, "window_size must be positive");
    if body.is_empty() {
        return vec![String::new()];
    }
    let mut out = Vec::new();
    let mut start = 0;
    let mut count = 0;
    for (i, _) in body.char_indices() {
        if count == window_size {
            out.push(body[start..i].to_string());
            start = i;
            count = 0;
        }
        count += 1;
    }
    out.push(body[start..].to_string());
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchWindow {
    pub query: String,
    pub offset: usize,
    pub results: Vec<SearchResult>,
    /// Whether a non-empty window exists at `offset + 3`.
    pub has_more: bool,
}

impl SearchWindow {
    pub fn empty() -> Self {
        SearchWindow { query: String::new(), offset: 0, results: Vec::new(), has_more: false }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BrowsingWindow {
    pub url: String,
    pub title: String,
    pub index: usize,
    pub count: usize,
    /// Character offset of `text` within the page body.
    pub char_offset: usize,
    pub text: String,
}

impl BrowsingWindow {
    pub fn char_len(&self) -> usize {
        self.text.chars().count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Window {
    Search(SearchWindow),
    Browsing(BrowsingWindow),
}

impl Window {
    pub fn mode(&self) -> Mode {
        match self {
            Window::Search(_) => Mode::Search,
            Window::Browsing(_) => Mode::Browsing,
        }
    }

    pub fn digest(&self) -> String {
        crate::digest::json_digest(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn slices_of_five_hundred() {
        let body: String = "字".repeat(1200);
        let w = paginate_text(&body, WINDOW_CHARS);
        assert_eq!(w.iter().map(|s| s.chars().count()).collect::<Vec<_>>(), [500, 500, 200]);
        assert_eq!(paginate_text(&"a".repeat(500), 500).len(), 1);
        assert_eq!(paginate_text("", 500), [""]);
    }

    proptest! {
        #[test]
        fn concatenation_restores_body(body in "\\PC{0,1500}", size in 1usize..700) {
            let w = paginate_text(&body, size);
            prop_assert_eq!(w.concat(), body.clone());
            prop_assert!(w.iter().all(|s| s.chars().count() <= size));
            prop_assert!(w.iter().rev().skip(1).all(|s| s.chars().count() == size));
        }
    }
}
