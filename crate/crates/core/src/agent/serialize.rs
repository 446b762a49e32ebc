//! Text rendering of the interface state that every agent module reads.
//!
//! Sections appear in a fixed order, each introduced by a sentinel line of
//! the form `<<name>>`. Content lines that would look like a sentinel (or
//! that start with a backslash) are prefixed with `\`, so the rendering is
//! unambiguous. Only the previous and current windows are included.

use std::fmt::Write;

use crate::env::{HistoryEntry, SessionState, Window};

pub const FORMAT_HEADER: &str = "<<state v1>>";

/// Default cap on rendered characters.
pub const DEFAULT_CHAR_BUDGET: usize = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SerializeConfig {
    /// Oldest history entries are dropped until the rendering fits.
    pub char_budget: usize,
}

impl Default for SerializeConfig {
    fn default() -> Self {
        SerializeConfig { char_budget: DEFAULT_CHAR_BUDGET }
    }
}

pub fn serialize_state(state: &SessionState, config: &SerializeConfig) -> String {
    let mut skipped = 0;
    loop {
        let text = render(state, skipped);
        if text.chars().count() <= config.char_budget || skipped >= state.history.len() {
            return text;
        }
        skipped += 1;
    }
}

fn push_content(out: &mut String, text: &str) {
    if text.is_empty() {
        return;
    }
    for line in text.split('\n') {
        if line.starts_with("<<") || line.starts_with('\\') {
            out.push('\\');
        }
        out.push_str(line);
        out.push('\n');
    }
}

fn section(out: &mut String, name: &str) {
    let _ = writeln!(out, "<<{name}>>");
}

fn render(state: &SessionState, skipped: usize) -> String {
    let mut out = String::new();
    out.push_str(FORMAT_HEADER);
    out.push('\n');
    section(&mut out, "question");
    push_content(&mut out, &state.question);
    section(&mut out, "query");
    push_content(&mut out, &state.query);
    section(&mut out, "history");
    if skipped > 0 {
        push_content(&mut out, &format!("({skipped} earlier actions omitted)"));
    }
    for (i, entry) in state.history.iter().enumerate().skip(skipped) {
        push_content(&mut out, &history_line(i + 1, entry));
    }
    section(&mut out, "previous window");
    if let Some(w) = &state.previous_window {
        push_content(&mut out, &render_window(w));
    }
    section(&mut out, "current window");
    push_content(&mut out, &render_window(&state.window));
    section(&mut out, "facts");
    for (i, fact) in state.facts.iter().enumerate() {
        push_content(&mut out, &format!("[{}] {}", i + 1, fact.text));
    }
    section(&mut out, "remaining actions");
    push_content(&mut out, &state.actions_remaining.to_string());
    out
}

fn history_line(n: usize, entry: &HistoryEntry) -> String {
    match &entry.detail {
        Some(d) => format!("{n}. {}: {d}", entry.action),
        None => format!("{n}. {}", entry.action),
    }
}

fn render_window(w: &Window) -> String {
    let mut out = String::new();
    match w {
        Window::Search(s) => {
            let _ = writeln!(out, "mode: search");
            let _ = writeln!(out, "query: {}", s.query);
            if s.results.is_empty() {
                out.push_str("(no results)");
            } else {
                let _ = write!(out, "results {}-{}", s.offset + 1, s.offset + s.results.len());
                if s.has_more {
                    out.push_str(" (more below)");
                }
                for (i, r) in s.results.iter().enumerate() {
                    let _ = write!(out, "\n[{}] {}\n{}\n{}", i + 1, r.title, r.url, r.snippet);
                }
            }
        }
        Window::Browsing(b) => {
            let _ = writeln!(out, "mode: browsing");
            let _ = writeln!(out, "page: {}", b.title);
            let _ = writeln!(out, "url: {}", b.url);
            let _ = writeln!(out, "window: {}/{}", b.index + 1, b.count);
            out.push_str(&b.text);
        }
    }
    out
}
