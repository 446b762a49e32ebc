//! Search and page-extraction backends.
//!
//! A [`SearchProvider`] answers paged result queries and raw page fetches.
//! [`SnapshotStore`] sits between a provider and a session: it records every
//! response once so a session (or a later replay) sees identical data no
//! matter how often it scrolls back to the same page.

mod blocklist;
mod extract;
mod fixture;
#[cfg(feature = "live")]
mod live;
mod snapshot;

pub use blocklist::Blocklist;
pub use extract::{extract_document, ExtractedText};
pub use fixture::{CorpusManifest, CorpusPage, CorpusSearch, FixtureProvider, MANIFEST_FILE};
#[cfg(feature = "live")]
pub use live::{LiveProvider, API_KEY_ENV};
pub use snapshot::{PageSnapshot, SearchSnapshot, SnapshotStore, Snapshots};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::env::paginate_text;

/// Results shown per search window.
pub const RESULTS_PER_WINDOW: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchResult {
    pub title: String,
    pub url: String,
    pub snippet: String,
}

impl SearchResult {
    /// Titles must be non-empty and urls absolute.
    pub fn is_well_formed(&self) -> bool {
        !self.title.trim().is_empty() && is_absolute_url(&self.url)
    }
}

/// Extracted plain text of one page, pre-split into browsing windows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "StoredDocument", into = "StoredDocument")]
pub struct PageDocument {
    pub url: String,
    pub title: String,
    pub body: String,
    pub windows: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct StoredDocument {
    url: String,
    title: String,
    body: String,
}

impl From<StoredDocument> for PageDocument {
    fn from(d: StoredDocument) -> Self {
        PageDocument::new(d.url, d.title, d.body)
    }
}

impl From<PageDocument> for StoredDocument {
    fn from(d: PageDocument) -> Self {
        StoredDocument { url: d.url, title: d.title, body: d.body }
    }
}

impl PageDocument {
    pub fn new(url: impl Into<String>, title: impl Into<String>, body: impl Into<String>) -> Self {
        let body = body.into();
        let windows = paginate_text(&body, crate::env::WINDOW_CHARS);
        PageDocument { url: url.into(), title: title.into(), body, windows }
    }
}

/// A page as returned by the transport, before extraction.
#[derive(Debug, Clone)]
pub struct RawPage {
    pub url: String,
    pub content_type: Option<String>,
    pub html: String,
    /// ISO-8601 UTC.
    pub fetched_at: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BackendError {
    #[error("backend unavailable: {0}")]
    Unavailable(String),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("invalid url: {0}")]
    InvalidUrl(String),
    #[error("unsupported content type {content_type:?} at {url}")]
    UnsupportedContent { url: String, content_type: String },
    #[error("no snapshot recorded for {0}")]
    MissingSnapshot(String),
}

pub trait SearchProvider: Send + Sync {
    /// Up to [`RESULTS_PER_WINDOW`] results starting at `offset`, with
    /// blocklisted hosts removed before slicing.
    fn search(&self, query: &str, offset: usize) -> Result<Vec<SearchResult>, BackendError>;

    fn fetch(&self, url: &str) -> Result<RawPage, BackendError>;
}

impl<P: SearchProvider + ?Sized> SearchProvider for std::sync::Arc<P> {
    fn search(&self, query: &str, offset: usize) -> Result<Vec<SearchResult>, BackendError> {
        (**self).search(query, offset)
    }

    fn fetch(&self, url: &str) -> Result<RawPage, BackendError> {
        (**self).fetch(url)
    }
}

/// Validated search entry point.
pub fn search(provider: &dyn SearchProvider, query: &str, offset: usize) -> Result<Vec<SearchResult>, BackendError> {
    check_search_args(query, offset)?;
    let mut results = provider.search(query, offset)?;
    results.truncate(RESULTS_PER_WINDOW);
    Ok(results)
}

pub(crate) fn check_search_args(query: &str, offset: usize) -> Result<(), BackendError> {
    if query.trim().is_empty() {
        return Err(BackendError::InvalidQuery("query is empty".into()));
    }
    if !offset.is_multiple_of(RESULTS_PER_WINDOW) {
        return Err(BackendError::InvalidQuery(format!("offset {offset} is not a multiple of {RESULTS_PER_WINDOW}")));
    }
    Ok(())
}

/// Fetch `url` and reduce it to readable text.
pub fn fetch_and_extract(provider: &dyn SearchProvider, url: &str) -> Result<PageSnapshot, BackendError> {
    if !is_absolute_url(url) {
        return Err(BackendError::InvalidUrl(url.to_string()));
    }
    let raw = provider.fetch(url)?;
    PageSnapshot::from_raw(raw)
}

pub(crate) fn is_absolute_url(s: &str) -> bool {
    url::Url::parse(s).map(|u| u.has_host()).unwrap_or(false)
}

pub(crate) fn is_html(content_type: Option<&str>, body: &str) -> bool {
    match content_type {
        Some(ct) => {
            let ct = ct.to_ascii_lowercase();
            ct.contains("text/html") || ct.contains("application/xhtml")
        }
        None => body.trim_start().starts_with('<'),
    }
}
