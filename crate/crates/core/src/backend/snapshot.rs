use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use super::{
    check_search_args, extract_document, is_absolute_url, is_html, BackendError, PageDocument, RawPage, SearchProvider,
    SearchResult, RESULTS_PER_WINDOW,
};
use crate::digest::sha256_hex;

/// One fetched page: where it came from, a digest of the raw HTML, and the
/// extracted document that browsing windows are cut from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageSnapshot {
    pub url: String,
    pub fetched_at: String,
    pub html_sha256: String,
    pub document: PageDocument,
}

impl PageSnapshot {
    pub fn from_raw(raw: RawPage) -> Result<Self, BackendError> {
        if !is_html(raw.content_type.as_deref(), &raw.html) {
            return Err(BackendError::UnsupportedContent {
                url: raw.url,
                content_type: raw.content_type.unwrap_or_default(),
            });
        }
        let extracted = extract_document(&raw.html);
        Ok(PageSnapshot {
            html_sha256: sha256_hex(raw.html.as_bytes()),
            document: PageDocument::new(raw.url.clone(), extracted.title, extracted.body),
            url: raw.url,
            fetched_at: raw.fetched_at,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchSnapshot {
    pub query: String,
    pub offset: usize,
    pub results: Vec<SearchResult>,
}

/// Every backend response a session observed, in canonical (sorted) order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snapshots {
    pub searches: Vec<SearchSnapshot>,
    pub pages: Vec<PageSnapshot>,
}

#[derive(Default)]
struct Recorded {
    searches: BTreeMap<(String, usize), Vec<SearchResult>>,
    pages: BTreeMap<String, Arc<PageSnapshot>>,
}

/// Append-only response cache in front of a provider.
///
/// The first response for a `(query, offset)` or url is kept for the life of
/// the store. A store built with [`SnapshotStore::replay`] has no provider and
/// answers from its recorded snapshots only.
pub struct SnapshotStore {
    provider: Option<Arc<dyn SearchProvider>>,
    recorded: Mutex<Recorded>,
}

impl std::fmt::Debug for SnapshotStore {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let r = self.recorded.lock().unwrap();
        f.debug_struct("SnapshotStore")
            .field("live", &self.provider.is_some())
            .field("searches", &r.searches.len())
            .field("pages", &r.pages.len())
            .finish()
    }
}

impl SnapshotStore {
    pub fn new(provider: Arc<dyn SearchProvider>) -> Self {
        SnapshotStore { provider: Some(provider), recorded: Mutex::default() }
    }

    pub fn replay(snapshots: &Snapshots) -> Self {
        let store = SnapshotStore { provider: None, recorded: Mutex::default() };
        store.absorb(snapshots);
        store
    }

    /// Seed the cache with previously recorded responses; existing entries win.
    pub fn absorb(&self, snapshots: &Snapshots) {
        let mut r = self.recorded.lock().unwrap();
        for s in &snapshots.searches {
            r.searches.entry((s.query.clone(), s.offset)).or_insert_with(|| s.results.clone());
        }
        for p in &snapshots.pages {
            r.pages.entry(p.url.clone()).or_insert_with(|| Arc::new(p.clone()));
        }
    }

    pub fn search(&self, query: &str, offset: usize) -> Result<Vec<SearchResult>, BackendError> {
        check_search_args(query, offset)?;
        let key = (query.to_string(), offset);
        if let Some(hit) = self.recorded.lock().unwrap().searches.get(&key) {
            return Ok(hit.clone());
        }
        let provider = self
            .provider
            .as_ref()
            .ok_or_else(|| BackendError::MissingSnapshot(format!("search {query:?} @ {offset}")))?;
        let mut results = provider.search(query, offset)?;
        results.truncate(RESULTS_PER_WINDOW);
        let mut r = self.recorded.lock().unwrap();
        Ok(r.searches.entry(key).or_insert(results).clone())
    }

    pub fn page(&self, url: &str) -> Result<Arc<PageSnapshot>, BackendError> {
        if let Some(hit) = self.recorded.lock().unwrap().pages.get(url) {
            return Ok(hit.clone());
        }
        if !is_absolute_url(url) {
            return Err(BackendError::InvalidUrl(url.to_string()));
        }
        let provider = self.provider.as_ref().ok_or_else(|| BackendError::MissingSnapshot(url.to_string()))?;
        let snapshot = Arc::new(PageSnapshot::from_raw(provider.fetch(url)?)?);
        let mut r = self.recorded.lock().unwrap();
        Ok(r.pages.entry(url.to_string()).or_insert(snapshot).clone())
    }

    pub fn snapshots(&self) -> Snapshots {
        let r = self.recorded.lock().unwrap();
        Snapshots {
            searches: r
                .searches
                .iter()
                .map(|((query, offset), results)| SearchSnapshot {
                    query: query.clone(),
                    offset: *offset,
                    results: results.clone(),
                })
                .collect(),
            pages: r.pages.values().map(|p| (**p).clone()).collect(),
        }
    }
}
