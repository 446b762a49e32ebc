use std::collections::HashMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{check_search_args, BackendError, Blocklist, RawPage, SearchProvider, SearchResult, RESULTS_PER_WINDOW};

/// Name of the manifest file at the root of a fixture corpus directory.
pub const MANIFEST_FILE: &str = "corpus.json";

const DEFAULT_SNAPSHOT_TIME: &str = "1970-01-01T00:00:00Z";

/// `corpus.json`: result lists keyed by query and pages keyed by url, with
/// page bodies stored as files relative to the corpus directory.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct CorpusManifest {
    #[serde(default)]
    pub snapshot_time: Option<String>,
    #[serde(default)]
    pub searches: Vec<CorpusSearch>,
    #[serde(default)]
    pub pages: Vec<CorpusPage>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusSearch {
    pub query: String,
    pub results: Vec<SearchResult>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusPage {
    pub url: String,
    pub file: PathBuf,
    /// Inferred from the file extension when absent.
    #[serde(default)]
    pub content_type: Option<String>,
}

struct StoredPage {
    content_type: String,
    body: String,
}

/// Deterministic provider over an on-disk corpus. Snippets are served verbatim.
pub struct FixtureProvider {
    searches: HashMap<String, Vec<SearchResult>>,
    pages: HashMap<String, StoredPage>,
    snapshot_time: String,
    blocklist: Blocklist,
}

impl FixtureProvider {
    pub fn open(dir: impl AsRef<Path>, blocklist: Blocklist) -> Result<Self, BackendError> {
        let dir = dir.as_ref();
        let manifest_path = dir.join(MANIFEST_FILE);
        let text = std::fs::read_to_string(&manifest_path)
            .map_err(|e| BackendError::Unavailable(format!("{}: {e}", manifest_path.display())))?;
        let manifest: CorpusManifest = serde_json::from_str(&text)
            .map_err(|e| BackendError::Unavailable(format!("{}: {e}", manifest_path.display())))?;
        let mut pages = Vec::with_capacity(manifest.pages.len());
        for page in &manifest.pages {
            let path = dir.join(&page.file);
            let body = std::fs::read_to_string(&path)
                .map_err(|e| BackendError::Unavailable(format!("{}: {e}", path.display())))?;
            pages.push((page.url.clone(), page.content_type.clone().unwrap_or_else(|| guess_type(&page.file)), body));
        }
        Self::build(manifest, pages, blocklist)
    }

    /// In-memory corpus: `(url, content_type, body)` triples.
    pub fn from_parts(
        searches: Vec<CorpusSearch>,
        pages: Vec<(String, String, String)>,
        blocklist: Blocklist,
    ) -> Result<Self, BackendError> {
        let manifest = CorpusManifest { snapshot_time: None, searches, pages: Vec::new() };
        Self::build(manifest, pages, blocklist)
    }

    fn build(
        manifest: CorpusManifest,
        pages: Vec<(String, String, String)>,
        blocklist: Blocklist,
    ) -> Result<Self, BackendError> {
        let mut searches = HashMap::new();
        for s in manifest.searches {
            if let Some(bad) = s.results.iter().find(|r| !r.is_well_formed()) {
                return Err(BackendError::Unavailable(format!(
                    "malformed fixture result for {:?}: {:?}",
                    s.query, bad.url
                )));
            }
            searches.insert(s.query.trim().to_string(), s.results);
        }
        let pages =
            pages.into_iter().map(|(url, content_type, body)| (url, StoredPage { content_type, body })).collect();
        Ok(FixtureProvider {
            searches,
            pages,
            snapshot_time: manifest.snapshot_time.unwrap_or_else(|| DEFAULT_SNAPSHOT_TIME.to_string()),
            blocklist,
        })
    }
}

fn guess_type(file: &Path) -> String {
    match file.extension().and_then(|e| e.to_str()).map(|e| e.to_ascii_lowercase()).as_deref() {
        Some("html" | "htm") => "text/html; charset=utf-8",
        Some("txt") => "text/plain",
        Some("pdf") => "application/pdf",
        Some("json") => "application/json",
        _ => "application/octet-stream",
    }
    .to_string()
}

impl SearchProvider for FixtureProvider {
    fn search(&self, query: &str, offset: usize) -> Result<Vec<SearchResult>, BackendError> {
        check_search_args(query, offset)?;
        let Some(all) = self.searches.get(query.trim()) else {
            return Ok(Vec::new());
        };
        Ok(all
            .iter()
            .filter(|r| !self.blocklist.blocks_url(&r.url))
            .skip(offset)
            .take(RESULTS_PER_WINDOW)
            .cloned()
            .collect())
    }

    fn fetch(&self, url: &str) -> Result<RawPage, BackendError> {
        let page =
            self.pages.get(url).ok_or_else(|| BackendError::Unavailable(format!("no fixture page for {url}")))?;
        Ok(RawPage {
            url: url.to_string(),
            content_type: Some(page.content_type.clone()),
            html: page.body.clone(),
            fetched_at: self.snapshot_time.clone(),
        })
    }
}
