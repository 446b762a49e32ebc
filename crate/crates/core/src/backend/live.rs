//! HTTP client for a JSON web-search API.
//!
//! The endpoint is queried as `GET {endpoint}?q=..&count=..&offset=..` with
//! the key in an `Ocp-Apim-Subscription-Key` header and is expected to answer
//! `{"webPages": {"value": [{"name", "url", "snippet"}, ...]}}`. Raw results
//! are pulled in batches and cached per query so that blocklist filtering
//! happens before the three-result windows are cut.

use std::collections::HashMap;
use std::sync::Mutex;
use std::time::Duration;

use serde::Deserialize;

use super::{check_search_args, BackendError, Blocklist, RawPage, SearchProvider, SearchResult, RESULTS_PER_WINDOW};

/// Environment variable holding the search API credential.
pub const API_KEY_ENV: &str = "SEARCH_API_KEY";

const SNIPPET_CHARS: usize = 100;
const BATCH: usize = 50;

#[derive(Deserialize)]
struct ApiResponse {
    #[serde(rename = "webPages")]
    web_pages: Option<WebPages>,
}

#[derive(Deserialize)]
struct WebPages {
    #[serde(default)]
    value: Vec<ApiResult>,
}

#[derive(Deserialize)]
struct ApiResult {
    #[serde(default)]
    name: String,
    #[serde(default)]
    url: String,
    #[serde(default)]
    snippet: String,
}

#[derive(Default)]
struct QueryResults {
    kept: Vec<SearchResult>,
    next_offset: usize,
    exhausted: bool,
}

pub struct LiveProvider {
    endpoint: url::Url,
    api_key: Option<String>,
    blocklist: Blocklist,
    client: reqwest::blocking::Client,
    cache: Mutex<HashMap<String, QueryResults>>,
}

impl LiveProvider {
    pub fn new(endpoint: &str, api_key: Option<String>, blocklist: Blocklist) -> Result<Self, BackendError> {
        let endpoint = url::Url::parse(endpoint).map_err(|e| BackendError::InvalidUrl(format!("{endpoint}: {e}")))?;
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(20))
            .user_agent(concat!("searchenv/", env!("CARGO_PKG_VERSION")))
            .build()
            .map_err(|e| BackendError::Unavailable(e.to_string()))?;
        Ok(LiveProvider { endpoint, api_key, blocklist, client, cache: Mutex::default() })
    }

    /// Reads the credential from [`API_KEY_ENV`].
    pub fn from_env(endpoint: &str, blocklist: Blocklist) -> Result<Self, BackendError> {
        Self::new(endpoint, std::env::var(API_KEY_ENV).ok(), blocklist)
    }

    fn fetch_batch(&self, query: &str, offset: usize) -> Result<Vec<ApiResult>, BackendError> {
        let mut req = self.client.get(self.endpoint.clone()).query(&[
            ("q", query.to_string()),
            ("count", BATCH.to_string()),
            ("offset", offset.to_string()),
        ]);
        if let Some(key) = &self.api_key {
            req = req.header("Ocp-Apim-Subscription-Key", key);
        }
        let resp = req.send().map_err(|e| BackendError::Unavailable(e.to_string()))?;
        if !resp.status().is_success() {
            return Err(BackendError::Unavailable(format!("search api returned {}", resp.status())));
        }
        let body: ApiResponse = resp.json().map_err(|e| BackendError::Unavailable(e.to_string()))?;
        Ok(body.web_pages.map(|w| w.value).unwrap_or_default())
    }
}

fn truncate_chars(s: &str, n: usize) -> String {
    s.chars().take(n).collect()
}

impl SearchProvider for LiveProvider {
    fn search(&self, query: &str, offset: usize) -> Result<Vec<SearchResult>, BackendError> {
        check_search_args(query, offset)?;
        let query = query.trim();
        let mut cache = self.cache.lock().unwrap();
        let entry = cache.entry(query.to_string()).or_default();
        while entry.kept.len() < offset + RESULTS_PER_WINDOW && !entry.exhausted {
            let batch = self.fetch_batch(query, entry.next_offset)?;
            if batch.is_empty() {
                entry.exhausted = true;
            }
            entry.next_offset += batch.len();
            entry.kept.extend(
                batch
                    .into_iter()
                    .map(|r| SearchResult {
                        title: r.name.trim().to_string(),
                        url: r.url,
                        snippet: truncate_chars(&r.snippet, SNIPPET_CHARS),
                    })
                    .filter(|r| r.is_well_formed() && !self.blocklist.blocks_url(&r.url)),
            );
        }
        Ok(entry.kept.iter().skip(offset).take(RESULTS_PER_WINDOW).cloned().collect())
    }

    fn fetch(&self, url: &str) -> Result<RawPage, BackendError> {
        let resp = self.client.get(url).send().map_err(|e| BackendError::Unavailable(e.to_string()))?;
        if !resp.status().is_success() {
            return Err(BackendError::Unavailable(format!("{url} returned {}", resp.status())));
        }
        let content_type =
            resp.headers().get(reqwest::header::CONTENT_TYPE).and_then(|v| v.to_str().ok()).map(str::to_string);
        let html = resp.text().map_err(|e| BackendError::Unavailable(e.to_string()))?;
        Ok(RawPage {
            url: url.to_string(),
            content_type,
            html,
            fetched_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        })
    }
}
