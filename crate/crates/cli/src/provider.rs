use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use searchenv_core::backend::{Blocklist, FixtureProvider, LiveProvider, SearchProvider};

pub const DEFAULT_ENDPOINT: &str = "https://api.bing.microsoft.com/v7.0/search";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProviderKind {
    Live,
    Fixture,
}

#[derive(Debug, Clone, Args)]
pub struct ProviderArgs {
    /// Search backend.
    #[arg(long, value_enum, default_value = "fixture", global = true)]
    pub provider: ProviderKind,
    /// Fixture corpus directory (contains corpus.json).
    #[arg(long, global = true)]
    pub corpus: Option<PathBuf>,
    /// Blocked domain suffixes, one per line.
    #[arg(long, global = true)]
    pub blocklist: Option<PathBuf>,
    /// Search API endpoint for the live provider; the key is read from SEARCH_API_KEY.
    #[arg(long, default_value = DEFAULT_ENDPOINT, global = true)]
    pub endpoint: String,
}

impl ProviderArgs {
    /// Must be called outside any async runtime: the live client is blocking.
    pub fn build(&self) -> Result<Arc<dyn SearchProvider>> {
        let blocklist = match &self.blocklist {
            Some(p) => Blocklist::from_file(p).with_context(|| format!("reading blocklist {}", p.display()))?,
            None => Blocklist::default(),
        };
        Ok(match self.provider {
            ProviderKind::Fixture => {
                let Some(dir) = &self.corpus else {
                    bail!("--provider fixture needs --corpus DIR");
                };
                Arc::new(FixtureProvider::open(dir, blocklist)?)
            }
            ProviderKind::Live => Arc::new(LiveProvider::from_env(&self.endpoint, blocklist)?),
        })
    }
}
