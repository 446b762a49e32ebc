use std::path::Path;

use serde::{Deserialize, Serialize};

/// Domain suffixes whose results are dropped from search windows.
///
/// `reddit.com` blocks `reddit.com` and `www.reddit.com` but not
/// `notreddit.com`. Matching is case-insensitive.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Blocklist {
    suffixes: Vec<String>,
}

impl Blocklist {
    pub fn new<I, S>(suffixes: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let suffixes = suffixes
            .into_iter()
            .map(|s| s.as_ref().trim().trim_matches('.').to_ascii_lowercase())
            .filter(|s| !s.is_empty())
            .collect();
        Blocklist { suffixes }
    }

    /// One suffix per line; blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Self {
        Self::new(text.lines().map(|l| l.split('#').next().unwrap_or("")).filter(|l| !l.trim().is_empty()))
    }

    pub fn from_file(path: &Path) -> std::io::Result<Self> {
        Ok(Self::parse(&std::fs::read_to_string(path)?))
    }

    pub fn is_empty(&self) -> bool {
        self.suffixes.is_empty()
    }

    pub fn suffixes(&self) -> &[String] {
        &self.suffixes
    }

    pub fn blocks_host(&self, host: &str) -> bool {
        let host = host.trim_end_matches('.').to_ascii_lowercase();
        self.suffixes.iter().any(|s| {
            host == *s
                || (host.len() > s.len()
                    && host.ends_with(s.as_str())
                    && host.as_bytes()[host.len() - s.len() - 1] == b'.')
        })
    }

    /// Urls without a parsable host are never blocked.
    pub fn blocks_url(&self, url: &str) -> bool {
        match url::Url::parse(url) {
            Ok(u) => u.host_str().is_some_and(|h| self.blocks_host(h)),
            Err(_) => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suffix_matching() {
        let b = Blocklist::new(["reddit.com", ".Zhihu.COM"]);
        assert!(b.blocks_url("https://reddit.com/r/eli5"));
        assert!(b.blocks_url("https://www.REDDIT.com/r/eli5"));
        assert!(b.blocks_url("https://old.reddit.com./x"));
        assert!(b.blocks_url("http://zhuanlan.zhihu.com/p/1"));
        assert!(!b.blocks_url("https://notreddit.com/"));
        assert!(!b.blocks_url("https://reddit.com.evil.org/"));
        assert!(!b.blocks_url("not a url"));
    }

    #[test]
    fn parses_file_format() {
        let b = Blocklist::parse("# sources of the questions\nreddit.com\n\n  quora.com  # qa\n");
        assert_eq!(b.suffixes(), ["reddit.com", "quora.com"]);
    }
}
