use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::runner::{AgentError, AgentModules};

#[derive(Serialize)]
struct ModuleRequest<'a> {
    v: &'a str,
    module: &'a str,
    state: &'a str,
}

#[derive(Deserialize)]
struct ModuleResponse {
    text: String,
}

/// Agent modules served over HTTP: each module is a `POST {base}/{module}`
/// taking `{"v", "module", "state"}` and answering `{"text"}`, where module
/// is one of `action`, `query`, `fact`.
pub struct HttpAgent {
    base: url::Url,
    client: reqwest::blocking::Client,
}

impl HttpAgent {
    pub fn new(base: &str) -> Result<Self, AgentError> {
        let mut base = url::Url::parse(base).map_err(|e| AgentError::Transport(e.to_string()))?;
        if !base.path().ends_with('/') {
            base.set_path(&format!("{}/", base.path()));
        }
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(120))
            .build()
            .map_err(|e| AgentError::Transport(e.to_string()))?;
        Ok(HttpAgent { base, client })
    }

    fn call(&self, module: &str, state: &str) -> Result<String, AgentError> {
        let url = self.base.join(module).map_err(|e| AgentError::Transport(e.to_string()))?;
        let resp = self
            .client
            .post(url)
            .json(&ModuleRequest { v: crate::WIRE_VERSION, module, state })
            .send()
            .map_err(|e| AgentError::Transport(e.to_string()))?;
        if !resp.status().is_success() {
            return Err(AgentError::Transport(format!("{module} module returned {}", resp.status())));
        }
        let body: ModuleResponse = resp.json().map_err(|e| AgentError::Transport(e.to_string()))?;
        Ok(body.text)
    }
}

impl AgentModules for HttpAgent {
    fn predict_action(&mut self, state: &str) -> Result<String, AgentError> {
        self.call("action", state)
    }

    fn generate_query(&mut self, state: &str) -> Result<String, AgentError> {
        self.call("query", state)
    }

    fn extract_fact(&mut self, state: &str) -> Result<String, AgentError> {
        self.call("fact", state)
    }
}
