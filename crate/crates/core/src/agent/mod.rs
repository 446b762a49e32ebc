//! Search-agent scaffolding: state serialization, the fact-span codec,
//! the episode runner with scripted and HTTP-backed agents, and the
//! TF-IDF retrieval baseline.

#[cfg(feature = "live")]
mod http;
mod runner;
mod scripted;
mod serialize;
mod span;
pub mod tfidf;

#[cfg(feature = "live")]
pub use http::HttpAgent;
pub use runner::{parse_action_text, run_episode, ActionTextError, AgentError, AgentModules, RunnerConfig};
pub use scripted::{ScriptStep, ScriptedAgent};
pub use serialize::{serialize_state, SerializeConfig, DEFAULT_CHAR_BUDGET, FORMAT_HEADER};
pub use span::{
    candidate_count, decode_fact_span, encode_fact_span, SpanEncoding, SpanError, DEFAULT_EDGE_CHARS, END_MARKER,
    START_MARKER,
};
pub use tfidf::{rank_paragraphs, select_within_budget, split_paragraphs, tfidf_baseline_retrieve, TfidfConfig};
