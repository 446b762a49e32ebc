//! Interactive web-search environment for long-form question answering.
//!
//! The crate is organised around a deterministic session state machine
//! ([`env`]) that agents or human annotators drive through ten discrete
//! actions. Search results and page text come from a pluggable
//! [`backend`]; finished sessions are persisted as replayable
//! [`trajectory`] records. [`agent`] holds the text-to-text module
//! contract and episode runner, [`synthesis`] the training-data corruption
//! procedures, and [`eval`] the sub-task metrics.

pub mod agent;
pub mod backend;
pub mod digest;
pub mod env;
pub mod eval;
pub mod par;
pub mod synthesis;
pub mod trajectory;

pub use env::{Action, ActionKind, Mode, Session, SessionState, SupportingFact, Window};

/// Wire-format version echoed in every envelope and persisted record.
pub const WIRE_VERSION: &str = "v1";
