//! Command-line front end and HTTP service for the search environment.

pub mod cli;
pub mod commands;
pub mod provider;
pub mod server;
