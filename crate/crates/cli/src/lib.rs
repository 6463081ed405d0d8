//! Configuration ingestion, run orchestration and file output for the
//! chemotaxis-consumption solver. The `chemotaxis` binary is a thin
//! dispatcher over [`commands`].

pub mod commands;
pub mod config;
pub mod output;
