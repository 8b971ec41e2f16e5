//! Command-line front end: run configuration, coefficient caching, table
//! emission, and the reproduction commands.

pub mod cache;
pub mod commands;
pub mod config;
pub mod output;
pub mod reference;
