//! Command-line frontend pieces: scenario config files, CSV/plot output and
//! the subcommand implementations. The binary in `main.rs` is a thin
//! argument-parsing layer over [`commands`].

pub mod commands;
pub mod config;
pub mod csvio;
