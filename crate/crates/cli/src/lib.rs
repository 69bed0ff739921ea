//! Library half of the `surfsc` binary: argument parsing, config files and
//! table output.

pub mod commands;
pub mod config;
pub mod table;
