//! Command-line front end for `fusion-core`.

pub mod commands;
pub mod profile_file;
pub mod report;
