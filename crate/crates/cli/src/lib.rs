//! File formats, reports and the `detnet-envelope` command-line tool built
//! on the `detnet-envelope` core crate.

pub mod cli;
pub mod commands;
pub mod error;
pub mod formats;
pub mod manifest;
pub mod parallel;
pub mod records;
