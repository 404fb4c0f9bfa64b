//! Command-line companion to `combforge-core`: verification suites, operator
//! and comb file formats, certificates and reports.

pub mod certs;
pub mod config;
pub mod error;
pub mod io;
pub mod report;
pub mod suites;

pub use error::{Error, Result};
