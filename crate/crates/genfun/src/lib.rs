//! File formats, reports and command implementations for `genfun-core`.
//!
//! Inputs are JSON descriptors (see [`format`]); every command returns a
//! [`report::Report`] that renders as JSON or text and can write its numeric
//! traces as CSV files.

pub mod commands;
pub mod format;
pub mod report;

pub use commands::Settings;
pub use report::{Outcome, Report};
