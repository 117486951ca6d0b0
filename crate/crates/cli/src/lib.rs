//! Command-line front end and acceptance suite for `degmag-core`.

pub mod acceptance;
pub mod app;
pub mod output;
