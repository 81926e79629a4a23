//! Artifact plumbing behind the `hshear` binary: fixed-precision numbers,
//! CSV tables, convexity reports with their SVG plots, and the reproduction
//! suites.

pub mod output;
pub mod plot;
pub mod reproduce;
