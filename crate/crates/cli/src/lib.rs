//! Library side of the `cdfc` command: input parsing, report assembly and
//! rendering.

#![allow(clippy::result_large_err)]

pub mod render;
pub mod report;
pub mod spec;
