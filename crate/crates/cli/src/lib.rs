//! Library surface of the experiment harness, used by the binary and the
//! verification suites.

pub mod config;
pub mod experiments;
pub mod report;
