//! Library half of the `nlsgraph` binary: spec-file parsing, command
//! implementations, and the self-test battery.

pub mod commands;
pub mod selftest;
pub mod specfile;
