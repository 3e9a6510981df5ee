//! Command-line front end for the `qmacro` measures: configuration, sweeps,
//! output, and the acceptance suite.

pub mod args;
pub mod config;
pub mod output;
pub mod parse;
pub mod run;
pub mod verify;
