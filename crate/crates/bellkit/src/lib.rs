//! File formats, artifact output and the command-line front end over
//! `bellkit-core`.

pub mod cli;
pub mod error;
pub mod formats;
pub mod output;
