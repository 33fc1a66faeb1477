//! Library side of the `ferro` command-line tool.

pub mod codefile;
pub mod survey;
