//! Command-line front end: expression parsing, job dispatch and report output.

pub mod job;
mod output;
pub mod parse;

pub use job::{run, Command, Format, JobSpec, Outcome, PartitionMethod};
pub use parse::{parse_expression, parse_symbol, ParseError, SystemConfig};
