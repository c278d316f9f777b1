//! Command-line surface for the workbench: job files in, deterministic
//! reports out.
//! - `job` parses and validates a JSON job document into concrete algebra
//!   objects; nothing executes until the whole file is resolved
//! - `exec` runs the compiled commands in declaration order
//! - `report` renders results as a table, csv, or round-trippable
//!   json-lines, every vector tagged with its certification window

pub mod exec;
pub mod job;
pub mod report;

pub use exec::run;
pub use job::{apply_overrides, compile, parse_job, CompiledJob, JobError, JobFile, Overrides};
pub use report::{
    parse_json_lines, render, AnnotatedVector, CommandResult, Format, NamedMatrix, Report,
    Verdict,
};
