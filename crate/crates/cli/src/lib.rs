//! Configuration, certification suites and reports behind the `ltlab` binary.

pub mod compute;
pub mod config;
pub mod report;
pub mod suites;

pub use config::RunConfig;
pub use report::Report;
pub use suites::run_suite;
