//! The `rugged` command line: single runs, sweeps, oracle verification and charts.

pub mod chart;
pub mod commands;
pub mod suites;

/// Process exit statuses.
pub mod exit {
    pub const SUCCESS: u8 = 0;
    /// A verification check failed.
    pub const CHECK_FAILED: u8 = 1;
    /// Bad flags, configuration or input files.
    pub const USAGE: u8 = 2;
}
