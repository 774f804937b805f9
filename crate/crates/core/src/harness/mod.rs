//! Seeded parameter sweeps, their CSV artifacts and summaries.

mod aggregate;
mod config;
mod expr;
mod hitting;
mod records;
mod sweep;

pub use aggregate::{aggregate, read_aggregate_csv, write_aggregate_csv, AggregateRow};
pub use config::{ExperimentConfig, NoiseKind, NoiseSpec, Statistic, DEFAULT_BUDGET, DEFAULT_K};
pub use expr::Expr;
pub use hitting::{cga_hitting_time_sweep, HittingReport, HittingRow, HittingSpec};
pub use records::{
    read_meta, read_records_csv, write_meta, write_records_csv, RunRecord, RECORD_HEADER,
};
pub use sweep::{figure1_preset, run_sweep};
