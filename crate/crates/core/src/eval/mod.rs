//! Scoring and the proportion-by-method benchmark grid.

mod experiment;
mod metric;
mod report;

pub use experiment::{
    cell_masks, cell_seed, load_split, run_experiment, run_experiment_with, CellResult, DataSource, ExperimentPlan, NmseReport,
    PlotTrace, RunResult,
};
pub use metric::{nmse, nmse_with_scope, NmseScope};
pub use report::{cells_csv, emit_report, table_csv, table_text, ReportFormat};
