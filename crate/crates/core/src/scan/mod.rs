//! Potential-energy-surface scans: geometry grids, a resumable CSV runner
//! and derived report tables.

pub mod grid;
pub mod record;
pub mod report;
pub mod run;

pub use grid::{generate_grid, Axis, GridPoint, GridSpec, ScanMolecule};
pub use record::{read_records, RecordWriter, ScanRecord, COLUMNS, SCHEMA_LINE};
pub use report::{grid_minimum, report, ReportMode};
pub use run::{run_scan, Ansatz, ScanConfig, ScanSummary};
