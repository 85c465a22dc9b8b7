//! CLI surface, parameter sweeps and persisted result records.

pub mod cli;
mod record;
mod sweep;

pub use record::{
    read_jsonl, record_to_json, write_records, write_records_to_path, RecordFormat, ResultRecord,
    TOOL_VERSION,
};
pub use sweep::{run_sweep, SweepSpec, SweepSummary};
