//! Library surface behind the `cr-sched` binary: scenario loading, the four
//! built-in geometries, run orchestration, and report emission.

pub mod presets;
pub mod report;
pub mod runner;
pub mod scenario_file;

pub use presets::{preset_distances, preset_scenario, PRESET_NAMES};
pub use report::{emit_plot_data, fmt_sig, write_csv, write_json, ReportMeta, RunReport, UserRow};
pub use runner::{execute, RunOptions, RunOutcome};
pub use scenario_file::{load_scenario, LoadedScenario, MethodArg, OutputFormat, PowerArg};
