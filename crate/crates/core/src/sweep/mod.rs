//! Parameter sweeps: configuration, parallel execution and table output.

mod config;
mod emit;
mod run;

pub use config::{
    load_config, parse_config, CouplingAxis, Emit, EngineConfig, Mode, ModelSource, OutputConfig,
    OutputFormat, SweepConfig,
};
pub use emit::{
    emit_results, format_float, output_stem, scaling_fit_of, write_convergence, write_landscapes,
    write_table, COLUMNS,
};
pub use run::{run_sweep, solve_point, SweepOutcome, SweepRow, PAIRING_REL_TOL};
