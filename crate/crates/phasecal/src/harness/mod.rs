//! Instance generation, phase-transition sweeps at configurable scale,
//! certifier-vs-solver consistency runs, persistence, and plotting.

mod consistency;
mod gen;
mod plot;
mod sweep;

pub use consistency::{run_consistency, AgreementCell, ConsistencyRow, ConsistencyRun, LambdaPolicy};
pub use gen::{gen_instance, Field, InstanceDims, InstanceFile, Provenance};
pub use plot::emit_plots;
pub use sweep::{
    parse_sweep_csv, run_transition, CellResult, CellSpec, ExperimentConfig, TrialRow,
    SWEEP_CSV_HEADER,
};
