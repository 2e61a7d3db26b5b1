//! Polar-coordinate Brownian motion: single paths, ensembles, coupled pairs.

mod coupled;
mod ensemble;
mod path;

pub use coupled::{
    coupling_refinement, run_coupled_ensemble, simulate_coupled, CoupledRecord, CoupledReport, RefinementReport,
    DEFAULT_K_TOL,
};
pub(crate) use ensemble::simulate_records;
pub use ensemble::{run_ensemble, EnsembleReport, EnsembleSummary, Exceedance, McConfig};
pub use path::{
    drifts, simulate_path, simulate_path_traced, step, PathRecord, PathState, Sector, StepOutcome, StepPolicy,
    StopReason, StopSpec, TraceRow, POLE_CHART_RADIUS, R_FLOOR,
};
