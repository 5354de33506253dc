//! Explicit time integration of the competition system with free fronts
//! for the invader.

mod classify;
mod profile;
mod run;
mod state;
mod step;

pub use classify::{classify_outcome, default_span_threshold, Classification, ClassifyOptions, OutcomeReport};
pub use profile::{Profile, ProfileSpec};
pub use run::{auto_half_width, run, write_snapshot_csv, ProbeRecord, RunOptions, Trajectory};
pub use state::{FreeBoundaryState, Grid, InitialData};
pub use step::{boundary_flux, convolve_on_interval, dt_bound, step, Scratch, Side, Simulator, DT_SAFETY};
