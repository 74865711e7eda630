//! The worked examples: closed-form evaluations, engine runs, sweeps and CSV.
//!
//! Every example fixes `ψ₁ = |0⟩`, `ψ₂ = cosθ|0⟩ + sinθ|1⟩` and a beam splitter
//! of transmissivity `η` followed by photon counting on the environment mode:
//!
//! - Example 1: environment `|2⟩`, perfect counting;
//! - Example 2: environment `|α⟩` (real `α`), perfect counting;
//! - lossy: environment `|2⟩`, pure-loss channel of transmissivity `τ` before counting;
//! - TMSV: environment `|k⟩` heralded from a two-mode squeezed vacuum.
//!
//! Closed forms live in [`closed_form`] and share no code with the engine.

pub mod closed_form;
mod csv_io;
mod engine;
mod sweep;
mod types;

pub use closed_form::{example1_closed_form, example2_closed_form, example2_k_max, lossy_closed_form};
pub use csv_io::{read_csv, validate_csv_rows, write_csv, CsvRow};
pub use engine::{example1_engine, example2_engine, fock_env_engine, lossy_engine, EngineRun};
pub use sweep::{cross_check, lossy_sweep, run_sweep, tmsv_cutoff, tmsv_herald, CROSS_CHECK_TOL_LOSSY, CROSS_CHECK_TOL_PURE};
pub use types::{Backend, BackendSelection, BranchSummary, Evaluation, ExampleKind, FixedParams, Grid, SweepRow, SweepSpec, SweptParam};
