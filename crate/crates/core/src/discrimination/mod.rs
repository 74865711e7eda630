//! Helstrom bounds and the heralded branch pipeline.

mod branch;
mod certificate;
mod helstrom;
mod instance;
mod oracle;
mod random;

pub use branch::{average_min_error, branch_decompose, BranchDecomposition, BranchResult, ConditionalState, DroppedBranch};
pub use certificate::{nogo_certificate, NoGoCertificate};
pub(crate) use certificate::certify;
pub use helstrom::{helstrom_mixed, helstrom_projectors, helstrom_pure, pure_pair_trace_norm, HelstromMeasurement};
pub use instance::DiscriminationInstance;
pub use oracle::brute_force_min_error;
pub use random::{random_instance, random_pure_pair, random_trials, TrialParams};
