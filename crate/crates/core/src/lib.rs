//! Heralded binary state discrimination in truncated Fock spaces.
//!
//! Two pure states `|ψ₁⟩`, `|ψ₂⟩` (priors `1−q`, `q`) interact with a pure
//! environment through a joint unitary. A measurement on the environment
//! splits the ensemble into branches, each of which is discriminated with its
//! own Helstrom measurement. The crate computes the per-branch and averaged
//! minimum error probabilities and certifies that the average never beats the
//! Helstrom bound of the unconditioned states, even though single branches can.
//!
//! Layout:
//!
//! - [`fock`]: states, operators, beam splitters and Hermitian linear algebra
//!   on truncated Fock spaces.
//! - [`measurement`]: POVMs, photon-number readout and the pure-loss channel.
//! - [`discrimination`]: Helstrom bounds, the branch pipeline, the averaged
//!   error certificate and a brute-force oracle.
//! - [`experiments`]: closed-form evaluations of the worked examples, the
//!   engine runs that must reproduce them, sweeps and CSV output.

pub mod discrimination;
pub mod error;
pub mod experiments;
pub mod fock;
pub mod measurement;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Default absolute tolerances shared by the modules.
pub mod tol {
    /// Hermiticity and unitarity checks (max norm).
    pub const STRUCTURE: f64 = 1e-10;
    /// Most negative eigenvalue accepted as positive semidefinite.
    pub const PSD: f64 = 1e-10;
    /// Branches whose outcome probability is below this are dropped.
    pub const PROBABILITY_FLOOR: f64 = 1e-12;
    /// POVM and Kraus completeness residual.
    pub const COMPLETENESS: f64 = 1e-10;
    /// Slack on `p_aveme − p_me ≥ 0`.
    pub const MARGIN: f64 = 1e-9;
    /// Truncation tail accepted by the coherent-state cutoff policy.
    pub const TAIL_TARGET: f64 = 1e-12;
    /// Normalization check on supposedly normalized states, on top of the tail bound.
    pub const NORM: f64 = 1e-10;
}
