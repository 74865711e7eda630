//! Complex linear algebra over truncated Fock spaces.
//!
//! Joint spaces are ordered system first, environment second, with row-major
//! joint indexing: the last mode varies fastest.

mod beam_splitter;
mod density;
mod linalg;
mod operator;
mod partial;
mod space;
mod state;

pub use beam_splitter::beam_splitter;
pub use density::DensityMatrix;
pub use linalg::{hermitian_eig, psd_sqrt, trace_norm, HermitianEigen};
pub use operator::{annihilation, creation, number_op, Operator};
pub use partial::{env_contract, reduced_system, schmidt_weights};
pub use space::FockSpace;
pub use state::{coherent_cutoff, coherent_state, coherent_state_with_target, fock_state, PureState};

pub(crate) use linalg::{eigh, max_abs};
pub(crate) use partial::{amplitude_matrix, apply_env};
