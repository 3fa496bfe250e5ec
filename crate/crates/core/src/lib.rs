//! Entanglement probability density functions of two-qubit mixed states.

pub mod compose;
pub mod error;
pub mod features;
pub mod haar;
pub mod linalg;
pub mod measures;
pub mod pps;
pub mod random;
pub mod reconstruct;
pub mod spectral;
pub mod state;
pub mod subspace;

pub use error::{Error, Result};
pub use state::{ComplexMatrix4, DensityMatrix, PureState};
