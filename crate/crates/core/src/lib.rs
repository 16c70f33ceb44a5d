//! Exact evaluation of higher-spin six-vertex R-matrices, the 3D R-matrix,
//! q-oscillator Q-operators and transfer matrices, with verifiers for the
//! identities relating them.

pub mod error;
pub mod funcrel;
pub mod report;
pub mod qops;
pub mod rmatrix;
pub mod scalars;
pub mod tetra;
pub mod transfer;

pub use error::{Error, Result};
pub use report::{IdentityReport, Residual};
pub use qops::SectorBlock;
pub use rmatrix::{FieldSet, Idx4, SpinRMatrix, WeightParam};
pub use scalars::{LaurentPoly, Matrix, Mode, Scalar, ScalarContext};
