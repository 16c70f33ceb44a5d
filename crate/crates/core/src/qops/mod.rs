//! q-oscillator representations, the local operators `A_±^{(I)}(λ)` and the
//! Q-operator blocks obtained from their normalized traces.

mod local;
mod rep;
mod trace;

pub use local::{a_element, a_minus_element, a_minus_rational, a_minus_stripped_factor, a_plus_element, QSign};
pub use rep::{FockRep, VermaRep};
pub use trace::{
    fock_trace, laurent_block, normalized_fock_trace, q_operator, sector_basis, trace_normalization, BandRecord,
    FockBandOperator, QOperatorBlock, SectorBlock,
};
