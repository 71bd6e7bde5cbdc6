//! Dense complex linear algebra over multiparty Hilbert spaces.

pub mod dims;
pub mod linalg;
pub mod matrix;
pub mod measurement;
pub mod ops;
pub mod state;

pub use dims::PartyDims;
pub use matrix::{gates, CMatrix};
pub use measurement::{measure, MeasurementOutcome, ProjectiveMeasurement};
pub use ops::{
    apply_local_unitary, fidelity_pure, ket, mix, partial_trace, relabel_subspace, states, tensor,
};
pub use state::{DensityOperator, PureState, QuantumState};
