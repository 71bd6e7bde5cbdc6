//! Simulation of protocols that activate genuine multipartite entanglement
//! from copies of biseparable states.
//!
//! The crate is generic over the real scalar ([`Real`], implemented for `f32`
//! and `f64`). The `*F64` aliases below are what the command-line tool uses.
//!
//! * [`qcore`]: states, local operators, projective measurements, partial traces.
//! * [`entanglement`]: bipartitions, Schmidt data, negativity, GME and
//!   Svetlichny checks.
//! * [`protocols`]: state builders and the activation protocols, Bell-chain
//!   merging, teleportation and a seeded Monte Carlo runner.
//! * [`distill`]: local filtering, isotropic twirling and recurrence rounds.

pub mod distill;
pub mod entanglement;
pub mod error;
pub mod protocols;
pub mod qcore;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{Real, C};

pub type PureStateF64 = qcore::PureState<f64>;
pub type DensityOperatorF64 = qcore::DensityOperator<f64>;
pub type CMatrixF64 = qcore::CMatrix<f64>;
pub type ProjectiveMeasurementF64 = qcore::ProjectiveMeasurement<f64>;
pub type BipartitionReportF64 = entanglement::BipartitionReport<f64>;
pub type ProtocolConfigF64 = protocols::ProtocolConfig<f64>;
pub type ProtocolReportF64 = protocols::ProtocolReport<f64>;

pub type PureStateF32 = qcore::PureState<f32>;
pub type DensityOperatorF32 = qcore::DensityOperator<f32>;
