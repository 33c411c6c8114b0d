//! Simulation and characterization toolkit for quantum instruments.
//!
//! A quantum instrument is an indexed family of completely-positive,
//! trace-non-increasing maps whose sum is trace-preserving: a measurement
//! together with its post-measurement states. This crate builds the full
//! stack needed to study one concrete instrument — a QND qubit-loss
//! detection unit on a qubit/qutrit pair — end to end:
//!
//! * [`op`] — dense complex operator algebra on small composite Hilbert
//!   spaces (tensor products, partial trace, Hermitian eigendecomposition,
//!   PSD projection, Uhlmann fidelity).
//! * [`instrument`] — the loss rotation, MS gate, and QND detection unit,
//!   assembled into instruments (loss detection, erasure channel) with
//!   branch-wise application and derived observables.
//! * [`tomo`] — Choi operators, informationally complete preparation and
//!   measurement designs, synthetic multinomial data, linear inversion, and
//!   weighted least-squares reconstruction over the PSD cone with or
//!   without the trace-preservation constraint.
//! * [`noise`] — microscopic error channels (correlated and single
//!   overrotations, depolarizing, dephasing), their second-order Choi
//!   operators, the effective Clifford event channel, and an
//!   infidelity-minimizing parameter fitter.
//! * [`qec`] — the 7-qubit color code: loss-correctability analysis,
//!   analytic success probability, and Monte Carlo simulation of a loss
//!   correction cycle with faulty QND detection and faulty stabilizer
//!   readout, in coherent (state-vector) and incoherent (stabilizer
//!   tableau) modes.
//!
//! All types are immutable values after construction and safe to share
//! across threads; Monte Carlo loops use counter-based per-trial RNG
//! streams so results do not depend on thread count.

pub mod error;
pub mod instrument;
pub mod noise;
pub mod op;
pub mod qec;
pub mod rng;
pub mod tol;
pub mod tomo;

pub use error::{Error, Result};
pub use instrument::{KrausBranch, LossAngle, QuantumInstrument};
pub use noise::{CliffordEventTable, NoiseParams};
pub use op::{DensityOperator, Effect, HilbertShape, Operator};
pub use qec::{CodeTrialOutcome, ColorCode, QecConfig};
pub use tomo::{ChoiOperator, MeasurementRecord, TomographyDesign};
