//! Hamiltonian splitting solver for the Vlasov-Maxwell system reduced to one
//! space and two velocity dimensions.
//!
//! The unknowns are the electron distribution `f(x1, v1, v2)` on a periodic
//! `x1` axis and a truncated velocity box, and the fields `E1`, `E2`, `B`.
//! A step composes three exactly solvable flows ([`Flows::flow_he`],
//! [`Flows::flow_hb`], [`Flows::flow_hf`]); the streaming flow updates the
//! electric field with the current it transports, so the discrete Poisson
//! equation stays satisfied to roundoff.

pub mod advection;
pub mod baselines;
pub mod cases;
pub mod composition;
pub mod diagnostics;
pub mod error;
pub mod flows;
pub mod grid;
pub mod simulation;

pub use advection::{AdvectionKernel, AdvectionMethod, Boundary, RotationMethod};
pub use cases::{CaseName, CaseParams, CaseSpec};
pub use composition::{integrate, triple_jump_coefficients, SplitKind, SplittingScheme};
pub use diagnostics::{DiagnosticsRecord, FieldComponent};
pub use error::{Result, SimError};
pub use flows::{FieldState, Flows, SimState};
pub use grid::{DistributionFunction, PhaseSpaceGrid};
pub use simulation::{SchemeKind, Simulation};
