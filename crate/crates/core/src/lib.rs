//! Spin structure, systematic shifts and trap dynamics of the hydrogen molecular
//! ion and its antimatter counterpart in a Penning trap.
//!
//! The crate is organised by role:
//!
//! - [`coefficients`] loads the per-level spin and polarizability coefficients.
//! - [`spin`] builds and diagonalizes the effective spin Hamiltonian.
//! - [`systematics`] turns level energies into transition shifts and budgets.
//! - [`e2`] handles electric-quadrupole amplitudes and Rabi rates.
//! - [`lineshape`] models Doppler-broadened profiles and fits their centre.
//! - [`cooling`] integrates the two-ion double-well dynamics.
//! - [`bottle`] covers the magnetic-bottle cancellation algebra.

pub mod bottle;
pub mod coefficients;
pub mod constants;
pub mod cooling;
pub mod e2;
mod error;
pub mod lineshape;
pub mod spin;
pub mod state;
pub mod systematics;
pub(crate) mod tabular;

pub use bottle::{BottleField, CancellationReport, MagicBottle};
pub use coefficients::{load_coefficients, Coefficient, CoefficientTable, LevelCoefficients};
pub use constants::{PhysicalConstants, CODATA_2018};
pub use cooling::{
    CoolingMap, CoolingOutcome, CoolingProtocol, DoubleWell, ParticleState, Polarity, SweepProtocol, Trajectory,
};
pub use error::{Error, Result};
pub use spin::{EigenLevel, FieldEnvironment};
pub use e2::{E2Table, Geometry, RabiResult};
pub use state::{charge_conjugate, Level, Species, SpinProjection, SpinState};
pub use systematics::{ShiftBudget, TransitionSpec, TrapConfig};
