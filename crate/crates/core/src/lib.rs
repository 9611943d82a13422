//! Collective (Dicke) enhancement of a periodically modulated two-level
//! thermal machine.
//!
//! * [`spin`]: decomposition of N spin-½ atoms into total-spin blocks and the
//!   collective operators.
//! * [`floquet`]: sideband weights P(q) of a periodic frequency modulation.
//! * [`baths`]: bath spectra and the per-sideband emission/absorption rates.
//! * [`engine`]: closed-form steady-state currents, effective temperature and
//!   power boost.
//! * [`lindblad`] and [`oracle`]: brute-force master-equation integration used
//!   to check the closed forms.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baths;
pub mod density;
pub mod engine;
pub mod error;
pub mod floquet;
pub mod lindblad;
pub mod oracle;
pub mod spin;
pub mod table;

pub use baths::{BathLabel, BathSpec, SidebandChannel, SidebandRates, SpectralModel};
pub use density::DensityMatrix;
pub use engine::{EffectiveTemperature, EnergyCurrents, MachineConfig, OperationMode, SinusoidalEngine, WeightsModel};
pub use error::{Error, Result};
pub use floquet::{FloquetWeights, ModulationForm, ModulationSpec};
pub use lindblad::{CrossRateMatrix, LindbladChannel, Representation};
pub use oracle::{OracleOptions, OracleResult, SteadyStateMethod};
pub use spin::{DickeDecomposition, SpinQuantumNumber, SpinSector};
