//! Single-photon transport through a dimerized (SSH) atom array side-coupled
//! to a one-dimensional waveguide.
//!
//! Everything is in units of the single-atom waveguide decay rate Γ, in the
//! frame rotating at the atomic frequency ω0; positions are in units of the
//! lattice spacing d.
//!
//! ```
//! use taa_core::{scatter_markovian, Angle, Direction, SystemParams};
//!
//! let params = SystemParams::reference(Angle::from_pi(0.2), 0.0);
//! let res = scatter_markovian(&params, 0.0, Direction::Left).unwrap();
//! assert!(res.transmission < 1e-6);
//! ```

pub mod analysis;
pub mod angle;
pub mod dynamics;
pub mod error;
pub mod invariants;
pub mod linalg;
pub mod model;
pub mod scattering;
pub mod spectral;

pub use analysis::{
    absorption_map, amplification_scan, chi, delta_chi, find_gamma_r0, find_reflection_minimum, sweep,
    time_reversal_report, Axis, AxisParam, Observable, Spacing, SweepSpec, SweepTable,
};
pub use angle::Angle;
pub use dynamics::{evolve, fit_decay_rate, reconstruct_field, FieldGrid, IntensityMode, PulseSpec, Trajectory};
pub use error::{Error, Result};
pub use model::{build_couplings, build_effective_hamiltonian, CouplingVector, EffectiveHamiltonian, SystemParams};
pub use scattering::{
    field_profile, scatter_channels, scatter_exact, scatter_markovian, ChannelDecomposition, Direction,
    PiecewiseField, ScatterResult, Solver,
};
pub use spectral::{classify_modes, edge_decay_rate, eigendecompose, edge_report, EdgeClassification, ModeSet};

/// Engine version recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
