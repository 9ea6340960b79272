//! Truncated Fock-space core: labeled tensor bases, state constructors,
//! partial traces and the scalar diagnostics built on them.

mod basis;
mod density;
mod photon;
mod state;

pub use basis::{BasisDescriptor, Subsystem, SubsystemKind};
pub use density::{
    diagonal_mixture, linear_entropy, linear_entropy_of, partial_trace, DensityMatrix, DENSITY_TOL,
};
pub use photon::{converged_n_max, photon_distribution, PhotonDistribution, PhotonKind, SERIES_CUTOFF};
pub use state::{
    apply_parity, cat_norm_sq, cat_superposition, default_n_max_coherent, default_n_max_squeezed,
    fidelity, make_cat, make_coherent, make_squeezed_vacuum, recommended_n_max_coherent, tensor,
    Level, Parity, StateVector,
};
