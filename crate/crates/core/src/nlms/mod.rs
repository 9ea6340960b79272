//! Two-ion protocol producing entangled motional cat states: parameter
//! selection, dipole evolution, electronic post-selection and fidelity
//! analysis.

mod params;
mod protocol;

pub use params::{default_protocol_n_max, derive_params, ProtocolParams, ETA_MAX, ETA_WARN};
pub use protocol::{
    fidelity_sweep, run_protocol, run_with_spectator, target_states, Branch, ProtocolOutcome, SpectatorField,
    SpectatorOutcome, SweepRow, TargetStates, MAX_DEFICIT,
};
