//! Closed-form linear entropies and global entanglement for the cross-Kerr
//! coupled field and motional modes, their brute-force counterparts, and the
//! figure presets built on them.

mod closed_form;
mod figures;
mod numeric;
mod series;

pub use crate::fockspace::photon_distribution;
pub use closed_form::{dephasing_closed_form, Case, CaseSpec, ClosedForm, TAIL_WARNING};
pub use figures::{distinct_ions, figure_preset, FigurePreset};
pub use numeric::{bridge_n_max, numeric_entropies};
pub use series::{
    entropy_series, entropy_series_with, plateau_fraction, simultaneous_returns, uniform_grid, EntropySeries,
};
