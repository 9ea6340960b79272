//! Full, Bessel-approximated and effective Hamiltonians for `N` ions in one
//! cavity mode, plus the dispersive-regime checks they rely on.

mod bessel;
mod builders;
mod config;
mod operator;
mod regime;

pub use bessel::{cos_position_matrix, f_of_n, f_of_n_series, f_table, COS_PADDING};
pub use builders::{
    build_bessel_approx, build_cross_kerr, build_effective, build_full, cross_kerr_from_lambdas,
    dipole_coupling, free_hamiltonian, EffectiveHamiltonian,
};
pub use config::{ElectronicPrep, SystemConfig, DEFAULT_DIM_CAP};
pub use operator::{LabeledOperator, OperatorMatrix, HERMITIAN_TOL};
pub use regime::{format_sig, validate_regime, Flag, IonRegime, RegimeReport, ETA_SOFT, HARD_RATIO, SOFT_RATIO};
