use crate::error::{invalid, Result, SimError};
use crate::fockspace::{tensor, BasisDescriptor, Level, StateVector, Subsystem};

/// Largest Hilbert-space dimension any dense builder or solver will accept.
pub const DEFAULT_DIM_CAP: usize = 4096;

/// Physical parameters of `N` trapped ions and one cavity mode.
///
/// Frequencies are angular and expressed in units of `g_1`. The detuning
/// `Δ_i = ω_i − ω_c` is always derived, never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub nu: Vec<f64>,
    pub omega_c: f64,
    pub omega: Vec<f64>,
    pub g: Vec<f64>,
    pub eta: Vec<f64>,
    pub n_max_motion: Vec<usize>,
    pub n_max_field: usize,
    pub dim_cap: usize,
}

impl SystemConfig {
    /// `N` identical ions with `ω_i = ω_c + Δ`.
    #[allow(clippy::too_many_arguments)]
    pub fn uniform(
        n_ions: usize,
        nu: f64,
        omega_c: f64,
        delta: f64,
        g: f64,
        eta: f64,
        n_max_motion: usize,
        n_max_field: usize,
    ) -> Self {
        Self {
            nu: vec![nu; n_ions],
            omega_c,
            omega: vec![omega_c + delta; n_ions],
            g: vec![g; n_ions],
            eta: vec![eta; n_ions],
            n_max_motion: vec![n_max_motion; n_ions],
            n_max_field,
            dim_cap: DEFAULT_DIM_CAP,
        }
    }

    pub fn with_dim_cap(mut self, cap: usize) -> Self {
        self.dim_cap = cap;
        self
    }

    pub fn n_ions(&self) -> usize {
        self.nu.len()
    }

    pub fn delta(&self, i: usize) -> f64 {
        self.omega[i] - self.omega_c
    }

    pub fn deltas(&self) -> Vec<f64> {
        (0..self.n_ions()).map(|i| self.delta(i)).collect()
    }

    /// Cross-Kerr rates `λ_i = 2 η_i² g_i² / Δ_i`.
    pub fn lambdas(&self) -> Vec<f64> {
        (0..self.n_ions())
            .map(|i| 2.0 * self.eta[i].powi(2) * self.g[i].powi(2) / self.delta(i))
            .collect()
    }

    /// Couplings may be zero (free evolution); everything must be finite.
    pub fn validate(&self) -> Result<()> {
        let n = self.n_ions();
        if n == 0 {
            return invalid("at least one ion is required");
        }
        for (name, len) in [
            ("omega", self.omega.len()),
            ("g", self.g.len()),
            ("eta", self.eta.len()),
            ("n_max_motion", self.n_max_motion.len()),
        ] {
            if len != n {
                return invalid(format!("{name} has {len} entries for {n} ions"));
            }
        }
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        if !finite(&self.nu) || !finite(&self.omega) || !finite(&self.g) || !finite(&self.eta) || !self.omega_c.is_finite() {
            return invalid("all frequencies and couplings must be finite");
        }
        if self.g.iter().any(|&g| g < 0.0) {
            return invalid("couplings g_i must be ≥ 0");
        }
        if self.eta.iter().any(|&e| e < 0.0) {
            return invalid("Lamb-Dicke parameters must be ≥ 0");
        }
        if self.n_max_motion.iter().any(|&m| m < 1) || self.n_max_field < 1 {
            return invalid("every n_max must be ≥ 1");
        }
        Ok(())
    }

    /// Ion qubits, then motional modes, then the field.
    pub fn full_basis(&self) -> Result<BasisDescriptor> {
        let mut subs = vec![Subsystem::qubit(); self.n_ions()];
        subs.extend(self.n_max_motion.iter().map(|&m| Subsystem::mode(m)));
        subs.push(Subsystem::mode(self.n_max_field));
        BasisDescriptor::new(subs)
    }

    /// Motional modes, then the field.
    pub fn motion_field_basis(&self) -> Result<BasisDescriptor> {
        let mut subs: Vec<Subsystem> = self.n_max_motion.iter().map(|&m| Subsystem::mode(m)).collect();
        subs.push(Subsystem::mode(self.n_max_field));
        BasisDescriptor::new(subs)
    }

    pub(crate) fn check_cap(&self, dim: usize) -> Result<()> {
        check_cap(dim, self.dim_cap)
    }
}

pub(crate) fn check_cap(dim: usize, cap: usize) -> Result<()> {
    if dim > cap {
        return Err(SimError::ResourceCap { dim, cap });
    }
    Ok(())
}

/// Per-ion electronic preparation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElectronicPrep(pub Vec<Level>);

impl ElectronicPrep {
    pub fn all_ground(n: usize) -> Self {
        Self(vec![Level::Ground; n])
    }

    pub fn state(&self) -> Result<StateVector> {
        let qubits: Vec<StateVector> = self.0.iter().map(|&l| StateVector::qubit(l)).collect();
        tensor(&qubits.iter().collect::<Vec<_>>())
    }
}
