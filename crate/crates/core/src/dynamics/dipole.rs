use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use super::{EvolutionResult, Method, NORM_TOL};
use crate::error::{invalid, Result};
use crate::fockspace::{StateVector, SubsystemKind};
use crate::hamiltonian::{dipole_coupling, f_table, SystemConfig};

/// Probability allowed outside `{|e₁g₂⟩, |g₁e₂⟩}` in the initial state.
const SECTOR_TOL: f64 = 1e-24;

/// How the motional dependence of the exchange rate is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OmegaMode {
    /// `Ω(n₁, n₂) = G f(n₁) f(n₂)`.
    ExactF,
    /// Second order in `η`: `Ω ≈ G (1 − η₁²/2 − η₂²/2 − η₁² n₁ − η₂² n₂)`.
    LambDicke,
}

impl OmegaMode {
    pub fn label(&self) -> &'static str {
        match self {
            OmegaMode::ExactF => "exact",
            OmegaMode::LambDicke => "ld",
        }
    }
}

/// Exchange rates `Ω(n₁, n₂)` of the two-ion dipole coupling on the given
/// motional ladders, with `G = (g₁g₂/2)(1/Δ₁ + 1/Δ₂)`.
pub fn rabi_frequencies(config: &SystemConfig, n_max: [usize; 2], mode: OmegaMode) -> Result<DMatrix<f64>> {
    config.validate()?;
    if config.n_ions() != 2 {
        return invalid(format!("dipole exchange needs exactly two ions, got {}", config.n_ions()));
    }
    let big_g = dipole_coupling(config, 0, 1);
    let (e1, e2) = (config.eta[0].powi(2), config.eta[1].powi(2));
    Ok(match mode {
        OmegaMode::ExactF => {
            let f1 = f_table(n_max[0], config.eta[0])?;
            let f2 = f_table(n_max[1], config.eta[1])?;
            DMatrix::from_fn(n_max[0] + 1, n_max[1] + 1, |a, b| big_g * f1[a] * f2[b])
        }
        OmegaMode::LambDicke => DMatrix::from_fn(n_max[0] + 1, n_max[1] + 1, |a, b| {
            big_g * (1.0 - 0.5 * (e1 + e2) - e1 * a as f64 - e2 * b as f64)
        }),
    })
}

/// Evolution under `Ω̂ (σ₁⁺σ₂⁻ + σ₁⁻σ₂⁺)` with `Ω̂` diagonal in the motional
/// Fock basis: each `(n₁, n₂)` component rotates as
/// `cos(Ωt)|e₁g₂⟩ − i sin(Ωt)|g₁e₂⟩` and vice versa.
///
/// The basis must start with qubit 1, qubit 2, mode 1, mode 2; any further
/// subsystems are spectators. The initial state must lie in the
/// single-excitation electronic sector.
pub fn evolve_dipole_two_ion(
    config: &SystemConfig,
    psi0: &StateVector,
    times: &[f64],
    mode: OmegaMode,
) -> Result<EvolutionResult> {
    let basis = psi0.basis();
    let subs = basis.subsystems();
    let layout_ok = subs.len() >= 4
        && subs[0].kind == SubsystemKind::Qubit
        && subs[1].kind == SubsystemKind::Qubit
        && subs[2].kind == SubsystemKind::Mode
        && subs[3].kind == SubsystemKind::Mode;
    if !layout_ok {
        return invalid("dipole evolution expects qubit, qubit, mode, mode, then spectators");
    }
    let dev = (psi0.norm() - 1.0).abs();
    if dev >= NORM_TOL {
        return invalid(format!("initial state is not normalized (‖ψ‖ − 1 = {dev:.3e})"));
    }
    let omega = rabi_frequencies(config, [subs[2].n_max(), subs[3].n_max()], mode)?;

    let strides = basis.strides();
    let amps0 = psi0.amplitudes();
    // (index of |e₁g₂, …⟩, index of |g₁e₂, …⟩, Ω) for every motional/spectator configuration
    let mut pairs = Vec::with_capacity(amps0.len() / 4);
    let mut outside = 0.0;
    for (idx, a) in amps0.iter().enumerate() {
        let multi = basis.multi_index(idx)?;
        match (multi[0], multi[1]) {
            (1, 0) => pairs.push((idx, idx - strides[0] + strides[1], omega[(multi[2], multi[3])])),
            (0, 1) => {}
            _ => outside += a.norm_sqr(),
        }
    }
    if outside > SECTOR_TOL {
        return invalid(format!(
            "initial state has weight {outside:.3e} outside the single-excitation electronic sector"
        ));
    }

    let states = times
        .par_iter()
        .map(|&t| {
            let mut amps = DVector::zeros(amps0.len());
            for &(eg, ge, w) in &pairs {
                let (c, s) = ((w * t).cos(), (w * t).sin());
                let mis = Complex64::new(0.0, -s);
                amps[eg] = amps0[eg] * c + amps0[ge] * mis;
                amps[ge] = amps0[eg] * mis + amps0[ge] * c;
            }
            StateVector::new(basis.clone(), amps).map(|s| s.with_deficit(psi0.truncation_deficit()))
        })
        .collect::<Result<Vec<_>>>()?;
    EvolutionResult::checked(times, states, Method::DipoleBlock)
}
