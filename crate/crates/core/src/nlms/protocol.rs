use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;

use super::params::{derive_params, ProtocolParams};
use crate::dynamics::{evolve_dipole_two_ion, OmegaMode};
use crate::error::{invalid, Result, SimError};
use crate::fockspace::{
    cat_norm_sq, cat_superposition, fidelity, make_coherent, partial_trace, tensor, BasisDescriptor, DensityMatrix,
    Level, Parity, StateVector, Subsystem,
};

/// Largest initial truncation deficit the protocol accepts.
pub const MAX_DEFICIT: f64 = 1e-6;

/// Electronic outcomes of the final measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `|e₁, g₂⟩`
    ExcitedGround,
    /// `|g₁, e₂⟩`
    GroundExcited,
}

impl Branch {
    pub const ALL: [Branch; 2] = [Branch::ExcitedGround, Branch::GroundExcited];

    fn levels(&self) -> (usize, usize) {
        match self {
            Branch::ExcitedGround => (1, 0),
            Branch::GroundExcited => (0, 1),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Branch::ExcitedGround => "e1g2",
            Branch::GroundExcited => "g1e2",
        }
    }
}

/// Two-mode entangled cat states
/// `|Ψ₊⟩ ∝ |C₊,C₊⟩ + |C₋,C₋⟩` and `|Φ₊⟩ ∝ |C₊,C₋⟩ + |C₋,C₊⟩`
/// with `|C_±⟩ = |β⟩ ± |−β⟩`; only the two-mode states are normalized, so
/// that `|Ψ₊⟩ ∝ |β,β⟩ + |−β,−β⟩` and `|Φ₊⟩ ∝ |β,β⟩ − |−β,−β⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetStates {
    pub psi_plus: StateVector,
    pub phi_plus: StateVector,
}

pub fn target_states(beta: Complex64, n_max: usize) -> Result<TargetStates> {
    if cat_norm_sq(beta, Parity::Odd, n_max) < 1e-300 {
        return Err(SimError::Degenerate(format!("odd cat component vanishes for β = {beta}")));
    }
    let even = cat_superposition(beta, Parity::Even, n_max);
    let odd = cat_superposition(beta, Parity::Odd, n_max);
    let basis = BasisDescriptor::new(vec![Subsystem::mode(n_max), Subsystem::mode(n_max)])?;
    let psi = even.kronecker(&even) + odd.kronecker(&odd);
    let phi = even.kronecker(&odd) + odd.kronecker(&even);
    Ok(TargetStates {
        psi_plus: StateVector::new(basis.clone(), psi)?.normalized()?,
        phi_plus: StateVector::new(basis, phi)?.normalized()?,
    })
}

/// Result of one protocol run.
#[derive(Debug, Clone)]
pub struct ProtocolOutcome {
    pub params: ProtocolParams,
    pub n_max: usize,
    /// Indexed by [`Branch::ALL`].
    pub probabilities: [f64; 2],
    /// Normalized post-selected two-mode motional states.
    pub branch_states: [StateVector; 2],
    /// `fidelities[b][0]` against `|Ψ₊⟩`, `fidelities[b][1]` against `|Φ₊⟩`.
    pub fidelities: [[f64; 2]; 2],
    /// Joint parity `⟨e^{iπ(n̂₁ + n̂₂)}⟩` per branch.
    pub parities: [f64; 2],
    pub truncation_deficit: f64,
    /// Population found outside `{e₁g₂, g₁e₂}` at `t_I`.
    pub sector_leakage: f64,
}

impl ProtocolOutcome {
    /// Fidelities of the branches with their expected targets: for integer `k`
    /// `e₁g₂ → Ψ₊, g₁e₂ → Φ₊`; for half-integer `k` the roles swap.
    pub fn matched_fidelities(&self) -> [f64; 2] {
        let f = &self.fidelities;
        if self.params.integer_k() {
            [f[0][0], f[1][1]]
        } else {
            [f[1][0], f[0][1]]
        }
    }

    /// Fidelity of the branch expected to carry `|Ψ₊⟩`.
    pub fn psi_plus_fidelity(&self) -> f64 {
        self.matched_fidelities()[0]
    }
}

fn initial_state(alpha: Complex64, n_max: usize) -> Result<StateVector> {
    let e = StateVector::qubit(Level::Excited);
    let g = StateVector::qubit(Level::Ground);
    let a = make_coherent(alpha, n_max)?;
    let psi = tensor(&[&e, &g, &a, &a])?;
    if psi.truncation_deficit() > MAX_DEFICIT {
        return Err(SimError::Truncation { deficit: psi.truncation_deficit(), limit: MAX_DEFICIT, n_max });
    }
    Ok(psi)
}

/// Unnormalized projection onto an electronic outcome, as a state over the
/// remaining subsystems.
fn project(state: &StateVector, branch: Branch) -> Result<StateVector> {
    let basis = state.basis();
    let rest: Vec<usize> = (2..basis.len()).collect();
    let rest_basis = basis.select(&rest)?;
    let (q1, q2) = branch.levels();
    let strides = basis.strides();
    let offset = q1 * strides[0] + q2 * strides[1];
    let amps = DVector::from_iterator(
        rest_basis.total_dim(),
        (0..rest_basis.total_dim()).map(|i| state.amplitudes()[offset + i]),
    );
    StateVector::new(rest_basis, amps)
}

fn evolve_to_interaction_time(params: &ProtocolParams, psi0: &StateVector, n_max: usize) -> Result<StateVector> {
    let cfg = params.system_config(n_max);
    let mut r = evolve_dipole_two_ion(&cfg, psi0, &[params.t_interaction], params.omega_mode)?;
    Ok(r.states.remove(0))
}

/// Evolve `|e₁, α, g₂, α⟩` for `t_I`, measure the electronic state and
/// compare each post-selected motional state with the targets at `β = iα`.
pub fn run_protocol(params: &ProtocolParams, n_max: usize) -> Result<ProtocolOutcome> {
    let psi0 = initial_state(params.alpha, n_max)?;
    let final_state = evolve_to_interaction_time(params, &psi0, n_max)?;
    let targets = target_states(Complex64::i() * params.alpha, n_max)?;

    let mut probabilities = [0.0; 2];
    let mut states = Vec::with_capacity(2);
    for (b, branch) in Branch::ALL.iter().enumerate() {
        let raw = project(&final_state, *branch)?;
        probabilities[b] = raw.norm().powi(2);
        states.push(raw.normalized()?);
    }
    let branch_states: [StateVector; 2] = [states[0].clone(), states[1].clone()];
    let mut fidelities = [[0.0; 2]; 2];
    let mut parities = [0.0; 2];
    for b in 0..2 {
        fidelities[b][0] = fidelity(&branch_states[b], &targets.psi_plus)?;
        fidelities[b][1] = fidelity(&branch_states[b], &targets.phi_plus)?;
        parities[b] = branch_states[b].parity_expectation(&[0, 1])?;
    }
    Ok(ProtocolOutcome {
        params: params.clone(),
        n_max,
        sector_leakage: (1.0 - probabilities.iter().sum::<f64>()).abs(),
        probabilities,
        branch_states,
        fidelities,
        parities,
        truncation_deficit: psi0.truncation_deficit(),
    })
}

/// Cavity-field state carried along as a spectator.
#[derive(Debug, Clone)]
pub enum SpectatorField {
    Pure(StateVector),
    /// Fock-diagonal mixture `Σ_m w_m |m⟩⟨m|`.
    Diagonal(Vec<f64>),
}

/// Branch probabilities and post-selected motional states (field traced out)
/// when a spectator field is present.
#[derive(Debug, Clone)]
pub struct SpectatorOutcome {
    pub probabilities: [f64; 2],
    pub branch_states: [DensityMatrix; 2],
}

fn run_pure_spectator(params: &ProtocolParams, n_max: usize, field: &StateVector) -> Result<([f64; 2], Vec<DensityMatrix>)> {
    if field.basis().len() != 1 {
        return invalid("spectator field must be a single mode");
    }
    let psi0 = tensor(&[&initial_state(params.alpha, n_max)?, field])?;
    let final_state = evolve_to_interaction_time(params, &psi0, n_max)?;
    let mut probs = [0.0; 2];
    let mut rhos = Vec::with_capacity(2);
    for (b, branch) in Branch::ALL.iter().enumerate() {
        let raw = project(&final_state, *branch)?;
        probs[b] = raw.norm().powi(2);
        rhos.push(partial_trace(&raw.normalized()?, &[0, 1])?);
    }
    Ok((probs, rhos))
}

pub fn run_with_spectator(params: &ProtocolParams, n_max: usize, field: &SpectatorField) -> Result<SpectatorOutcome> {
    let (probabilities, rhos) = match field {
        SpectatorField::Pure(f) => run_pure_spectator(params, n_max, f)?,
        SpectatorField::Diagonal(weights) => {
            let total: f64 = weights.iter().sum();
            if weights.is_empty() || weights.iter().any(|w| !(*w >= 0.0)) || (total - 1.0).abs() > 1e-12 {
                return invalid("mixture weights must be non-negative and sum to 1");
            }
            let n_field = weights.len() - 1;
            let mut probs = [0.0; 2];
            let mut acc: Vec<Option<DensityMatrix>> = vec![None, None];
            for (m, &w) in weights.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                let (p, rhos) = run_pure_spectator(params, n_max, &StateVector::fock(m, n_field)?)?;
                for b in 0..2 {
                    probs[b] += w * p[b];
                    let term = rhos[b].scaled(w * p[b]);
                    acc[b] = Some(match acc[b].take() {
                        Some(r) => r.add(&term)?,
                        None => term,
                    });
                }
            }
            let rhos = acc
                .into_iter()
                .zip(probs)
                .map(|(r, p)| Ok(r.expect("at least one weight is positive").scaled(1.0 / p)))
                .collect::<Result<Vec<_>>>()?;
            (probs, rhos)
        }
    };
    Ok(SpectatorOutcome { probabilities, branch_states: [rhos[0].clone(), rhos[1].clone()] })
}

/// One row of a fidelity-versus-`k` sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub k: f64,
    pub eta: f64,
    /// Fidelities of the branches with their expected targets (`Ψ₊`, `Φ₊`).
    pub fidelity_psi: f64,
    pub fidelity_phi: f64,
    pub probability_psi_branch: f64,
}

pub fn fidelity_sweep(
    ks: &[f64],
    alpha: Complex64,
    couplings: (f64, f64),
    delta: f64,
    mode: OmegaMode,
    n_max: usize,
) -> Result<Vec<SweepRow>> {
    ks.par_iter()
        .map(|&k| {
            let p = derive_params(k, alpha, couplings.0, couplings.1, delta)?.with_mode(mode);
            let out = run_protocol(&p, n_max)?;
            let [fp, ff] = out.matched_fidelities();
            let psi_branch = if p.integer_k() { 0 } else { 1 };
            Ok(SweepRow {
                k,
                eta: p.eta,
                fidelity_psi: fp,
                fidelity_phi: ff,
                probability_psi_branch: out.probabilities[psi_branch],
            })
        })
        .collect()
}
