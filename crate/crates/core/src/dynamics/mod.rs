//! Time evolution: spectral propagation for any Hermitian operator, phase
//! evolution for diagonal operators, and the two-ion dipole block rotation.

mod dipole;

pub use dipole::{evolve_dipole_two_ion, rabi_frequencies, OmegaMode};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Result, SimError};
use crate::fockspace::StateVector;
use crate::hamiltonian::{LabeledOperator, OperatorMatrix, DEFAULT_DIM_CAP};

/// Maximum allowed `|‖ψ(t)‖ − 1|`.
pub const NORM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ExactDiagonalization,
    DiagonalPhase,
    DipoleBlock,
}

impl Method {
    pub fn label(&self) -> &'static str {
        match self {
            Method::ExactDiagonalization => "exact-diagonalization",
            Method::DiagonalPhase => "diagonal-phase",
            Method::DipoleBlock => "dipole-block",
        }
    }
}

#[derive(Debug, Clone)]
pub struct EvolutionResult {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    pub method: Method,
}

impl EvolutionResult {
    fn checked(times: &[f64], states: Vec<StateVector>, method: Method) -> Result<Self> {
        for (t, s) in times.iter().zip(&states) {
            let dev = (s.norm() - 1.0).abs();
            if dev >= NORM_TOL {
                return Err(SimError::Tolerance(format!(
                    "{}: norm drifted by {dev:.3e} at t = {t}",
                    method.label()
                )));
            }
        }
        Ok(Self { times: times.to_vec(), states, method })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

fn check_initial(h: &LabeledOperator, psi0: &StateVector) -> Result<()> {
    if h.basis() != psi0.basis() {
        return Err(SimError::BasisMismatch(format!(
            "operator on {:?}, state on {:?}",
            h.basis().dims(),
            psi0.basis().dims()
        )));
    }
    let dev = (psi0.norm() - 1.0).abs();
    if dev >= NORM_TOL {
        return invalid(format!("initial state is not normalized (‖ψ‖ − 1 = {dev:.3e})"));
    }
    Ok(())
}

fn phases(energies: &DVector<f64>, t: f64) -> impl Iterator<Item = Complex64> + '_ {
    energies.iter().map(move |&e| Complex64::from_polar(1.0, -e * t))
}

/// Options for [`evolve_exact_with`].
#[derive(Debug, Clone)]
pub struct ExactOptions<'a> {
    pub dim_cap: usize,
    /// Diagonal free Hamiltonian whose phases are removed, giving the state in
    /// the interaction picture `e^{i H_0 t} e^{−i H t} ψ_0`.
    pub strip_free: Option<&'a LabeledOperator>,
}

impl Default for ExactOptions<'_> {
    fn default() -> Self {
        Self { dim_cap: DEFAULT_DIM_CAP, strip_free: None }
    }
}

/// `ψ(t) = e^{−iHt} ψ_0` from one spectral decomposition shared by all times.
pub fn evolve_exact(h: &LabeledOperator, psi0: &StateVector, times: &[f64]) -> Result<EvolutionResult> {
    evolve_exact_with(h, psi0, times, &ExactOptions::default())
}

pub fn evolve_exact_with(
    h: &LabeledOperator,
    psi0: &StateVector,
    times: &[f64],
    opts: &ExactOptions,
) -> Result<EvolutionResult> {
    if !h.is_hermitian() || h.hermiticity_error() >= crate::hamiltonian::HERMITIAN_TOL {
        return invalid("exact evolution requires a Hermitian operator");
    }
    check_initial(h, psi0)?;
    let dim = h.dim();
    if dim > opts.dim_cap {
        return Err(SimError::ResourceCap { dim, cap: opts.dim_cap });
    }
    let free = match opts.strip_free {
        Some(h0) => {
            if h0.basis() != h.basis() || h0.max_off_diagonal() != 0.0 {
                return invalid("free part to strip must be diagonal on the same basis");
            }
            Some(h0.diagonal_entries().map(|z| z.re))
        }
        None => None,
    };

    let (energies, vectors) = spectral(h);
    let coeffs = vectors.adjoint() * psi0.amplitudes();
    let states = times
        .par_iter()
        .map(|&t| {
            let rotated = DVector::from_iterator(dim, coeffs.iter().zip(phases(&energies, t)).map(|(c, p)| c * p));
            let mut amps = &vectors * rotated;
            if let Some(f) = &free {
                for (a, p) in amps.iter_mut().zip(phases(f, -t)) {
                    *a *= p;
                }
            }
            StateVector::new(psi0.basis().clone(), amps).map(|s| s.with_deficit(psi0.truncation_deficit()))
        })
        .collect::<Result<Vec<_>>>()?;
    EvolutionResult::checked(times, states, Method::ExactDiagonalization)
}

/// Eigenvalues and eigenvectors, using the real solver when `H` is real.
fn spectral(h: &LabeledOperator) -> (DVector<f64>, DMatrix<Complex64>) {
    if let OperatorMatrix::Diagonal(d) = h.matrix() {
        let dim = d.len();
        return (d.map(|z| z.re), DMatrix::identity(dim, dim));
    }
    let m = h.to_dense();
    if m.iter().all(|z| z.im == 0.0) {
        let re = m.map(|z| z.re);
        let eig = SymmetricEigen::new(re);
        (eig.eigenvalues, eig.eigenvectors.map(|x| Complex64::new(x, 0.0)))
    } else {
        let eig = SymmetricEigen::new(m);
        (eig.eigenvalues, eig.eigenvectors)
    }
}

/// Phase evolution `ψ_k(t) = e^{−i d_k t} ψ_k(0)` for a diagonal operator.
pub fn evolve_diagonal(h: &LabeledOperator, psi0: &StateVector, times: &[f64]) -> Result<EvolutionResult> {
    if h.max_off_diagonal() != 0.0 {
        return invalid(format!(
            "diagonal evolution given an operator with off-diagonal element {:.3e}",
            h.max_off_diagonal()
        ));
    }
    let d = h.diagonal_entries();
    if d.iter().any(|z| z.im != 0.0) {
        return invalid("diagonal evolution requires real diagonal entries");
    }
    check_initial(h, psi0)?;
    let energies = d.map(|z| z.re);
    let amps0 = psi0.amplitudes();
    let states = times
        .par_iter()
        .map(|&t| {
            let amps = DVector::from_iterator(amps0.len(), amps0.iter().zip(phases(&energies, t)).map(|(a, p)| a * p));
            StateVector::new(psi0.basis().clone(), amps).map(|s| s.with_deficit(psi0.truncation_deficit()))
        })
        .collect::<Result<Vec<_>>>()?;
    EvolutionResult::checked(times, states, Method::DiagonalPhase)
}
