use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use super::basis::{normalize_keep, BasisDescriptor};
use super::state::StateVector;
use crate::error::{invalid, Result, SimError};

/// Hermiticity, trace and positivity tolerance for reduced states.
pub const DENSITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    basis: BasisDescriptor,
    matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Wrap a matrix. Checks shape only; see [`DensityMatrix::validate`].
    pub fn new(basis: BasisDescriptor, matrix: DMatrix<Complex64>) -> Result<Self> {
        if !matrix.is_square() {
            return invalid(format!("density matrix is {}x{}", matrix.nrows(), matrix.ncols()));
        }
        if matrix.nrows() != basis.total_dim() {
            return invalid(format!(
                "matrix dimension {} does not match basis dimension {}",
                matrix.nrows(),
                basis.total_dim()
            ));
        }
        Ok(Self { basis, matrix })
    }

    pub fn from_pure(state: &StateVector) -> Self {
        let a = state.amplitudes();
        Self { basis: state.basis().clone(), matrix: a * a.adjoint() }
    }

    pub fn basis(&self) -> &BasisDescriptor {
        &self.basis
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// `Tr ρ²`, computed as the Frobenius norm squared of a Hermitian matrix.
    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        let n = self.dim();
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Ascending eigenvalues of the Hermitian part.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let herm = (&self.matrix + self.matrix.adjoint()).scale(0.5);
        let mut ev: Vec<f64> = SymmetricEigen::new(herm).eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    /// Hermitian, unit trace, no eigenvalue below `−DENSITY_TOL`.
    pub fn validate(&self) -> Result<()> {
        let h = self.hermiticity_error();
        if h > DENSITY_TOL {
            return Err(SimError::Tolerance(format!("density matrix not Hermitian: {h:.3e}")));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > DENSITY_TOL || tr.im.abs() > DENSITY_TOL {
            return Err(SimError::Tolerance(format!("density matrix trace {tr}")));
        }
        let min = self.eigenvalues().first().copied().unwrap_or(0.0);
        if min < -DENSITY_TOL {
            return Err(SimError::Tolerance(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(())
    }

    /// Reduce onto the listed subsystems (returned in ascending index order).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let keep = normalize_keep(keep, self.basis.len())?;
        let kept_basis = self.basis.select(&keep)?;
        let split = Split::new(&self.basis, &keep);
        let dk = kept_basis.total_dim();
        let mut out = DMatrix::zeros(dk, dk);
        let n = self.dim();
        let (kidx, tidx) = split.indices(n);
        for i in 0..n {
            for j in 0..n {
                if tidx[i] == tidx[j] {
                    out[(kidx[i], kidx[j])] += self.matrix[(i, j)];
                }
            }
        }
        DensityMatrix::new(kept_basis, out)
    }

    /// `½ Σ |eig(ρ − σ)|`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        if self.basis != other.basis {
            return Err(SimError::BasisMismatch("trace distance between different bases".into()));
        }
        let diff = &self.matrix - &other.matrix;
        let herm = (&diff + diff.adjoint()).scale(0.5);
        Ok(0.5 * SymmetricEigen::new(herm).eigenvalues.iter().map(|e| e.abs()).sum::<f64>())
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn fidelity_with(&self, psi: &StateVector) -> Result<f64> {
        if &self.basis != psi.basis() {
            return Err(SimError::BasisMismatch("fidelity between different bases".into()));
        }
        let a = psi.amplitudes();
        Ok(a.dotc(&(&self.matrix * a)).re)
    }

    pub fn scaled(&self, factor: f64) -> DensityMatrix {
        Self { basis: self.basis.clone(), matrix: self.matrix.scale(factor) }
    }

    pub fn add(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        if self.basis != other.basis {
            return Err(SimError::BasisMismatch("adding density matrices on different bases".into()));
        }
        Ok(Self { basis: self.basis.clone(), matrix: &self.matrix + &other.matrix })
    }
}

/// Maps each flat index to its (kept, traced) sub-indices.
struct Split {
    dims: Vec<usize>,
    keep_mask: Vec<bool>,
}

impl Split {
    fn new(basis: &BasisDescriptor, keep: &[usize]) -> Self {
        let mut keep_mask = vec![false; basis.len()];
        for &k in keep {
            keep_mask[k] = true;
        }
        Self { dims: basis.dims(), keep_mask }
    }

    fn indices(&self, total: usize) -> (Vec<usize>, Vec<usize>) {
        let mut kidx = Vec::with_capacity(total);
        let mut tidx = Vec::with_capacity(total);
        let mut digits = vec![0usize; self.dims.len()];
        for _ in 0..total {
            let (mut k, mut t) = (0, 0);
            for (s, &d) in digits.iter().enumerate() {
                if self.keep_mask[s] {
                    k = k * self.dims[s] + d;
                } else {
                    t = t * self.dims[s] + d;
                }
            }
            kidx.push(k);
            tidx.push(t);
            // increment the row-major odometer
            for s in (0..digits.len()).rev() {
                digits[s] += 1;
                if digits[s] < self.dims[s] {
                    break;
                }
                digits[s] = 0;
            }
        }
        (kidx, tidx)
    }
}

/// Reduced state of a pure state on the listed subsystems, `ρ = M M†` with
/// `M[k, t] = ψ[k, t]`.
pub fn partial_trace(state: &StateVector, keep: &[usize]) -> Result<DensityMatrix> {
    let basis = state.basis();
    let keep = normalize_keep(keep, basis.len())?;
    let kept_basis = basis.select(&keep)?;
    let dk = kept_basis.total_dim();
    let dt = basis.total_dim() / dk;
    let split = Split::new(basis, &keep);
    let (kidx, tidx) = split.indices(basis.total_dim());
    let mut m = DMatrix::<Complex64>::zeros(dk, dt);
    for (i, a) in state.amplitudes().iter().enumerate() {
        m[(kidx[i], tidx[i])] = *a;
    }
    DensityMatrix::new(kept_basis, &m * m.adjoint())
}

/// `S_L(ρ) = 1 − Tr ρ²`.
pub fn linear_entropy(rho: &DensityMatrix) -> f64 {
    1.0 - rho.purity()
}

/// Same, for a raw matrix.
pub fn linear_entropy_of(matrix: &DMatrix<Complex64>) -> Result<f64> {
    if !matrix.is_square() {
        return invalid(format!("linear entropy of a {}x{} matrix", matrix.nrows(), matrix.ncols()));
    }
    Ok(1.0 - matrix.iter().map(|z| z.norm_sqr()).sum::<f64>())
}

/// Diagonal density matrix on a single basis (e.g. a thermal mixture).
pub fn diagonal_mixture(basis: BasisDescriptor, weights: &[f64]) -> Result<DensityMatrix> {
    if weights.len() != basis.total_dim() {
        return invalid("one weight per basis state required");
    }
    let diag = DVector::from_iterator(weights.len(), weights.iter().map(|&w| Complex64::new(w, 0.0)));
    DensityMatrix::new(basis, DMatrix::from_diagonal(&diag))
}
