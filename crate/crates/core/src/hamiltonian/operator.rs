use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{invalid, Result, SimError};
use crate::fockspace::BasisDescriptor;

/// Hermiticity tolerance for builder outputs.
pub const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum OperatorMatrix {
    Dense(DMatrix<Complex64>),
    /// Operator diagonal in the product Fock basis.
    Diagonal(DVector<Complex64>),
}

/// A matrix tied to the basis it acts on.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledOperator {
    basis: BasisDescriptor,
    matrix: OperatorMatrix,
    hermitian: bool,
}

impl LabeledOperator {
    /// With `hermitian = true` the matrix must satisfy `‖H − H†‖_max < 1e-12`.
    pub fn new(basis: BasisDescriptor, matrix: OperatorMatrix, hermitian: bool) -> Result<Self> {
        let dim = match &matrix {
            OperatorMatrix::Dense(m) => {
                if !m.is_square() {
                    return invalid("operator matrix must be square");
                }
                m.nrows()
            }
            OperatorMatrix::Diagonal(d) => d.len(),
        };
        if dim != basis.total_dim() {
            return invalid(format!("operator dimension {dim} vs basis {}", basis.total_dim()));
        }
        let op = Self { basis, matrix, hermitian };
        if hermitian {
            let err = op.hermiticity_error();
            if err >= HERMITIAN_TOL {
                return Err(SimError::Tolerance(format!("operator flagged Hermitian but ‖H − H†‖ = {err:.3e}")));
            }
        }
        Ok(op)
    }

    pub fn dense(basis: BasisDescriptor, m: DMatrix<Complex64>) -> Result<Self> {
        Self::new(basis, OperatorMatrix::Dense(m), true)
    }

    pub fn diagonal(basis: BasisDescriptor, d: DVector<Complex64>) -> Result<Self> {
        Self::new(basis, OperatorMatrix::Diagonal(d), true)
    }

    pub fn zero(basis: BasisDescriptor) -> Self {
        let d = DVector::zeros(basis.total_dim());
        Self { basis, matrix: OperatorMatrix::Diagonal(d), hermitian: true }
    }

    pub fn basis(&self) -> &BasisDescriptor {
        &self.basis
    }

    pub fn matrix(&self) -> &OperatorMatrix {
        &self.matrix
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn dim(&self) -> usize {
        self.basis.total_dim()
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        match &self.matrix {
            OperatorMatrix::Dense(m) => m.clone(),
            OperatorMatrix::Diagonal(d) => DMatrix::from_diagonal(d),
        }
    }

    pub fn element(&self, row: usize, col: usize) -> Complex64 {
        match &self.matrix {
            OperatorMatrix::Dense(m) => m[(row, col)],
            OperatorMatrix::Diagonal(d) if row == col => d[row],
            OperatorMatrix::Diagonal(_) => Complex64::new(0.0, 0.0),
        }
    }

    pub fn diagonal_entries(&self) -> DVector<Complex64> {
        match &self.matrix {
            OperatorMatrix::Dense(m) => m.diagonal(),
            OperatorMatrix::Diagonal(d) => d.clone(),
        }
    }

    /// Largest off-diagonal modulus (0 for the diagonal representation).
    pub fn max_off_diagonal(&self) -> f64 {
        match &self.matrix {
            OperatorMatrix::Diagonal(_) => 0.0,
            OperatorMatrix::Dense(m) => {
                let mut worst: f64 = 0.0;
                for j in 0..m.ncols() {
                    for i in 0..m.nrows() {
                        if i != j {
                            worst = worst.max(m[(i, j)].norm());
                        }
                    }
                }
                worst
            }
        }
    }

    pub fn hermiticity_error(&self) -> f64 {
        match &self.matrix {
            OperatorMatrix::Diagonal(d) => d.iter().map(|z| 2.0 * z.im.abs()).fold(0.0, f64::max),
            OperatorMatrix::Dense(m) => {
                let mut worst: f64 = 0.0;
                for j in 0..m.ncols() {
                    for i in 0..=j {
                        worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
                    }
                }
                worst
            }
        }
    }

    pub fn apply(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        match &self.matrix {
            OperatorMatrix::Dense(m) => m * v,
            OperatorMatrix::Diagonal(d) => d.component_mul(v),
        }
    }

    /// Sum of operators on the same basis; diagonal + diagonal stays diagonal.
    pub fn add(&self, other: &LabeledOperator) -> Result<LabeledOperator> {
        if self.basis != other.basis {
            return Err(SimError::BasisMismatch("adding operators on different bases".into()));
        }
        let matrix = match (&self.matrix, &other.matrix) {
            (OperatorMatrix::Diagonal(a), OperatorMatrix::Diagonal(b)) => OperatorMatrix::Diagonal(a + b),
            _ => OperatorMatrix::Dense(self.to_dense() + other.to_dense()),
        };
        Ok(Self { basis: self.basis.clone(), matrix, hermitian: self.hermitian && other.hermitian })
    }

    /// `max |[A, B]_{ij}|`.
    pub fn commutator_norm(&self, other: &LabeledOperator) -> Result<f64> {
        if self.basis != other.basis {
            return Err(SimError::BasisMismatch("commutator of operators on different bases".into()));
        }
        let (a, b) = (self.to_dense(), other.to_dense());
        let c = &a * &b - &b * &a;
        Ok(c.iter().map(|z| z.norm()).fold(0.0, f64::max))
    }
}
