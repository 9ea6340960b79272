use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SubsystemKind {
    /// Two-level system; index 0 is `|g⟩`, index 1 is `|e⟩`.
    Qubit,
    /// Bosonic mode truncated at `dim - 1` quanta.
    Mode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Subsystem {
    pub kind: SubsystemKind,
    pub dim: usize,
}

impl Subsystem {
    pub fn qubit() -> Self {
        Self { kind: SubsystemKind::Qubit, dim: 2 }
    }

    pub fn mode(n_max: usize) -> Self {
        Self { kind: SubsystemKind::Mode, dim: n_max + 1 }
    }

    pub fn n_max(&self) -> usize {
        self.dim - 1
    }
}

/// Ordered list of tensor factors. The flat index is row-major: the first
/// subsystem is the most significant digit.
///
/// The library-wide ordering is ion qubits, then motional modes, then the
/// cavity field.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BasisDescriptor {
    subsystems: Vec<Subsystem>,
    total_dim: usize,
}

impl BasisDescriptor {
    pub fn new(subsystems: Vec<Subsystem>) -> Result<Self> {
        if subsystems.is_empty() {
            return invalid("a basis needs at least one subsystem");
        }
        let mut total_dim: usize = 1;
        for s in &subsystems {
            if s.dim == 0 {
                return invalid("subsystem dimension must be positive");
            }
            if s.kind == SubsystemKind::Qubit && s.dim != 2 {
                return invalid("qubit subsystems have dimension 2");
            }
            total_dim = match total_dim.checked_mul(s.dim) {
                Some(d) => d,
                None => return invalid("total dimension overflows usize"),
            };
        }
        Ok(Self { subsystems, total_dim })
    }

    pub fn single(sub: Subsystem) -> Self {
        Self { total_dim: sub.dim, subsystems: vec![sub] }
    }

    pub fn subsystems(&self) -> &[Subsystem] {
        &self.subsystems
    }

    pub fn len(&self) -> usize {
        self.subsystems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsystems.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn dims(&self) -> Vec<usize> {
        self.subsystems.iter().map(|s| s.dim).collect()
    }

    /// Row-major strides, `stride[k] = Π_{j>k} dim_j`.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.subsystems.len()];
        for k in (0..self.subsystems.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.subsystems[k + 1].dim;
        }
        strides
    }

    pub fn flat_index(&self, multi: &[usize]) -> Result<usize> {
        if multi.len() != self.subsystems.len() {
            return invalid(format!(
                "multi-index has {} entries, basis has {} subsystems",
                multi.len(),
                self.subsystems.len()
            ));
        }
        let mut flat = 0;
        for (&i, s) in multi.iter().zip(&self.subsystems) {
            if i >= s.dim {
                return invalid(format!("index {i} out of range for dimension {}", s.dim));
            }
            flat = flat * s.dim + i;
        }
        Ok(flat)
    }

    pub fn multi_index(&self, flat: usize) -> Result<Vec<usize>> {
        if flat >= self.total_dim {
            return invalid(format!("flat index {flat} out of range {}", self.total_dim));
        }
        let mut multi = vec![0; self.subsystems.len()];
        let mut rest = flat;
        for (k, s) in self.subsystems.iter().enumerate().rev() {
            multi[k] = rest % s.dim;
            rest /= s.dim;
        }
        Ok(multi)
    }

    /// Tensor product of two bases, `self` first.
    pub fn concat(&self, other: &BasisDescriptor) -> Result<BasisDescriptor> {
        let mut subs = self.subsystems.clone();
        subs.extend_from_slice(&other.subsystems);
        BasisDescriptor::new(subs)
    }

    /// Basis restricted to the given (sorted, distinct) subsystem indices.
    pub fn select(&self, keep: &[usize]) -> Result<BasisDescriptor> {
        let keep = normalize_keep(keep, self.len())?;
        BasisDescriptor::new(keep.iter().map(|&k| self.subsystems[k]).collect())
    }
}

/// Validate a subsystem index set: nonempty, in range, no duplicates. Returns
/// it sorted ascending.
pub(crate) fn normalize_keep(keep: &[usize], n: usize) -> Result<Vec<usize>> {
    if keep.is_empty() {
        return invalid("keep set must be nonempty");
    }
    let mut sorted = keep.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return invalid("keep set contains duplicate indices");
    }
    if let Some(&last) = sorted.last() {
        if last >= n {
            return invalid(format!("subsystem index {last} out of range ({n} subsystems)"));
        }
    }
    Ok(sorted)
}
