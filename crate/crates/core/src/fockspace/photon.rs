use num_complex::Complex64;

use crate::error::{invalid, Result};

/// Probability mass below which the series for an infinite Fock ladder is cut.
pub const SERIES_CUTOFF: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhotonKind {
    Coherent,
    SqueezedVacuum,
}

/// Occupation probabilities `P_0..=P_{n_max}` of a coherent state (parameter
/// `|α|`) or a squeezed vacuum (parameter `r`, phase irrelevant).
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonDistribution {
    pub kind: PhotonKind,
    pub parameter: f64,
    probabilities: Vec<f64>,
}

impl PhotonDistribution {
    /// `P_n` for `n ≤ n_max`, built from the term-ratio recurrences
    /// `P_{n+1}/P_n = |α|²/(n+1)` and `P_{n+2}/P_n = tanh²r (n+1)/(n+2)`
    /// accumulated in log space.
    pub fn new(kind: PhotonKind, parameter: f64, n_max: usize) -> Result<Self> {
        if !(parameter >= 0.0) || !parameter.is_finite() {
            return invalid(format!("distribution parameter must be finite and ≥ 0, got {parameter}"));
        }
        let mut p = vec![0.0; n_max + 1];
        match kind {
            PhotonKind::Coherent => {
                if parameter == 0.0 {
                    p[0] = 1.0;
                } else {
                    let ln_a2 = 2.0 * parameter.ln();
                    let mut ln_p = -parameter * parameter;
                    p[0] = ln_p.exp();
                    for (n, pn) in p.iter_mut().enumerate().skip(1) {
                        ln_p += ln_a2 - (n as f64).ln();
                        *pn = ln_p.exp();
                    }
                }
            }
            PhotonKind::SqueezedVacuum => {
                let t = parameter.tanh();
                if t == 0.0 {
                    p[0] = 1.0;
                } else {
                    let ln_t2 = 2.0 * t.ln();
                    let mut ln_p = -parameter.cosh().ln();
                    p[0] = ln_p.exp();
                    let mut n = 0;
                    while n + 2 <= n_max {
                        ln_p += ln_t2 + ((n + 1) as f64).ln() - ((n + 2) as f64).ln();
                        n += 2;
                        p[n] = ln_p.exp();
                    }
                }
            }
        }
        Ok(Self { kind, parameter, probabilities: p })
    }

    /// Distribution truncated where the dropped mass falls below [`SERIES_CUTOFF`].
    pub fn converged(kind: PhotonKind, parameter: f64) -> Result<Self> {
        let n_max = converged_n_max(kind, parameter, SERIES_CUTOFF)?;
        Self::new(kind, parameter, n_max)
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn n_max(&self) -> usize {
        self.probabilities.len() - 1
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    /// Probability weight beyond `n_max`.
    pub fn tail(&self) -> f64 {
        (1.0 - self.total()).max(0.0)
    }

    pub fn renormalized(&self) -> Self {
        let s = self.total();
        Self {
            kind: self.kind,
            parameter: self.parameter,
            probabilities: self.probabilities.iter().map(|p| p / s).collect(),
        }
    }

    /// `Σ_n P_n e^{inθ}`.
    pub fn characteristic(&self, theta: f64) -> Complex64 {
        self.probabilities
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != 0.0)
            .map(|(n, &p)| p * Complex64::from_polar(1.0, n as f64 * theta))
            .sum()
    }

    /// `C(d) = Σ_n P_n P_{n+d}` for `d = 0..=n_max`. A double sum
    /// `Σ_{n,m} P_n P_m g(m−n)` with even `g` equals `C(0) g(0) + 2 Σ_{d≥1} C(d) g(d)`.
    pub fn autocorrelation(&self) -> Vec<f64> {
        let p = &self.probabilities;
        (0..p.len())
            .map(|d| p.iter().zip(&p[d..]).map(|(a, b)| a * b).sum())
            .collect()
    }
}

pub fn photon_distribution(kind: PhotonKind, parameter: f64, n_max: usize) -> Result<PhotonDistribution> {
    PhotonDistribution::new(kind, parameter, n_max)
}

/// Smallest cutoff whose dropped probability mass `Σ_{n>n_max} P_n` is below
/// `cutoff`, evaluated as an explicit suffix sum rather than `1 − Σ`.
pub fn converged_n_max(kind: PhotonKind, parameter: f64, cutoff: f64) -> Result<usize> {
    if !(parameter >= 0.0) || !parameter.is_finite() {
        return invalid(format!("distribution parameter must be finite and ≥ 0, got {parameter}"));
    }
    let mean = match kind {
        PhotonKind::Coherent => parameter * parameter,
        PhotonKind::SqueezedVacuum => parameter.sinh().powi(2),
    };
    let mut big = (4.0 * mean) as usize + 64;
    let d = loop {
        let d = PhotonDistribution::new(kind, parameter, big)?;
        let last = d.probabilities()[big].max(d.probabilities()[big - 1]);
        if last < cutoff * 1e-6 {
            break d;
        }
        if big > 1_000_000 {
            return invalid("distribution does not converge within 10^6 quanta");
        }
        big *= 2;
    };
    let p = d.probabilities();
    let mut suffix = 0.0;
    let mut n_max = big;
    for n in (1..=big).rev() {
        suffix += p[n];
        if suffix >= cutoff {
            break;
        }
        n_max = n - 1;
    }
    Ok(n_max.max(1))
}
