use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;

use super::basis::{BasisDescriptor, Subsystem, SubsystemKind};
use crate::error::{invalid, Result, SimError};

/// Pure state over a labeled tensor-product basis.
///
/// `truncation_deficit` records the probability weight lost when the state
/// was cut to the finite Fock ladder, measured before renormalization.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    basis: BasisDescriptor,
    amplitudes: DVector<Complex64>,
    truncation_deficit: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Ground,
    Excited,
}

impl StateVector {
    /// Wrap raw amplitudes. No normalization is applied.
    pub fn new(basis: BasisDescriptor, amplitudes: DVector<Complex64>) -> Result<Self> {
        if amplitudes.len() != basis.total_dim() {
            return invalid(format!(
                "{} amplitudes for a basis of dimension {}",
                amplitudes.len(),
                basis.total_dim()
            ));
        }
        Ok(Self { basis, amplitudes, truncation_deficit: 0.0 })
    }

    pub fn with_deficit(mut self, deficit: f64) -> Self {
        self.truncation_deficit = deficit;
        self
    }

    pub fn basis(&self) -> &BasisDescriptor {
        &self.basis
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> DVector<Complex64> {
        self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn truncation_deficit(&self) -> f64 {
        self.truncation_deficit
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(SimError::Degenerate("cannot normalize the zero vector".into()));
        }
        Ok(Self {
            basis: self.basis.clone(),
            amplitudes: self.amplitudes.unscale(n),
            truncation_deficit: self.truncation_deficit,
        })
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.basis != other.basis {
            return Err(SimError::BasisMismatch(format!(
                "{:?} vs {:?}",
                self.basis.dims(),
                other.basis.dims()
            )));
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// Computational basis state, e.g. `basis_state(b, &[1, 0, 3])`.
    pub fn basis_state(basis: BasisDescriptor, multi: &[usize]) -> Result<Self> {
        let idx = basis.flat_index(multi)?;
        let mut amps = DVector::zeros(basis.total_dim());
        amps[idx] = Complex64::new(1.0, 0.0);
        Self::new(basis, amps)
    }

    pub fn fock(n: usize, n_max: usize) -> Result<Self> {
        Self::basis_state(BasisDescriptor::single(Subsystem::mode(n_max)), &[n])
    }

    pub fn qubit(level: Level) -> Self {
        let idx = match level {
            Level::Ground => 0,
            Level::Excited => 1,
        };
        Self::basis_state(BasisDescriptor::single(Subsystem::qubit()), &[idx])
            .expect("qubit basis state is always valid")
    }

    /// `⟨e^{iπ Σ_k n̂_k}⟩` over the listed mode subsystems.
    pub fn parity_expectation(&self, modes: &[usize]) -> Result<f64> {
        for &m in modes {
            match self.basis.subsystems().get(m) {
                Some(s) if s.kind == SubsystemKind::Mode => {}
                _ => return invalid(format!("subsystem {m} is not a bosonic mode")),
            }
        }
        let mut total = 0.0;
        for (i, a) in self.amplitudes.iter().enumerate() {
            let p = a.norm_sqr();
            if p == 0.0 {
                continue;
            }
            let multi = self.basis.multi_index(i)?;
            let quanta: usize = modes.iter().map(|&m| multi[m]).sum();
            total += if quanta.is_multiple_of(2) { p } else { -p };
        }
        Ok(total / self.amplitudes.norm_squared())
    }
}

/// Recommended ladder size for a coherent state: `⌈|α|² + 6|α|⌉`.
pub fn recommended_n_max_coherent(alpha_abs: f64) -> usize {
    (alpha_abs * alpha_abs + 6.0 * alpha_abs).ceil() as usize
}

pub fn default_n_max_coherent(alpha_abs: f64) -> usize {
    recommended_n_max_coherent(alpha_abs).max(16)
}

/// Smallest even ladder whose squeezed-vacuum tail drops below `1e-10`,
/// never smaller than `max(16, ⌈8 sinh² r⌉)`.
pub fn default_n_max_squeezed(r: f64) -> usize {
    use super::photon::{PhotonDistribution, PhotonKind};
    let floor = ((8.0 * r.sinh().powi(2)).ceil() as usize).max(16);
    let mut n = floor + floor % 2;
    while n < 20_000 {
        match PhotonDistribution::new(PhotonKind::SqueezedVacuum, r.abs(), n) {
            Ok(d) if d.tail() < 1e-10 => return n,
            Ok(_) => n += 2,
            Err(_) => return floor,
        }
    }
    n
}

/// Raw truncated coherent amplitudes `e^{-|α|²/2} α^n / √(n!)`.
fn coherent_amplitudes(alpha: Complex64, n_max: usize) -> DVector<Complex64> {
    let mut amps = DVector::zeros(n_max + 1);
    amps[0] = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    for n in 1..=n_max {
        amps[n] = amps[n - 1] * alpha / (n as f64).sqrt();
    }
    amps
}

fn finish_mode(amps: DVector<Complex64>, n_max: usize) -> Result<StateVector> {
    let norm_sq = amps.norm_squared();
    let deficit = (1.0 - norm_sq).max(0.0);
    StateVector::new(BasisDescriptor::single(Subsystem::mode(n_max)), amps)?
        .with_deficit(deficit)
        .normalized()
}

/// Coherent state `|α⟩` truncated at `n_max` and renormalized.
pub fn make_coherent(alpha: Complex64, n_max: usize) -> Result<StateVector> {
    if !alpha.re.is_finite() || !alpha.im.is_finite() {
        return invalid("coherent amplitude must be finite");
    }
    let rec = recommended_n_max_coherent(alpha.norm());
    if n_max < rec {
        log::warn!("n_max = {n_max} below the recommended {rec} for |α| = {:.3}", alpha.norm());
    }
    finish_mode(coherent_amplitudes(alpha, n_max), n_max)
}

/// Squeezed vacuum `S(r e^{iφ})|0⟩ = (cosh r)^{-1/2} Σ_m (−e^{iφ} tanh r)^m √((2m)!) / (2^m m!) |2m⟩`.
pub fn make_squeezed_vacuum(r: f64, phi: f64, n_max: usize) -> Result<StateVector> {
    if !(r >= 0.0) || !r.is_finite() || !phi.is_finite() {
        return invalid(format!("squeeze modulus must be finite and ≥ 0, got {r}"));
    }
    let ratio = -Complex64::from_polar(r.tanh(), phi);
    let mut amps = DVector::zeros(n_max + 1);
    amps[0] = Complex64::new(1.0 / r.cosh().sqrt(), 0.0);
    let mut n = 0;
    while n + 2 <= n_max {
        let scale = ((n + 1) as f64 / (n + 2) as f64).sqrt();
        amps[n + 2] = amps[n] * ratio * scale;
        n += 2;
    }
    finish_mode(amps, n_max)
}

/// Unnormalized `|α⟩ ± |−α⟩` on the truncated ladder.
pub fn cat_superposition(alpha: Complex64, parity: Parity, n_max: usize) -> DVector<Complex64> {
    let plus = coherent_amplitudes(alpha, n_max);
    let minus = coherent_amplitudes(-alpha, n_max);
    match parity {
        Parity::Even => plus + minus,
        Parity::Odd => plus - minus,
    }
}

/// `N_±² = ‖ |α⟩ ± |−α⟩ ‖²` evaluated on the truncated ladder.
pub fn cat_norm_sq(alpha: Complex64, parity: Parity, n_max: usize) -> f64 {
    cat_superposition(alpha, parity, n_max).norm_squared()
}

/// Normalized cat state `(|α⟩ ± |−α⟩)/N_±`.
pub fn make_cat(alpha: Complex64, parity: Parity, n_max: usize) -> Result<StateVector> {
    let amps = cat_superposition(alpha, parity, n_max);
    let norm_sq = amps.norm_squared();
    if norm_sq < 1e-300 {
        return Err(SimError::Degenerate(format!(
            "{parity:?} cat with α = {alpha} is the zero vector"
        )));
    }
    let a2 = alpha.norm_sqr();
    let exact = match parity {
        Parity::Even => 2.0 * (1.0 + (-2.0 * a2).exp()),
        Parity::Odd => 2.0 * (1.0 - (-2.0 * a2).exp()),
    };
    let deficit = ((exact - norm_sq) / exact).max(0.0);
    StateVector::new(BasisDescriptor::single(Subsystem::mode(n_max)), amps)?
        .with_deficit(deficit)
        .normalized()
}

/// Kronecker product in the order given.
pub fn tensor(factors: &[&StateVector]) -> Result<StateVector> {
    let (first, rest) = match factors.split_first() {
        Some(split) => split,
        None => return invalid("tensor product needs at least one factor"),
    };
    let mut basis = first.basis.clone();
    let mut amps = first.amplitudes.clone();
    let mut kept = 1.0 - first.truncation_deficit;
    for f in rest {
        basis = basis.concat(&f.basis)?;
        amps = amps.kronecker(&f.amplitudes);
        kept *= 1.0 - f.truncation_deficit;
    }
    Ok(StateVector::new(basis, amps)?.with_deficit((1.0 - kept).max(0.0)))
}

/// `|⟨ψ|φ⟩|²` for normalized inputs.
pub fn fidelity(psi: &StateVector, phi: &StateVector) -> Result<f64> {
    Ok(psi.inner(phi)?.norm_sqr())
}

/// Parity operator eigenvalue check helper: applies `e^{iπ n̂}` to a single mode state.
pub fn apply_parity(state: &StateVector) -> Result<StateVector> {
    if state.basis.len() != 1 || state.basis.subsystems()[0].kind != SubsystemKind::Mode {
        return invalid("parity operator acts on a single bosonic mode");
    }
    let amps = DVector::from_iterator(
        state.dim(),
        state
            .amplitudes
            .iter()
            .enumerate()
            .map(|(n, a)| a * Complex64::from_polar(1.0, PI * n as f64)),
    );
    Ok(StateVector::new(state.basis.clone(), amps)?.with_deficit(state.truncation_deficit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;
    use num_traits::{One, ToPrimitive};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn factorial(n: usize) -> BigUint {
        (1..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
    }

    #[test]
    fn coherent_zero_is_vacuum() {
        let s = make_coherent(c(0.0), 10).unwrap();
        assert_eq!(s.amplitudes()[0], c(1.0));
        assert!(s.amplitudes().iter().skip(1).all(|a| *a == c(0.0)));
    }

    #[test]
    fn coherent_vacuum_probability() {
        let s = make_coherent(c(1.0), 30).unwrap();
        assert!((s.amplitudes()[0].norm_sqr() - (-1.0f64).exp()).abs() < 1e-15);
        assert!((s.amplitudes()[0].norm_sqr() - 0.367879).abs() < 1e-6);
    }

    #[test]
    fn coherent_matches_exact_factorial_oracle() {
        let alpha = 2.0f64;
        let s = make_coherent(c(alpha), 40).unwrap();
        // deficit at n_max = 40 is far below 1e-12, renormalization is invisible here
        assert!(s.truncation_deficit() < 1e-15);
        for n in 0..=40 {
            let fact = factorial(n).to_f64().unwrap();
            let expect = (-alpha * alpha / 2.0).exp() * alpha.powi(n as i32) / fact.sqrt();
            assert!((s.amplitudes()[n].re - expect).abs() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn coherent_reports_deficit_when_truncated_hard() {
        let s = make_coherent(c(3.0), 5).unwrap();
        assert!(s.truncation_deficit() > 0.1);
        assert!((s.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn squeezed_vacuum_distribution() {
        let s0 = make_squeezed_vacuum(0.0, 0.0, 10).unwrap();
        assert_eq!(s0.amplitudes()[0], c(1.0));

        let s = make_squeezed_vacuum(1.0, 0.0, 40).unwrap();
        let p0_raw = 1.0 / 1f64.cosh();
        let kept = 1.0 - s.truncation_deficit();
        assert!((s.amplitudes()[0].norm_sqr() * kept - p0_raw).abs() < 1e-14);
        let ratio = s.amplitudes()[2].norm_sqr() / s.amplitudes()[0].norm_sqr();
        assert!((ratio - 1f64.tanh().powi(2) / 2.0).abs() < 1e-14);
        for n in (1..=40).step_by(2) {
            assert_eq!(s.amplitudes()[n], c(0.0));
        }
        assert!(make_squeezed_vacuum(-0.5, 0.0, 10).is_err());
    }

    #[test]
    fn cats_orthogonal_and_normalized() {
        let even = make_cat(c(1.0), Parity::Even, 30).unwrap();
        let odd = make_cat(c(1.0), Parity::Odd, 30).unwrap();
        assert!(fidelity(&even, &odd).unwrap() < 1e-30);
        assert!((even.norm() - 1.0).abs() < 1e-12);
        for (n, a) in even.amplitudes().iter().enumerate() {
            if n % 2 == 1 {
                assert_eq!(*a, c(0.0));
            }
        }
        for (n, a) in odd.amplitudes().iter().enumerate() {
            if n % 2 == 0 {
                assert_eq!(*a, c(0.0));
            }
        }
    }

    #[test]
    fn even_cat_norm_matches_gaussian_overlap() {
        // ⟨α|−α⟩ computed as an inner product of independently built coherent states
        let plus = make_coherent(c(1.0), 40).unwrap();
        let minus = make_coherent(c(-1.0), 40).unwrap();
        let overlap = plus.inner(&minus).unwrap();
        assert!((overlap.re - (-2.0f64).exp()).abs() < 1e-14);
        let expect = 2.0 * (1.0 + overlap.re);
        assert!((cat_norm_sq(c(1.0), Parity::Even, 40) - expect).abs() < 1e-13);
    }

    #[test]
    fn degenerate_and_trivial_cats() {
        assert!(matches!(make_cat(c(0.0), Parity::Odd, 10), Err(SimError::Degenerate(_))));
        let even = make_cat(c(0.0), Parity::Even, 10).unwrap();
        assert!((even.amplitudes()[0] - c(1.0)).norm() < 1e-15);
    }

    #[test]
    fn cats_are_parity_eigenstates() {
        for &alpha in &[0.5, 1.0, 2.0] {
            let even = make_cat(c(alpha), Parity::Even, 40).unwrap();
            let odd = make_cat(c(alpha), Parity::Odd, 40).unwrap();
            assert!((fidelity(&even, &apply_parity(&even).unwrap()).unwrap() - 1.0).abs() < 1e-12);
            assert!((even.inner(&apply_parity(&even).unwrap()).unwrap().re - 1.0).abs() < 1e-12);
            assert!((odd.inner(&apply_parity(&odd).unwrap()).unwrap().re + 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn coherent_overlap_fidelity() {
        let plus = make_coherent(c(1.0), 40).unwrap();
        let minus = make_coherent(c(-1.0), 40).unwrap();
        let f = fidelity(&plus, &minus).unwrap();
        assert!((f - (-4.0f64).exp()).abs() < 1e-14);
        assert!((f - 0.018316).abs() < 1e-6);
        assert!((fidelity(&plus, &plus).unwrap() - 1.0).abs() < 1e-14);
        let other = make_coherent(c(1.0), 20).unwrap();
        assert!(matches!(fidelity(&plus, &other), Err(SimError::BasisMismatch(_))));
    }

    #[test]
    fn tensor_products() {
        let v = StateVector::fock(0, 3).unwrap();
        let joint = tensor(&[&v, &v]).unwrap();
        assert_eq!(joint.amplitudes()[0], c(1.0));
        assert_eq!(joint.basis().dims(), vec![4, 4]);

        let e = StateVector::qubit(Level::Excited);
        let g = StateVector::qubit(Level::Ground);
        let a = make_coherent(c(1.0), 12).unwrap();
        let init = tensor(&[&e, &g, &a, &a]).unwrap();
        assert!((init.norm() - 1.0).abs() < 1e-12);
        let idx = init.basis().flat_index(&[1, 0, 0, 0]).unwrap();
        assert!((init.amplitudes()[idx].re - a.amplitudes()[0].re.powi(2)).abs() < 1e-15);

        let scaled = StateVector::new(v.basis().clone(), v.amplitudes() * c(2.0)).unwrap();
        let prod = tensor(&[&scaled, &a]).unwrap();
        assert!((prod.norm() - scaled.norm() * a.norm()).abs() < 1e-14);
        assert!(tensor(&[]).is_err());
    }

    #[test]
    fn renormalized_constructors_have_unit_norm() {
        for s in [
            make_coherent(Complex64::new(0.3, -1.2), 8).unwrap(),
            make_squeezed_vacuum(0.8, 0.4, 12).unwrap(),
            make_cat(c(2.5), Parity::Odd, 9).unwrap(),
        ] {
            assert!((s.norm() - 1.0).abs() < 1e-12);
        }
    }
}
