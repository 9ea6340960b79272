use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::bessel::{cos_position_matrix, f_table, COS_PADDING};
use super::config::{check_cap, SystemConfig};
use super::operator::LabeledOperator;
use super::regime::{validate_regime, Flag};
use crate::error::{invalid, Result, SimError};
use crate::fockspace::{BasisDescriptor, Subsystem};

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Index layout of the full basis: qubits `0..N`, modes `N..2N`, field `2N`.
struct Layout {
    n: usize,
    basis: BasisDescriptor,
}

impl Layout {
    fn new(config: &SystemConfig) -> Result<Self> {
        config.validate()?;
        let basis = config.full_basis()?;
        config.check_cap(basis.total_dim())?;
        Ok(Self { n: config.n_ions(), basis })
    }

    fn qubit(&self, multi: &[usize], i: usize) -> usize {
        multi[i]
    }

    fn motion(&self, multi: &[usize], i: usize) -> usize {
        multi[self.n + i]
    }

    fn field(&self, multi: &[usize]) -> usize {
        multi[2 * self.n]
    }

    fn for_each<F: FnMut(usize, &[usize]) -> Result<()>>(&self, mut f: F) -> Result<()> {
        for idx in 0..self.basis.total_dim() {
            let multi = self.basis.multi_index(idx)?;
            f(idx, &multi)?;
        }
        Ok(())
    }
}

/// `H_0 = Σ ν_i a_i†a_i + ω_c b†b + Σ ω_i σ_i^z / 2`, diagonal.
pub fn free_hamiltonian(config: &SystemConfig) -> Result<LabeledOperator> {
    let lay = Layout::new(config)?;
    let mut d = DVector::zeros(lay.basis.total_dim());
    lay.for_each(|idx, multi| {
        let mut e = config.omega_c * lay.field(multi) as f64;
        for i in 0..lay.n {
            e += config.nu[i] * lay.motion(multi, i) as f64;
            let sz = if lay.qubit(multi, i) == 1 { 0.5 } else { -0.5 };
            e += config.omega[i] * sz;
        }
        d[idx] = c(e);
        Ok(())
    })?;
    LabeledOperator::diagonal(lay.basis, d)
}

/// `H_0 + Σ g_i M_i (σ_i⁺ b + σ_i⁻ b†)` for per-ion motional matrices `M_i`.
fn with_coupling(config: &SystemConfig, motional: &[DMatrix<f64>]) -> Result<LabeledOperator> {
    let lay = Layout::new(config)?;
    let dim = lay.basis.total_dim();
    let h0 = free_hamiltonian(config)?;
    let mut h = h0.to_dense();
    let strides = lay.basis.strides();
    lay.for_each(|src, multi| {
        let m = lay.field(multi);
        if m == 0 {
            return Ok(());
        }
        let sqrt_m = (m as f64).sqrt();
        for i in 0..lay.n {
            if lay.qubit(multi, i) != 0 || config.g[i] == 0.0 {
                continue;
            }
            let n_i = lay.motion(multi, i);
            // |g_i, n_i, m⟩ → |e_i, n', m − 1⟩
            let base = src + strides[i] - strides[2 * lay.n] - n_i * strides[lay.n + i];
            for (n_new, &amp) in motional[i].column(n_i).iter().enumerate() {
                if amp == 0.0 {
                    continue;
                }
                let dst = base + n_new * strides[lay.n + i];
                debug_assert!(dst < dim);
                let v = c(config.g[i] * sqrt_m * amp);
                h[(dst, src)] += v;
                h[(src, dst)] += v.conj();
            }
        }
        Ok(())
    })?;
    LabeledOperator::dense(lay.basis, h)
}

/// Full Hamiltonian with the `cos[η_i(a_i† + a_i)]` motional factor, built by
/// matrix cosine on a padded ladder.
pub fn build_full(config: &SystemConfig) -> Result<LabeledOperator> {
    config.validate()?;
    let motional = (0..config.n_ions())
        .map(|i| cos_position_matrix(config.eta[i], config.n_max_motion[i], COS_PADDING))
        .collect::<Result<Vec<_>>>()?;
    with_coupling(config, &motional)
}

/// Number-operator approximation: the motional factor becomes diagonal `f(n̂_i)`.
pub fn build_bessel_approx(config: &SystemConfig) -> Result<LabeledOperator> {
    config.validate()?;
    if validate_regime(config).trap_worst() != Flag::Pass {
        log::warn!("Bessel approximation assumes Δ_i ≪ ν_i; trap ratios are below {}", super::regime::SOFT_RATIO);
    }
    let motional = (0..config.n_ions())
        .map(|i| Ok(DMatrix::from_diagonal(&DVector::from_vec(f_table(config.n_max_motion[i], config.eta[i])?))))
        .collect::<Result<Vec<_>>>()?;
    with_coupling(config, &motional)
}

/// Free, Stark and dipole-dipole parts of the dispersive effective Hamiltonian.
#[derive(Debug, Clone)]
pub struct EffectiveHamiltonian {
    pub h0: LabeledOperator,
    pub stark: LabeledOperator,
    pub dipole: LabeledOperator,
}

impl EffectiveHamiltonian {
    pub fn total(&self) -> Result<LabeledOperator> {
        self.h0.add(&self.stark)?.add(&self.dipole)
    }
}

/// Pair coupling `(g_i g_j / 2)(1/Δ_i + 1/Δ_j)`.
pub fn dipole_coupling(config: &SystemConfig, i: usize, j: usize) -> f64 {
    0.5 * config.g[i] * config.g[j] * (1.0 / config.delta(i) + 1.0 / config.delta(j))
}

/// Adiabatically eliminated Hamiltonian `H_0 + H_Stark + H_dip`:
///
/// - `H_Stark = Σ_i (g_i²/Δ_i) f²(n̂_i) [(1 + b b†) σ_i⁺σ_i⁻ − b†b σ_i⁻σ_i⁺]`
/// - `H_dip = Σ_{i<j} (g_i g_j/2)(1/Δ_i + 1/Δ_j) f(n̂_i) f(n̂_j) (σ_i⁺σ_j⁻ + h.c.)`
///
/// Refuses configurations with a hard violation of `ν ≫ Δ ≫ g`.
pub fn build_effective(config: &SystemConfig) -> Result<EffectiveHamiltonian> {
    let report = validate_regime(config);
    if report.has_hard_violation() {
        return Err(SimError::Regime(report.summary()));
    }
    let lay = Layout::new(config)?;
    let dim = lay.basis.total_dim();
    let f: Vec<Vec<f64>> = (0..lay.n)
        .map(|i| f_table(config.n_max_motion[i], config.eta[i]))
        .collect::<Result<_>>()?;
    let strides = lay.basis.strides();

    let mut stark = DVector::zeros(dim);
    let mut dip = DMatrix::zeros(dim, dim);
    lay.for_each(|idx, multi| {
        let m = lay.field(multi) as f64;
        let mut s = 0.0;
        for i in 0..lay.n {
            let fi = f[i][lay.motion(multi, i)];
            let shift = config.g[i].powi(2) / config.delta(i) * fi * fi;
            s += if lay.qubit(multi, i) == 1 { shift * (m + 1.0) } else { -shift * m };
        }
        stark[idx] = c(s);
        for i in 0..lay.n {
            for j in (i + 1)..lay.n {
                let (qi, qj) = (lay.qubit(multi, i), lay.qubit(multi, j));
                if qi == qj {
                    continue;
                }
                // swap the excitation between ions i and j
                let partner = if qi == 1 {
                    idx - strides[i] + strides[j]
                } else {
                    idx + strides[i] - strides[j]
                };
                let amp = dipole_coupling(config, i, j) * f[i][lay.motion(multi, i)] * f[j][lay.motion(multi, j)];
                dip[(partner, idx)] += c(amp);
            }
        }
        Ok(())
    })?;

    Ok(EffectiveHamiltonian {
        h0: free_hamiltonian(config)?,
        stark: LabeledOperator::diagonal(lay.basis.clone(), stark)?,
        dipole: LabeledOperator::dense(lay.basis, dip)?,
    })
}

/// Ground-state cross-Kerr Hamiltonian on (motional modes) ⊗ (field).
///
/// `lamb_dicke = false`: `−Σ_i (g_i²/Δ_i) f²(n̂_i) b†b`.
/// `lamb_dicke = true`: `−Σ_i λ_i n̂_i b†b` with `λ_i = 2η_i²g_i²/Δ_i`.
pub fn build_cross_kerr(config: &SystemConfig, lamb_dicke: bool) -> Result<LabeledOperator> {
    config.validate()?;
    if lamb_dicke {
        return cross_kerr_from_lambdas(&config.lambdas(), &config.n_max_motion, config.n_max_field, config.dim_cap);
    }
    let basis = config.motion_field_basis()?;
    config.check_cap(basis.total_dim())?;
    let n = config.n_ions();
    let f: Vec<Vec<f64>> = (0..n)
        .map(|i| f_table(config.n_max_motion[i], config.eta[i]))
        .collect::<Result<_>>()?;
    let mut d = DVector::zeros(basis.total_dim());
    for (idx, slot) in d.iter_mut().enumerate() {
        let multi = basis.multi_index(idx)?;
        let m = multi[n] as f64;
        let e: f64 = (0..n)
            .map(|i| -config.g[i].powi(2) / config.delta(i) * f[i][multi[i]].powi(2) * m)
            .sum();
        *slot = c(e);
    }
    LabeledOperator::diagonal(basis, d)
}

/// `−Σ_i λ_i n̂_i b†b` for explicit rates.
pub fn cross_kerr_from_lambdas(
    lambdas: &[f64],
    n_max_motion: &[usize],
    n_max_field: usize,
    dim_cap: usize,
) -> Result<LabeledOperator> {
    if lambdas.len() != n_max_motion.len() || lambdas.is_empty() {
        return invalid("one rate and one ladder size per ion required");
    }
    let mut subs: Vec<Subsystem> = n_max_motion.iter().map(|&m| Subsystem::mode(m)).collect();
    subs.push(Subsystem::mode(n_max_field));
    let basis = BasisDescriptor::new(subs)?;
    check_cap(basis.total_dim(), dim_cap)?;
    let n = lambdas.len();
    let mut d = DVector::zeros(basis.total_dim());
    for (idx, slot) in d.iter_mut().enumerate() {
        let multi = basis.multi_index(idx)?;
        let m = multi[n] as f64;
        let e: f64 = lambdas.iter().zip(&multi).map(|(l, &k)| -l * k as f64 * m).sum();
        *slot = c(e);
    }
    LabeledOperator::diagonal(basis, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::bessel::f_of_n;
    use crate::hamiltonian::operator::HERMITIAN_TOL;

    fn single(eta: f64, g: f64, delta: f64) -> SystemConfig {
        SystemConfig::uniform(1, 400.0, 100.0, delta, g, eta, 6, 5)
    }

    fn number_op(config: &SystemConfig, sub: usize) -> LabeledOperator {
        let basis = config.full_basis().unwrap();
        let d = DVector::from_fn(basis.total_dim(), |i, _| c(basis.multi_index(i).unwrap()[sub] as f64));
        LabeledOperator::diagonal(basis, d).unwrap()
    }

    #[test]
    fn uncoupled_is_free_and_diagonal() {
        let cfg = SystemConfig::uniform(2, 50.0, 10.0, 3.0, 0.0, 0.2, 2, 3);
        let h = build_full(&cfg).unwrap();
        assert_eq!(h.max_off_diagonal(), 0.0);
        for sub in 0..5 {
            assert!(h.commutator_norm(&number_op(&cfg, sub)).unwrap() < 1e-14);
        }
    }

    #[test]
    fn jaynes_cummings_limit_conserves_excitations() {
        let cfg = single(0.0, 1.0, 0.7);
        let h = build_full(&cfg).unwrap();
        let basis = cfg.full_basis().unwrap();
        let exc = DVector::from_fn(basis.total_dim(), |i, _| {
            let m = basis.multi_index(i).unwrap();
            c((m[0] + m[2]) as f64)
        });
        let n_exc = LabeledOperator::diagonal(basis, exc).unwrap();
        assert!(h.commutator_norm(&n_exc).unwrap() < 1e-10);
    }

    #[test]
    fn full_coupling_diagonal_is_f() {
        let cfg = single(0.1, 1.0, 20.0);
        let h = build_full(&cfg).unwrap();
        let b = h.basis().clone();
        for n in 0..=6 {
            // ⟨e, n, 0| H |g, n, 1⟩ = g ⟨n|cos|n⟩ √1
            let row = b.flat_index(&[1, n, 0]).unwrap();
            let col = b.flat_index(&[0, n, 1]).unwrap();
            assert!((h.element(row, col).re - f_of_n(n, 0.1).unwrap()).abs() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn bessel_equals_full_at_zero_eta() {
        let cfg = SystemConfig::uniform(2, 30.0, 5.0, 2.0, 0.8, 0.0, 2, 2);
        let a = build_full(&cfg).unwrap().to_dense();
        let b = build_bessel_approx(&cfg).unwrap().to_dense();
        assert!((a - b).norm() < 1e-13);
    }

    #[test]
    fn bessel_coupling_block() {
        let cfg = SystemConfig::uniform(1, 400.0, 100.0, 20.0, 1.0, 0.1, 10, 2);
        let h = build_bessel_approx(&cfg).unwrap();
        let b = h.basis().clone();
        for n in 0..=10 {
            for k in 0..=10 {
                let row = b.flat_index(&[1, k, 0]).unwrap();
                let col = b.flat_index(&[0, n, 1]).unwrap();
                let v = h.element(row, col).re;
                if n == k {
                    assert!((v - f_of_n(n, 0.1).unwrap()).abs() < 1e-12);
                } else {
                    assert_eq!(v, 0.0);
                }
            }
        }
    }

    #[test]
    fn builders_are_hermitian() {
        let cfg = SystemConfig::uniform(2, 400.0, 100.0, 20.0, 1.0, 0.3, 2, 2);
        for h in [build_full(&cfg).unwrap(), build_bessel_approx(&cfg).unwrap(), free_hamiltonian(&cfg).unwrap()] {
            assert!(h.is_hermitian());
            assert!(h.hermiticity_error() < HERMITIAN_TOL);
        }
        let eff = build_effective(&cfg).unwrap();
        assert!(eff.stark.hermiticity_error() < HERMITIAN_TOL);
        assert!(eff.dipole.hermiticity_error() < HERMITIAN_TOL);
    }

    #[test]
    fn dimension_cap_enforced() {
        let cfg = SystemConfig::uniform(3, 400.0, 100.0, 20.0, 1.0, 0.1, 9, 9).with_dim_cap(1000);
        assert!(matches!(build_full(&cfg), Err(SimError::ResourceCap { .. })));
    }

    #[test]
    fn effective_refuses_hard_regime() {
        let cfg = SystemConfig::uniform(2, 400.0, 100.0, 2.0, 1.0, 0.1, 2, 2);
        assert!(matches!(build_effective(&cfg), Err(SimError::Regime(_))));
    }

    #[test]
    fn equal_detuning_dipole_prefactor() {
        let cfg = SystemConfig::uniform(2, 400.0, 100.0, 20.0, 1.0, 0.0, 1, 1);
        assert!((dipole_coupling(&cfg, 0, 1) - 1.0 / 20.0).abs() < 1e-16);
        let eff = build_effective(&cfg).unwrap();
        let b = eff.dipole.basis().clone();
        let eg = b.flat_index(&[1, 0, 0, 0, 0]).unwrap();
        let ge = b.flat_index(&[0, 1, 0, 0, 0]).unwrap();
        assert!((eff.dipole.element(ge, eg).re - 1.0 / 20.0).abs() < 1e-16);
    }

    #[test]
    fn unequal_detunings_symmetrized() {
        let mut cfg = SystemConfig::uniform(2, 400.0, 100.0, 20.0, 1.0, 0.1, 2, 1);
        cfg.omega[1] = 130.0;
        cfg.g[1] = 0.7;
        let expect = 0.7 / 2.0 * (20.0 + 30.0) / (20.0 * 30.0);
        assert!((dipole_coupling(&cfg, 0, 1) - expect).abs() < 1e-16);
        assert!((dipole_coupling(&cfg, 1, 0) - expect).abs() < 1e-16);
        let eff = build_effective(&cfg).unwrap();
        assert!(eff.dipole.hermiticity_error() < HERMITIAN_TOL);
    }

    #[test]
    fn stark_ground_projection_is_cross_kerr() {
        let mut cfg = SystemConfig::uniform(2, 400.0, 100.0, 20.0, 1.0, 0.15, 3, 3);
        cfg.omega[1] = 125.0;
        cfg.g[1] = 1.3;
        let eff = build_effective(&cfg).unwrap();
        let ck = build_cross_kerr(&cfg, false).unwrap();
        let full = eff.stark.basis().clone();
        let mf = ck.basis().clone();
        for idx in 0..mf.total_dim() {
            let m = mf.multi_index(idx).unwrap();
            let row = full.flat_index(&[0, 0, m[0], m[1], m[2]]).unwrap();
            assert!((eff.stark.element(row, row) - ck.element(idx, idx)).norm() < 1e-14);
        }
    }

    #[test]
    fn dipole_commutes_with_free_part_for_equal_frequencies() {
        let mut cfg = SystemConfig::uniform(2, 400.0, 100.0, 20.0, 1.0, 0.2, 2, 2);
        cfg.nu[1] = 380.0;
        let eff = build_effective(&cfg).unwrap();
        assert!(eff.h0.commutator_norm(&eff.dipole).unwrap() < 1e-10);
    }

    #[test]
    fn cross_kerr_lamb_dicke_elements() {
        let cfg = SystemConfig::uniform(1, 400.0, 100.0, 20.0, 1.0, 0.0, 3, 3);
        let h = build_cross_kerr(&cfg, true).unwrap();
        assert!(h.diagonal_entries().iter().all(|z| z.norm() == 0.0));

        let cfg = SystemConfig::uniform(1, 400.0, 100.0, 20.0, 1.5, 0.1, 3, 3);
        let h = build_cross_kerr(&cfg, true).unwrap();
        let idx = h.basis().flat_index(&[1, 1]).unwrap();
        let lambda = 2.0 * 0.01 * 1.5 * 1.5 / 20.0;
        assert!((h.element(idx, idx).re + lambda).abs() < 1e-16);
        assert_eq!(h.max_off_diagonal(), 0.0);
    }

    /// The exact-f operator expands as `−(g²/Δ)(1 − η²) m + λ n m + O(η⁴)`:
    /// the η² part is the Lamb-Dicke operator with the opposite sign, plus a
    /// rescaling of the field frequency.
    #[test]
    fn cross_kerr_forms_agree_to_fourth_order() {
        let residual = |eta: f64| {
            let cfg = SystemConfig::uniform(1, 400.0, 100.0, 20.0, 1.0, eta, 5, 5);
            let exact = build_cross_kerr(&cfg, false).unwrap();
            let ld = build_cross_kerr(&cfg, true).unwrap();
            let b = exact.basis().clone();
            let mut worst: f64 = 0.0;
            for idx in 0..b.total_dim() {
                let m = b.multi_index(idx).unwrap()[1] as f64;
                let shift = -(1.0 / 20.0) * (1.0 - eta * eta) * m;
                let r = exact.element(idx, idx).re - shift + ld.element(idx, idx).re;
                worst = worst.max(r.abs());
            }
            worst
        };
        let (a, b) = (residual(0.2), residual(0.1));
        let ratio = a / b;
        assert!(ratio > 12.0 && ratio < 20.0, "ratio {ratio}");
    }
}
