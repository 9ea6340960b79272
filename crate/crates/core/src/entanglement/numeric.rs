use num_complex::Complex64;

use super::closed_form::CaseSpec;
use super::series::{check_monotone, EntropySeries};
use crate::dynamics::evolve_diagonal;
use crate::error::Result;
use crate::fockspace::{
    default_n_max_coherent, default_n_max_squeezed, linear_entropy, make_coherent, make_squeezed_vacuum,
    partial_trace, tensor, PhotonKind, StateVector,
};
use crate::hamiltonian::cross_kerr_from_lambdas;

fn mode_state(kind: PhotonKind, parameter: f64, n_max: usize) -> Result<StateVector> {
    match kind {
        PhotonKind::Coherent => make_coherent(Complex64::new(parameter, 0.0), n_max),
        PhotonKind::SqueezedVacuum => make_squeezed_vacuum(parameter, 0.0, n_max),
    }
}

/// Common ladder size: `n_max_sum` when given, otherwise the largest default
/// over all subsystems.
pub fn bridge_n_max(spec: &CaseSpec) -> usize {
    if let Some(n) = spec.n_max_sum {
        return n;
    }
    let pick = |kind: PhotonKind, p: f64| match kind {
        PhotonKind::Coherent => default_n_max_coherent(p),
        PhotonKind::SqueezedVacuum => default_n_max_squeezed(p),
    };
    spec.ions
        .iter()
        .map(|&p| pick(spec.case.ion_kind(), p))
        .fold(pick(spec.case.field_kind(), spec.field), usize::max)
}

/// Brute-force counterpart of the closed forms: build the truncated product
/// state (ions first, field last), evolve it under `−Σ λ_j n̂_j b†b`, and take
/// linear entropies of the reduced states.
pub fn numeric_entropies(spec: &CaseSpec, times: &[f64], dim_cap: usize) -> Result<EntropySeries> {
    spec.validate()?;
    check_monotone(times)?;
    let n_max = bridge_n_max(spec);
    let n = spec.n_ions();
    let h = cross_kerr_from_lambdas(&spec.lambdas, &vec![n_max; n], n_max, dim_cap)?;

    let mut factors = spec
        .ions
        .iter()
        .map(|&p| mode_state(spec.case.ion_kind(), p, n_max))
        .collect::<Result<Vec<_>>>()?;
    factors.push(mode_state(spec.case.field_kind(), spec.field, n_max)?);
    let psi0 = tensor(&factors.iter().collect::<Vec<_>>())?;

    let evolved = evolve_diagonal(&h, &psi0, times)?;
    let rows = evolved
        .states
        .iter()
        .map(|s| {
            let field = linear_entropy(&partial_trace(s, &[n])?);
            let ions = (0..n)
                .map(|k| Ok(linear_entropy(&partial_trace(s, &[k])?)))
                .collect::<Result<Vec<_>>>()?;
            Ok((field, ions))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EntropySeries::from_rows(times, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::{Case, ClosedForm};
    use crate::error::SimError;
    use crate::hamiltonian::DEFAULT_DIM_CAP;

    #[test]
    fn bridge_matches_closed_form_for_small_systems() {
        for case in [Case::A, Case::B, Case::C] {
            let spec = CaseSpec::new(case, 1.0, vec![1.0, 0.8], vec![1.0, 1.25]).with_n_max(10);
            let times = [0.0, 0.7, 2.9, 8.4];
            let num = numeric_entropies(&spec, &times, DEFAULT_DIM_CAP).unwrap();
            let cf = ClosedForm::new(&spec).unwrap();
            for (i, &t) in times.iter().enumerate() {
                assert!((num.field[i] - cf.field_entropy(t)).abs() < 1e-10, "{case:?} t = {t}");
                for k in 1..=2 {
                    assert!((num.ion(k).unwrap()[i] - cf.ion_entropy(k, t).unwrap()).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        let spec = CaseSpec::uniform(Case::A, 6, 1.0, 1.0).with_n_max(20);
        assert!(matches!(
            numeric_entropies(&spec, &[1.0], DEFAULT_DIM_CAP),
            Err(SimError::ResourceCap { .. })
        ));
    }
}
