use std::f64::consts::{PI, SQRT_2};

use super::closed_form::{Case, CaseSpec};
use crate::error::{invalid, Result};

/// Default parameter sets of the five entropy-dynamics figures.
#[derive(Debug, Clone, PartialEq)]
pub struct FigurePreset {
    pub id: u8,
    pub title: &'static str,
    /// One or more labeled problems plotted on the same time axis.
    pub panels: Vec<(String, CaseSpec)>,
    pub t_max: f64,
    pub points: usize,
}

pub fn figure_preset(id: u8) -> Result<FigurePreset> {
    let sqrt3 = 3f64.sqrt();
    let (title, panels, t_max) = match id {
        1 => (
            "all coherent, N = 10, equal couplings",
            vec![("N10".to_string(), CaseSpec::uniform(Case::A, 10, 1.0, 1.0))],
            4.0 * PI,
        ),
        2 => (
            "all coherent, equal couplings, N = 2, 10, 50",
            [2, 10, 50]
                .iter()
                .map(|&n| (format!("N{n}"), CaseSpec::uniform(Case::A, n, 1.0, 1.0)))
                .collect(),
            8.0 * PI,
        ),
        3 => (
            "all coherent, N = 5, incommensurate couplings",
            vec![(
                "N5".to_string(),
                CaseSpec::new(Case::A, 1.0, vec![1.0; 5], vec![1.0, SQRT_2, 1.0 / SQRT_2, sqrt3, 1.0 / sqrt3]),
            )],
            50.0,
        ),
        4 => (
            "squeezed field, coherent ions, N = 2",
            vec![("N2".to_string(), CaseSpec::new(Case::B, 1.0, vec![1.0, 1.0], vec![1.0, 1.25]))],
            8.0 * PI,
        ),
        5 => (
            "coherent field, squeezed ions, N = 2",
            vec![("N2".to_string(), CaseSpec::new(Case::C, 1.0, vec![1.0, 1.0], vec![1.0, 1.25]))],
            8.0 * PI,
        ),
        other => return invalid(format!("figure id must be 1..=5, got {other}")),
    };
    Ok(FigurePreset { id, title, panels, t_max, points: 2001 })
}

/// Ion indices (from 1) whose curves differ; ions with identical parameter
/// and rate share one curve.
pub fn distinct_ions(spec: &CaseSpec) -> Vec<usize> {
    let mut seen: Vec<(f64, f64)> = Vec::new();
    let mut out = Vec::new();
    for (k, (&p, &l)) in spec.ions.iter().zip(&spec.lambdas).enumerate() {
        if !seen.contains(&(p, l)) {
            seen.push((p, l));
            out.push(k + 1);
        }
    }
    out
}
