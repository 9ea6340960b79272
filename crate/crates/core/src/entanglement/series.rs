use rayon::prelude::*;

use super::closed_form::{CaseSpec, ClosedForm};
use crate::error::{invalid, Result};

/// Entropy curves on a common time grid (units of `1/λ_1`).
#[derive(Debug, Clone, PartialEq)]
pub struct EntropySeries {
    pub times: Vec<f64>,
    pub field: Vec<f64>,
    /// `ions[k]` is the curve of ion `k + 1`.
    pub ions: Vec<Vec<f64>>,
    pub global: Vec<f64>,
}

impl EntropySeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Curve of ion `k`, counted from 1.
    pub fn ion(&self, k: usize) -> Result<&[f64]> {
        match k.checked_sub(1).and_then(|i| self.ions.get(i)) {
            Some(v) => Ok(v),
            None => invalid(format!("ion index {k} outside 1..={}", self.ions.len())),
        }
    }

    pub fn max_field(&self) -> f64 {
        max_of(&self.field)
    }

    pub fn max_ion(&self, k: usize) -> Result<f64> {
        Ok(max_of(self.ion(k)?))
    }

    pub fn max_global(&self) -> f64 {
        max_of(&self.global)
    }

    /// Largest entropy among all subsystems at grid point `i`.
    pub fn max_at(&self, i: usize) -> f64 {
        self.ions.iter().map(|c| c[i]).fold(self.field[i], f64::max)
    }

    /// Assemble from per-time `(field, ions)` pairs.
    pub fn from_rows(times: &[f64], rows: Vec<(f64, Vec<f64>)>) -> Self {
        let n = rows.first().map_or(0, |r| r.1.len());
        let mut ions = vec![Vec::with_capacity(rows.len()); n];
        let mut field = Vec::with_capacity(rows.len());
        let mut global = Vec::with_capacity(rows.len());
        for (f, is) in rows {
            global.push((f + is.iter().sum::<f64>()) / (is.len() + 1) as f64);
            field.push(f);
            for (curve, s) in ions.iter_mut().zip(is) {
                curve.push(s);
            }
        }
        Self { times: times.to_vec(), field, ions, global }
    }
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

pub(crate) fn check_monotone(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite()) {
        return invalid("time grid contains non-finite values");
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return invalid("time grid must be strictly increasing");
    }
    Ok(())
}

/// `points` equally spaced times from `t_start` to `t_end` inclusive.
pub fn uniform_grid(t_start: f64, t_end: f64, points: usize) -> Result<Vec<f64>> {
    if points == 0 {
        return invalid("time grid needs at least one point");
    }
    if !(t_end > t_start) && points > 1 {
        return invalid(format!("empty time range [{t_start}, {t_end}]"));
    }
    if points == 1 {
        return Ok(vec![t_start]);
    }
    let h = (t_end - t_start) / (points - 1) as f64;
    Ok((0..points).map(|i| t_start + h * i as f64).collect())
}

/// Closed-form field, ion and global curves on a monotone grid.
pub fn entropy_series(spec: &CaseSpec, times: &[f64]) -> Result<EntropySeries> {
    entropy_series_with(&ClosedForm::new(spec)?, times)
}

pub fn entropy_series_with(form: &ClosedForm, times: &[f64]) -> Result<EntropySeries> {
    check_monotone(times)?;
    if form.truncation_warning() {
        log::warn!("closed-form series truncated with tail bound {:.3e}", form.tail_bound());
    }
    let rows: Vec<(f64, Vec<f64>)> = times.par_iter().map(|&t| form.all_entropies(t)).collect();
    Ok(EntropySeries::from_rows(times, rows))
}

/// Fraction of grid points where the curve sits within `rel` of its running
/// maximum (`v ≥ (1 − rel) · max_{s ≤ t} v(s)`), ignoring points before the
/// curve first becomes positive.
pub fn plateau_fraction(values: &[f64], rel: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut running = 0.0_f64;
    let mut hits = 0usize;
    for &v in values {
        running = running.max(v);
        if running > 0.0 && v >= (1.0 - rel) * running {
            hits += 1;
        }
    }
    hits as f64 / values.len() as f64
}

/// Grid times at which every subsystem entropy is simultaneously below
/// `threshold`, counted only after the field entropy has first exceeded it.
pub fn simultaneous_returns(series: &EntropySeries, threshold: f64) -> Vec<f64> {
    let start = match series.field.iter().position(|&s| s > threshold) {
        Some(i) => i,
        None => return Vec::new(),
    };
    (start..series.len())
        .filter(|&i| series.max_at(i) < threshold)
        .map(|i| series.times[i])
        .collect()
}
