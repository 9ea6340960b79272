use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::fockspace::{PhotonDistribution, PhotonKind};

/// Tail bound above which a closed-form result is flagged as under-resolved.
pub const TAIL_WARNING: f64 = 1e-10;

/// Initial-state families of the cross-Kerr entanglement problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    /// Coherent field, coherent ions.
    A,
    /// Squeezed-vacuum field, coherent ions.
    B,
    /// Coherent field, squeezed-vacuum ions.
    C,
}

impl Case {
    pub fn field_kind(&self) -> PhotonKind {
        match self {
            Case::B => PhotonKind::SqueezedVacuum,
            Case::A | Case::C => PhotonKind::Coherent,
        }
    }

    pub fn ion_kind(&self) -> PhotonKind {
        match self {
            Case::C => PhotonKind::SqueezedVacuum,
            Case::A | Case::B => PhotonKind::Coherent,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Case::A => "A",
            Case::B => "B",
            Case::C => "C",
        }
    }
}

impl std::str::FromStr for Case {
    type Err = crate::error::SimError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" => Ok(Case::A),
            "B" | "b" => Ok(Case::B),
            "C" | "c" => Ok(Case::C),
            other => invalid(format!("unknown case '{other}' (expected A, B or C)")),
        }
    }
}

/// Parameters of one cross-Kerr entanglement problem.
///
/// `field` is `|α_0|` (cases A, C) or `r_f` (case B); `ions[j]` is `|α_j|`
/// (cases A, B) or `r_j` (case C). Rates are in units of `λ_1`.
///
/// `n_max_sum = None` sums each series until the dropped probability is below
/// `1e-14`; `Some(n)` truncates every distribution at `n`. Truncated
/// distributions are renormalized, which reproduces exactly what a state
/// truncated at the same ladder contains.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseSpec {
    pub case: Case,
    pub field: f64,
    pub ions: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub n_max_sum: Option<usize>,
}

impl CaseSpec {
    pub fn new(case: Case, field: f64, ions: Vec<f64>, lambdas: Vec<f64>) -> Self {
        Self { case, field, ions, lambdas, n_max_sum: None }
    }

    /// `n` ions with equal parameters and rates.
    pub fn uniform(case: Case, n: usize, field: f64, ion: f64) -> Self {
        Self::new(case, field, vec![ion; n], vec![1.0; n])
    }

    pub fn with_n_max(mut self, n_max: usize) -> Self {
        self.n_max_sum = Some(n_max);
        self
    }

    pub fn n_ions(&self) -> usize {
        self.ions.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.ions.is_empty() {
            return invalid("at least one ion is required");
        }
        if self.ions.len() != self.lambdas.len() {
            return invalid(format!("{} ion parameters but {} rates", self.ions.len(), self.lambdas.len()));
        }
        if !(self.field >= 0.0) || !self.field.is_finite() {
            return invalid(format!("field parameter must be finite and ≥ 0, got {}", self.field));
        }
        if let Some(p) = self.ions.iter().find(|p| !(**p >= 0.0) || !p.is_finite()) {
            return invalid(format!("ion parameters must be finite and ≥ 0, got {p}"));
        }
        if let Some(l) = self.lambdas.iter().find(|l| !(**l > 0.0) || !l.is_finite()) {
            return invalid(format!("rates must be finite and > 0, got {l}"));
        }
        if self.n_max_sum == Some(0) {
            return invalid("n_max_sum must be ≥ 1");
        }
        Ok(())
    }

    fn distribution(&self, kind: PhotonKind, parameter: f64) -> Result<PhotonDistribution> {
        match self.n_max_sum {
            None => Ok(PhotonDistribution::converged(kind, parameter)?.renormalized()),
            Some(n) => Ok(PhotonDistribution::new(kind, parameter, n)?.renormalized()),
        }
    }

    fn raw_tail(&self, kind: PhotonKind, parameter: f64) -> Result<f64> {
        match self.n_max_sum {
            None => Ok(PhotonDistribution::converged(kind, parameter)?.tail()),
            Some(n) => Ok(PhotonDistribution::new(kind, parameter, n)?.tail()),
        }
    }
}

/// `|χ(θ)|²` of the untruncated distribution, `χ(θ) = Σ_n P_n e^{inθ}`:
/// `exp(−2|α|²(1 − cos θ))` for a coherent state and
/// `1 / (cosh²r |1 − tanh²r e^{2iθ}|)` for a squeezed vacuum.
pub fn dephasing_closed_form(kind: PhotonKind, parameter: f64, theta: f64) -> f64 {
    match kind {
        PhotonKind::Coherent => (-2.0 * parameter * parameter * (1.0 - theta.cos())).exp(),
        PhotonKind::SqueezedVacuum => {
            let t2 = parameter.tanh().powi(2);
            let z = Complex64::new(1.0, 0.0) - t2 * Complex64::from_polar(1.0, 2.0 * theta);
            1.0 / (parameter.cosh().powi(2) * z.norm())
        }
    }
}

/// Ions sharing distribution and rate evaluate one dephasing factor.
#[derive(Debug, Clone)]
struct IonGroup {
    dist: PhotonDistribution,
    lambda: f64,
    count: i32,
}

/// Closed-form linear entropies of the field, each ion, and the global
/// entanglement under `H = −Σ_j λ_j n̂_j b†b` from a product initial state.
///
/// With `D_j(d) = |χ_j(λ_j d t)|²` and field autocorrelation weights
/// `w_0 = C(0)`, `w_d = 2C(d)`:
///
/// - `S_field = 1 − Σ_d w_d Π_j D_j(d)`
/// - `S_k = 1 − Σ_d w_d D_k(d)`
#[derive(Debug, Clone)]
pub struct ClosedForm {
    spec: CaseSpec,
    field: PhotonDistribution,
    weights: Vec<f64>,
    groups: Vec<IonGroup>,
    ion_group: Vec<usize>,
    tail_bound: f64,
}

impl ClosedForm {
    pub fn new(spec: &CaseSpec) -> Result<Self> {
        spec.validate()?;
        let field = spec.distribution(spec.case.field_kind(), spec.field)?;
        let weights: Vec<f64> = field
            .autocorrelation()
            .into_iter()
            .enumerate()
            .map(|(d, c)| if d == 0 { c } else { 2.0 * c })
            .collect();

        let mut groups: Vec<IonGroup> = Vec::new();
        let mut ion_group = Vec::with_capacity(spec.n_ions());
        for (&p, &l) in spec.ions.iter().zip(&spec.lambdas) {
            match groups.iter().position(|g| g.dist.parameter == p && g.lambda == l) {
                Some(i) => {
                    groups[i].count += 1;
                    ion_group.push(i);
                }
                None => {
                    ion_group.push(groups.len());
                    groups.push(IonGroup { dist: spec.distribution(spec.case.ion_kind(), p)?, lambda: l, count: 1 });
                }
            }
        }

        // Each purity is multilinear in the distributions with factors in
        // [0, 1]; truncating and renormalizing moves each by at most 2·tail in
        // ℓ¹, and the field distribution enters twice.
        let mut tails = 2.0 * spec.raw_tail(spec.case.field_kind(), spec.field)?;
        for &p in &spec.ions {
            tails += spec.raw_tail(spec.case.ion_kind(), p)?;
        }
        let tail_bound = 2.0 * tails;
        Ok(Self { spec: spec.clone(), field, weights, groups, ion_group, tail_bound })
    }

    pub fn spec(&self) -> &CaseSpec {
        &self.spec
    }

    pub fn n_ions(&self) -> usize {
        self.spec.n_ions()
    }

    /// Upper bound on the entropy error caused by truncating the series.
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn truncation_warning(&self) -> bool {
        self.tail_bound > TAIL_WARNING
    }

    pub fn field_distribution(&self) -> &PhotonDistribution {
        &self.field
    }

    fn dephasing(group: &IonGroup, d: usize, t: f64) -> f64 {
        group.dist.characteristic(group.lambda * d as f64 * t).norm_sqr()
    }

    /// `D_g(d)` for every group and every lag `d`.
    fn dephasing_table(&self, t: f64) -> Vec<Vec<f64>> {
        self.groups
            .iter()
            .map(|g| (0..self.weights.len()).map(|d| Self::dephasing(g, d, t)).collect())
            .collect()
    }

    fn field_purity_from(&self, table: &[Vec<f64>]) -> f64 {
        self.weights
            .iter()
            .enumerate()
            .map(|(d, w)| {
                let prod: f64 = self.groups.iter().zip(table).map(|(g, row)| row[d].powi(g.count)).product();
                w * prod
            })
            .sum()
    }

    fn ion_purity_from(&self, table: &[Vec<f64>], group: usize) -> f64 {
        self.weights.iter().zip(&table[group]).map(|(w, d)| w * d).sum()
    }

    pub fn field_entropy(&self, t: f64) -> f64 {
        let table = self.dephasing_table(t);
        clamp(1.0 - self.field_purity_from(&table))
    }

    /// Linear entropy of ion `k`, counted from 1.
    pub fn ion_entropy(&self, k: usize, t: f64) -> Result<f64> {
        let g = self.group_of(k)?;
        let group = &self.groups[g];
        let purity: f64 = self
            .weights
            .iter()
            .enumerate()
            .map(|(d, w)| w * Self::dephasing(group, d, t))
            .sum();
        Ok(clamp(1.0 - purity))
    }

    fn group_of(&self, k: usize) -> Result<usize> {
        if k == 0 || k > self.n_ions() {
            return invalid(format!("ion index {k} outside 1..={}", self.n_ions()));
        }
        Ok(self.ion_group[k - 1])
    }

    /// Field entropy followed by every ion entropy, sharing one table.
    pub fn all_entropies(&self, t: f64) -> (f64, Vec<f64>) {
        let table = self.dephasing_table(t);
        let field = clamp(1.0 - self.field_purity_from(&table));
        let ions = self.ion_group.iter().map(|&g| clamp(1.0 - self.ion_purity_from(&table, g))).collect();
        (field, ions)
    }

    /// `E_G(1) = (S_field + Σ_k S_k) / (N + 1)`.
    pub fn global_entanglement(&self, t: f64) -> f64 {
        let (f, ions) = self.all_entropies(t);
        (f + ions.iter().sum::<f64>()) / (self.n_ions() + 1) as f64
    }

    /// The single double sum
    /// `E_G = 1 − (1/(N+1)) Σ_{m,m'} P_m P_{m'} [Π_j D_j(m−m') + Σ_j D_j(m−m')]`,
    /// evaluated term by term without the autocorrelation reduction.
    pub fn global_entanglement_factored(&self, t: f64) -> f64 {
        let p = self.field.probabilities();
        let mut total = 0.0;
        for (m, &pm) in p.iter().enumerate() {
            if pm == 0.0 {
                continue;
            }
            for (m2, &pm2) in p.iter().enumerate() {
                if pm2 == 0.0 {
                    continue;
                }
                let lag = (m as f64 - m2 as f64) * t;
                let mut prod = 1.0;
                let mut sum = 0.0;
                for (j, &l) in self.spec.lambdas.iter().enumerate() {
                    let g = &self.groups[self.ion_group[j]];
                    let dj = g.dist.characteristic(l * lag).norm_sqr();
                    prod *= dj;
                    sum += dj;
                }
                total += pm * pm2 * (prod + sum);
            }
        }
        clamp(1.0 - total / (self.n_ions() + 1) as f64)
    }
}

/// Round-off can push `1 − purity` a few ulps outside `[0, 1]`.
fn clamp(s: f64) -> f64 {
    s.clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn squeezed_field_pair() -> CaseSpec {
        CaseSpec::new(Case::B, 1.0, vec![1.0, 1.0], vec![1.0, 1.25])
    }

    #[test]
    fn zero_time_is_unentangled() {
        for case in [Case::A, Case::B, Case::C] {
            let f = ClosedForm::new(&CaseSpec::new(case, 1.0, vec![1.0, 0.8], vec![1.0, 1.25])).unwrap();
            assert!(f.field_entropy(0.0) < 1e-12);
            assert!(f.ion_entropy(1, 0.0).unwrap() < 1e-12);
            assert!(f.global_entanglement(0.0) < 1e-12);
        }
    }

    #[test]
    fn equal_rates_revive_at_full_period() {
        let f = ClosedForm::new(&CaseSpec::uniform(Case::A, 4, 1.0, 1.0)).unwrap();
        assert!(f.field_entropy(2.0 * PI) < 1e-10);
        assert!(f.ion_entropy(3, 2.0 * PI).unwrap() < 1e-10);
        assert!(f.field_entropy(PI) > 0.1);
    }

    #[test]
    fn ion_index_is_checked() {
        let f = ClosedForm::new(&squeezed_field_pair()).unwrap();
        assert!(f.ion_entropy(0, 1.0).is_err());
        assert!(f.ion_entropy(3, 1.0).is_err());
        assert!(f.ion_entropy(2, 1.0).is_ok());
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(ClosedForm::new(&CaseSpec::new(Case::A, 1.0, vec![1.0], vec![0.0])).is_err());
        assert!(ClosedForm::new(&CaseSpec::new(Case::A, -1.0, vec![1.0], vec![1.0])).is_err());
        assert!(ClosedForm::new(&CaseSpec::new(Case::A, 1.0, vec![1.0, 1.0], vec![1.0])).is_err());
        assert!(ClosedForm::new(&CaseSpec::uniform(Case::A, 1, 1.0, 1.0).with_n_max(0)).is_err());
    }

    #[test]
    fn series_dephasing_matches_closed_forms() {
        for (kind, p) in [(PhotonKind::Coherent, 1.0), (PhotonKind::Coherent, 2.3), (PhotonKind::SqueezedVacuum, 1.0)] {
            let d = PhotonDistribution::converged(kind, p).unwrap();
            for k in 0..40 {
                let th = 0.173 * k as f64;
                let series = d.characteristic(th).norm_sqr();
                assert!((series - dephasing_closed_form(kind, p, th)).abs() < 1e-12, "{kind:?} {p} {th}");
            }
        }
    }

    /// Direct double sum over field numbers with the analytic coherent factor,
    /// exactly as the all-coherent field entropy is usually written.
    #[test]
    fn case_a_field_entropy_matches_textbook_double_sum() {
        let spec = CaseSpec::new(Case::A, 1.0, vec![1.0, 0.7, 1.3], vec![1.0, 2f64.sqrt(), 0.5]);
        let f = ClosedForm::new(&spec).unwrap();
        let p = f.field_distribution().probabilities().to_vec();
        for &t in &[0.3, 1.7, 4.2, 11.0] {
            let mut purity = 0.0;
            for (n, pn) in p.iter().enumerate() {
                for (m, pm) in p.iter().enumerate() {
                    let expo: f64 = spec
                        .ions
                        .iter()
                        .zip(&spec.lambdas)
                        .map(|(a, l)| -2.0 * a * a * (1.0 - (l * (m as f64 - n as f64) * t).cos()))
                        .sum();
                    purity += pn * pm * expo.exp();
                }
            }
            assert!((f.field_entropy(t) - (1.0 - purity)).abs() < 1e-12);
        }
    }

    #[test]
    fn mean_form_equals_factored_form() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..50 {
            let case = [Case::A, Case::B, Case::C][rng.gen_range(0..3)];
            let n = rng.gen_range(1..5);
            let spec = CaseSpec::new(
                case,
                rng.gen_range(0.2..1.5),
                (0..n).map(|_| rng.gen_range(0.2..1.5)).collect(),
                (0..n).map(|_| rng.gen_range(0.3..2.0)).collect(),
            );
            let f = ClosedForm::new(&spec).unwrap();
            let t = rng.gen_range(0.0..30.0);
            assert!((f.global_entanglement(t) - f.global_entanglement_factored(t)).abs() < 1e-10);
        }
    }

    #[test]
    fn ion_entropy_periodic_in_its_own_rate() {
        let spec = CaseSpec::new(Case::B, 1.0, vec![1.0, 0.6], vec![1.0, 1.25]);
        let f = ClosedForm::new(&spec).unwrap();
        let period = 2.0 * PI / 1.25;
        for &t in &[0.4, 2.2, 7.9] {
            let a = f.ion_entropy(2, t).unwrap();
            let b = f.ion_entropy(2, t + period).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn identical_ions_have_identical_curves() {
        let f = ClosedForm::new(&CaseSpec::uniform(Case::A, 10, 1.0, 1.0)).unwrap();
        for &t in &[0.5, 1.9, 3.3] {
            let (_, ions) = f.all_entropies(t);
            assert!(ions.iter().all(|s| (s - ions[0]).abs() < 1e-12));
        }
    }

    #[test]
    fn time_reversal_symmetry() {
        let f = ClosedForm::new(&CaseSpec::new(Case::C, 1.0, vec![1.0, 0.8], vec![1.0, 1.25])).unwrap();
        for &t in &[0.3, 2.0, 9.1] {
            assert!((f.field_entropy(t) - f.field_entropy(-t)).abs() < 1e-14);
            assert!((f.ion_entropy(1, t).unwrap() - f.ion_entropy(1, -t).unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn truncation_changes_bounded_by_tail() {
        let base = CaseSpec::new(Case::B, 1.0, vec![1.0, 1.0], vec![1.0, 1.25]);
        let mut prev: Option<(f64, f64)> = None;
        for n in [10, 14, 20, 30, 60] {
            let f = ClosedForm::new(&base.clone().with_n_max(n)).unwrap();
            let s = f.field_entropy(1.3);
            if let Some((s_prev, bound_prev)) = prev {
                assert!((s - s_prev).abs() <= bound_prev, "n = {n}");
            }
            prev = Some((s, f.tail_bound()));
        }
        let conv = ClosedForm::new(&base).unwrap();
        assert!(!conv.truncation_warning());
        assert!(ClosedForm::new(&base.with_n_max(14)).unwrap().truncation_warning());
    }
}
