use std::f64::consts::PI;

use num_complex::Complex64;

use crate::dynamics::OmegaMode;
use crate::error::{invalid, Result, SimError};
use crate::hamiltonian::SystemConfig;

/// Above this `η` the second-order expansion of `f(n)` is flagged as borderline.
pub const ETA_WARN: f64 = 0.3;
/// Above this `η` the protocol is refused.
pub const ETA_MAX: f64 = 0.5;

/// Parameters of the two-ion cat-state protocol.
///
/// `η = √(1/(1 + 2k))` makes the motional-independent phase
/// `θ_η = (1 − η²)π/(2η²)` equal to `kπ`, and `t_I = πΔ/(2η²g₁g₂)` makes the
/// number-dependent phase `π(n̂₁ + n̂₂)/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolParams {
    pub alpha: Complex64,
    pub k: f64,
    pub eta: f64,
    pub g1: f64,
    pub g2: f64,
    pub delta: f64,
    pub t_interaction: f64,
    pub omega_mode: OmegaMode,
    /// Set when `η` exceeds [`ETA_WARN`].
    pub lamb_dicke_warning: bool,
}

impl ProtocolParams {
    pub fn with_mode(mut self, mode: OmegaMode) -> Self {
        self.omega_mode = mode;
        self
    }

    /// `θ_η = (1 − η²)π / (2η²)`.
    pub fn theta_eta(&self) -> f64 {
        let e2 = self.eta * self.eta;
        (1.0 - e2) * PI / (2.0 * e2)
    }

    /// True when `k` is an integer, i.e. the `e₁g₂` outcome carries the even
    /// joint-parity state.
    pub fn integer_k(&self) -> bool {
        self.k.fract() == 0.0
    }

    /// `N = 2` configuration used by the dipole evolution (trap and cavity
    /// frequencies do not enter the exchange dynamics).
    pub fn system_config(&self, n_max: usize) -> SystemConfig {
        let mut cfg = SystemConfig::uniform(2, 20.0 * self.delta.abs(), 0.0, self.delta, self.g1, self.eta, n_max, 1);
        cfg.g[1] = self.g2;
        cfg
    }
}

/// `⌈|α|² + 8|α| + 10⌉`.
pub fn default_protocol_n_max(alpha_abs: f64) -> usize {
    (alpha_abs * alpha_abs + 8.0 * alpha_abs + 10.0).ceil() as usize
}

pub fn derive_params(k: f64, alpha: Complex64, g1: f64, g2: f64, delta: f64) -> Result<ProtocolParams> {
    if !(k > 0.0) || !k.is_finite() {
        return invalid(format!("k must be positive, got {k}"));
    }
    if (2.0 * k).fract() != 0.0 {
        return invalid(format!("k must be an integer or half-integer, got {k}"));
    }
    if !(g1 > 0.0) || !(g2 > 0.0) || !g1.is_finite() || !g2.is_finite() {
        return invalid("couplings must be finite and > 0");
    }
    if delta == 0.0 || !delta.is_finite() {
        return invalid("detuning must be finite and nonzero");
    }
    if !alpha.re.is_finite() || !alpha.im.is_finite() {
        return invalid("α must be finite");
    }
    let eta = (1.0 / (1.0 + 2.0 * k)).sqrt();
    if eta > ETA_MAX {
        return Err(SimError::Regime(format!(
            "k = {k} gives η = {eta:.4} > {ETA_MAX}; the Lamb-Dicke expansion needs η ≪ 1"
        )));
    }
    let lamb_dicke_warning = eta > ETA_WARN;
    if lamb_dicke_warning {
        log::warn!("k = {k} gives η = {eta:.4}, borderline for the Lamb-Dicke expansion");
    }
    let t_interaction = PI * delta / (2.0 * eta * eta * g1 * g2);
    Ok(ProtocolParams {
        alpha,
        k,
        eta,
        g1,
        g2,
        delta,
        t_interaction,
        omega_mode: OmegaMode::LambDicke,
        lamb_dicke_warning,
    })
}
