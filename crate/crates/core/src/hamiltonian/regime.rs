use super::config::SystemConfig;

pub const SOFT_RATIO: f64 = 10.0;
pub const HARD_RATIO: f64 = 3.0;
/// Above this the `η⁴` correction to the Lamb-Dicke expansion exceeds 1% for `n ≤ 5`.
pub const ETA_SOFT: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Flag {
    Pass,
    Soft,
    Hard,
}

impl Flag {
    fn for_ratio(r: f64) -> Self {
        if r < HARD_RATIO {
            Flag::Hard
        } else if r < SOFT_RATIO {
            Flag::Soft
        } else {
            Flag::Pass
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Flag::Pass => "pass",
            Flag::Soft => "soft",
            Flag::Hard => "hard",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IonRegime {
    /// `|Δ_i| / g_i`
    pub detuning_ratio: f64,
    /// `ν_i / |Δ_i|`
    pub trap_ratio: f64,
    pub eta: f64,
    pub detuning_flag: Flag,
    pub trap_flag: Flag,
    pub eta_flag: Flag,
}

/// Ratios behind the hierarchy `ν ≫ Δ ≫ g` and the Lamb-Dicke condition.
#[derive(Debug, Clone, PartialEq)]
pub struct RegimeReport {
    pub ions: Vec<IonRegime>,
}

impl RegimeReport {
    pub fn worst(&self) -> Flag {
        self.ions
            .iter()
            .flat_map(|i| [i.detuning_flag, i.trap_flag, i.eta_flag])
            .max()
            .unwrap_or(Flag::Pass)
    }

    /// Hard violation of the detuning hierarchy (the η flag is never hard).
    pub fn has_hard_violation(&self) -> bool {
        self.worst() == Flag::Hard
    }

    pub fn trap_worst(&self) -> Flag {
        self.ions.iter().map(|i| i.trap_flag).max().unwrap_or(Flag::Pass)
    }

    pub fn summary(&self) -> String {
        self.ions
            .iter()
            .enumerate()
            .map(|(i, r)| {
                format!(
                    "ion {}: Δ/g = {} ({}), ν/Δ = {} ({}), η = {} ({})",
                    i + 1,
                    format_sig(r.detuning_ratio, 4),
                    r.detuning_flag.label(),
                    format_sig(r.trap_ratio, 4),
                    r.trap_flag.label(),
                    format_sig(r.eta, 4),
                    r.eta_flag.label()
                )
            })
            .collect::<Vec<_>>()
            .join("; ")
    }
}

/// `x` with `digits` significant digits; scientific notation outside `[1e-3, 1e6)`.
pub fn format_sig(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return format!("{:.*}", digits - 1, 0.0);
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-3..6).contains(&mag) {
        return format!("{:.*e}", digits - 1, x);
    }
    let decimals = (digits as i32 - 1 - mag).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // rounding may carry into a new leading digit (9.9996 → 10.000)
    let rounded: f64 = s.parse().unwrap_or(x);
    let new_mag = rounded.abs().log10().floor() as i32;
    if new_mag > mag {
        let decimals = (digits as i32 - 1 - new_mag).max(0) as usize;
        return format!("{rounded:.decimals$}");
    }
    s
}

pub fn validate_regime(config: &SystemConfig) -> RegimeReport {
    let ions = (0..config.n_ions())
        .map(|i| {
            let delta = config.delta(i).abs();
            let detuning_ratio = if config.g[i] == 0.0 { f64::INFINITY } else { delta / config.g[i] };
            let trap_ratio = if delta == 0.0 { f64::INFINITY } else { config.nu[i] / delta };
            let eta = config.eta[i];
            IonRegime {
                detuning_ratio,
                trap_ratio,
                eta,
                detuning_flag: Flag::for_ratio(detuning_ratio),
                trap_flag: Flag::for_ratio(trap_ratio),
                eta_flag: if eta > ETA_SOFT { Flag::Soft } else { Flag::Pass },
            }
        })
        .collect();
    RegimeReport { ions }
}
