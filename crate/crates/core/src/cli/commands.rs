use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use super::config::{indexed_key, Settings};
use super::output::{num, write_atomic, CsvTable};
use super::{CompareArgs, FigureArgs, ModeArg, NlmsArgs, RegimeArgs, EXIT_OK, EXIT_REGIME};
use crate::dynamics::OmegaMode;
use crate::entanglement::{
    distinct_ions, entropy_series_with, figure_preset, numeric_entropies, uniform_grid, Case, CaseSpec, ClosedForm,
};
use crate::error::{invalid, Result, SimError};
use crate::hamiltonian::{format_sig, validate_regime, Flag, SystemConfig, DEFAULT_DIM_CAP};
use crate::nlms::{default_protocol_n_max, derive_params, fidelity_sweep, run_protocol, Branch, ProtocolOutcome};

const FIGURE_KEYS: &[&str] = &["case", "field", "ion", "ion*", "lambda*", "n_ions", "n_max_sum", "points", "tmax"];

fn apply_case_settings(mut spec: CaseSpec, s: &Settings) -> Result<CaseSpec> {
    if let Some(n) = s.parsed::<usize>("n_ions")? {
        if n == 0 {
            return invalid("n_ions must be ≥ 1");
        }
        let last_ion = *spec.ions.last().expect("presets have ions");
        let last_rate = *spec.lambdas.last().expect("presets have rates");
        spec.ions.resize(n, last_ion);
        spec.lambdas.resize(n, last_rate);
    }
    if let Some(c) = s.get("case") {
        spec.case = c.parse::<Case>()?;
    }
    if let Some(f) = s.parsed::<f64>("field")? {
        spec.field = f;
    }
    if let Some(p) = s.parsed::<f64>("ion")? {
        spec.ions.iter_mut().for_each(|x| *x = p);
    }
    for key in s.keys() {
        for (stem, target) in [("ion", &mut spec.ions), ("lambda", &mut spec.lambdas)] {
            if let Some(k) = indexed_key(key, stem) {
                let v = s.parsed::<f64>(key)?.expect("key present");
                match k.checked_sub(1).and_then(|i| target.get_mut(i)) {
                    Some(slot) => *slot = v,
                    None => return invalid(format!("'{key}' refers to a missing ion")),
                }
            }
        }
    }
    if let Some(v) = s.get("n_max_sum") {
        spec.n_max_sum = match v {
            "auto" => None,
            other => Some(other.parse().or_else(|_| invalid(format!("cannot parse n_max_sum '{other}'")))?),
        };
    }
    spec.validate()?;
    Ok(spec)
}

fn describe_spec(label: &str, spec: &CaseSpec, form: &ClosedForm) -> String {
    format!(
        "panel {label}: case = {}, field = {}, ions = {:?}, lambdas = {:?}, n_max_sum = {}, tail_bound = {}",
        spec.case.label(),
        spec.field,
        spec.ions,
        spec.lambdas,
        spec.n_max_sum.map_or("auto".to_string(), |n| n.to_string()),
        num(form.tail_bound())
    )
}

pub(super) fn figure(a: &FigureArgs) -> Result<i32> {
    let preset = figure_preset(a.id)?;
    let mut s = match &a.config {
        Some(p) => Settings::from_file(p)?,
        None => Settings::default(),
    };
    s.apply_overrides(&a.set)?;
    s.check_known(FIGURE_KEYS)?;
    let points = a.points.or(s.parsed("points")?).unwrap_or(preset.points);
    let t_max = a.tmax.or(s.parsed("tmax")?).unwrap_or(preset.t_max);
    if points == 0 {
        return invalid("--points must be ≥ 1");
    }
    if !(t_max > 0.0) || !t_max.is_finite() {
        return invalid("--tmax must be finite and > 0");
    }
    let times = uniform_grid(0.0, t_max, points)?;
    let out = a.out.clone().unwrap_or_else(|| PathBuf::from(format!("figure{}.csv", a.id)));

    let multi = preset.panels.len() > 1;
    let mut columns = vec!["time".to_string()];
    let mut curves: Vec<Vec<f64>> = Vec::new();
    let mut header = vec![
        format!("sim figure {}: {}", a.id, preset.title),
        format!("time grid: t_start = 0, t_max = {t_max}, points = {points} (units of 1/lambda_1)"),
    ];
    for (label, base) in preset.panels {
        let spec = apply_case_settings(base, &s)?;
        let form = ClosedForm::new(&spec)?;
        header.push(describe_spec(&label, &spec, &form));
        let series = entropy_series_with(&form, &times)?;
        let suffix = if multi { format!("_{label}") } else { String::new() };
        columns.push(format!("S_field{suffix}"));
        curves.push(series.field.clone());
        for k in distinct_ions(&spec) {
            columns.push(format!("S_ion{k}{suffix}"));
            curves.push(series.ion(k)?.to_vec());
        }
        columns.push(format!("E_global{suffix}"));
        curves.push(series.global);
    }
    let mut table = CsvTable::new(columns);
    header.into_iter().for_each(|h| table.comment(h));
    for (i, &t) in times.iter().enumerate() {
        let mut row = vec![t];
        row.extend(curves.iter().map(|c| c[i]));
        table.push(row);
    }
    write_atomic(&out, &table.render())?;
    println!("wrote {}", out.display());
    Ok(EXIT_OK)
}

fn modes(m: ModeArg) -> Vec<OmegaMode> {
    match m {
        ModeArg::Exact => vec![OmegaMode::ExactF],
        ModeArg::Ld => vec![OmegaMode::LambDicke],
        ModeArg::Both => vec![OmegaMode::ExactF, OmegaMode::LambDicke],
    }
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn report_outcome(out: &mut String, o: &ProtocolOutcome) {
    let _ = writeln!(out, "[mode {}]", o.params.omega_mode.label());
    for (b, branch) in Branch::ALL.iter().enumerate() {
        let _ = writeln!(
            out,
            "branch {}: probability = {}, F(Psi+) = {}, F(Phi+) = {}, parity = {}",
            branch.label(),
            num(o.probabilities[b]),
            num(o.fidelities[b][0]),
            num(o.fidelities[b][1]),
            num(o.parities[b])
        );
    }
    let [fp, ff] = o.matched_fidelities();
    let _ = writeln!(
        out,
        "expected assignment ({}): F(Psi+) = {}, F(Phi+) = {}",
        if o.params.integer_k() { "e1g2 -> Psi+, g1e2 -> Phi+" } else { "g1e2 -> Psi+, e1g2 -> Phi+" },
        num(fp),
        num(ff)
    );
    let _ = writeln!(out, "sector leakage = {}", num(o.sector_leakage));
}

pub(super) fn nlms(a: &NlmsArgs) -> Result<i32> {
    let alpha = Complex64::new(a.alpha, 0.0);
    let n_max = a.n_max.unwrap_or_else(|| default_protocol_n_max(a.alpha.abs()));
    let base = derive_params(a.k, alpha, a.g1, a.g2, a.delta)?;
    let swap_k = if base.integer_k() { a.k + 0.5 } else { a.k - 0.5 };

    let mut report = String::new();
    let _ = writeln!(report, "# sim nlms");
    let _ = writeln!(
        report,
        "k = {}, alpha = {}, g1 = {}, g2 = {}, delta = {}, n_max = {n_max}",
        a.k, a.alpha, a.g1, a.g2, a.delta
    );
    let _ = writeln!(
        report,
        "eta = {}, theta_eta/pi = {}, t_I = {}, lamb_dicke_warning = {}",
        num(base.eta),
        num(base.theta_eta() / PI),
        num(base.t_interaction),
        base.lamb_dicke_warning
    );
    let _ = writeln!(report, "initial truncation deficit limit = {}", num(crate::nlms::MAX_DEFICIT));

    let selected = modes(a.mode);
    for &mode in &selected {
        let outcome = run_protocol(&base.clone().with_mode(mode), n_max)?;
        report_outcome(&mut report, &outcome);
        if swap_k > 0.0 {
            if let Ok(p) = derive_params(swap_k, alpha, a.g1, a.g2, a.delta) {
                let swapped = run_protocol(&p.with_mode(mode), n_max)?;
                let dev = (0..2)
                    .flat_map(|i| (0..2).map(move |j| (i, j)))
                    .map(|(i, j)| (outcome.fidelities[i][j] - swapped.fidelities[1 - i][j]).abs())
                    .fold(0.0, f64::max);
                let _ = writeln!(
                    report,
                    "swap check against k = {swap_k}: max |F_k[b][t] - F_k'[other b][t]| = {}",
                    num(dev)
                );
            }
        }
    }

    let mut columns = vec!["k".to_string(), "eta".to_string()];
    let mut sweeps = Vec::new();
    for &mode in &selected {
        columns.push(format!("F_psi_{}", mode.label()));
        columns.push(format!("F_phi_{}", mode.label()));
        columns.push(format!("P_psi_branch_{}", mode.label()));
        sweeps.push(fidelity_sweep(&a.sweep, alpha, (a.g1, a.g2), a.delta, mode, n_max)?);
    }
    let mut table = CsvTable::new(columns);
    table.comment("sim nlms fidelity sweep");
    table.comment(format!(
        "alpha = {}, g1 = {}, g2 = {}, delta = {}, n_max = {n_max}, k = {:?}",
        a.alpha, a.g1, a.g2, a.delta, a.sweep
    ));
    for (i, &k) in a.sweep.iter().enumerate() {
        let mut row = vec![k, sweeps[0][i].eta];
        for s in &sweeps {
            row.extend([s[i].fidelity_psi, s[i].fidelity_phi, s[i].probability_psi_branch]);
        }
        table.push(row);
    }
    let report_path = with_suffix(&a.out, "_report.txt");
    let sweep_path = with_suffix(&a.out, "_sweep.csv");
    write_atomic(&report_path, &report)?;
    write_atomic(&sweep_path, &table.render())?;
    print!("{report}");
    println!("wrote {} and {}", report_path.display(), sweep_path.display());
    Ok(EXIT_OK)
}

const REGIME_KEYS: &[&str] = &["n_ions", "nu", "omega_c", "delta", "g", "eta", "nu*", "delta*", "g*", "eta*"];

/// Defaults: one ion, ν = 400, ω_c = 100, Δ = 20, g = 1, η = 0.1.
fn regime_config(s: &Settings) -> Result<SystemConfig> {
    s.check_known(REGIME_KEYS)?;
    let n = s.parsed::<usize>("n_ions")?.unwrap_or(1);
    if n == 0 {
        return invalid("n_ions must be ≥ 1");
    }
    let get = |k: &str, d: f64| -> Result<f64> { Ok(s.parsed::<f64>(k)?.unwrap_or(d)) };
    let delta = get("delta", 20.0)?;
    let mut cfg = SystemConfig::uniform(n, get("nu", 400.0)?, get("omega_c", 100.0)?, delta, get("g", 1.0)?, get("eta", 0.1)?, 1, 1);
    for key in s.keys() {
        for stem in ["nu", "delta", "g", "eta"] {
            let Some(k) = indexed_key(key, stem) else { continue };
            if k == 0 || k > n {
                return invalid(format!("'{key}' refers to a missing ion (n_ions = {n})"));
            }
            let v = s.parsed::<f64>(key)?.expect("key present");
            match stem {
                "nu" => cfg.nu[k - 1] = v,
                "delta" => cfg.omega[k - 1] = cfg.omega_c + v,
                "g" => cfg.g[k - 1] = v,
                _ => cfg.eta[k - 1] = v,
            }
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

pub(super) fn regime(a: &RegimeArgs) -> Result<i32> {
    let mut s = Settings::from_file(&a.config)?;
    s.apply_overrides(&a.set)?;
    let cfg = regime_config(&s)?;
    let report = validate_regime(&cfg);
    println!("regime check for {} ion(s), omega_c = {}", cfg.n_ions(), format_sig(cfg.omega_c, 4));
    for (i, r) in report.ions.iter().enumerate() {
        println!(
            "ion {}: nu = {}, delta = {}, g = {}, eta = {} | delta/g = {} [{}], nu/delta = {} [{}], eta [{}]",
            i + 1,
            format_sig(cfg.nu[i], 4),
            format_sig(cfg.delta(i), 4),
            format_sig(cfg.g[i], 4),
            format_sig(cfg.eta[i], 4),
            format_sig(r.detuning_ratio, 4),
            r.detuning_flag.label(),
            format_sig(r.trap_ratio, 4),
            r.trap_flag.label(),
            r.eta_flag.label()
        );
    }
    let worst = report.worst();
    println!("overall: {}", worst.label());
    Ok(if worst == Flag::Hard { EXIT_REGIME } else { EXIT_OK })
}

pub(super) fn compare(a: &CompareArgs) -> Result<i32> {
    let case: Case = a.case.parse()?;
    if a.n_ions == 0 || a.points == 0 {
        return invalid("--n-ions and --points must be ≥ 1");
    }
    let lambdas = match &a.lambdas {
        Some(l) if l.len() == a.n_ions => l.clone(),
        Some(l) => return invalid(format!("{} rates given for {} ions", l.len(), a.n_ions)),
        None => (0..a.n_ions).map(|k| 1.0 + 0.25 * k as f64).collect(),
    };
    let spec = CaseSpec::new(case, a.field, vec![a.ion; a.n_ions], lambdas).with_n_max(a.n_max);
    let t_max = a.tmax.unwrap_or(4.0 * PI);
    if !(t_max > 0.0) || !t_max.is_finite() {
        return invalid("--tmax must be finite and > 0");
    }
    let times: Vec<f64> = (1..=a.points).map(|i| t_max * i as f64 / a.points as f64).collect();

    let form = ClosedForm::new(&spec)?;
    let numeric = numeric_entropies(&spec, &times, DEFAULT_DIM_CAP)?;

    let mut columns = vec!["time".to_string()];
    let names: Vec<String> = std::iter::once("field".to_string())
        .chain((1..=a.n_ions).map(|k| format!("ion{k}")))
        .collect();
    for n in &names {
        columns.extend([format!("S_closed_{n}"), format!("S_numeric_{n}"), format!("diff_{n}")]);
    }
    let mut table = CsvTable::new(columns);
    table.comment("sim compare: closed-form vs brute-force linear entropies");
    table.comment(describe_spec("compare", &spec, &form));
    table.comment(format!("time grid: {} points in (0, {t_max}], tol = {}", a.points, a.tol));
    let mut worst: f64 = 0.0;
    for (i, &t) in times.iter().enumerate() {
        let (cf_field, cf_ions) = form.all_entropies(t);
        let mut row = vec![t];
        let closed = std::iter::once(cf_field).chain(cf_ions);
        let nums = std::iter::once(numeric.field[i]).chain(numeric.ions.iter().map(|c| c[i]));
        for (c, n) in closed.zip(nums) {
            let d = (c - n).abs();
            worst = worst.max(d);
            row.extend([c, n, d]);
        }
        table.push(row);
    }
    table.footer(format!("max deviation = {}", num(worst)));
    let out = a.out.clone().unwrap_or_else(|| PathBuf::from(format!("compare_{}.csv", case.label())));
    write_atomic(&out, &table.render())?;
    println!("max deviation = {} (tol {}), wrote {}", num(worst), a.tol, out.display());
    if worst > a.tol {
        return Err(SimError::Tolerance(format!("max deviation {worst:.3e} exceeds {:.3e}", a.tol)));
    }
    Ok(EXIT_OK)
}
