use std::collections::BTreeMap;

use rayon::prelude::*;

use dicke_engine::baths::SidebandRates;
use dicke_engine::density::DensityMatrix;
use dicke_engine::engine::{
    amplification, boost_limits, currents_for_spin, effective_from_rates, power_ratio, saturation_boost,
    weighted_currents, EnergyCurrents, SinusoidalEngine,
};
use dicke_engine::floquet::ModulationForm;
use dicke_engine::lindblad::Representation;
use dicke_engine::oracle::{dephasing_currents, run_oracle, superradiant_transient, OracleOptions};
use dicke_engine::spin::{decompose, subspace_weights, symmetric_state, SpinQuantumNumber};

use crate::error::CliError;
use crate::settings::{Preset, Scale, Settings, WeightsKind};
use crate::table::{Cell, Table};

pub const ORACLE_REL_TOL: f64 = 1e-5;
pub const DARK_ABS_TOL: f64 = 1e-10;
/// Closed-form currents below this count as a dark state.
pub const DARK_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Figure {
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
}

impl Figure {
    pub fn preset(self) -> Preset {
        let base = Preset::default();
        match self {
            Figure::Fig3 => Preset {
                x_range: (1e-4, 5.0),
                scale: Scale::Linear,
                n_atoms: 3,
                ..base
            },
            Figure::Fig4 => Preset {
                x_range: (1e-2, 5.0),
                scale: Scale::Log,
                n_values: vec![2, 3, 4, 5, 10, 20, 50, 100],
                ..base
            },
            Figure::Fig5 => Preset {
                x_range: (1e-2, 10.0),
                scale: Scale::Log,
                n_values: vec![5, 10, 50, 100],
                ..base
            },
            Figure::Fig6 => Preset {
                n_atoms: 100,
                x_h_max: 2.0,
                ..base
            },
            Figure::Fig7 => Preset {
                engine: SinusoidalEngine::figure7(0.4),
                n_atoms: 100,
                x_h_max: 0.1,
                ..base
            },
        }
    }
}

/// Evaluates `f` over `points` on the current rayon pool, keeping input order.
fn sweep<T, R, F>(points: &[T], f: F) -> Result<Vec<R>, CliError>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R, CliError> + Sync + Send,
{
    points.par_iter().map(f).collect()
}

fn currents_cells(c: &EnergyCurrents) -> Vec<Cell> {
    vec![
        c.j_cold.into(),
        c.j_hot.into(),
        c.power.into(),
        c.efficiency.unwrap_or(f64::NAN).into(),
        c.mode.to_string().into(),
    ]
}

pub fn parse_spin_weights(text: &str) -> Result<BTreeMap<SpinQuantumNumber, f64>, CliError> {
    text.split(',')
        .map(|part| {
            let (j, w) = part
                .split_once(':')
                .ok_or_else(|| CliError::Config(format!("spin weight '{part}' is not j:weight")))?;
            let j: SpinQuantumNumber = j.trim().parse().map_err(|e| CliError::Config(format!("{e}")))?;
            let w: f64 = w.trim().parse().map_err(|_| CliError::Config(format!("bad weight in '{part}'")))?;
            Ok((j, w))
        })
        .collect()
}

/// `symmetric[:k]`, `excited`, `ground`, `product:<e|g...>`, `singlet`, `mixed`.
pub fn parse_initial_state(text: &str, n_atoms: u64) -> Result<DensityMatrix, CliError> {
    let (kind, arg) = match text.split_once(':') {
        Some((k, a)) => (k, Some(a)),
        None => (text, None),
    };
    let n = n_atoms as usize;
    let state = match (kind, arg) {
        ("symmetric", None) => DensityMatrix::from_pure(&symmetric_state(n_atoms, n_atoms.div_ceil(2))?)?,
        ("symmetric", Some(k)) => {
            let k: u64 = k.parse().map_err(|_| CliError::Config(format!("bad excitation number '{k}'")))?;
            DensityMatrix::from_pure(&symmetric_state(n_atoms, k)?)?
        }
        ("excited", None) => DensityMatrix::product_state(&vec![true; n])?,
        ("ground", None) => DensityMatrix::product_state(&vec![false; n])?,
        ("product", Some(bits)) => {
            let excited: Vec<bool> = bits
                .chars()
                .map(|c| match c {
                    'e' => Ok(true),
                    'g' => Ok(false),
                    _ => Err(CliError::Config(format!("product state '{bits}' must use e and g"))),
                })
                .collect::<Result<_, _>>()?;
            if excited.len() != n {
                return Err(CliError::Config(format!("product state '{bits}' does not have {n} atoms")));
            }
            DensityMatrix::product_state(&excited)?
        }
        ("singlet", None) if n == 2 => DensityMatrix::singlet(),
        ("singlet", None) => return Err(CliError::Config("the singlet state needs n_atoms = 2".into())),
        ("mixed", None) => DensityMatrix::maximally_mixed(1 << n),
        _ => return Err(CliError::Config(format!("unknown initial state '{text}'"))),
    };
    Ok(state)
}

pub fn decompose_table(n_atoms: u64) -> Result<Table, CliError> {
    let d = decompose(n_atoms)?;
    let mut t = Table::new(&["j", "multiplicity", "dimension", "total_dimension"]);
    for s in &d.sectors {
        let dim = s.spin.dim();
        t.push(vec![
            s.spin.to_string().into(),
            s.multiplicity.to_string().into(),
            (dim as i64).into(),
            (&s.multiplicity * dim).to_string().into(),
        ]);
    }
    t.meta("total_dimension", d.total_dimension());
    t.meta("block_count", d.block_count());
    Ok(t)
}

pub fn pq_weights_table(s: &Settings) -> Result<Table, CliError> {
    let modulation = s.modulation()?;
    let weights = s.floquet_weights(&modulation)?;
    let mut t = Table::new(&["q", "p"]);
    for (q, p) in weights.iter() {
        t.push(vec![(q as i64).into(), p.into()]);
    }
    t.meta("omega0", modulation.omega0);
    t.meta("drive", modulation.drive().unwrap_or(0.0));
    t.meta(
        "source",
        match (&modulation.form, s.weights) {
            (ModulationForm::Sinusoidal { .. }, WeightsKind::TwoSideband) => "sinusoid, two-sideband approximation",
            (ModulationForm::Sinusoidal { .. }, WeightsKind::Numeric) => "sinusoid, quadrature",
            (ModulationForm::Tabulated { .. }, _) => "table, quadrature",
            (ModulationForm::Constant, _) => "constant",
        },
    );
    t.meta("residual", weights.residual());
    for w in modulation.warnings().into_iter().chain(weights.warning().map(str::to_string)) {
        t.meta("warning", w);
    }
    Ok(t)
}

pub fn beta_eff_table(s: &Settings) -> Result<Table, CliError> {
    let cfg = s.machine(s.n())?;
    let rates = cfg.rates()?;
    let eff = effective_from_rates(&rates)?;
    let mut t = Table::new(&["bath", "q", "frequency", "weight", "spectrum", "emission", "absorption"]);
    for c in &rates.channels {
        t.push(vec![
            c.bath.to_string().into(),
            (c.q as i64).into(),
            c.frequency.into(),
            c.weight.into(),
            c.spectrum.into(),
            c.emission.into(),
            c.absorption.into(),
        ]);
    }
    t.meta("x_eff", eff.x_eff);
    t.meta("beta_eff", eff.x_eff / cfg.omega0);
    t.meta("boltzmann_factor", eff.boltzmann_factor);
    Ok(t)
}

pub fn currents_table(s: &Settings) -> Result<Table, CliError> {
    let n = s.n();
    let cfg = s.machine(n)?;
    let cfg = match &s.spin_weights {
        Some(text) => cfg.with_subspace_weights(parse_spin_weights(text)?)?,
        None => cfg,
    };
    let rates = cfg.rates()?;
    let eff = effective_from_rates(&rates)?;
    let mut t = Table::new(&["j", "weight", "amplification", "j_cold", "j_hot", "power", "efficiency", "mode"]);
    for (&j, &w) in &cfg.subspace_weights {
        let c = currents_for_spin(j, &rates, &eff);
        let mut row = vec![j.to_string().into(), w.into(), amplification(j, eff.x_eff).into()];
        row.extend(currents_cells(&c));
        t.push(row);
    }
    let total = weighted_currents(&cfg.subspace_weights, &rates, &eff);
    let mut row = vec!["total".into(), 1.0.into(), f64::NAN.into()];
    row.extend(currents_cells(&total));
    t.push(row);
    t.meta("x_eff", eff.x_eff);
    t.meta("boltzmann_factor", eff.boltzmann_factor);
    Ok(t)
}

pub fn boost_table(s: &Settings) -> Result<Table, CliError> {
    let xs = s.x_grid()?;
    let ns = s.n_values.clone().unwrap_or_default();
    let points: Vec<(u64, f64)> = ns.iter().flat_map(|&n| xs.iter().map(move |&x| (n, x))).collect();
    let rows = sweep(&points, |&(n, x)| {
        Ok(vec![
            (n as i64).into(),
            x.into(),
            power_ratio(n, x).into(),
            saturation_boost(x)?.into(),
            boost_limits(n).1.into(),
        ])
    })?;
    let mut t = Table::new(&["n_atoms", "x_eff", "power_ratio", "saturation", "high_temperature_limit"]);
    rows.into_iter().for_each(|r| t.push(r));
    Ok(t)
}

fn fig3(s: &Settings) -> Result<Table, CliError> {
    const PI1: [f64; 6] = [1.0, 0.8, 0.6, 0.5, 0.3, 0.0];
    let xs = s.x_grid()?;
    let rows = sweep(&xs, |&x| {
        let single = amplification(SpinQuantumNumber::HALF, x);
        let quartet = amplification(SpinQuantumNumber::from_twice(3), x);
        let mut row: Vec<Cell> = vec![x.into()];
        row.extend(PI1.iter().map(|&p| ((p * quartet + (1.0 - p) * single) / single).into()));
        row.push(3.0.into());
        Ok(row)
    })?;
    let mut t = Table::new(&["x_eff", "pi1_1", "pi1_0.8", "pi1_0.6", "pi1_0.5", "pi1_0.3", "pi1_0", "independent"]);
    rows.into_iter().for_each(|r| t.push(r));
    t.meta("quantity", "three-atom power over single-atom power");
    Ok(t)
}

fn fig4(s: &Settings) -> Result<Table, CliError> {
    let mut t = boost_table(s)?;
    t.meta("quantity", "collective over independent power");
    Ok(t)
}

fn fig5(s: &Settings) -> Result<Table, CliError> {
    let xs = s.x_grid()?;
    let ns = s.n_values.clone().unwrap_or_default();
    let rows = sweep(&xs, |&x| {
        let mut row: Vec<Cell> = vec![x.into()];
        row.extend(ns.iter().map(|&n| power_ratio(n, x).into()));
        row.push(saturation_boost(x)?.into());
        Ok(row)
    })?;
    let mut cols = vec!["x_eff".to_string()];
    cols.extend(ns.iter().map(|n| format!("ratio_n{n}")));
    cols.push("coth_half_x".into());
    let mut t = Table {
        columns: cols,
        ..Table::default()
    };
    rows.into_iter().for_each(|r| t.push(r));
    Ok(t)
}

/// Individual (N independent atoms) and collective (spin N/2) currents
/// against x_h = β_h ħω₀.
fn hot_sweep(s: &Settings) -> Result<Table, CliError> {
    let n = s.n();
    let xs = s.x_h_grid()?;
    let omega0 = s.engine().omega0;
    let rows = sweep(&xs, |&x_h| {
        let mut local = s.clone();
        local.beta_hot = Some(x_h / omega0);
        let rates = local.machine(n)?.rates()?;
        let eff = effective_from_rates(&rates)?;
        let ind = currents_for_spin(SpinQuantumNumber::HALF, &rates, &eff).scaled(n as f64);
        let coll = currents_for_spin(SpinQuantumNumber::maximal(n), &rates, &eff);
        Ok(vec![
            x_h.into(),
            eff.x_eff.into(),
            ind.j_cold.into(),
            ind.j_hot.into(),
            ind.power.into(),
            coll.j_cold.into(),
            coll.j_hot.into(),
            coll.power.into(),
            (coll.power / ind.power).into(),
            coll.mode.to_string().into(),
        ])
    })?;
    let mut t = Table::new(&[
        "x_h",
        "x_eff",
        "j_cold_individual",
        "j_hot_individual",
        "power_individual",
        "j_cold_collective",
        "j_hot_collective",
        "power_collective",
        "power_ratio",
        "mode",
    ]);
    rows.into_iter().for_each(|r| t.push(r));
    t.meta("note", format!("x_h -> 0 endpoint replaced by x_h_min = {}", s.x_h_min));
    if let Ok(b) = s.engine().critical_beta_hot() {
        t.meta("critical_x_h_two_sideband", b * omega0);
    }
    Ok(t)
}

pub fn figure_table(which: Figure, s: &Settings) -> Result<Table, CliError> {
    let mut t = match which {
        Figure::Fig3 => fig3(s)?,
        Figure::Fig4 => fig4(s)?,
        Figure::Fig5 => fig5(s)?,
        Figure::Fig6 | Figure::Fig7 => hot_sweep(s)?,
    };
    t.meta("figure", format!("{which:?}").to_lowercase());
    Ok(t)
}

fn oracle_options(s: &Settings) -> OracleOptions {
    OracleOptions {
        tol: s.oracle_tol,
        max_steps: s.max_steps,
        ..OracleOptions::default()
    }
}

/// Rates rescaled so the strongest emission is 1; returns the scale removed.
fn unit_rates(rates: &SidebandRates) -> Result<(SidebandRates, f64), CliError> {
    let max = rates.channels.iter().map(|c| c.emission).fold(0.0, f64::max);
    if !(max > 0.0) {
        return Err(dicke_engine::Error::NoCoupling.into());
    }
    Ok((rates.scaled(1.0 / max), max))
}

fn quantities(c: &EnergyCurrents) -> [(&'static str, f64); 3] {
    [("j_cold", c.j_cold), ("j_hot", c.j_hot), ("power", c.power)]
}

/// Table plus a verification failure message when a tolerance is exceeded.
pub type Checked = (Table, Option<String>);

pub fn oracle_compare_table(s: &Settings) -> Result<Checked, CliError> {
    let n = s.n();
    let rho0 = parse_initial_state(&s.initial_state, n)?;
    let rates = s.machine(n)?.rates()?;
    let (unit, scale) = unit_rates(&rates)?;
    let eff = effective_from_rates(&rates)?;
    let weights = subspace_weights(&rho0, n)?;
    let closed = weighted_currents(&weights, &rates, &eff);
    let oracle = run_oracle(&Representation::FullCollective { n_atoms: n }, &unit, &rho0, &oracle_options(s))?;
    let measured = oracle.currents.scaled(scale);

    let dark = closed.max_abs() < DARK_THRESHOLD * scale.max(f64::MIN_POSITIVE);
    let mut t = Table::new(&["quantity", "closed_form", "oracle", "abs_error", "rel_error", "status"]);
    let mut failed = Vec::new();
    for ((name, a), (_, b)) in quantities(&closed).into_iter().zip(quantities(&measured)) {
        let abs = (a - b).abs();
        let rel = abs / a.abs();
        let ok = if dark { abs / scale < DARK_ABS_TOL } else { rel < ORACLE_REL_TOL };
        if !ok {
            failed.push(name);
        }
        t.push(vec![name.into(), a.into(), b.into(), abs.into(), rel.into(), if ok { "pass" } else { "fail" }.into()]);
    }
    t.meta("initial_state", &s.initial_state);
    for (j, w) in &weights {
        t.meta(format!("weight_j={j}"), w);
    }
    t.meta("x_eff", eff.x_eff);
    t.meta("rate_scale", scale);
    t.meta("oracle_steps", oracle.steps);
    t.meta("oracle_residual", oracle.final_residual);
    t.meta("criterion", if dark { format!("abs < {DARK_ABS_TOL:e} (dark)") } else { format!("rel < {ORACLE_REL_TOL:e}") });
    let failure = (!failed.is_empty()).then(|| format!("oracle and closed form disagree on {}", failed.join(", ")));
    Ok((t, failure))
}

pub fn dephasing_table(s: &Settings) -> Result<Checked, CliError> {
    let n = s.n();
    let rho0 = parse_initial_state(&s.initial_state, n)?;
    let rates = s.machine(n)?.rates()?;
    let (unit, scale) = unit_rates(&rates)?;
    let opts = oracle_options(s);
    let dephased = dephasing_currents(n, &unit, s.gamma_d, &rho0, &opts)?;
    let single = run_oracle(&Representation::FullCollective { n_atoms: 1 }, &unit, &DensityMatrix::maximally_mixed(2), &opts)?;
    let d = dephased.currents.scaled(scale);
    let ind = single.currents.scaled(scale * n as f64);
    let verify = s.gamma_d > 0.0;

    let mut t = Table::new(&["quantity", "dephased", "independent", "ratio", "rel_error", "status"]);
    let mut failed = Vec::new();
    for ((name, a), (_, b)) in quantities(&d).into_iter().zip(quantities(&ind)) {
        let rel = (a - b).abs() / b.abs();
        let status = if !verify {
            "collective"
        } else if rel < ORACLE_REL_TOL {
            "pass"
        } else {
            failed.push(name);
            "fail"
        };
        t.push(vec![name.into(), a.into(), b.into(), (a / b).into(), rel.into(), status.into()]);
    }
    t.meta("initial_state", &s.initial_state);
    t.meta("gamma_d_units", "largest emission rate");
    t.meta("rate_scale", scale);
    t.meta("regime", if verify { "dephased" } else { "collective" });
    let failure = (!failed.is_empty()).then(|| format!("dephased currents differ from {n} independent atoms on {}", failed.join(", ")));
    Ok((t, failure))
}

pub fn transient_table(s: &Settings) -> Result<Table, CliError> {
    let n = s.n();
    let tr = superradiant_transient(n, s.rate, s.dt, s.t_final, s.sample_every)?;
    let mut t = Table::new(&["t", "jz", "emission", "residual"]);
    for p in &tr.points {
        t.push(vec![p.t.into(), p.jz.into(), p.emission.into(), p.residual.into()]);
    }
    let initial = tr.initial_emission();
    t.meta("initial_emission", initial);
    if let Some(peak) = tr.peak() {
        t.meta("peak_emission", peak.emission);
        t.meta("peak_time", peak.t);
        t.meta("peak_over_initial", peak.emission / initial);
    }
    Ok(t)
}
