use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use dicke_engine::baths::{BathLabel, BathSpec, SpectralModel};
use dicke_engine::engine::{MachineConfig, SinusoidalEngine};
use dicke_engine::floquet::{
    floquet_weights_numeric_with_tol, sinusoidal_weights_approx, FloquetWeights, ModulationSpec, DEFAULT_GRID_POINTS,
    DEFAULT_Q_MAX, DEFAULT_TRUNCATION_TOL,
};
use dicke_engine::oracle::{DEFAULT_MAX_STEPS, DEFAULT_TOLERANCE};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumKind {
    /// Cold bath only below ω₀, hot bath only above, G given directly.
    #[default]
    Separated,
    /// G(ω) = γ₀(n̄ + 1) on (0, flat_omega_max].
    Flat,
    /// Two-column CSV files (ω/ω₀, G) per bath.
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "snake_case")]
pub enum WeightsKind {
    #[default]
    TwoSideband,
    Numeric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

/// Every tunable parameter of every subcommand. Unset optional values are
/// filled from the command's preset before anything runs, so the echoed
/// configuration is always complete.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Settings {
    pub n_atoms: Option<u64>,
    pub omega0: Option<f64>,
    pub drive: Option<f64>,
    pub depth: Option<f64>,
    pub beta_cold: Option<f64>,
    pub beta_hot: Option<f64>,
    pub coupling_cold: Option<f64>,
    pub coupling_hot: Option<f64>,
    pub spectrum: SpectrumKind,
    pub flat_omega_max: f64,
    pub weights: WeightsKind,
    pub modulation_table: Option<PathBuf>,
    pub cold_spectrum_table: Option<PathBuf>,
    pub hot_spectrum_table: Option<PathBuf>,
    pub q_max: u32,
    pub grid_points: usize,
    pub tol: f64,
    /// "3/2:0.5,1/2:0.5"; the maximal spin when unset.
    pub spin_weights: Option<String>,
    pub initial_state: String,
    pub gamma_d: f64,
    pub oracle_tol: f64,
    pub max_steps: usize,
    pub x_min: Option<f64>,
    pub x_max: Option<f64>,
    pub x_h_min: f64,
    pub x_h_max: Option<f64>,
    pub points: usize,
    pub scale: Option<Scale>,
    pub n_values: Option<Vec<u64>>,
    pub rate: f64,
    pub dt: f64,
    pub t_final: f64,
    pub sample_every: usize,
    pub jobs: usize,
    pub format: Format,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            n_atoms: None,
            omega0: None,
            drive: None,
            depth: None,
            beta_cold: None,
            beta_hot: None,
            coupling_cold: None,
            coupling_hot: None,
            spectrum: SpectrumKind::Separated,
            flat_omega_max: 10.0,
            weights: WeightsKind::TwoSideband,
            modulation_table: None,
            cold_spectrum_table: None,
            hot_spectrum_table: None,
            q_max: DEFAULT_Q_MAX,
            grid_points: DEFAULT_GRID_POINTS,
            tol: DEFAULT_TRUNCATION_TOL,
            spin_weights: None,
            initial_state: "symmetric".into(),
            gamma_d: 1.0,
            oracle_tol: DEFAULT_TOLERANCE,
            max_steps: DEFAULT_MAX_STEPS,
            x_min: None,
            x_max: None,
            x_h_min: 1e-4,
            x_h_max: None,
            points: 200,
            scale: None,
            n_values: None,
            rate: 1.0,
            dt: 4e-3,
            t_final: 1.5,
            sample_every: 2,
            jobs: 0,
            format: Format::Csv,
        }
    }
}

/// Per-command defaults for the optional settings.
#[derive(Debug, Clone)]
pub struct Preset {
    pub engine: SinusoidalEngine,
    pub n_atoms: u64,
    pub x_range: (f64, f64),
    pub scale: Scale,
    pub x_h_max: f64,
    pub n_values: Vec<u64>,
}

impl Default for Preset {
    fn default() -> Self {
        Self {
            engine: SinusoidalEngine::figure6(0.4),
            n_atoms: 2,
            x_range: (1e-3, 10.0),
            scale: Scale::Log,
            x_h_max: 2.0,
            n_values: vec![2, 3, 10, 100],
        }
    }
}

impl Settings {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))
    }

    /// Applies a `key=value` override; the value is read as JSON when it
    /// parses and as a string otherwise.
    pub fn set(&mut self, assignment: &str) -> Result<(), CliError> {
        let (key, raw) = assignment
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("expected KEY=VALUE, got '{assignment}'")))?;
        let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        let mut map = match serde_json::to_value(&*self) {
            Ok(Value::Object(m)) => m,
            _ => unreachable!("settings serialize to an object"),
        };
        if !map.contains_key(key.trim()) {
            return Err(CliError::Config(format!("unknown setting '{key}'")));
        }
        map.insert(key.trim().to_string(), value);
        *self = serde_json::from_value(Value::Object(map)).map_err(|e| CliError::Config(format!("{key}: {e}")))?;
        Ok(())
    }

    pub fn fill(&mut self, preset: &Preset) {
        let e = &preset.engine;
        self.n_atoms.get_or_insert(preset.n_atoms);
        self.omega0.get_or_insert(e.omega0);
        self.drive.get_or_insert(e.drive);
        self.depth.get_or_insert(e.depth);
        self.beta_cold.get_or_insert(e.beta_cold);
        self.beta_hot.get_or_insert(e.beta_hot);
        self.coupling_cold.get_or_insert(e.coupling_cold);
        self.coupling_hot.get_or_insert(e.coupling_hot);
        self.x_min.get_or_insert(preset.x_range.0);
        self.x_max.get_or_insert(preset.x_range.1);
        self.x_h_max.get_or_insert(preset.x_h_max);
        self.scale.get_or_insert(preset.scale);
        self.n_values.get_or_insert_with(|| preset.n_values.clone());
    }

    pub fn n(&self) -> u64 {
        self.n_atoms.unwrap_or(2)
    }

    pub fn engine(&self) -> SinusoidalEngine {
        let d = SinusoidalEngine::figure6(0.4);
        SinusoidalEngine {
            omega0: self.omega0.unwrap_or(d.omega0),
            drive: self.drive.unwrap_or(d.drive),
            depth: self.depth.unwrap_or(d.depth),
            beta_cold: self.beta_cold.unwrap_or(d.beta_cold),
            beta_hot: self.beta_hot.unwrap_or(d.beta_hot),
            coupling_cold: self.coupling_cold.unwrap_or(d.coupling_cold),
            coupling_hot: self.coupling_hot.unwrap_or(d.coupling_hot),
        }
    }

    pub fn modulation(&self) -> Result<ModulationSpec, CliError> {
        match &self.modulation_table {
            Some(path) => Ok(ModulationSpec::tabulated_from_file(path)?),
            None => {
                let e = self.engine();
                Ok(ModulationSpec::sinusoidal(e.omega0, e.depth, e.drive)?)
            }
        }
    }

    pub fn floquet_weights(&self, modulation: &ModulationSpec) -> Result<FloquetWeights, CliError> {
        let two_sideband = self.weights == WeightsKind::TwoSideband && self.modulation_table.is_none();
        if two_sideband {
            let e = self.engine();
            Ok(sinusoidal_weights_approx(e.depth, e.drive)?)
        } else {
            Ok(floquet_weights_numeric_with_tol(modulation, self.q_max, self.grid_points, self.tol)?)
        }
    }

    fn bath(&self, label: BathLabel, omega0: f64) -> Result<BathSpec, CliError> {
        let e = self.engine();
        let (beta, coupling, table) = match label {
            BathLabel::Cold => (e.beta_cold, e.coupling_cold, &self.cold_spectrum_table),
            BathLabel::Hot => (e.beta_hot, e.coupling_hot, &self.hot_spectrum_table),
        };
        let model = match self.spectrum {
            SpectrumKind::Separated => SpectralModel::SpectrallySeparated {
                magnitude: coupling,
                edge: omega0,
            },
            SpectrumKind::Flat => SpectralModel::Flat {
                gamma0: coupling,
                omega_min: 0.0,
                omega_max: self.flat_omega_max * omega0,
            },
            SpectrumKind::Table => {
                let path = table
                    .as_ref()
                    .ok_or_else(|| CliError::Config(format!("spectrum = table needs {label}_spectrum_table")))?;
                let file = std::fs::File::open(path)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
                SpectralModel::tabulated_from_reader(file, omega0)?
            }
        };
        Ok(BathSpec::new(label, beta, model)?)
    }

    /// Machine of `n_atoms` atoms, with weight truncation at `tol`.
    pub fn machine(&self, n_atoms: u64) -> Result<MachineConfig, CliError> {
        let modulation = self.modulation()?;
        let weights = self.floquet_weights(&modulation)?;
        let omega0 = modulation.omega0;
        let mut cfg = MachineConfig::new(
            n_atoms,
            modulation,
            weights,
            self.bath(BathLabel::Cold, omega0)?,
            self.bath(BathLabel::Hot, omega0)?,
        )?;
        cfg.weight_tolerance = self.tol;
        Ok(cfg)
    }

    /// Sweep axis from the resolved x range.
    pub fn x_grid(&self) -> Result<Vec<f64>, CliError> {
        let (lo, hi) = (self.x_min.unwrap_or(1e-3), self.x_max.unwrap_or(10.0));
        grid(lo, hi, self.points, self.scale.unwrap_or_default())
    }

    pub fn x_h_grid(&self) -> Result<Vec<f64>, CliError> {
        grid(self.x_h_min, self.x_h_max.unwrap_or(2.0), self.points, Scale::Linear)
    }

    /// Flat `key = value` view of the resolved settings.
    pub fn echo(&self) -> Vec<(String, String)> {
        let Ok(Value::Object(map)) = serde_json::to_value(self) else {
            return Vec::new();
        };
        map.into_iter()
            .map(|(k, v)| {
                let v = match v {
                    Value::String(s) => s,
                    Value::Null => "unset".into(),
                    other => other.to_string(),
                };
                (k, v)
            })
            .collect()
    }
}

pub fn grid(lo: f64, hi: f64, points: usize, scale: Scale) -> Result<Vec<f64>, CliError> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(CliError::Config(format!("sweep bounds [{lo}, {hi}] must be finite and ordered")));
    }
    if points < 2 {
        return Err(CliError::Config(format!("a sweep needs at least 2 points, got {points}")));
    }
    let last = (points - 1) as f64;
    match scale {
        Scale::Linear => Ok((0..points).map(|k| lo + (hi - lo) * k as f64 / last).collect()),
        Scale::Log => {
            if lo <= 0.0 {
                return Err(CliError::Config(format!("log sweep needs a positive lower bound, got {lo}")));
            }
            let (a, b) = (lo.ln(), hi.ln());
            Ok((0..points).map(|k| (a + (b - a) * k as f64 / last).exp()).collect())
        }
    }
}
