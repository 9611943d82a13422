//! Floquet sideband weights P(q) of a periodic frequency modulation ω(t).
//!
//! P(q) = |τ⁻¹ ∫₀^τ exp(iΦ(t)) e^{−iqΩt} dt|² with Φ(t) = ∫₀^t (ω(s) − ω₀) ds.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Read;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::table;

pub const DEFAULT_Q_MAX: u32 = 8;
pub const DEFAULT_GRID_POINTS: usize = 4096;
pub const DEFAULT_TRUNCATION_TOL: f64 = 1e-10;
pub const MIN_GRID_POINTS: usize = 64;
/// Above this g/Ω the two-sideband approximation is flagged.
pub const APPROX_WARNING_RATIO: f64 = 0.2;
const MEAN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum ModulationForm {
    Constant,
    /// ω(t) = ω₀ + g sin(Ωt)
    Sinusoidal { depth: f64, drive: f64 },
    /// Piecewise-linear ω(t) through samples spanning exactly one period,
    /// first time 0 and last time τ.
    Tabulated { times: Vec<f64>, omegas: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModulationSpec {
    pub omega0: f64,
    pub form: ModulationForm,
}

impl ModulationSpec {
    pub fn constant(omega0: f64) -> Self {
        Self {
            omega0,
            form: ModulationForm::Constant,
        }
    }

    pub fn sinusoidal(omega0: f64, depth: f64, drive: f64) -> Result<Self> {
        let spec = Self {
            omega0,
            form: ModulationForm::Sinusoidal { depth, drive },
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Builds a tabulated modulation whose ω₀ is the period average of the
    /// piecewise-linear interpolant.
    pub fn tabulated(samples: &[(f64, f64)]) -> Result<Self> {
        let (times, omegas): (Vec<f64>, Vec<f64>) = samples.iter().copied().unzip();
        check_samples(&times)?;
        let period = times[times.len() - 1];
        let integral: f64 = times
            .windows(2)
            .zip(omegas.windows(2))
            .map(|(t, w)| 0.5 * (t[1] - t[0]) * (w[0] + w[1]))
            .sum();
        let spec = Self {
            omega0: integral / period,
            form: ModulationForm::Tabulated { times, omegas },
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn tabulated_from_reader<R: Read>(reader: R) -> Result<Self> {
        Self::tabulated(&table::read_two_column(reader)?)
    }

    pub fn tabulated_from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::tabulated(&table::read_two_column_file(path)?)
    }

    /// Drive angular frequency Ω, undefined for a constant frequency.
    pub fn drive(&self) -> Option<f64> {
        match &self.form {
            ModulationForm::Constant => None,
            ModulationForm::Sinusoidal { drive, .. } => Some(*drive),
            ModulationForm::Tabulated { times, .. } => Some(2.0 * PI / times[times.len() - 1]),
        }
    }

    pub fn period(&self) -> Option<f64> {
        self.drive().map(|d| 2.0 * PI / d)
    }

    /// Period average of ω(t).
    pub fn mean_frequency(&self) -> f64 {
        match &self.form {
            ModulationForm::Constant | ModulationForm::Sinusoidal { .. } => self.omega0,
            ModulationForm::Tabulated { times, omegas } => {
                let period = times[times.len() - 1];
                times
                    .windows(2)
                    .zip(omegas.windows(2))
                    .map(|(t, w)| 0.5 * (t[1] - t[0]) * (w[0] + w[1]))
                    .sum::<f64>()
                    / period
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega0 > 0.0 && self.omega0.is_finite()) {
            return Err(Error::InvalidConfiguration(format!("omega0 = {} must be positive", self.omega0)));
        }
        match &self.form {
            ModulationForm::Constant => {}
            ModulationForm::Sinusoidal { depth, drive } => {
                if !(*depth >= 0.0 && depth.is_finite()) {
                    return Err(Error::InvalidConfiguration(format!("modulation depth {depth} must be non-negative")));
                }
                if !(*drive > 0.0 && drive.is_finite()) {
                    return Err(Error::InvalidConfiguration(format!("drive frequency {drive} must be positive")));
                }
            }
            ModulationForm::Tabulated { times, .. } => check_samples(times)?,
        }
        let mean = self.mean_frequency();
        if (mean - self.omega0).abs() > MEAN_TOL * self.omega0.max(1.0) {
            return Err(Error::InvalidConfiguration(format!(
                "period-averaged frequency {mean} differs from omega0 = {}",
                self.omega0
            )));
        }
        Ok(())
    }

    /// Soft conditions 0 ≤ g ≪ Ω ≤ ω₀ that the sinusoidal machine assumes.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let ModulationForm::Sinusoidal { depth, drive } = self.form {
            if depth > APPROX_WARNING_RATIO * drive {
                out.push(format!("modulation depth g = {depth} is not small compared to drive {drive}"));
            }
            if drive > self.omega0 {
                out.push(format!("drive {drive} exceeds omega0 = {}", self.omega0));
            }
        }
        out
    }

    /// Accumulated phase Φ(t) = ∫₀^t (ω(s) − ω₀) ds.
    fn phase(&self, t: f64) -> f64 {
        match &self.form {
            ModulationForm::Constant => 0.0,
            ModulationForm::Sinusoidal { depth, drive } => depth / drive * (1.0 - (drive * t).cos()),
            ModulationForm::Tabulated { times, omegas } => {
                let mut acc = 0.0;
                for i in 0..times.len() - 1 {
                    let (t0, t1) = (times[i], times[i + 1]);
                    let (w0, w1) = (omegas[i] - self.omega0, omegas[i + 1] - self.omega0);
                    let slope = (w1 - w0) / (t1 - t0);
                    if t <= t1 {
                        let dt = t - t0;
                        return acc + w0 * dt + 0.5 * slope * dt * dt;
                    }
                    acc += 0.5 * (t1 - t0) * (w0 + w1);
                }
                acc
            }
        }
    }
}

fn check_samples(times: &[f64]) -> Result<()> {
    if times.len() < 2 {
        return Err(Error::InvalidConfiguration("tabulated modulation needs at least two samples".into()));
    }
    if times[0] != 0.0 {
        return Err(Error::InvalidConfiguration("tabulated modulation must start at t = 0".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidConfiguration("sample times must be strictly increasing".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct FloquetWeights {
    weights: BTreeMap<i32, f64>,
    q_max: u32,
    residual: f64,
    warning: Option<String>,
}

impl FloquetWeights {
    /// Weights of an unmodulated transition, P(0) = 1.
    pub fn unmodulated() -> Self {
        Self {
            weights: BTreeMap::from([(0, 1.0)]),
            q_max: 0,
            residual: 0.0,
            warning: None,
        }
    }

    /// Builds weights from explicit values; the residual is 1 − Σ P(q).
    pub fn from_values(values: impl IntoIterator<Item = (i32, f64)>) -> Result<Self> {
        let weights: BTreeMap<i32, f64> = values.into_iter().collect();
        if weights.is_empty() {
            return Err(Error::InvalidArgument("no sideband weights given".into()));
        }
        if let Some((q, p)) = weights.iter().find(|(_, p)| !(**p >= 0.0)) {
            return Err(Error::InvalidArgument(format!("P({q}) = {p} is negative")));
        }
        let q_max = weights.keys().map(|q| q.unsigned_abs()).max().unwrap_or(0);
        let residual = 1.0 - weights.values().sum::<f64>();
        Ok(Self {
            weights,
            q_max,
            residual,
            warning: None,
        })
    }

    pub fn get(&self, q: i32) -> f64 {
        self.weights.get(&q).copied().unwrap_or(0.0)
    }

    /// All retained `(q, P(q))` in ascending q.
    pub fn iter(&self) -> impl Iterator<Item = (i32, f64)> + '_ {
        self.weights.iter().map(|(&q, &p)| (q, p))
    }

    pub fn q_max(&self) -> u32 {
        self.q_max
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn total(&self) -> f64 {
        self.weights.values().sum()
    }

    pub fn warning(&self) -> Option<&str> {
        self.warning.as_deref()
    }
}

pub fn floquet_weights_numeric(spec: &ModulationSpec, q_max: u32, grid_points: usize) -> Result<FloquetWeights> {
    floquet_weights_numeric_with_tol(spec, q_max, grid_points, DEFAULT_TRUNCATION_TOL)
}

/// Evaluates P(q) for |q| ≤ q_max by uniform-grid quadrature over one
/// period. The periodic integrand makes the rectangle rule spectrally
/// accurate for smooth modulations.
pub fn floquet_weights_numeric_with_tol(
    spec: &ModulationSpec,
    q_max: u32,
    grid_points: usize,
    tolerance: f64,
) -> Result<FloquetWeights> {
    spec.validate()?;
    if q_max == 0 {
        return Err(Error::InvalidArgument("q_max must be positive".into()));
    }
    if grid_points < MIN_GRID_POINTS {
        return Err(Error::InvalidArgument(format!(
            "grid_points = {grid_points} is below the minimum {MIN_GRID_POINTS}"
        )));
    }
    let q_range = -(q_max as i32)..=q_max as i32;
    let Some(drive) = spec.drive() else {
        // Φ ≡ 0
        let weights = q_range.map(|q| (q, if q == 0 { 1.0 } else { 0.0 })).collect();
        return Ok(FloquetWeights {
            weights,
            q_max,
            residual: 0.0,
            warning: None,
        });
    };
    let period = 2.0 * PI / drive;
    let h = period / grid_points as f64;
    let phases: Vec<f64> = (0..grid_points).map(|m| spec.phase(m as f64 * h)).collect();

    let weights: BTreeMap<i32, f64> = q_range
        .map(|q| {
            let sum: Complex64 = phases
                .iter()
                .enumerate()
                .map(|(m, &phi)| Complex64::from_polar(1.0, phi - q as f64 * drive * m as f64 * h))
                .sum();
            (q, (sum / grid_points as f64).norm_sqr())
        })
        .collect();
    let residual = 1.0 - weights.values().sum::<f64>();
    if residual > tolerance {
        return Err(Error::Truncation {
            residual,
            tolerance,
            q_max,
        });
    }
    Ok(FloquetWeights {
        weights,
        q_max,
        residual,
        warning: None,
    })
}

/// Two-sideband weights of a weak sinusoidal modulation:
/// P(0) = 1 − (g/Ω)²/2 and P(±1) = (g/2Ω)².
pub fn sinusoidal_weights_approx(depth: f64, drive: f64) -> Result<FloquetWeights> {
    if !(depth >= 0.0 && depth.is_finite()) {
        return Err(Error::InvalidArgument(format!("modulation depth {depth} must be non-negative")));
    }
    if !(drive > 0.0 && drive.is_finite()) {
        return Err(Error::InvalidArgument(format!("drive frequency {drive} must be positive")));
    }
    let ratio = depth / drive;
    let p0 = 1.0 - 0.5 * ratio * ratio;
    let p1 = 0.25 * ratio * ratio;
    let warning = (ratio > APPROX_WARNING_RATIO)
        .then(|| format!("g/Omega = {ratio} exceeds {APPROX_WARNING_RATIO}; two-sideband approximation degrades"));
    Ok(FloquetWeights {
        weights: BTreeMap::from([(-1, p1), (0, p0), (1, p1)]),
        q_max: 1,
        residual: 1.0 - p0 - 2.0 * p1,
        warning,
    })
}
