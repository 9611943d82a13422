//! Heat baths and the per-sideband emission/absorption rates.
//!
//! Units: ħ = 1. Inverse temperatures are in units of 1/energy, so with the
//! usual choice ω₀ = 1 the value of `beta` is the dimensionless x = βħω₀.

use std::fmt;
use std::io::Read;

use crate::error::{Error, Result};
use crate::floquet::{FloquetWeights, DEFAULT_TRUNCATION_TOL};
use crate::table;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BathLabel {
    Cold,
    Hot,
}

impl fmt::Display for BathLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BathLabel::Cold => "cold",
            BathLabel::Hot => "hot",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpectralModel {
    /// The bath does not couple at any frequency.
    Decoupled,
    /// Bosonic bath with constant spontaneous rate γ₀ on [omega_min, omega_max]:
    /// G(ω) = γ₀ (n̄(ω) + 1) inside the band, zero outside.
    Flat {
        gamma0: f64,
        omega_min: f64,
        omega_max: f64,
    },
    /// Step spectrum that only couples on the bath's side of `edge`: a cold
    /// bath responds below the edge, a hot bath above it. At the edge itself
    /// both vanish. `magnitude` is the value of G itself.
    SpectrallySeparated { magnitude: f64, edge: f64 },
    /// Linear interpolation through `(ω, G)` points.
    Tabulated { omegas: Vec<f64>, values: Vec<f64> },
}

impl SpectralModel {
    pub fn tabulated(points: &[(f64, f64)]) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidConfiguration("tabulated spectrum needs at least two points".into()));
        }
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidConfiguration("spectrum frequencies must be strictly increasing".into()));
        }
        if let Some(&(w, g)) = points.iter().find(|(_, g)| *g < 0.0) {
            return Err(Error::InvalidConfiguration(format!("negative spectrum G({w}) = {g}")));
        }
        let (omegas, values) = points.iter().copied().unzip();
        Ok(SpectralModel::Tabulated { omegas, values })
    }

    /// Reads a two-column CSV of (ω/ω₀, G) and rescales frequencies by `omega0`.
    pub fn tabulated_from_reader<R: Read>(reader: R, omega0: f64) -> Result<Self> {
        let rows: Vec<(f64, f64)> = table::read_two_column(reader)?
            .into_iter()
            .map(|(w, g)| (w * omega0, g))
            .collect();
        Self::tabulated(&rows)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BathSpec {
    pub label: BathLabel,
    pub beta: f64,
    pub model: SpectralModel,
}

impl BathSpec {
    pub fn new(label: BathLabel, beta: f64, model: SpectralModel) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidConfiguration(format!("{label} bath: beta = {beta} must be positive")));
        }
        match &model {
            SpectralModel::Flat { gamma0, omega_min, omega_max } => {
                if *gamma0 < 0.0 || omega_min > omega_max {
                    return Err(Error::InvalidConfiguration(format!("{label} bath: invalid flat band")));
                }
            }
            SpectralModel::SpectrallySeparated { magnitude, edge } => {
                if *magnitude < 0.0 || *edge <= 0.0 {
                    return Err(Error::InvalidConfiguration(format!("{label} bath: invalid step spectrum")));
                }
            }
            SpectralModel::Tabulated { omegas, values } => {
                if omegas.len() != values.len() || values.iter().any(|g| *g < 0.0) {
                    return Err(Error::InvalidConfiguration(format!("{label} bath: invalid tabulated spectrum")));
                }
            }
            SpectralModel::Decoupled => {}
        }
        Ok(Self { label, beta, model })
    }

    /// Step-spectrum bath with G = `magnitude` on its side of ω₀.
    pub fn separated(label: BathLabel, beta: f64, magnitude: f64, omega0: f64) -> Result<Self> {
        Self::new(label, beta, SpectralModel::SpectrallySeparated { magnitude, edge: omega0 })
    }

    pub fn spectrum(&self, omega: f64) -> Result<f64> {
        bath_spectrum(self, omega)
    }

    /// exp(−βω)
    pub fn boltzmann_factor(&self, omega: f64) -> f64 {
        (-self.beta * omega).exp()
    }
}

/// Thermal occupation n̄ = 1/(exp(βω) − 1).
pub fn planck_occupation(beta: f64, omega: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::InvalidArgument(format!("occupation undefined at omega = {omega}")));
    }
    if !(beta > 0.0) {
        return Err(Error::InvalidArgument(format!("beta = {beta} must be positive")));
    }
    Ok(1.0 / (beta * omega).exp_m1())
}

/// Coupling spectrum G(ω) of a bath.
pub fn bath_spectrum(spec: &BathSpec, omega: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::InvalidArgument(format!("spectrum queried at omega = {omega}")));
    }
    match &spec.model {
        SpectralModel::Decoupled => Ok(0.0),
        SpectralModel::Flat { gamma0, omega_min, omega_max } => {
            if omega < *omega_min || omega > *omega_max {
                Ok(0.0)
            } else {
                Ok(gamma0 * (planck_occupation(spec.beta, omega)? + 1.0))
            }
        }
        SpectralModel::SpectrallySeparated { magnitude, edge } => {
            let active = match spec.label {
                BathLabel::Cold => omega < *edge,
                BathLabel::Hot => omega > *edge,
            };
            Ok(if active { *magnitude } else { 0.0 })
        }
        SpectralModel::Tabulated { omegas, values } => {
            let (lo, hi) = (omegas[0], omegas[omegas.len() - 1]);
            if omega < lo || omega > hi {
                return Err(Error::OutOfRange { value: omega, min: lo, max: hi });
            }
            let i = omegas.partition_point(|w| *w <= omega).clamp(1, omegas.len() - 1);
            let (w0, w1) = (omegas[i - 1], omegas[i]);
            let s = (omega - w0) / (w1 - w0);
            Ok(values[i - 1] + s * (values[i] - values[i - 1]))
        }
    }
}

/// One active (bath, sideband) channel.
#[derive(Debug, Clone, PartialEq)]
pub struct SidebandChannel {
    pub bath: BathLabel,
    pub q: i32,
    /// ω₀ + qΩ
    pub frequency: f64,
    pub weight: f64,
    pub spectrum: f64,
    /// exp(−β_i (ω₀ + qΩ))
    pub boltzmann: f64,
    /// ½ P(q) G_i(ω₀ + qΩ)
    pub emission: f64,
    /// emission × boltzmann
    pub absorption: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SidebandRates {
    pub channels: Vec<SidebandChannel>,
}

impl SidebandRates {
    pub fn channel(&self, bath: BathLabel, q: i32) -> Option<&SidebandChannel> {
        self.channels.iter().find(|c| c.bath == bath && c.q == q)
    }

    /// Emission rate of a channel, zero when it is inactive.
    pub fn emission(&self, bath: BathLabel, q: i32) -> f64 {
        self.channel(bath, q).map_or(0.0, |c| c.emission)
    }

    pub fn absorption(&self, bath: BathLabel, q: i32) -> f64 {
        self.channel(bath, q).map_or(0.0, |c| c.absorption)
    }

    pub fn total_emission(&self) -> f64 {
        self.channels.iter().map(|c| c.emission).sum()
    }

    pub fn total_absorption(&self) -> f64 {
        self.channels.iter().map(|c| c.absorption).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    /// Multiplies every rate by `factor`; ratios and steady states are unchanged.
    pub fn scaled(&self, factor: f64) -> Self {
        let channels = self
            .channels
            .iter()
            .map(|c| SidebandChannel {
                spectrum: c.spectrum * factor,
                emission: c.emission * factor,
                absorption: c.absorption * factor,
                ..c.clone()
            })
            .collect();
        Self { channels }
    }
}

pub fn sideband_rates(
    cold: &BathSpec,
    hot: &BathSpec,
    weights: &FloquetWeights,
    omega0: f64,
    drive: f64,
) -> Result<SidebandRates> {
    sideband_rates_with_tol(cold, hot, weights, omega0, drive, DEFAULT_TRUNCATION_TOL)
}

/// Assembles every channel with P(q) ≥ `tolerance` and G > 0, cold bath
/// first, ascending q within each bath.
pub fn sideband_rates_with_tol(
    cold: &BathSpec,
    hot: &BathSpec,
    weights: &FloquetWeights,
    omega0: f64,
    drive: f64,
    tolerance: f64,
) -> Result<SidebandRates> {
    if cold.label != BathLabel::Cold || hot.label != BathLabel::Hot {
        return Err(Error::InvalidConfiguration("baths must be given as (cold, hot)".into()));
    }
    let mut channels = Vec::new();
    for bath in [cold, hot] {
        for (q, weight) in weights.iter() {
            if weight <= 0.0 || weight < tolerance {
                continue;
            }
            let frequency = omega0 + q as f64 * drive;
            if !(frequency > 0.0) {
                return Err(Error::InvalidConfiguration(format!(
                    "sideband q = {q} has non-positive frequency {frequency}"
                )));
            }
            let spectrum = bath.spectrum(frequency)?;
            if spectrum <= 0.0 {
                continue;
            }
            let boltzmann = bath.boltzmann_factor(frequency);
            let emission = 0.5 * weight * spectrum;
            channels.push(SidebandChannel {
                bath: bath.label,
                q,
                frequency,
                weight,
                spectrum,
                boltzmann,
                emission,
                absorption: emission * boltzmann,
            });
        }
    }
    Ok(SidebandRates { channels })
}
