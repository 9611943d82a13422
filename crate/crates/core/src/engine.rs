//! Closed-form steady-state thermodynamics of the collective machine.
//!
//! Every irreducible spin-j block relaxes to a Gibbs-like state at the
//! effective inverse temperature fixed by global detailed balance, and all
//! energy currents of that block are the single-atom currents scaled by the
//! amplification factor F(j).

use std::collections::BTreeMap;
use std::fmt;

use crate::baths::{sideband_rates_with_tol, BathLabel, BathSpec, SidebandRates};
use crate::error::{Error, Result};
use crate::floquet::{
    floquet_weights_numeric, sinusoidal_weights_approx, FloquetWeights, ModulationSpec, DEFAULT_GRID_POINTS,
    DEFAULT_Q_MAX, DEFAULT_TRUNCATION_TOL,
};
use crate::spin::{decompose, SpinQuantumNumber};

/// Relative width of the band around zero in which a current counts as zero.
pub const DEFAULT_MODE_EPSILON: f64 = 1e-12;
/// Absolute current scale below which the band stops shrinking.
pub const MODE_SCALE_FLOOR: f64 = 1.0;
const WEIGHT_SUM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperationMode {
    Engine,
    Refrigerator,
    HeatDistributor,
    Idle,
}

impl fmt::Display for OperationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OperationMode::Engine => "engine",
            OperationMode::Refrigerator => "refrigerator",
            OperationMode::HeatDistributor => "heat_distributor",
            OperationMode::Idle => "idle",
        })
    }
}

/// Steady-state energy currents. Currents flowing into the atoms are
/// positive, so an engine has `power < 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyCurrents {
    pub j_cold: f64,
    pub j_hot: f64,
    pub power: f64,
    pub efficiency: Option<f64>,
    pub mode: OperationMode,
}

impl EnergyCurrents {
    pub fn from_heat_currents(j_cold: f64, j_hot: f64) -> Self {
        Self::with_epsilon(j_cold, j_hot, DEFAULT_MODE_EPSILON)
    }

    pub fn with_epsilon(j_cold: f64, j_hot: f64, epsilon: f64) -> Self {
        let mut c = Self {
            j_cold,
            j_hot,
            power: -(j_cold + j_hot),
            efficiency: None,
            mode: OperationMode::Idle,
        };
        c.mode = classify_mode(&c, epsilon);
        c.efficiency = efficiency(&c);
        c
    }

    pub fn zero() -> Self {
        Self::from_heat_currents(0.0, 0.0)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::from_heat_currents(self.j_cold * factor, self.j_hot * factor)
    }

    /// 𝒥_c + 𝒥_h + 𝒫, zero by construction.
    pub fn first_law_residual(&self) -> f64 {
        self.j_cold + self.j_hot + self.power
    }

    pub fn max_abs(&self) -> f64 {
        self.j_cold.abs().max(self.j_hot.abs()).max(self.power.abs())
    }
}

/// Classifies the operation mode from the current signs, ignoring currents
/// inside a band of half-width `scale_epsilon · max(|𝒥_c|, |𝒥_h|, |𝒫|, floor)`.
pub fn classify_mode(currents: &EnergyCurrents, scale_epsilon: f64) -> OperationMode {
    let band = scale_epsilon * currents.max_abs().max(MODE_SCALE_FLOOR);
    let pos = |x: f64| x > band;
    let neg = |x: f64| x < -band;
    let (jc, jh, p) = (currents.j_cold, currents.j_hot, currents.power);
    if neg(p) && pos(jh) && neg(jc) {
        OperationMode::Engine
    } else if pos(p) && pos(jc) && neg(jh) {
        OperationMode::Refrigerator
    } else if pos(p) && neg(jc) && neg(jh) {
        OperationMode::HeatDistributor
    } else {
        OperationMode::Idle
    }
}

/// Engine efficiency η = −𝒫/𝒥_h; `None` outside engine operation.
pub fn efficiency(currents: &EnergyCurrents) -> Option<f64> {
    if currents.mode != OperationMode::Engine || currents.j_hot == 0.0 {
        return None;
    }
    Some(-currents.power / currents.j_hot)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveTemperature {
    /// exp(−β_eff ħω₀)
    pub boltzmann_factor: f64,
    /// β_eff ħω₀
    pub x_eff: f64,
}

impl EffectiveTemperature {
    pub fn from_x(x_eff: f64) -> Self {
        Self {
            boltzmann_factor: (-x_eff).exp(),
            x_eff,
        }
    }

    pub fn from_boltzmann(boltzmann_factor: f64) -> Self {
        Self {
            boltzmann_factor,
            x_eff: -boltzmann_factor.ln(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MachineConfig {
    pub n_atoms: u64,
    pub omega0: f64,
    /// Drive angular frequency Ω (zero for an unmodulated machine).
    pub drive: f64,
    pub modulation: ModulationSpec,
    pub cold: BathSpec,
    pub hot: BathSpec,
    pub weights: FloquetWeights,
    /// ⟨Π_j⟩ summed over multiplicity copies.
    pub subspace_weights: BTreeMap<SpinQuantumNumber, f64>,
    /// Sidebands with P(q) below this are dropped.
    pub weight_tolerance: f64,
}

impl MachineConfig {
    /// A machine whose atoms start in the maximal-spin subspace.
    pub fn new(
        n_atoms: u64,
        modulation: ModulationSpec,
        weights: FloquetWeights,
        cold: BathSpec,
        hot: BathSpec,
    ) -> Result<Self> {
        if n_atoms == 0 {
            return Err(Error::InvalidConfiguration("n_atoms must be positive".into()));
        }
        modulation.validate()?;
        Ok(Self {
            n_atoms,
            omega0: modulation.omega0,
            drive: modulation.drive().unwrap_or(0.0),
            modulation,
            cold,
            hot,
            weights,
            subspace_weights: BTreeMap::from([(SpinQuantumNumber::maximal(n_atoms), 1.0)]),
            weight_tolerance: DEFAULT_TRUNCATION_TOL,
        })
    }

    pub fn with_subspace_weights(mut self, weights: BTreeMap<SpinQuantumNumber, f64>) -> Result<Self> {
        let n = self.n_atoms;
        for (j, w) in &weights {
            if !j.occurs_for(n) {
                return Err(Error::InvalidConfiguration(format!("spin {j} does not occur for {n} atoms")));
            }
            if !(*w >= 0.0) {
                return Err(Error::InvalidConfiguration(format!("subspace weight {w} for spin {j} is negative")));
            }
        }
        let total: f64 = weights.values().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidConfiguration(format!("subspace weights sum to {total}, expected 1")));
        }
        self.subspace_weights = weights;
        Ok(self)
    }

    pub fn rates(&self) -> Result<SidebandRates> {
        sideband_rates_with_tol(&self.cold, &self.hot, &self.weights, self.omega0, self.drive, self.weight_tolerance)
    }

    /// Spin sectors allowed for this atom number, largest first.
    pub fn allowed_spins(&self) -> Result<Vec<SpinQuantumNumber>> {
        Ok(decompose(self.n_atoms)?.sectors.into_iter().map(|s| s.spin).collect())
    }
}

/// exp(−β_eff ħω₀) = total absorption / total emission over all channels.
pub fn effective_boltzmann(config: &MachineConfig) -> Result<EffectiveTemperature> {
    effective_from_rates(&config.rates()?)
}

pub fn effective_from_rates(rates: &SidebandRates) -> Result<EffectiveTemperature> {
    let emission = rates.total_emission();
    if !(emission > 0.0) {
        return Err(Error::NoCoupling);
    }
    Ok(EffectiveTemperature::from_boltzmann(rates.total_absorption() / emission))
}

/// Amplification factor
/// F(j) = Σ_{p<2j} e^{−p x}(p+1)(2j−p) / Σ_{p≤2j} e^{−p x}.
pub fn amplification(j: SpinQuantumNumber, x_eff: f64) -> f64 {
    let tj = j.twice() as usize;
    if tj == 0 {
        return 0.0;
    }
    let ratio = (-x_eff).exp();
    let mut weight = 1.0;
    let mut numerator = 0.0;
    let mut partition = 0.0;
    for p in 0..=tj {
        partition += weight;
        if p < tj {
            numerator += weight * ((p + 1) * (tj - p)) as f64;
        }
        weight *= ratio;
    }
    numerator / partition
}

/// Heat currents of one spin-j block for given channel rates.
pub fn currents_for_spin(j: SpinQuantumNumber, rates: &SidebandRates, eff: &EffectiveTemperature) -> EnergyCurrents {
    let f = amplification(j, eff.x_eff);
    let mut heat = [0.0; 2];
    for c in &rates.channels {
        let idx = match c.bath {
            BathLabel::Cold => 0,
            BathLabel::Hot => 1,
        };
        heat[idx] += c.frequency * c.weight * c.spectrum * (c.boltzmann - eff.boltzmann_factor);
    }
    EnergyCurrents::from_heat_currents(f * heat[0], f * heat[1])
}

pub fn subspace_currents(j: SpinQuantumNumber, config: &MachineConfig, eff: &EffectiveTemperature) -> Result<EnergyCurrents> {
    Ok(currents_for_spin(j, &config.rates()?, eff))
}

/// Currents weighted by the conserved subspace populations.
pub fn total_currents(config: &MachineConfig) -> Result<EnergyCurrents> {
    let rates = config.rates()?;
    let eff = effective_from_rates(&rates)?;
    Ok(weighted_currents(&config.subspace_weights, &rates, &eff))
}

pub fn weighted_currents(
    weights: &BTreeMap<SpinQuantumNumber, f64>,
    rates: &SidebandRates,
    eff: &EffectiveTemperature,
) -> EnergyCurrents {
    let (mut jc, mut jh) = (0.0, 0.0);
    for (&j, &w) in weights {
        let c = currents_for_spin(j, rates, eff);
        jc += w * c.j_cold;
        jh += w * c.j_hot;
    }
    EnergyCurrents::from_heat_currents(jc, jh)
}

/// Collective over independent power, F(N/2) / (N F(1/2)).
pub fn power_ratio(n_atoms: u64, x_eff: f64) -> f64 {
    amplification(SpinQuantumNumber::maximal(n_atoms), x_eff)
        / (n_atoms as f64 * amplification(SpinQuantumNumber::HALF, x_eff))
}

/// Low- and high-temperature limits of [`power_ratio`]: 1 and (N+2)/3.
pub fn boost_limits(n_atoms: u64) -> (f64, f64) {
    (1.0, (n_atoms as f64 + 2.0) / 3.0)
}

/// N → ∞ limit of [`power_ratio`], coth(x/2). Diverges like 2/x as x → 0.
pub fn saturation_boost(x_eff: f64) -> Result<f64> {
    if !(x_eff > 0.0) {
        return Err(Error::Divergent { x_eff });
    }
    Ok(1.0 / (0.5 * x_eff).tanh())
}

/// Hot-bath inverse temperature at which the two-sideband machine stops:
/// β_h = β_c (ω₀ − Ω)/(ω₀ + Ω).
pub fn critical_hot_temperature(beta_cold: f64, omega0: f64, drive: f64) -> Result<f64> {
    if !(drive < omega0) {
        return Err(Error::InvalidConfiguration(format!(
            "drive {drive} must be below omega0 = {omega0} to keep the cold sideband positive"
        )));
    }
    if drive < 0.0 {
        return Err(Error::InvalidConfiguration(format!("drive {drive} must be non-negative")));
    }
    Ok(beta_cold * (omega0 - drive) / (omega0 + drive))
}

/// How the sideband weights of the sinusoidal machine are obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
#[derive(Default)]
pub enum WeightsModel {
    /// P(0) = 1 − (g/Ω)²/2, P(±1) = (g/2Ω)².
    #[default]
    TwoSideband,
    Numeric { q_max: u32, grid_points: usize },
}


impl WeightsModel {
    pub fn numeric_default() -> Self {
        WeightsModel::Numeric {
            q_max: DEFAULT_Q_MAX,
            grid_points: DEFAULT_GRID_POINTS,
        }
    }
}

/// Sinusoidally modulated machine ω(t) = ω₀ + g sin(Ωt) between two
/// spectrally separated baths: the cold bath only couples below ω₀ and the
/// hot bath only above it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinusoidalEngine {
    pub omega0: f64,
    pub drive: f64,
    pub depth: f64,
    pub beta_cold: f64,
    pub beta_hot: f64,
    /// G_c(ω₀ − Ω)
    pub coupling_cold: f64,
    /// G_h(ω₀ + Ω)
    pub coupling_hot: f64,
}

impl SinusoidalEngine {
    /// Cold bath with exp(−β_c ħω₀) = 0.1 (β_c ħω₀ = 2.3), Ω = 0.3ω₀,
    /// g = 0.01Ω and equal couplings.
    pub fn figure6(beta_hot: f64) -> Self {
        Self {
            omega0: 1.0,
            drive: 0.3,
            depth: 0.003,
            beta_cold: 2.3,
            beta_hot,
            coupling_cold: 1.0,
            coupling_hot: 1.0,
        }
    }

    /// As [`SinusoidalEngine::figure6`] with exp(−β_c ħω₀) = 0.9.
    pub fn figure7(beta_hot: f64) -> Self {
        Self {
            beta_cold: -(0.9f64.ln()),
            ..Self::figure6(beta_hot)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("omega0", self.omega0),
            ("drive", self.drive),
            ("beta_cold", self.beta_cold),
            ("beta_hot", self.beta_hot),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidConfiguration(format!("{name} = {v} must be positive")));
            }
        }
        if !(self.depth >= 0.0) || self.coupling_cold < 0.0 || self.coupling_hot < 0.0 {
            return Err(Error::InvalidConfiguration("depth and couplings must be non-negative".into()));
        }
        if self.drive >= self.omega0 {
            return Err(Error::InvalidConfiguration(format!(
                "drive {} must be below omega0 = {}",
                self.drive, self.omega0
            )));
        }
        Ok(())
    }

    pub fn modulation(&self) -> Result<ModulationSpec> {
        ModulationSpec::sinusoidal(self.omega0, self.depth, self.drive)
    }

    pub fn weights(&self, model: WeightsModel) -> Result<FloquetWeights> {
        match model {
            WeightsModel::TwoSideband => sinusoidal_weights_approx(self.depth, self.drive),
            WeightsModel::Numeric { q_max, grid_points } => floquet_weights_numeric(&self.modulation()?, q_max, grid_points),
        }
    }

    pub fn baths(&self) -> Result<(BathSpec, BathSpec)> {
        Ok((
            BathSpec::separated(BathLabel::Cold, self.beta_cold, self.coupling_cold, self.omega0)?,
            BathSpec::separated(BathLabel::Hot, self.beta_hot, self.coupling_hot, self.omega0)?,
        ))
    }

    pub fn config(&self, n_atoms: u64, model: WeightsModel) -> Result<MachineConfig> {
        self.validate()?;
        let (cold, hot) = self.baths()?;
        MachineConfig::new(n_atoms, self.modulation()?, self.weights(model)?, cold, hot)
    }

    /// Closed-form effective Boltzmann factor of the two active channels.
    pub fn closed_form_boltzmann(&self) -> f64 {
        let (gc, gh) = (self.coupling_cold, self.coupling_hot);
        let bc = (-self.beta_cold * (self.omega0 - self.drive)).exp();
        let bh = (-self.beta_hot * (self.omega0 + self.drive)).exp();
        (gc * bc + gh * bh) / (gc + gh)
    }

    /// Closed-form currents of a spin-j block with the two-sideband weights.
    pub fn closed_form_currents(&self, j: SpinQuantumNumber) -> EnergyCurrents {
        let b_eff = self.closed_form_boltzmann();
        let f = amplification(j, -b_eff.ln());
        let p1 = (self.depth / (2.0 * self.drive)).powi(2);
        let (wc, wh) = (self.omega0 - self.drive, self.omega0 + self.drive);
        let jc = f * wc * p1 * self.coupling_cold * ((-self.beta_cold * wc).exp() - b_eff);
        let jh = f * wh * p1 * self.coupling_hot * ((-self.beta_hot * wh).exp() - b_eff);
        EnergyCurrents::from_heat_currents(jc, jh)
    }

    pub fn critical_beta_hot(&self) -> Result<f64> {
        critical_hot_temperature(self.beta_cold, self.omega0, self.drive)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baths::SpectralModel;

    fn half() -> SpinQuantumNumber {
        SpinQuantumNumber::HALF
    }

    fn spin(twice: u32) -> SpinQuantumNumber {
        SpinQuantumNumber::from_twice(twice)
    }

    /// F(j) as the thermal average of the squared ladder elements, with the
    /// Gibbs populations normalised separately.
    fn amplification_oracle(twice_j: u32, x: f64) -> f64 {
        let pops: Vec<f64> = (0..=twice_j).map(|p| (-(p as f64) * x).exp()).collect();
        let z: f64 = pops.iter().sum();
        (0..twice_j)
            .map(|p| pops[p as usize] / z * ((p + 1) * (twice_j - p)) as f64)
            .sum()
    }

    #[test]
    fn amplification_examples() {
        for x in [0.0, 0.3, 2.3, 7.0] {
            assert!((amplification(half(), x) - 1.0 / (1.0 + (-x).exp())).abs() < 1e-15);
        }
        assert!((amplification(half(), 2.3) - 0.9089).abs() < 1e-4);
        assert!((amplification(spin(3), 0.0) - 2.5).abs() < 1e-15);
        assert_eq!(amplification(SpinQuantumNumber::ZERO, 0.7), 0.0);
        for tj in [1, 2, 7, 40] {
            assert!((amplification(spin(tj), 60.0) - tj as f64).abs() < 1e-12);
        }
        for tj in [2, 5, 11] {
            for x in [0.01, 0.5, 3.0] {
                assert!((amplification(spin(tj), x) - amplification_oracle(tj, x)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn power_ratio_examples() {
        for x in [0.0, 0.4, 10.0] {
            assert!((power_ratio(1, x) - 1.0).abs() < 1e-15);
        }
        assert!((power_ratio(2, 0.0) - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(boost_limits(10), (1.0, 4.0));
        assert_eq!(boost_limits(1), (1.0, 1.0));
        for n in (1..=200).step_by(7) {
            let (lo, hi) = boost_limits(n);
            assert!((power_ratio(n, 40.0) - lo).abs() < 1e-6);
            assert!((power_ratio(n, 1e-8) - hi).abs() < 1e-4);
        }
    }

    #[test]
    fn saturation_values() {
        assert!((saturation_boost(0.2).unwrap() - 10.03).abs() < 0.01);
        assert!((saturation_boost(0.511).unwrap() - 4.0).abs() < 0.01);
        assert!((saturation_boost(0.036).unwrap() - 55.6).abs() < 0.05);
        assert!(matches!(saturation_boost(0.0), Err(Error::Divergent { .. })));
    }

    #[test]
    fn ratio_monotone_and_bounded_on_grid() {
        let xs: Vec<f64> = (0..=40).map(|i| 10f64.powf(-3.0 + 4.0 * i as f64 / 40.0)).collect();
        for n in (1..=200u64).step_by(3) {
            let mut prev = f64::INFINITY;
            for &x in &xs {
                let r = power_ratio(n, x);
                assert!(r <= prev * (1.0 + 1e-12), "non-increasing in x: N = {n}, x = {x}");
                prev = r;
                let cap = boost_limits(n).1.min(saturation_boost(x).unwrap());
                assert!(r >= 1.0 - 1e-12 && r <= cap * (1.0 + 1e-12), "sandwich at N = {n}, x = {x}");
                if n > 1 {
                    assert!(r >= power_ratio(n - 1, x) * (1.0 - 1e-12), "non-decreasing in N at N = {n}");
                }
            }
        }
    }

    #[test]
    fn critical_temperature_examples() {
        assert!((critical_hot_temperature(2.3, 1.0, 0.3).unwrap() - 1.238).abs() < 1e-3);
        assert!((critical_hot_temperature(0.1054, 1.0, 0.3).unwrap() - 0.0567).abs() < 1e-4);
        assert_eq!(critical_hot_temperature(1.7, 1.0, 0.0).unwrap(), 1.7);
        assert!(critical_hot_temperature(1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn mode_classification() {
        let engine = EnergyCurrents::from_heat_currents(-1.0, 2.0);
        assert_eq!(engine.mode, OperationMode::Engine);
        assert!((engine.efficiency.unwrap() - 0.5).abs() < 1e-15);
        let fridge = EnergyCurrents::from_heat_currents(1.0, -2.0);
        assert_eq!(fridge.mode, OperationMode::Refrigerator);
        assert_eq!(fridge.efficiency, None);
        let dist = EnergyCurrents::from_heat_currents(-1.0, -2.0);
        assert_eq!(dist.mode, OperationMode::HeatDistributor);
        let idle = EnergyCurrents::from_heat_currents(1e-14, -3e-14);
        assert_eq!(idle.mode, OperationMode::Idle);
        assert_eq!(classify_mode(&engine, 0.9), OperationMode::Idle);
    }

    #[test]
    fn first_law_exact() {
        for (a, b) in [(0.1, 0.2), (-1e-7, 3.3e-5), (1e10, -1e-10)] {
            assert_eq!(EnergyCurrents::from_heat_currents(a, b).first_law_residual(), 0.0);
        }
    }

    #[test]
    fn figure6_effective_temperature_and_modes() {
        let m = SinusoidalEngine::figure6(1e-4);
        let cfg = m.config(100, WeightsModel::TwoSideband).unwrap();
        let eff = effective_boltzmann(&cfg).unwrap();
        assert!((eff.x_eff - 0.511).abs() < 0.005);
        assert!((eff.boltzmann_factor - m.closed_form_boltzmann()).abs() < 1e-15);

        let engine = total_currents(&SinusoidalEngine::figure6(0.2).config(1, WeightsModel::TwoSideband).unwrap()).unwrap();
        assert_eq!(engine.mode, OperationMode::Engine);
        let fridge = total_currents(&SinusoidalEngine::figure6(2.0).config(1, WeightsModel::TwoSideband).unwrap()).unwrap();
        assert_eq!(fridge.mode, OperationMode::Refrigerator);
    }

    #[test]
    fn figure7_effective_temperature() {
        let cfg = SinusoidalEngine::figure7(1e-4).config(100, WeightsModel::TwoSideband).unwrap();
        let eff = effective_boltzmann(&cfg).unwrap();
        assert!((eff.x_eff - 0.036).abs() < 0.001);
    }

    #[test]
    fn general_currents_match_sinusoidal_closed_form() {
        for beta_hot in [0.05, 0.4, 1.0, 3.0] {
            let m = SinusoidalEngine::figure6(beta_hot);
            for n in [1u64, 3, 10] {
                let cfg = m.config(n, WeightsModel::TwoSideband).unwrap();
                let got = total_currents(&cfg).unwrap();
                let expect = m.closed_form_currents(SpinQuantumNumber::maximal(n));
                for (a, b) in [(got.j_cold, expect.j_cold), (got.j_hot, expect.j_hot), (got.power, expect.power)] {
                    assert!((a - b).abs() <= 1e-12 * b.abs().max(1e-12), "{a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn currents_vanish_at_critical_temperature() {
        let m = SinusoidalEngine::figure6(1.0);
        let crit = m.critical_beta_hot().unwrap();
        let at = SinusoidalEngine { beta_hot: crit, ..m }.closed_form_currents(half());
        let away = SinusoidalEngine { beta_hot: 0.2, ..m }.closed_form_currents(half());
        assert!(at.max_abs() < 1e-12 * away.max_abs());
        assert_eq!(at.mode, OperationMode::Idle);
    }

    #[test]
    fn mode_boundary_bracketed_at_critical_temperature() {
        let m = SinusoidalEngine::figure6(1.0);
        let power = |bh: f64| SinusoidalEngine { beta_hot: bh, ..m }.closed_form_currents(half()).power;
        let (mut lo, mut hi) = (0.2, 2.0);
        assert!(power(lo) < 0.0 && power(hi) > 0.0);
        while hi - lo > 1e-12 {
            let mid = 0.5 * (lo + hi);
            if power(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((lo - m.critical_beta_hot().unwrap()).abs() < 1e-9);
    }

    #[test]
    fn equal_amplification_of_all_currents() {
        let cfg = SinusoidalEngine::figure7(0.02).config(1, WeightsModel::TwoSideband).unwrap();
        let eff = effective_boltzmann(&cfg).unwrap();
        let single = subspace_currents(half(), &cfg, &eff).unwrap();
        for tj in [2, 3, 9, 50] {
            let c = subspace_currents(spin(tj), &cfg, &eff).unwrap();
            let f = amplification(spin(tj), eff.x_eff) / amplification(half(), eff.x_eff);
            assert!((c.j_cold / single.j_cold - f).abs() < 1e-12 * f);
            assert!((c.j_hot / single.j_hot - f).abs() < 1e-12 * f);
            assert!((c.power / single.power - f).abs() < 1e-10 * f);
        }
    }

    #[test]
    fn efficiency_independent_of_cooperativity_and_below_carnot() {
        for bh in [0.01, 0.3, 1.0] {
            let m = SinusoidalEngine::figure6(bh);
            let ind = total_currents(&m.config(1, WeightsModel::TwoSideband).unwrap()).unwrap();
            let coll = total_currents(&m.config(100, WeightsModel::TwoSideband).unwrap()).unwrap();
            let (e1, e100) = (ind.efficiency.unwrap(), coll.efficiency.unwrap());
            assert!((e1 - e100).abs() < 1e-12);
            // two active channels: η = 1 − (ω₀−Ω)/(ω₀+Ω)
            let expect = 1.0 - (m.omega0 - m.drive) / (m.omega0 + m.drive);
            assert!((e1 - expect).abs() < 1e-12);
            assert!(e1 < 1.0 - bh / m.beta_cold);
        }
    }

    #[test]
    fn three_atom_weighting() {
        let m = SinusoidalEngine::figure6(0.1);
        let base = m.config(3, WeightsModel::TwoSideband).unwrap();
        let doublets = base
            .clone()
            .with_subspace_weights(BTreeMap::from([(spin(3), 0.0), (half(), 1.0)]))
            .unwrap();
        let single = total_currents(&m.config(1, WeightsModel::TwoSideband).unwrap()).unwrap();
        let got = total_currents(&doublets).unwrap();
        assert!((got.power - single.power).abs() < 1e-15);

        let hot = SinusoidalEngine::figure6(1e-6);
        let cfg = SinusoidalEngine { beta_cold: 1e-6, ..hot }.config(3, WeightsModel::TwoSideband).unwrap();
        let eff = effective_boltzmann(&cfg).unwrap();
        let ratio = currents_for_spin(spin(3), &cfg.rates().unwrap(), &eff).power
            / currents_for_spin(half(), &cfg.rates().unwrap(), &eff).power;
        assert!((ratio - amplification(spin(3), eff.x_eff) / amplification(half(), eff.x_eff)).abs() < 1e-9);
    }

    #[test]
    fn subspace_weight_validation() {
        let cfg = SinusoidalEngine::figure6(0.1).config(3, WeightsModel::TwoSideband).unwrap();
        assert!(cfg.clone().with_subspace_weights(BTreeMap::from([(spin(2), 1.0)])).is_err());
        assert!(cfg.clone().with_subspace_weights(BTreeMap::from([(spin(3), 0.7)])).is_err());
        assert!(cfg.clone().with_subspace_weights(BTreeMap::from([(spin(3), 1.2), (half(), -0.2)])).is_err());
    }

    #[test]
    fn equilibrium_and_dark_subspace() {
        let model = SpectralModel::Flat {
            gamma0: 1.0,
            omega_min: 0.0,
            omega_max: 10.0,
        };
        let cold = BathSpec::new(BathLabel::Cold, 0.8, model.clone()).unwrap();
        let hot = BathSpec::new(BathLabel::Hot, 0.8, model).unwrap();
        let cfg = MachineConfig::new(2, ModulationSpec::constant(1.0), FloquetWeights::unmodulated(), cold.clone(), hot).unwrap();
        let eff = effective_boltzmann(&cfg).unwrap();
        assert!((eff.boltzmann_factor - (-0.8f64).exp()).abs() < 1e-15);
        let c = total_currents(&cfg).unwrap();
        assert!(c.max_abs() < 1e-15);
        assert_eq!(c.mode, OperationMode::Idle);

        let m = SinusoidalEngine::figure6(0.1).config(2, WeightsModel::TwoSideband).unwrap();
        let eff = effective_boltzmann(&m).unwrap();
        assert_eq!(subspace_currents(SpinQuantumNumber::ZERO, &m, &eff).unwrap().max_abs(), 0.0);

        let off = BathSpec::new(BathLabel::Hot, 1.0, SpectralModel::Decoupled).unwrap();
        let cold_off = BathSpec::new(BathLabel::Cold, 1.0, SpectralModel::Decoupled).unwrap();
        let none = MachineConfig::new(1, ModulationSpec::constant(1.0), FloquetWeights::unmodulated(), cold_off, off).unwrap();
        assert!(matches!(effective_boltzmann(&none), Err(Error::NoCoupling)));
        let _ = cold;
    }
}
