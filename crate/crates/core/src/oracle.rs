//! Brute-force steady states and heat currents from the Lindblad generator.

use std::io::Write;

use nalgebra::{DMatrix, DVector};

use crate::baths::{BathLabel, SidebandRates};
use crate::density::{trace_norm, DensityMatrix};
use crate::engine::{effective_from_rates, EnergyCurrents};
use crate::error::{Error, Result};
use crate::lindblad::{
    build_machine_channels, lindblad_rhs, ChannelTag, CollectiveOperators, Generator, LindbladChannel, Process,
    Representation,
};
use crate::spin::{Operator, C64};

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_MAX_STEPS: usize = 2_000_000;
pub const DEFAULT_CHECK_EVERY: usize = 50;
/// dt = DT_SAFETY / max_rate when no step is given.
pub const DT_SAFETY: f64 = 0.05;
/// Largest accepted dt · max_rate.
pub const MAX_DT_RATE: f64 = 0.1;
pub const POSITIVITY_DRIFT_TOL: f64 = 1e-8;
pub const TRACE_DRIFT_TOL: f64 = 1e-9;
/// Nullspace mode needs dim² at most this.
pub const MAX_NULLSPACE_LIOUVILLE_DIM: usize = 4096;
const NULLSPACE_REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SteadyStateMethod {
    TimeIntegration,
    Nullspace,
}

impl std::fmt::Display for SteadyStateMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SteadyStateMethod::TimeIntegration => "time_integration",
            SteadyStateMethod::Nullspace => "nullspace",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleOptions {
    /// Bound on ‖dρ/dt‖₁ / max_rate.
    pub tol: f64,
    pub max_steps: usize,
    pub dt: Option<f64>,
    pub check_every: usize,
    pub method: SteadyStateMethod,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOLERANCE,
            max_steps: DEFAULT_MAX_STEPS,
            dt: None,
            check_every: DEFAULT_CHECK_EVERY,
            method: SteadyStateMethod::TimeIntegration,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteadyState {
    pub state: DensityMatrix,
    pub steps: usize,
    pub final_residual: f64,
    pub method: SteadyStateMethod,
    /// Smallest eigenvalue of ρ(t) seen at any check.
    pub min_eigenvalue: f64,
    /// Largest |Tr ρ(t) − 1| seen at any check.
    pub max_trace_drift: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub steady_state: DensityMatrix,
    pub currents: EnergyCurrents,
    pub steps: usize,
    pub final_residual: f64,
    pub method: SteadyStateMethod,
}

/// Fixed-step fourth-order Runge-Kutta propagator.
#[derive(Debug, Clone)]
pub struct Integrator {
    generator: Generator,
    dt: f64,
}

impl Integrator {
    pub fn new(generator: Generator, dt: Option<f64>) -> Result<Self> {
        let rate = generator.max_rate();
        let dt = match dt {
            Some(dt) => {
                if !(dt > 0.0) || !dt.is_finite() {
                    return Err(Error::InvalidArgument(format!("time step {dt} must be positive")));
                }
                if dt * rate >= MAX_DT_RATE {
                    return Err(Error::InvalidArgument(format!(
                        "time step {dt} too large: dt·max_rate = {} ≥ {MAX_DT_RATE}",
                        dt * rate
                    )));
                }
                dt
            }
            None if rate > 0.0 => DT_SAFETY / rate,
            None => 1.0,
        };
        Ok(Self { generator, dt })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    pub fn step(&self, rho: &Operator) -> Operator {
        step_rk4(&self.generator, rho, self.dt)
    }
}

fn step_rk4(g: &Generator, rho: &Operator, dt: f64) -> Operator {
    let h = C64::new(dt, 0.0);
    let half = C64::new(0.5 * dt, 0.0);
    let k1 = g.apply(rho);
    let k2 = g.apply(&(rho + &k1 * half));
    let k3 = g.apply(&(rho + &k2 * half));
    let k4 = g.apply(&(rho + &k3 * h));
    rho + (k1 + (k2 + k3) * C64::new(2.0, 0.0) + k4) * C64::new(dt / 6.0, 0.0)
}

fn min_eigenvalue(m: &Operator) -> f64 {
    DensityMatrix::from_raw(m.clone()).min_eigenvalue()
}

fn hermitize(m: &Operator) -> Operator {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

fn relative_residual(g: &Generator, rho: &Operator) -> f64 {
    let scale = if g.max_rate() > 0.0 { g.max_rate() } else { 1.0 };
    trace_norm(&hermitize(&g.apply(rho))) / scale
}

pub fn steady_state(rho0: &DensityMatrix, channels: &[LindbladChannel], opts: &OracleOptions) -> Result<SteadyState> {
    let generator = Generator::new(rho0.dim(), channels)?;
    match opts.method {
        SteadyStateMethod::TimeIntegration => integrate_to_steady(rho0, generator, opts),
        SteadyStateMethod::Nullspace => nullspace_steady(generator, opts),
    }
}

fn integrate_to_steady(rho0: &DensityMatrix, generator: Generator, opts: &OracleOptions) -> Result<SteadyState> {
    if !(opts.tol > 0.0) || opts.check_every == 0 {
        return Err(Error::InvalidArgument("tolerance and check interval must be positive".into()));
    }
    let mut integrator = Integrator::new(generator, opts.dt)?;
    let mut halved = false;
    let mut rho = rho0.matrix().clone();
    let mut checkpoint = (rho.clone(), 0usize, 0.0);
    let mut steps = 0usize;
    let mut min_eig = rho0.min_eigenvalue();
    let mut max_drift = (rho0.trace().re - 1.0).abs();
    let mut residual = relative_residual(integrator.generator(), &rho);
    let mut time = 0.0;
    while residual >= opts.tol {
        if steps >= opts.max_steps {
            return Err(Error::ConvergenceFailure { steps, residual });
        }
        let n = opts.check_every.min(opts.max_steps - steps);
        for _ in 0..n {
            rho = integrator.step(&rho);
        }
        steps += n;
        time += n as f64 * integrator.dt();
        rho = hermitize(&rho);
        let lam = min_eigenvalue(&rho);
        let drift = (rho.trace().re - 1.0).abs();
        if lam < -POSITIVITY_DRIFT_TOL || drift > TRACE_DRIFT_TOL {
            if halved {
                return Err(Error::IntegrationInstability {
                    min_eigenvalue: lam,
                    time,
                });
            }
            halved = true;
            let dt = 0.5 * integrator.dt();
            integrator = Integrator {
                generator: integrator.generator,
                dt,
            };
            rho = checkpoint.0.clone();
            steps = checkpoint.1;
            time = checkpoint.2;
            continue;
        }
        min_eig = min_eig.min(lam);
        max_drift = max_drift.max(drift);
        checkpoint = (rho.clone(), steps, time);
        residual = relative_residual(integrator.generator(), &rho);
    }
    Ok(SteadyState {
        state: DensityMatrix::from_raw(rho),
        steps,
        final_residual: residual,
        method: SteadyStateMethod::TimeIntegration,
        min_eigenvalue: min_eig,
        max_trace_drift: max_drift,
    })
}

/// Right null vector of the vectorized generator. A nullspace of dimension
/// above one is reported, not resolved.
fn nullspace_steady(generator: Generator, opts: &OracleOptions) -> Result<SteadyState> {
    let dim = generator.dim();
    if dim * dim > MAX_NULLSPACE_LIOUVILLE_DIM {
        return Err(Error::InvalidConfiguration(format!(
            "nullspace method needs dim² ≤ {MAX_NULLSPACE_LIOUVILLE_DIM}, got dim = {dim}"
        )));
    }
    let s = generator.superoperator();
    let svd = s.svd(false, true);
    let v_t = svd.v_t.ok_or(Error::ConvergenceFailure {
        steps: 0,
        residual: f64::NAN,
    })?;
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let threshold = NULLSPACE_REL_TOL * smax.max(f64::MIN_POSITIVE);
    let null: Vec<usize> = (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i] <= threshold).collect();
    match null.len() {
        0 => Err(Error::ConvergenceFailure {
            steps: 0,
            residual: svd.singular_values.iter().copied().fold(f64::INFINITY, f64::min) / smax,
        }),
        1 => {
            let v: DVector<C64> = v_t.row(null[0]).adjoint();
            let mut m = Operator::from_column_slice(dim, dim, v.as_slice());
            let tr = m.trace();
            m /= tr;
            let m = hermitize(&m);
            let residual = relative_residual(&generator, &m);
            if residual >= opts.tol.max(1e-8) {
                return Err(Error::ConvergenceFailure { steps: 0, residual });
            }
            Ok(SteadyState {
                min_eigenvalue: min_eigenvalue(&m),
                max_trace_drift: 0.0,
                state: DensityMatrix::from_raw(m),
                steps: 0,
                final_residual: residual,
                method: SteadyStateMethod::Nullspace,
            })
        }
        d => Err(Error::DegenerateNullspace { dimension: d }),
    }
}

/// 𝒥_i = Σ_q ħ(ω₀+qΩ) Tr[(ℒ_{i,q} ρ) J_z], one sub-Liouvillian at a time.
pub fn currents_from_state(rho: &DensityMatrix, rates: &SidebandRates, ops: &CollectiveOperators) -> EnergyCurrents {
    let (mut jc, mut jh) = (0.0, 0.0);
    for c in &rates.channels {
        let sub = [
            LindbladChannel {
                jump: ops.minus.clone(),
                rate: c.emission,
                tag: ChannelTag::Bath {
                    bath: c.bath,
                    q: c.q,
                    process: Process::Emission,
                },
            },
            LindbladChannel {
                jump: ops.plus.clone(),
                rate: c.absorption,
                tag: ChannelTag::Bath {
                    bath: c.bath,
                    q: c.q,
                    process: Process::Absorption,
                },
            },
        ];
        let d = lindblad_rhs(rho.matrix(), &sub);
        let heat = c.frequency * (&d * &ops.z).trace().re;
        match c.bath {
            BathLabel::Cold => jc += heat,
            BathLabel::Hot => jh += heat,
        }
    }
    EnergyCurrents::from_heat_currents(jc, jh)
}

/// Integrates the machine from `rho0` and measures the steady heat currents.
pub fn run_oracle(
    representation: &Representation,
    rates: &SidebandRates,
    rho0: &DensityMatrix,
    opts: &OracleOptions,
) -> Result<OracleResult> {
    if rho0.dim() != representation.dim() {
        return Err(Error::InvalidConfiguration(format!(
            "initial state has dimension {}, representation needs {}",
            rho0.dim(),
            representation.dim()
        )));
    }
    let eff = effective_from_rates(rates)?;
    let channels = build_machine_channels(representation, rates, eff.x_eff)?;
    let ss = steady_state(rho0, &channels, opts)?;
    let ops = representation.measurement_operators()?;
    let currents = currents_from_state(&ss.state, rates, &ops);
    Ok(OracleResult {
        steady_state: ss.state,
        currents,
        steps: ss.steps,
        final_residual: ss.final_residual,
        method: ss.method,
    })
}

/// Collective machine with local dephasing of every atom.
pub fn dephasing_currents(
    n_atoms: u64,
    rates: &SidebandRates,
    gamma_d: f64,
    rho0: &DensityMatrix,
    opts: &OracleOptions,
) -> Result<OracleResult> {
    if !(gamma_d >= 0.0) {
        return Err(Error::InvalidArgument(format!("dephasing rate {gamma_d} must be non-negative")));
    }
    let rep = Representation::WithDephasing {
        base: Box::new(Representation::FullCollective { n_atoms }),
        gamma_d,
    };
    run_oracle(&rep, rates, rho0, opts)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransientPoint {
    pub t: f64,
    pub jz: f64,
    /// −d⟨J_z⟩/dt
    pub emission: f64,
    /// Frobenius norm of dρ/dt.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transient {
    pub n_atoms: u64,
    pub points: Vec<TransientPoint>,
}

impl Transient {
    pub fn initial_emission(&self) -> f64 {
        self.points.first().map_or(0.0, |p| p.emission)
    }

    pub fn peak(&self) -> Option<TransientPoint> {
        self.points.iter().copied().max_by(|a, b| a.emission.total_cmp(&b.emission))
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "jz", "emission", "residual"])?;
        for p in &self.points {
            w.write_record([p.t, p.jz, p.emission, p.residual].map(|x| format!("{x:.12e}")))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Decay of the fully inverted state into a zero-temperature bath with
/// collective emission rate `rate` (channel (J_−, rate)).
pub fn superradiant_transient(n_atoms: u64, rate: f64, dt: f64, t_final: f64, sample_every: usize) -> Result<Transient> {
    if !(rate > 0.0) || !(t_final > 0.0) || sample_every == 0 {
        return Err(Error::InvalidArgument("rate, final time and sampling interval must be positive".into()));
    }
    let ops = CollectiveOperators::full(n_atoms)?;
    let channels = vec![LindbladChannel {
        jump: ops.minus.clone(),
        rate,
        tag: ChannelTag::Bath {
            bath: BathLabel::Cold,
            q: 0,
            process: Process::Emission,
        },
    }];
    let rho0 = DensityMatrix::product_state(&vec![true; n_atoms as usize])?;
    let integrator = Integrator::new(Generator::new(rho0.dim(), &channels)?, Some(dt))?;
    let sample = |t: f64, rho: &Operator| {
        let d = integrator.generator().apply(rho);
        TransientPoint {
            t,
            jz: (rho * &ops.z).trace().re,
            emission: -(&d * &ops.z).trace().re,
            residual: d.norm(),
        }
    };
    let total = (t_final / dt).round() as usize;
    let mut rho = rho0.into_matrix();
    let mut points = vec![sample(0.0, &rho)];
    for k in 1..=total {
        rho = integrator.step(&rho);
        if k % sample_every == 0 || k == total {
            points.push(sample(k as f64 * dt, &rho));
        }
    }
    Ok(Transient { n_atoms, points })
}

/// Maximum absolute entry difference, used when comparing states.
pub fn max_abs_difference(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{amplification, weighted_currents, SinusoidalEngine, WeightsModel};
    use crate::spin::{subspace_weights, SpinQuantumNumber};

    fn unit_rates(engine: &SinusoidalEngine) -> SidebandRates {
        let rates = engine.config(1, WeightsModel::TwoSideband).unwrap().rates().unwrap();
        let max = rates.channels.iter().map(|c| c.emission).fold(0.0, f64::max);
        rates.scaled(1.0 / max)
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn single_block_half_is_two_level_gibbs() {
        let rates = unit_rates(&SinusoidalEngine::figure6(0.4));
        let x = effective_from_rates(&rates).unwrap().x_eff;
        let rep = Representation::SingleBlock { spin: SpinQuantumNumber::HALF };
        for rho0 in [DensityMatrix::maximally_mixed(2), DensityMatrix::product_state(&[true]).unwrap()] {
            let r = run_oracle(&rep, &rates, &rho0, &OracleOptions::default()).unwrap();
            let m = r.steady_state.matrix();
            let z = 1.0 + (-x).exp();
            assert!((m[(0, 0)].re - 1.0 / z).abs() < 1e-9);
            assert!((m[(1, 1)].re - (-x).exp() / z).abs() < 1e-9);
        }
    }

    #[test]
    fn nullspace_agrees_with_integration_for_single_block() {
        let rates = unit_rates(&SinusoidalEngine::figure6(0.4));
        let x = effective_from_rates(&rates).unwrap().x_eff;
        let spin = SpinQuantumNumber::from_twice(4);
        let ch = build_machine_channels(&Representation::SingleBlock { spin }, &rates, x).unwrap();
        let rho0 = DensityMatrix::maximally_mixed(5);
        let a = steady_state(&rho0, &ch, &OracleOptions::default()).unwrap();
        let b = steady_state(
            &rho0,
            &ch,
            &OracleOptions {
                method: SteadyStateMethod::Nullspace,
                ..OracleOptions::default()
            },
        )
        .unwrap();
        assert!(max_abs_difference(a.state.matrix(), b.state.matrix()) < 1e-9);
    }

    #[test]
    fn nullspace_reports_degeneracy() {
        let rates = unit_rates(&SinusoidalEngine::figure6(0.4));
        let ch = build_machine_channels(&Representation::FullCollective { n_atoms: 2 }, &rates, 0.5).unwrap();
        let err = steady_state(
            &DensityMatrix::maximally_mixed(4),
            &ch,
            &OracleOptions {
                method: SteadyStateMethod::Nullspace,
                ..OracleOptions::default()
            },
        )
        .unwrap_err();
        // triplet and singlet stationary states
        assert!(matches!(err, Error::DegenerateNullspace { dimension: 2 }));
    }

    #[test]
    fn two_atoms_inverted_relax_to_triplet_gibbs() {
        let rates = unit_rates(&SinusoidalEngine::figure6(0.4));
        let x = effective_from_rates(&rates).unwrap().x_eff;
        let rho0 = DensityMatrix::product_state(&[true, true]).unwrap();
        let r = run_oracle(&Representation::FullCollective { n_atoms: 2 }, &rates, &rho0, &OracleOptions::default()).unwrap();
        let w = subspace_weights(&r.steady_state, 2).unwrap();
        assert!(w[&SpinQuantumNumber::ZERO].abs() < 1e-12);
        // triplet populations ∝ e^{−p x}: |gg⟩, (|eg⟩+|ge⟩)/√2, |ee⟩
        let m = r.steady_state.matrix();
        let z = 1.0 + (-x).exp() + (-2.0 * x).exp();
        assert!((m[(0, 0)].re - 1.0 / z).abs() < 1e-9);
        assert!((m[(3, 3)].re - (-2.0 * x).exp() / z).abs() < 1e-9);
        assert!((m[(1, 2)].re - 0.5 * (-x).exp() / z).abs() < 1e-9);
    }

    #[test]
    fn singlet_is_dark() {
        let rates = unit_rates(&SinusoidalEngine::figure6(0.4));
        let r = run_oracle(
            &Representation::FullCollective { n_atoms: 2 },
            &rates,
            &DensityMatrix::singlet(),
            &OracleOptions::default(),
        )
        .unwrap();
        assert!(max_abs_difference(r.steady_state.matrix(), DensityMatrix::singlet().matrix()) < 1e-14);
        assert!(r.currents.max_abs() < 1e-12);
    }

    #[test]
    fn equilibrium_has_no_currents() {
        let mut e = SinusoidalEngine::figure6(2.3);
        e.beta_hot = e.beta_cold;
        e.drive = 1e-9;
        let rates = unit_rates(&e);
        let r = run_oracle(
            &Representation::FullCollective { n_atoms: 2 },
            &rates,
            &DensityMatrix::product_state(&[true, false]).unwrap(),
            &OracleOptions::default(),
        )
        .unwrap();
        assert!(r.currents.max_abs() < 1e-8);
    }

    #[test]
    fn two_atom_symmetric_boost() {
        let rates = unit_rates(&SinusoidalEngine::figure6(0.4));
        let x = effective_from_rates(&rates).unwrap().x_eff;
        let single = run_oracle(
            &Representation::FullCollective { n_atoms: 1 },
            &rates,
            &DensityMatrix::maximally_mixed(2),
            &OracleOptions::default(),
        )
        .unwrap();
        let pair = run_oracle(
            &Representation::FullCollective { n_atoms: 2 },
            &rates,
            &DensityMatrix::product_state(&[true, true]).unwrap(),
            &OracleOptions::default(),
        )
        .unwrap();
        let f = amplification(SpinQuantumNumber::from_twice(2), x) / amplification(SpinQuantumNumber::HALF, x);
        assert!(rel(pair.currents.j_cold, f * single.currents.j_cold) < 1e-8);
        assert!(rel(pair.currents.j_hot, f * single.currents.j_hot) < 1e-8);
        assert!(rel(pair.currents.power, f * single.currents.power) < 1e-8);
    }

    #[test]
    fn three_atom_product_state_matches_weighted_closed_form() {
        let rates = unit_rates(&SinusoidalEngine::figure6(0.6));
        let eff = effective_from_rates(&rates).unwrap();
        let rho0 = DensityMatrix::product_state(&[true, false, false]).unwrap();
        let w = subspace_weights(&rho0, 3).unwrap();
        let r = run_oracle(&Representation::FullCollective { n_atoms: 3 }, &rates, &rho0, &OracleOptions::default()).unwrap();
        let expected = weighted_currents(&w, &rates, &eff);
        assert!(rel(r.currents.j_cold, expected.j_cold) < 1e-8);
        assert!(rel(r.currents.j_hot, expected.j_hot) < 1e-8);
    }

    #[test]
    fn dephasing_gives_independent_atoms() {
        let rates = unit_rates(&SinusoidalEngine::figure6(0.4));
        let single = run_oracle(
            &Representation::FullCollective { n_atoms: 1 },
            &rates,
            &DensityMatrix::maximally_mixed(2),
            &OracleOptions::default(),
        )
        .unwrap();
        let r = dephasing_currents(2, &rates, 1.0, &DensityMatrix::product_state(&[true, true]).unwrap(), &OracleOptions::default())
            .unwrap();
        assert!(rel(r.currents.power, 2.0 * single.currents.power) < 1e-6);
        assert!(rel(r.currents.j_hot, 2.0 * single.currents.j_hot) < 1e-6);
    }

    #[test]
    fn zero_dephasing_keeps_collective_boost() {
        let rates = unit_rates(&SinusoidalEngine::figure6(0.4));
        let rho0 = DensityMatrix::product_state(&[true, true]).unwrap();
        let a = dephasing_currents(2, &rates, 0.0, &rho0, &OracleOptions::default()).unwrap();
        let b = run_oracle(&Representation::FullCollective { n_atoms: 2 }, &rates, &rho0, &OracleOptions::default()).unwrap();
        assert!(rel(a.currents.power, b.currents.power) < 1e-12);
    }

    #[test]
    fn rejects_large_time_step_and_mismatched_state() {
        let rates = unit_rates(&SinusoidalEngine::figure6(0.4));
        let opts = OracleOptions {
            dt: Some(10.0),
            ..OracleOptions::default()
        };
        let rep = Representation::FullCollective { n_atoms: 2 };
        assert!(run_oracle(&rep, &rates, &DensityMatrix::maximally_mixed(4), &opts).is_err());
        assert!(matches!(
            run_oracle(&rep, &rates, &DensityMatrix::maximally_mixed(2), &OracleOptions::default()),
            Err(Error::InvalidConfiguration(_))
        ));
    }

    #[test]
    fn step_budget_exhaustion_reports_residual() {
        let rates = unit_rates(&SinusoidalEngine::figure6(0.4));
        let opts = OracleOptions {
            max_steps: 10,
            ..OracleOptions::default()
        };
        let err = run_oracle(
            &Representation::FullCollective { n_atoms: 2 },
            &rates,
            &DensityMatrix::product_state(&[true, true]).unwrap(),
            &opts,
        )
        .unwrap_err();
        assert!(matches!(err, Error::ConvergenceFailure { steps: 10, residual } if residual > 0.0));
    }

    #[test]
    fn single_atom_transient_is_monotone() {
        let t = superradiant_transient(1, 1.0, 1e-3, 5.0, 10).unwrap();
        assert!((t.initial_emission() - 2.0).abs() < 1e-12);
        assert!(t.points.windows(2).all(|w| w[1].emission <= w[0].emission));
        // ⟨J_z⟩(t) = e^{−2t} − 1/2
        let last = t.points.last().unwrap();
        assert!((last.jz - ((-2.0 * last.t).exp() - 0.5)).abs() < 1e-9);
    }

    #[test]
    fn six_atom_transient_is_superradiant() {
        let t = superradiant_transient(6, 1.0, 4e-3, 1.5, 2).unwrap();
        assert!((t.initial_emission() - 12.0).abs() < 1e-10);
        let peak = t.peak().unwrap();
        assert!(peak.t > 0.0);
        assert!(peak.emission / t.initial_emission() > 1.0);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("t,jz,emission,residual\n"));
    }
}
