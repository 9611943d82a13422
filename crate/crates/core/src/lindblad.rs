//! Lindblad generators for the brute-force oracle.
//!
//! Dissipator convention: a channel `(A, rate)` contributes
//! `rate · (2AρA† − A†Aρ − ρA†A)`. There is no Hamiltonian part since the
//! master equation is taken in the interaction picture.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::baths::{BathLabel, SidebandRates};
use crate::density::hermiticity_error;
use crate::error::{Error, Result};
use crate::spin::{
    collective_operator, lowering_operator, raising_operator, site_operator, Component, Operator, SiteOperator,
    SpinQuantumNumber, C64,
};

const CROSS_RATE_PSD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Process {
    Emission,
    Absorption,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelTag {
    Bath { bath: BathLabel, q: i32, process: Process },
    Dephasing { site: u64 },
    /// Eigenmode `mode` of the cross-rate matrix.
    Cross { mode: usize, process: Process },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LindbladChannel {
    pub jump: Operator,
    pub rate: f64,
    pub tag: ChannelTag,
}

/// Hermitian positive-semidefinite matrix c_ij of cross-decay rates.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossRateMatrix {
    c: DMatrix<C64>,
}

impl CrossRateMatrix {
    pub fn new(c: DMatrix<C64>) -> Result<Self> {
        if !c.is_square() || c.nrows() == 0 {
            return Err(Error::InvalidConfiguration("cross-rate matrix must be square and non-empty".into()));
        }
        if hermiticity_error(&c) > 1e-12 {
            return Err(Error::InvalidConfiguration("cross-rate matrix must be Hermitian".into()));
        }
        let m = Self { c };
        let min = m.eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
        if min < -CROSS_RATE_PSD_TOL {
            return Err(Error::InvalidConfiguration(format!(
                "cross-rate matrix has negative eigenvalue {min:e}"
            )));
        }
        Ok(m)
    }

    /// All entries equal to `c`: perfectly collective coupling.
    pub fn uniform(n_atoms: usize, c: f64) -> Result<Self> {
        Self::new(DMatrix::from_element(n_atoms, n_atoms, C64::new(c, 0.0)))
    }

    /// Independent atoms with individual rates.
    pub fn diagonal(rates: &[f64]) -> Result<Self> {
        let d = nalgebra::DVector::from_iterator(rates.len(), rates.iter().map(|&r| C64::new(r, 0.0)));
        Self::new(DMatrix::from_diagonal(&d))
    }

    pub fn n_atoms(&self) -> usize {
        self.c.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.c
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        SymmetricEigen::new(self.c.clone()).eigenvalues.iter().copied().collect()
    }

    fn eigen(&self) -> SymmetricEigen<C64, nalgebra::Dyn> {
        SymmetricEigen::new(self.c.clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Representation {
    /// J_± on the full 2^N space.
    FullCollective { n_atoms: u64 },
    /// S_± on a single (2j+1)-dimensional block.
    SingleBlock { spin: SpinQuantumNumber },
    /// Cross-decay and cross-absorption double sums over atom pairs, with a
    /// single global absorption factor exp(−β_eff ħω₀).
    CrossRate { c: CrossRateMatrix },
    /// `base` plus local σ_z dephasing of every atom at rate γ_d.
    WithDephasing { base: Box<Representation>, gamma_d: f64 },
}

impl Representation {
    /// Atom number of a representation acting on the 2^N space.
    pub fn n_atoms(&self) -> Option<u64> {
        match self {
            Representation::FullCollective { n_atoms } => Some(*n_atoms),
            Representation::SingleBlock { .. } => None,
            Representation::CrossRate { c } => Some(c.n_atoms() as u64),
            Representation::WithDephasing { base, .. } => base.n_atoms(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Representation::SingleBlock { spin } => spin.dim(),
            _ => 1usize << self.n_atoms().unwrap_or(0),
        }
    }

    /// The operators J_−, J_+ and J_z in which heat currents are measured.
    pub fn measurement_operators(&self) -> Result<CollectiveOperators> {
        match self {
            Representation::SingleBlock { spin } => Ok(CollectiveOperators::block(*spin)),
            _ => CollectiveOperators::full(self.n_atoms().unwrap_or(0)),
        }
    }
}

/// Collective ladder and z operators in one representation.
#[derive(Debug, Clone, PartialEq)]
pub struct CollectiveOperators {
    pub minus: Operator,
    pub plus: Operator,
    pub z: Operator,
}

impl CollectiveOperators {
    pub fn full(n_atoms: u64) -> Result<Self> {
        Ok(Self {
            minus: collective_operator(n_atoms, Component::Minus)?,
            plus: collective_operator(n_atoms, Component::Plus)?,
            z: collective_operator(n_atoms, Component::Z)?,
        })
    }

    pub fn block(spin: SpinQuantumNumber) -> Self {
        Self {
            minus: lowering_operator(spin),
            plus: raising_operator(spin),
            z: crate::spin::z_operator(spin),
        }
    }

    pub fn dim(&self) -> usize {
        self.z.nrows()
    }
}

/// One emission (`minus`) and one absorption (`plus`) channel per active
/// sideband channel.
fn bath_channels(ops: &CollectiveOperators, rates: &SidebandRates) -> Vec<LindbladChannel> {
    let mut out = Vec::with_capacity(2 * rates.channels.len());
    for c in &rates.channels {
        out.push(LindbladChannel {
            jump: ops.minus.clone(),
            rate: c.emission,
            tag: ChannelTag::Bath {
                bath: c.bath,
                q: c.q,
                process: Process::Emission,
            },
        });
        out.push(LindbladChannel {
            jump: ops.plus.clone(),
            rate: c.absorption,
            tag: ChannelTag::Bath {
                bath: c.bath,
                q: c.q,
                process: Process::Absorption,
            },
        });
    }
    out
}

pub fn build_machine_channels(
    representation: &Representation,
    rates: &SidebandRates,
    x_eff: f64,
) -> Result<Vec<LindbladChannel>> {
    match representation {
        Representation::FullCollective { n_atoms } => Ok(bath_channels(&CollectiveOperators::full(*n_atoms)?, rates)),
        Representation::SingleBlock { spin } => Ok(bath_channels(&CollectiveOperators::block(*spin), rates)),
        Representation::CrossRate { c } => {
            let n = c.n_atoms() as u64;
            let lowers: Vec<Operator> = (0..n).map(|k| site_operator(n, k, SiteOperator::Lower)).collect::<Result<_>>()?;
            let raises: Vec<Operator> = (0..n).map(|k| site_operator(n, k, SiteOperator::Raise)).collect::<Result<_>>()?;
            let dim = 1usize << n;
            let absorption_factor = (-x_eff).exp();
            let eig = c.eigen();
            let mut out = Vec::new();
            // c = U diag(λ) U†  ⇒  Σ_ij c_ij σ_i ρ σ_j† = Σ_k λ_k A_k ρ A_k†, A_k = Σ_i U_ik σ_i
            for (mode, &lambda) in eig.eigenvalues.iter().enumerate() {
                if lambda <= CROSS_RATE_PSD_TOL {
                    continue;
                }
                let mut a = Operator::zeros(dim, dim);
                let mut b = Operator::zeros(dim, dim);
                for i in 0..n as usize {
                    let u = eig.eigenvectors[(i, mode)];
                    a += &lowers[i] * u;
                    b += &raises[i] * u;
                }
                out.push(LindbladChannel {
                    jump: a,
                    rate: lambda,
                    tag: ChannelTag::Cross {
                        mode,
                        process: Process::Emission,
                    },
                });
                out.push(LindbladChannel {
                    jump: b,
                    rate: lambda * absorption_factor,
                    tag: ChannelTag::Cross {
                        mode,
                        process: Process::Absorption,
                    },
                });
            }
            Ok(out)
        }
        Representation::WithDephasing { base, gamma_d } => {
            if !(*gamma_d >= 0.0) {
                return Err(Error::InvalidConfiguration(format!("dephasing rate {gamma_d} must be non-negative")));
            }
            let Some(n) = base.n_atoms() else {
                return Err(Error::InvalidConfiguration(
                    "dephasing acts on individual atoms and needs a 2^N representation".into(),
                ));
            };
            let mut out = build_machine_channels(base, rates, x_eff)?;
            if *gamma_d > 0.0 {
                for site in 0..n {
                    out.push(LindbladChannel {
                        jump: site_operator(n, site, SiteOperator::PauliZ)?,
                        rate: *gamma_d,
                        tag: ChannelTag::Dephasing { site },
                    });
                }
            }
            Ok(out)
        }
    }
}

/// dρ/dt for the given channels.
pub fn lindblad_rhs(rho: &Operator, channels: &[LindbladChannel]) -> Operator {
    let mut out = Operator::zeros(rho.nrows(), rho.ncols());
    for ch in channels {
        if ch.rate == 0.0 {
            continue;
        }
        let a = &ch.jump;
        let ad = a.adjoint();
        let ada = &ad * a;
        let r = C64::new(ch.rate, 0.0);
        out += (a * rho * &ad * C64::new(2.0, 0.0) - &ada * rho - rho * &ada) * r;
    }
    out
}

/// Precomputed generator: channels sharing a jump operator are merged and
/// the anticommutator parts are summed into one effective operator K.
#[derive(Debug, Clone)]
pub struct Generator {
    dim: usize,
    /// (2·rate·A, A†)
    jumps: Vec<(Operator, Operator)>,
    /// Σ rate · A†A
    k: Operator,
    max_rate: f64,
}

impl Generator {
    pub fn new(dim: usize, channels: &[LindbladChannel]) -> Result<Self> {
        let mut merged: Vec<(Operator, f64)> = Vec::new();
        for ch in channels {
            if ch.jump.shape() != (dim, dim) {
                return Err(Error::InvalidConfiguration(format!(
                    "jump operator of shape {:?} does not act on dimension {dim}",
                    ch.jump.shape()
                )));
            }
            if !(ch.rate >= 0.0) {
                return Err(Error::InvalidConfiguration(format!("negative channel rate {}", ch.rate)));
            }
            if ch.rate == 0.0 {
                continue;
            }
            match merged.iter_mut().find(|(a, _)| *a == ch.jump) {
                Some((_, r)) => *r += ch.rate,
                None => merged.push((ch.jump.clone(), ch.rate)),
            }
        }
        let mut k = Operator::zeros(dim, dim);
        let mut max_rate = 0.0;
        let mut jumps = Vec::with_capacity(merged.len());
        for (a, rate) in merged {
            let ad = a.adjoint();
            let ada = &ad * &a;
            let norm = SymmetricEigen::new(ada.clone()).eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            max_rate += rate * norm;
            k += &ada * C64::new(rate, 0.0);
            jumps.push((a * C64::new(2.0 * rate, 0.0), ad));
        }
        Ok(Self {
            dim,
            jumps,
            k,
            max_rate,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Σ rate·‖A†A‖ over merged channels, the fastest total transition rate.
    pub fn max_rate(&self) -> f64 {
        self.max_rate
    }

    pub fn apply(&self, rho: &Operator) -> Operator {
        let mut out = -(&self.k * rho) - rho * &self.k;
        for (a2, ad) in &self.jumps {
            out += a2 * rho * ad;
        }
        out
    }

    /// Column-stacked superoperator, vec(AρB) = (Bᵀ ⊗ A) vec(ρ).
    pub fn superoperator(&self) -> DMatrix<C64> {
        let id = Operator::identity(self.dim, self.dim);
        let mut s = -(id.kronecker(&self.k)) - self.k.transpose().kronecker(&id);
        for (a2, ad) in &self.jumps {
            s += ad.transpose().kronecker(a2);
        }
        s
    }
}
