//! Collective spin algebra for N two-level atoms.
//!
//! Single-atom basis is `(g, e)` with `e` the excited level. In the 2^N
//! product space atom 1 is the most significant qubit, and a set bit marks an
//! excited atom. Inside an irreducible spin-j block the basis is ordered by
//! excitation number p = 0..2j, ground level first.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::density::DensityMatrix;
use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Operator = DMatrix<C64>;

/// Largest atom number for which dense 2^N operators are built by default.
pub const DEFAULT_ORACLE_MAX: u64 = 10;

/// Upper bound accepted by [`decompose`].
pub const MAX_DECOMPOSE_ATOMS: u64 = 1_000_000;

/// A spin quantum number stored as `2j` so half-integers stay exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SpinQuantumNumber {
    twice_j: u32,
}

impl SpinQuantumNumber {
    pub const HALF: SpinQuantumNumber = SpinQuantumNumber { twice_j: 1 };
    pub const ZERO: SpinQuantumNumber = SpinQuantumNumber { twice_j: 0 };

    pub const fn from_twice(twice_j: u32) -> Self {
        Self { twice_j }
    }

    /// The maximal spin N/2 of N atoms.
    pub fn maximal(n_atoms: u64) -> Self {
        Self::from_twice(n_atoms as u32)
    }

    pub fn twice(self) -> u32 {
        self.twice_j
    }

    pub fn value(self) -> f64 {
        f64::from(self.twice_j) / 2.0
    }

    /// Dimension 2j + 1 of the irreducible block.
    pub fn dim(self) -> usize {
        self.twice_j as usize + 1
    }

    /// Eigenvalue j(j+1) of J².
    pub fn casimir(self) -> f64 {
        let j = self.value();
        j * (j + 1.0)
    }

    /// Whether this spin can occur in the decomposition of `n_atoms` spins-1/2.
    pub fn occurs_for(self, n_atoms: u64) -> bool {
        u64::from(self.twice_j) <= n_atoms && (n_atoms - u64::from(self.twice_j)).is_multiple_of(2)
    }
}

impl fmt::Display for SpinQuantumNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice_j.is_multiple_of(2) {
            write!(f, "{}", self.twice_j / 2)
        } else {
            write!(f, "{}/2", self.twice_j)
        }
    }
}

impl FromStr for SpinQuantumNumber {
    type Err = Error;

    /// Accepts `"1"`, `"3/2"` or a decimal such as `"1.5"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidArgument(format!("not a spin quantum number: {s:?}"));
        if let Some((num, den)) = s.split_once('/') {
            let num: u32 = num.trim().parse().map_err(|_| bad())?;
            return match den.trim() {
                "2" => Ok(Self::from_twice(num)),
                "1" => Ok(Self::from_twice(2 * num)),
                _ => Err(bad()),
            };
        }
        let v: f64 = s.parse().map_err(|_| bad())?;
        let twice = 2.0 * v;
        if v < 0.0 || (twice - twice.round()).abs() > 1e-12 {
            return Err(bad());
        }
        Ok(Self::from_twice(twice.round() as u32))
    }
}

/// One irreducible spin sector together with the number of copies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinSector {
    pub spin: SpinQuantumNumber,
    pub multiplicity: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DickeDecomposition {
    pub n_atoms: u64,
    /// Sorted by descending j.
    pub sectors: Vec<SpinSector>,
}

impl DickeDecomposition {
    /// Σ (2j+1)·multiplicity, which equals 2^N.
    pub fn total_dimension(&self) -> BigUint {
        self.sectors
            .iter()
            .map(|s| &s.multiplicity * BigUint::from(s.spin.dim()))
            .sum()
    }

    pub fn multiplicity(&self, spin: SpinQuantumNumber) -> BigUint {
        self.sectors
            .iter()
            .find(|s| s.spin == spin)
            .map(|s| s.multiplicity.clone())
            .unwrap_or_default()
    }

    /// Number of irreducible blocks, counted with multiplicity.
    pub fn block_count(&self) -> BigUint {
        self.sectors.iter().map(|s| s.multiplicity.clone()).sum()
    }
}

/// Irreducible decomposition of N spin-1/2 particles.
///
/// The multiplicity of spin j is C(N, N/2−j) − C(N, N/2−j−1).
pub fn decompose(n_atoms: u64) -> Result<DickeDecomposition> {
    if n_atoms == 0 {
        return Err(Error::InvalidArgument("n_atoms must be positive".into()));
    }
    if n_atoms > MAX_DECOMPOSE_ATOMS {
        return Err(Error::InvalidArgument(format!(
            "n_atoms = {n_atoms} exceeds {MAX_DECOMPOSE_ATOMS}"
        )));
    }
    let mut sectors = Vec::with_capacity(n_atoms as usize / 2 + 1);
    let mut binom_prev = BigUint::zero();
    let mut binom = BigUint::one();
    // k counts the lowering steps below the top, j = N/2 - k.
    for k in 0..=n_atoms / 2 {
        if k > 0 {
            binom_prev = binom.clone();
            binom = binom * BigUint::from(n_atoms - k + 1) / BigUint::from(k);
        }
        sectors.push(SpinSector {
            spin: SpinQuantumNumber::from_twice((n_atoms - 2 * k) as u32),
            multiplicity: &binom - &binom_prev,
        });
    }
    Ok(DickeDecomposition { n_atoms, sectors })
}

/// S_− for a spin-j block: ⟨p|S_−|p+1⟩ = √((p+1)(2j−p)).
pub fn lowering_operator(j: SpinQuantumNumber) -> Operator {
    let d = j.dim();
    let tj = j.twice() as f64;
    let mut m = Operator::zeros(d, d);
    for p in 0..d - 1 {
        let pf = p as f64;
        m[(p, p + 1)] = C64::new(((pf + 1.0) * (tj - pf)).sqrt(), 0.0);
    }
    m
}

pub fn raising_operator(j: SpinQuantumNumber) -> Operator {
    lowering_operator(j).adjoint()
}

/// S_z for a spin-j block, diag(p − j).
pub fn z_operator(j: SpinQuantumNumber) -> Operator {
    let d = j.dim();
    let jv = j.value();
    Operator::from_diagonal(&DVector::from_fn(d, |p, _| C64::new(p as f64 - jv, 0.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    X,
    Y,
    Z,
    Plus,
    Minus,
}

/// Single-atom operators in the `(g, e)` basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiteOperator {
    /// σ_− = |g⟩⟨e|
    Lower,
    /// σ_+ = |e⟩⟨g|
    Raise,
    /// Pauli σ_z = diag(−1, +1)
    PauliZ,
    /// Pauli σ_x
    PauliX,
    /// Pauli σ_y
    PauliY,
}

impl SiteOperator {
    fn entries(self) -> [[C64; 2]; 2] {
        let o = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        match self {
            SiteOperator::Lower => [[o, one], [o, o]],
            SiteOperator::Raise => [[o, o], [one, o]],
            SiteOperator::PauliZ => [[-one, o], [o, one]],
            SiteOperator::PauliX => [[o, one], [one, o]],
            // σ_y = −i(σ_+ − σ_−)
            SiteOperator::PauliY => [[o, i], [-i, o]],
        }
    }
}

pub(crate) fn check_oracle_size(n_atoms: u64, max: u64) -> Result<usize> {
    if n_atoms == 0 {
        return Err(Error::InvalidArgument("n_atoms must be positive".into()));
    }
    if n_atoms > max {
        return Err(Error::ResourceLimit {
            atoms: n_atoms,
            max,
        });
    }
    Ok(1usize << n_atoms)
}

fn bit_of(n_atoms: u64, site: u64) -> u64 {
    n_atoms - 1 - site
}

/// `op` acting on atom `site` (0-based, atom 0 most significant) of an
/// `n_atoms` register, accumulated into `out` with weight `scale`.
fn add_site_operator(out: &mut Operator, n_atoms: u64, site: u64, op: SiteOperator, scale: C64) {
    let e = op.entries();
    let bit = bit_of(n_atoms, site);
    for b in 0..out.ncols() {
        let c = (b >> bit) & 1;
        for (r, row) in e.iter().enumerate() {
            let v = row[c];
            if v.re == 0.0 && v.im == 0.0 {
                continue;
            }
            let target = (b & !(1 << bit)) | (r << bit);
            out[(target, b)] += v * scale;
        }
    }
}

/// A single-site operator embedded in the 2^N space.
pub fn site_operator(n_atoms: u64, site: u64, op: SiteOperator) -> Result<Operator> {
    let dim = check_oracle_size(n_atoms, DEFAULT_ORACLE_MAX)?;
    if site >= n_atoms {
        return Err(Error::InvalidArgument(format!(
            "site {site} out of range for {n_atoms} atoms"
        )));
    }
    let mut m = Operator::zeros(dim, dim);
    add_site_operator(&mut m, n_atoms, site, op, C64::new(1.0, 0.0));
    Ok(m)
}

/// Collective operator J_x, J_y, J_z (sums of σ/2) or J_± (sums of σ_±)
/// on the 2^N space, with the default dense-size limit.
pub fn collective_operator(n_atoms: u64, which: Component) -> Result<Operator> {
    collective_operator_limited(n_atoms, which, DEFAULT_ORACLE_MAX)
}

pub fn collective_operator_limited(n_atoms: u64, which: Component, oracle_max: u64) -> Result<Operator> {
    let dim = check_oracle_size(n_atoms, oracle_max)?;
    let (op, scale) = match which {
        Component::X => (SiteOperator::PauliX, 0.5),
        Component::Y => (SiteOperator::PauliY, 0.5),
        Component::Z => (SiteOperator::PauliZ, 0.5),
        Component::Plus => (SiteOperator::Raise, 1.0),
        Component::Minus => (SiteOperator::Lower, 1.0),
    };
    let mut m = Operator::zeros(dim, dim);
    for site in 0..n_atoms {
        add_site_operator(&mut m, n_atoms, site, op, C64::new(scale, 0.0));
    }
    Ok(m)
}

fn binomial_f64(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Normalised fully symmetric state with `excitations` excited atoms.
pub fn symmetric_state(n_atoms: u64, excitations: u64) -> Result<DVector<C64>> {
    let dim = check_oracle_size(n_atoms, DEFAULT_ORACLE_MAX)?;
    if excitations > n_atoms {
        return Err(Error::InvalidArgument(format!(
            "{excitations} excitations out of range for {n_atoms} atoms"
        )));
    }
    let amp = 1.0 / binomial_f64(n_atoms, excitations).sqrt();
    Ok(DVector::from_fn(dim, |b, _| {
        if (b as u64).count_ones() as u64 == excitations {
            C64::new(amp, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    }))
}

/// Eigenvectors of J² inside one fixed-excitation sector of the 2^N space.
struct SectorBasis {
    states: Vec<usize>,
    spins: Vec<SpinQuantumNumber>,
    vectors: DMatrix<f64>,
}

/// J² commutes with J_z, so it is diagonalised sector by sector. Within a
/// sector J² = J_+J_− + J_z² − J_z is a real symmetric matrix.
fn sector_bases(n_atoms: u64) -> Result<Vec<SectorBasis>> {
    let dim = check_oracle_size(n_atoms, DEFAULT_ORACLE_MAX)?;
    let n = n_atoms as usize;
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let states: Vec<usize> = (0..dim).filter(|b| b.count_ones() as usize == k).collect();
        let index: BTreeMap<usize, usize> = states.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let m = k as f64 - n as f64 / 2.0;
        let mut j2 = DMatrix::<f64>::from_diagonal_element(states.len(), states.len(), m * m - m);
        for (col, &s) in states.iter().enumerate() {
            for a in (0..n).filter(|a| s >> a & 1 == 1) {
                let lowered = s & !(1 << a);
                for b in (0..n).filter(|b| lowered >> b & 1 == 0) {
                    j2[(index[&(lowered | 1 << b)], col)] += 1.0;
                }
            }
        }
        let eig = SymmetricEigen::new(j2);
        let spins = eig
            .eigenvalues
            .iter()
            .map(|&lam| {
                let twice = (4.0 * lam + 1.0).max(0.0).sqrt() - 1.0;
                SpinQuantumNumber::from_twice(twice.round() as u32)
            })
            .collect();
        out.push(SectorBasis {
            states,
            spins,
            vectors: eig.eigenvectors,
        });
    }
    Ok(out)
}

/// Orthonormal eigenbasis of J² on the 2^N space (columns) and the spin
/// label of every column.
pub fn total_spin_basis(n_atoms: u64) -> Result<(DMatrix<f64>, Vec<SpinQuantumNumber>)> {
    let dim = 1usize << n_atoms;
    let mut basis = DMatrix::<f64>::zeros(dim, dim);
    let mut labels = Vec::with_capacity(dim);
    let mut col = 0;
    for sector in sector_bases(n_atoms)? {
        for (v, &spin) in sector.spins.iter().enumerate() {
            for (row, &s) in sector.states.iter().enumerate() {
                basis[(s, col)] = sector.vectors[(row, v)];
            }
            labels.push(spin);
            col += 1;
        }
    }
    Ok((basis, labels))
}

/// Spectral projector of J² onto total spin `j` (all multiplicity copies).
pub fn spin_projector(n_atoms: u64, j: SpinQuantumNumber) -> Result<Operator> {
    let dim = check_oracle_size(n_atoms, DEFAULT_ORACLE_MAX)?;
    let mut p = Operator::zeros(dim, dim);
    for sector in sector_bases(n_atoms)? {
        for (v, _) in sector.spins.iter().enumerate().filter(|(_, &s)| s == j) {
            let vec = sector.vectors.column(v);
            for (r, &sr) in sector.states.iter().enumerate() {
                for (c, &sc) in sector.states.iter().enumerate() {
                    p[(sr, sc)] += C64::new(vec[r] * vec[c], 0.0);
                }
            }
        }
    }
    Ok(p)
}

/// Weights Tr[P_j ρ0] of every total spin j present in `rho0`.
pub fn subspace_weights(rho0: &DensityMatrix, n_atoms: u64) -> Result<BTreeMap<SpinQuantumNumber, f64>> {
    let dim = check_oracle_size(n_atoms, DEFAULT_ORACLE_MAX)?;
    if rho0.dim() != dim {
        return Err(Error::InvalidArgument(format!(
            "density matrix has dimension {}, expected {dim}",
            rho0.dim()
        )));
    }
    let rho = rho0.matrix();
    let mut weights: BTreeMap<SpinQuantumNumber, f64> = decompose(n_atoms)?
        .sectors
        .iter()
        .map(|s| (s.spin, 0.0))
        .collect();
    for sector in sector_bases(n_atoms)? {
        for (v, spin) in sector.spins.iter().enumerate() {
            let vec = sector.vectors.column(v);
            let mut acc = C64::new(0.0, 0.0);
            for (r, &sr) in sector.states.iter().enumerate() {
                for (c, &sc) in sector.states.iter().enumerate() {
                    acc += rho[(sr, sc)] * (vec[r] * vec[c]);
                }
            }
            *weights.entry(*spin).or_insert(0.0) += acc.re;
        }
    }
    Ok(weights)
}
