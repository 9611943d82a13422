use nalgebra::{DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::spin::{check_oracle_size, Operator, C64, DEFAULT_ORACLE_MAX};

pub const HERMITICITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const POSITIVITY_TOL: f64 = 1e-9;

/// Dense Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: Operator,
}

impl DensityMatrix {
    pub fn new(matrix: Operator) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::InvalidArgument("density matrix must be square and non-empty".into()));
        }
        let herm = hermiticity_error(&matrix);
        if herm > HERMITICITY_TOL {
            return Err(Error::InvalidArgument(format!("density matrix is not Hermitian (deviation {herm:e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidArgument(format!("density matrix trace is {tr}, expected 1")));
        }
        let rho = Self { matrix };
        let min = rho.min_eigenvalue();
        if min < -POSITIVITY_TOL {
            return Err(Error::InvalidArgument(format!("density matrix has negative eigenvalue {min:e}")));
        }
        Ok(rho)
    }

    /// Wraps an integrator state without validation.
    pub(crate) fn from_raw(matrix: Operator) -> Self {
        Self { matrix }
    }

    pub fn from_pure(psi: &DVector<C64>) -> Result<Self> {
        let norm = psi.norm();
        if norm == 0.0 {
            return Err(Error::InvalidArgument("zero state vector".into()));
        }
        let psi = psi / C64::new(norm, 0.0);
        Self::new(&psi * psi.adjoint())
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::from_raw(Operator::identity(dim, dim) / C64::new(dim as f64, 0.0))
    }

    /// Product of single-atom basis states; `true` marks an excited atom and
    /// the first entry is atom 1 (most significant qubit).
    pub fn product_state(excited: &[bool]) -> Result<Self> {
        let dim = check_oracle_size(excited.len() as u64, DEFAULT_ORACLE_MAX)?;
        let index = excited.iter().fold(0usize, |acc, &e| (acc << 1) | usize::from(e));
        let mut m = Operator::zeros(dim, dim);
        m[(index, index)] = C64::new(1.0, 0.0);
        Ok(Self::from_raw(m))
    }

    /// Two-atom singlet (|eg⟩ − |ge⟩)/√2.
    pub fn singlet() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = DVector::from_vec(vec![
            C64::new(0.0, 0.0),
            C64::new(h, 0.0),
            C64::new(-h, 0.0),
            C64::new(0.0, 0.0),
        ]);
        let m = &psi * psi.adjoint();
        Self::from_raw(m)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Operator {
        &self.matrix
    }

    pub fn into_matrix(self) -> Operator {
        self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// Tr[ρ A].
    pub fn expectation(&self, op: &Operator) -> C64 {
        (&self.matrix * op).trace()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.matrix).iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_error(&self.matrix)
    }
}

pub(crate) fn hermiticity_error(m: &Operator) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Eigenvalues of the Hermitian part of `m`.
pub(crate) fn hermitian_eigenvalues(m: &Operator) -> DVector<f64> {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    SymmetricEigen::new(h).eigenvalues
}

/// Trace norm Σ|λ| of a Hermitian matrix.
pub(crate) fn trace_norm(m: &Operator) -> f64 {
    hermitian_eigenvalues(m).iter().map(|x| x.abs()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_invalid_matrices() {
        let mut m = Operator::identity(2, 2) * C64::new(0.5, 0.0);
        m[(0, 1)] = C64::new(0.1, 0.0);
        assert!(DensityMatrix::new(m).is_err());

        let m = Operator::identity(2, 2);
        assert!(DensityMatrix::new(m).is_err());

        let mut m = Operator::zeros(2, 2);
        m[(0, 0)] = C64::new(1.5, 0.0);
        m[(1, 1)] = C64::new(-0.5, 0.0);
        assert!(DensityMatrix::new(m).is_err());
    }

    #[test]
    fn constructors_are_valid_states() {
        for rho in [
            DensityMatrix::singlet(),
            DensityMatrix::maximally_mixed(4),
            DensityMatrix::product_state(&[true, false, true]).unwrap(),
        ] {
            DensityMatrix::new(rho.matrix().clone()).unwrap();
        }
        let rho = DensityMatrix::product_state(&[true, false]).unwrap();
        assert_eq!(rho.matrix()[(2, 2)], C64::new(1.0, 0.0));
    }

    #[test]
    fn trace_norm_of_diagonal() {
        let m = Operator::from_diagonal(&DVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(-2.0, 0.0)]));
        assert!((trace_norm(&m) - 3.0).abs() < 1e-14);
    }
}
