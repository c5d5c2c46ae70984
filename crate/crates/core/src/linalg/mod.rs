//! Dense complex linear algebra and random sampling.

mod eig;
mod jacobi;
mod matrix;
mod random;

pub use eig::{
    hermitian_eig, hermitian_eig_leading, hermitian_eigvals, HermitianEig, PartialEig,
    HERMITIAN_TOLERANCE,
};
pub use jacobi::hermitian_eig_jacobi;
pub use matrix::{inner, norm, quad_form, ComplexMatrix, C64};
pub use random::{complex_gauss_matrix, trial_seed};

pub(crate) use matrix::{ONE, ZERO};

use crate::error::{Error, Result};

/// Relative floor below which negative eigenvalues of a PSD input are an error.
const PSD_CLAMP: f64 = 1e-10;
/// Relative eigenvalue floor for Hermitian positive-definite solves.
const PD_FLOOR: f64 = 1e-12;

/// Hermitian PSD square root `S` with `S·S = A`; eigenvalues down to
/// `−1e-10·‖A‖₂` are clamped to zero.
pub fn psd_sqrt(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(a)?;
    let floor = -PSD_CLAMP * eig.spectral_norm();
    if let Some(&smallest) = eig.values.last() {
        if smallest < floor {
            return Err(Error::NotPsd {
                eigenvalue: smallest,
            });
        }
    }
    let roots: Vec<f64> = eig.values.iter().map(|v| v.max(0.0).sqrt()).collect();
    Ok(HermitianEig {
        values: roots,
        vectors: eig.vectors,
    }
    .reconstruct())
}

/// Solves `A x = b` for Hermitian positive-definite `A`. Fails with
/// `Singular` unless the smallest eigenvalue exceeds `1e-12·‖A‖₂`.
pub fn solve_hermitian_pd(a: &ComplexMatrix, b: &[C64]) -> Result<Vec<C64>> {
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            actual: b.len(),
        });
    }
    let eig = hermitian_eig(a)?;
    let smallest = eig.values.last().copied().unwrap_or(0.0);
    if smallest <= PD_FLOOR * eig.spectral_norm() {
        return Err(Error::Singular { smallest });
    }
    eig.solve(b)
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;

    pub fn random_hermitian(n: usize, seed: u64) -> ComplexMatrix {
        let g = complex_gauss_matrix(n, n, seed);
        g.add(&g.adjoint()).unwrap().scaled(0.5)
    }

    pub fn random_pd(n: usize, seed: u64) -> ComplexMatrix {
        let g = complex_gauss_matrix(n, n, seed);
        g.adjoint().matmul(&g).unwrap().add(&ComplexMatrix::identity(n).scaled(0.1)).unwrap()
    }

    pub fn orthonormality_defect(v: &ComplexMatrix) -> f64 {
        v.adjoint()
            .matmul(v)
            .unwrap()
            .sub(&ComplexMatrix::identity(v.cols()))
            .unwrap()
            .frobenius_norm()
    }
}
