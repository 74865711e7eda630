use nalgebra::{DMatrix, SymmetricEigen};

use super::Operator;
use crate::{tol, Error, Result, C64};

/// Spectral decomposition of a Hermitian matrix, eigenvalues descending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Eigenvectors as columns, in the order of `values`.
    pub vectors: DMatrix<C64>,
}

impl HermitianEigen {
    /// `V Λ V†`.
    pub fn reconstruct(&self) -> DMatrix<C64> {
        let d = self.values.len();
        let lambda = DMatrix::from_fn(d, d, |i, j| {
            if i == j {
                C64::new(self.values[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        &self.vectors * lambda * self.vectors.adjoint()
    }
}

pub(crate) fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Eigen decomposition of a matrix that must be Hermitian to within
/// `tol::STRUCTURE · max(1, ‖A‖_max)`.
pub(crate) fn eigh(a: &DMatrix<C64>) -> Result<HermitianEigen> {
    let scale = max_abs(a).max(1.0);
    let residual = max_abs(&(a - a.adjoint()));
    if residual > tol::STRUCTURE * scale {
        return Err(Error::NotHermitian { residual });
    }
    let sym = (a + a.adjoint()).scale(0.5);
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, 0).ok_or(Error::EigenFailure)?;
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(a.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(HermitianEigen { values, vectors })
}

pub fn hermitian_eig(a: &Operator) -> Result<HermitianEigen> {
    eigh(a.matrix())
}

/// `Σ|λᵢ|` of a Hermitian operator.
pub fn trace_norm(a: &Operator) -> Result<f64> {
    Ok(eigh(a.matrix())?.values.iter().map(|l| l.abs()).sum())
}

/// Positive square root; eigenvalues in `[−psd_tol, 0)` are clamped to zero.
pub fn psd_sqrt(a: &Operator) -> Result<Operator> {
    let eig = eigh(a.matrix())?;
    let min = eig.values.last().copied().unwrap_or(0.0);
    if min < -tol::PSD {
        return Err(Error::NotPsd { min_eigenvalue: min });
    }
    let root = HermitianEigen {
        values: eig.values.iter().map(|l| l.max(0.0).sqrt()).collect(),
        vectors: eig.vectors,
    };
    Operator::new(a.space().clone(), root.reconstruct())
}
