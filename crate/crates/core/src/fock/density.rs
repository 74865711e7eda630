use nalgebra::DMatrix;

use super::{eigh, max_abs, FockSpace, Operator, PureState};
use crate::{tol, Error, Result, C64};

/// Unit-trace positive semidefinite Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    space: FockSpace,
    matrix: DMatrix<C64>,
}

impl DensityMatrix {
    /// Validates hermiticity, positivity (`λ ≥ −psd_tol`) and unit trace.
    pub fn new(space: FockSpace, matrix: DMatrix<C64>) -> Result<Self> {
        let op = Operator::new(space, matrix)?;
        let residual = op.hermiticity_residual();
        if residual > tol::STRUCTURE {
            return Err(Error::NotHermitian { residual });
        }
        let trace: f64 = op.matrix().diagonal().iter().map(|z| z.re).sum();
        if (trace - 1.0).abs() > tol::NORM {
            return Err(Error::BadTrace { trace });
        }
        let min = eigh(op.matrix())?.values.last().copied().unwrap_or(0.0);
        if min < -tol::PSD {
            return Err(Error::NotPsd { min_eigenvalue: min });
        }
        let space = op.space().clone();
        Ok(Self {
            space,
            matrix: op.into_matrix(),
        })
    }

    /// `|ψ⟩⟨ψ|` of a normalized state.
    pub fn from_pure(state: &PureState) -> Result<Self> {
        state.check_normalized()?;
        let v = state.amplitudes();
        Ok(Self {
            space: state.space().clone(),
            matrix: v * v.adjoint(),
        })
    }

    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(eigh(&self.matrix)?.values)
    }

    pub fn hermiticity_residual(&self) -> f64 {
        max_abs(&(&self.matrix - self.matrix.adjoint()))
    }

    /// `⟨φ|ρ|φ⟩` for a normalized `φ`.
    pub fn fidelity_with_pure(&self, phi: &PureState) -> Result<f64> {
        self.space.ensure_same(phi.space())?;
        let v = phi.amplitudes();
        Ok(v.dotc(&(&self.matrix * v)).re)
    }

    pub fn as_operator(&self) -> Operator {
        Operator::from_parts(self.space.clone(), self.matrix.clone())
    }
}
