use nalgebra::DMatrix;

use super::{max_abs, FockSpace, PureState};
use crate::{Error, Result, C64};

/// A square complex matrix acting on a Fock space.
///
/// Hermiticity and unitarity are not enforced at construction; query the
/// residuals when a caller needs them.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    space: FockSpace,
    matrix: DMatrix<C64>,
}

impl Operator {
    pub fn new(space: FockSpace, matrix: DMatrix<C64>) -> Result<Self> {
        let d = space.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::SpaceMismatch {
                left: space.to_string(),
                right: format!("{}x{} matrix", matrix.nrows(), matrix.ncols()),
            });
        }
        Ok(Self { space, matrix })
    }

    pub fn identity(space: &FockSpace) -> Self {
        let d = space.dim();
        Self {
            space: space.clone(),
            matrix: DMatrix::identity(d, d),
        }
    }

    pub fn zeros(space: &FockSpace) -> Self {
        let d = space.dim();
        Self {
            space: space.clone(),
            matrix: DMatrix::zeros(d, d),
        }
    }

    /// `|φ⟩⟨φ|` for any vector, normalized or not.
    pub fn projector(state: &PureState) -> Self {
        let v = state.amplitudes();
        Self {
            space: state.space().clone(),
            matrix: v * v.adjoint(),
        }
    }

    pub(crate) fn from_parts(space: FockSpace, matrix: DMatrix<C64>) -> Self {
        debug_assert_eq!(matrix.nrows(), space.dim());
        Self { space, matrix }
    }

    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.matrix[(row, col)]
    }

    pub fn adjoint(&self) -> Operator {
        Self {
            space: self.space.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn tensor(&self, other: &Operator) -> Operator {
        Self {
            space: self.space.tensor(&other.space),
            matrix: self.matrix.kronecker(&other.matrix),
        }
    }

    pub fn compose(&self, other: &Operator) -> Result<Operator> {
        self.space.ensure_same(&other.space)?;
        Ok(Self {
            space: self.space.clone(),
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        self.space.ensure_same(&other.space)?;
        Ok(Self {
            space: self.space.clone(),
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn scale(&self, factor: f64) -> Operator {
        Self {
            space: self.space.clone(),
            matrix: self.matrix.scale(factor),
        }
    }

    /// `‖A − A†‖_max`.
    pub fn hermiticity_residual(&self) -> f64 {
        max_abs(&(&self.matrix - self.matrix.adjoint()))
    }

    /// `‖U†U − I‖_max`.
    pub fn unitarity_residual(&self) -> f64 {
        let d = self.space.dim();
        max_abs(&(self.matrix.adjoint() * &self.matrix - DMatrix::<C64>::identity(d, d)))
    }

    /// `‖(U†U − I)P‖_max` with `P` projecting onto basis states of total
    /// photon number at most `max_photons`.
    pub fn unitarity_residual_below(&self, max_photons: usize) -> f64 {
        let d = self.space.dim();
        let gram = self.matrix.adjoint() * &self.matrix;
        let mut worst = 0.0_f64;
        for col in (0..d).filter(|&c| self.space.total_photons(c) <= max_photons) {
            for row in 0..d {
                let target = if row == col { 1.0 } else { 0.0 };
                worst = worst.max((gram[(row, col)] - target).norm());
            }
        }
        worst
    }

    /// `A|ψ⟩`. Norm lost to truncation is added to the tail bound.
    pub fn apply(&self, state: &PureState) -> Result<PureState> {
        self.space.ensure_same(state.space())?;
        let amps = &self.matrix * state.amplitudes();
        let before = state.norm_sqr();
        let after: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        let lost = (before - after).max(0.0);
        Ok(PureState::with_parts(
            self.space.clone(),
            amps,
            state.tail_bound() + lost,
            state.is_normalized(),
        ))
    }

    /// `⟨ψ|A|φ⟩`.
    pub fn matrix_element(&self, bra: &PureState, ket: &PureState) -> Result<C64> {
        self.space.ensure_same(bra.space())?;
        self.space.ensure_same(ket.space())?;
        Ok(bra.amplitudes().dotc(&(&self.matrix * ket.amplitudes())))
    }
}

/// Lowering operator, `⟨n−1|â|n⟩ = √n`.
pub fn annihilation(space: &FockSpace) -> Result<Operator> {
    let c = space.cutoff()?;
    let mut m = DMatrix::zeros(c, c);
    for n in 1..c {
        m[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    Ok(Operator::from_parts(space.clone(), m))
}

pub fn creation(space: &FockSpace) -> Result<Operator> {
    Ok(annihilation(space)?.adjoint())
}

pub fn number_op(space: &FockSpace) -> Result<Operator> {
    let c = space.cutoff()?;
    let m = DMatrix::from_fn(c, c, |i, j| if i == j { C64::new(i as f64, 0.0) } else { C64::new(0.0, 0.0) });
    Ok(Operator::from_parts(space.clone(), m))
}
