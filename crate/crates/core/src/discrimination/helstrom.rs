use crate::error::check_unit_interval;
use crate::fock::{eigh, DensityMatrix, Operator, PureState};
use crate::{Result, C64};

/// `‖a|φ₀⟩⟨φ₀| − b|φ₁⟩⟨φ₁|‖₁ = √(1 − 4ab|⟨φ₀|φ₁⟩|²)` for normalized states and `a + b = 1`.
pub fn pure_pair_trace_norm(a: f64, b: f64, overlap: C64) -> f64 {
    (1.0 - 4.0 * a * b * overlap.norm_sqr()).max(0.0).sqrt()
}

/// Minimum error for pure states with priors `1−q`, `q`:
/// `½ − ½√(1 − 4(1−q)q|⟨ψ₁|ψ₂⟩|²)`.
pub fn helstrom_pure(psi1: &PureState, psi2: &PureState, q: f64) -> Result<f64> {
    check_unit_interval("q", q)?;
    psi1.check_normalized()?;
    psi2.check_normalized()?;
    let overlap = psi1.inner(psi2)?;
    let p = 0.5 - 0.5 * pure_pair_trace_norm(1.0 - q, q, overlap);
    Ok(p.clamp(0.0, q.min(1.0 - q)))
}

/// `½ − ½‖(1−q)ρ₁ − qρ₂‖₁`.
pub fn helstrom_mixed(rho1: &DensityMatrix, rho2: &DensityMatrix, q: f64) -> Result<f64> {
    check_unit_interval("q", q)?;
    rho1.space().ensure_same(rho2.space())?;
    let gamma = rho1.matrix().scale(1.0 - q) - rho2.matrix().scale(q);
    let norm: f64 = eigh(&gamma)?.values.iter().map(|l| l.abs()).sum();
    Ok((0.5 - 0.5 * norm).clamp(0.0, q.min(1.0 - q)))
}

/// Optimal two-outcome measurement: projectors onto the non-negative and the
/// negative eigenspaces of `(1−q)ρ₁ − qρ₂`.
#[derive(Clone, Debug)]
pub struct HelstromMeasurement {
    pub guess_first: Operator,
    pub guess_second: Operator,
}

impl HelstromMeasurement {
    /// `(1−q)Tr[Π₂ρ₁] + qTr[Π₁ρ₂]`.
    pub fn error(&self, rho1: &DensityMatrix, rho2: &DensityMatrix, q: f64) -> f64 {
        let miss1 = (self.guess_second.matrix() * rho1.matrix()).trace().re;
        let miss2 = (self.guess_first.matrix() * rho2.matrix()).trace().re;
        (1.0 - q) * miss1 + q * miss2
    }
}

/// Eigenvalues within `1e-12` of zero go to the "guess ψ₁" projector.
pub fn helstrom_projectors(rho1: &DensityMatrix, rho2: &DensityMatrix, q: f64) -> Result<HelstromMeasurement> {
    check_unit_interval("q", q)?;
    rho1.space().ensure_same(rho2.space())?;
    let gamma = rho1.matrix().scale(1.0 - q) - rho2.matrix().scale(q);
    let eig = eigh(&gamma)?;
    let d = gamma.nrows();
    let mut first = nalgebra::DMatrix::<C64>::zeros(d, d);
    for (i, &l) in eig.values.iter().enumerate() {
        if l >= -1e-12 {
            let v = eig.vectors.column(i);
            first += v * v.adjoint();
        }
    }
    let second = nalgebra::DMatrix::<C64>::identity(d, d) - &first;
    Ok(HelstromMeasurement {
        guess_first: Operator::new(rho1.space().clone(), first)?,
        guess_second: Operator::new(rho1.space().clone(), second)?,
    })
}
