use std::f64::consts::PI;

use super::{average_min_error, branch_decompose, helstrom_pure, BranchDecomposition, BranchResult, DiscriminationInstance};
use crate::{tol, Error, Result};

/// Evidence for `P_aveme ≥ P_me` on one instance.
#[derive(Clone, Debug)]
pub struct NoGoCertificate {
    /// Helstrom error of `ψ₁`, `ψ₂` without any environment.
    pub p_me: f64,
    /// `Σ_k P(k) P_me^{(k)}` over kept branches.
    pub p_aveme: f64,
    pub margin: f64,
    pub captured_mass: f64,
    pub dropped_mass: f64,
    pub tail: f64,
    /// `max_k r_k − min_k r_k` with `r_k = |⟨Ψ₁|I⊗M_k|Ψ₂⟩| / P(k)` (pure backend only).
    pub equality_spread: Option<f64>,
    /// Largest pairwise phase difference of `⟨Ψ₁|I⊗M_k|Ψ₂⟩`, in `[0, π]` (pure backend only).
    pub phase_spread: Option<f64>,
    pub branches: Vec<BranchResult>,
}

impl NoGoCertificate {
    /// `p_aveme / captured_mass`.
    pub fn p_aveme_renormalized(&self) -> f64 {
        self.p_aveme / self.captured_mass
    }

    /// Total probability accounted for: kept, dropped and truncated.
    pub fn bookkeeping_total(&self) -> f64 {
        self.captured_mass + self.dropped_mass + self.tail
    }
}

pub fn nogo_certificate(inst: &DiscriminationInstance) -> Result<NoGoCertificate> {
    let decomposition = branch_decompose(inst)?;
    certify(inst, decomposition)
}

pub(crate) fn certify(inst: &DiscriminationInstance, decomposition: BranchDecomposition) -> Result<NoGoCertificate> {
    let p_me = helstrom_pure(inst.psi1(), inst.psi2(), inst.q())?;
    let (p_aveme, captured_mass) = average_min_error(&decomposition.branches);
    let margin = p_aveme - p_me;
    if margin < -tol::MARGIN {
        return Err(Error::InvariantViolation { margin });
    }

    let ratios: Option<Vec<_>> = decomposition
        .branches
        .iter()
        .map(|b| b.joint_overlap.map(|z| (z, b.p_k)))
        .collect();
    let (equality_spread, phase_spread) = match ratios {
        Some(r) if !r.is_empty() => {
            let moduli: Vec<f64> = r.iter().map(|(z, p)| z.norm() / p).collect();
            let spread = moduli.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                - moduli.iter().cloned().fold(f64::INFINITY, f64::min);
            let phases: Vec<f64> = r.iter().filter(|(z, _)| z.norm() > 1e-14).map(|(z, _)| z.arg()).collect();
            let mut phase = 0.0_f64;
            for (i, a) in phases.iter().enumerate() {
                for b in &phases[i + 1..] {
                    let d = (a - b).rem_euclid(2.0 * PI);
                    phase = phase.max(d.min(2.0 * PI - d));
                }
            }
            (Some(spread), Some(phase))
        }
        _ => (None, None),
    };

    Ok(NoGoCertificate {
        p_me,
        p_aveme,
        margin,
        captured_mass,
        dropped_mass: decomposition.dropped_mass(),
        tail: decomposition.tail,
        equality_spread,
        phase_spread,
        branches: decomposition.branches,
    })
}
