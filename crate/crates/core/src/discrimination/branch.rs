use crate::fock::{amplitude_matrix, apply_env, DensityMatrix, PureState};
use crate::measurement::{kraus_branch, Label, Measurement};
use crate::{tol, Error, Result, C64};

use super::{helstrom_mixed, helstrom_pure, DiscriminationInstance};

#[derive(Clone, Debug)]
pub enum ConditionalState {
    /// `(I ⊗ M_k^{1/2})Û|ψᵢ,e⟩ / √P(k|i)` on the joint space.
    Pure(PureState),
    /// Normalized system state after a channel and readout.
    Mixed(DensityMatrix),
}

/// One kept outcome `k` of the environment measurement.
#[derive(Clone, Debug)]
pub struct BranchResult {
    pub label: Label,
    /// `P(k) = (1−q)P(k|1) + qP(k|2)`.
    pub p_k: f64,
    /// `(P(k|1), P(k|2))`.
    pub p_k_given: [f64; 2],
    /// Bayes-updated priors `(P′(1|k), P′(2|k))`.
    pub priors: [f64; 2],
    /// `None` when `P(k|i)` is below the probability floor: the branch is
    /// then conclusive for the other hypothesis and `p_me_branch` is zero.
    pub conditional: [Option<ConditionalState>; 2],
    pub p_me_branch: f64,
    /// `⟨Ψ₁^{(k)}|Ψ₂^{(k)}⟩` (pure backend, both states present).
    pub overlap: Option<C64>,
    /// `⟨Ψ₁|I ⊗ M_k|Ψ₂⟩` (pure backend).
    pub joint_overlap: Option<C64>,
}

/// An outcome whose probability fell below the floor.
#[derive(Clone, Debug, PartialEq)]
pub struct DroppedBranch {
    pub label: Label,
    pub p_k: f64,
    pub p_k_given: [f64; 2],
}

#[derive(Clone, Debug)]
pub struct BranchDecomposition {
    pub branches: Vec<BranchResult>,
    pub dropped: Vec<DroppedBranch>,
    /// Prior-weighted truncation tail of `Û|ψᵢ,e⟩`.
    pub tail: f64,
}

impl BranchDecomposition {
    pub fn captured_mass(&self) -> f64 {
        self.branches.iter().map(|b| b.p_k).sum()
    }

    pub fn dropped_mass(&self) -> f64 {
        self.dropped.iter().map(|b| b.p_k).sum()
    }

    pub fn branch(&self, label: &Label) -> Option<&BranchResult> {
        self.branches.iter().find(|b| &b.label == label)
    }
}

struct RawBranch {
    label: Label,
    p_given: [f64; 2],
    conditional: [Option<ConditionalState>; 2],
    joint_overlap: Option<C64>,
}

/// Splits an instance into post-selection branches, one per measurement
/// outcome, in label order.
pub fn branch_decompose(inst: &DiscriminationInstance) -> Result<BranchDecomposition> {
    let q = inst.q();
    let weights = [1.0 - q, q];
    let [out1, out2] = inst.outputs();
    let tail = weights[0] * out1.tail_bound() + weights[1] * out2.tail_bound();

    let raw = match inst.measurement() {
        Measurement::Povm(povm) => {
            let joint_space = out1.space().clone();
            let (_, m1) = amplitude_matrix(out1, povm.space())?;
            let (_, m2) = amplitude_matrix(out2, povm.space())?;
            povm.elements()
                .iter()
                .map(|e| {
                    let root = e.root.as_ref().ok_or(Error::NotPsd { min_eigenvalue: f64::NAN })?;
                    let w = [apply_env(&m1, root.matrix()), apply_env(&m2, root.matrix())];
                    let p_given = [w[0].norm_squared(), w[1].norm_squared()];
                    let joint_overlap = w[0].dotc(&w[1]);
                    let mut conditional = [None, None];
                    for i in 0..2 {
                        if p_given[i] >= tol::PROBABILITY_FLOOR {
                            let flat = flatten(&w[i]).unscale(p_given[i].sqrt());
                            let state = PureState::new(joint_space.clone(), flat, 0.0)
                                .map_err(|e| Error::InternalConsistency(format!("conditional state: {e}")))?;
                            conditional[i] = Some(ConditionalState::Pure(state));
                        }
                    }
                    Ok(RawBranch {
                        label: e.label.clone(),
                        p_given,
                        conditional,
                        joint_overlap: Some(joint_overlap),
                    })
                })
                .collect::<Result<Vec<_>>>()?
        }
        Measurement::Kraus(stack) => inst
            .measurement()
            .labels()
            .into_iter()
            .map(|label| {
                let mut p_given = [0.0; 2];
                let mut conditional = [None, None];
                for (i, out) in [out1, out2].into_iter().enumerate() {
                    let (p, sys, rho) = kraus_branch(out, stack, &label)?;
                    p_given[i] = p;
                    if p >= tol::PROBABILITY_FLOOR {
                        let rho = DensityMatrix::new(sys, rho.unscale(p))
                            .map_err(|e| Error::InternalConsistency(format!("conditional density matrix: {e}")))?;
                        conditional[i] = Some(ConditionalState::Mixed(rho));
                    }
                }
                Ok(RawBranch {
                    label,
                    p_given,
                    conditional,
                    joint_overlap: None,
                })
            })
            .collect::<Result<Vec<_>>>()?,
    };

    let mut branches = Vec::new();
    let mut dropped = Vec::new();
    for rb in raw {
        let p_k = weights[0] * rb.p_given[0] + weights[1] * rb.p_given[1];
        if p_k < tol::PROBABILITY_FLOOR {
            dropped.push(DroppedBranch {
                label: rb.label,
                p_k,
                p_k_given: rb.p_given,
            });
            continue;
        }
        let priors = [weights[0] * rb.p_given[0] / p_k, weights[1] * rb.p_given[1] / p_k];
        let (p_me_branch, overlap) = match &rb.conditional {
            [Some(ConditionalState::Pure(a)), Some(ConditionalState::Pure(b))] => {
                (helstrom_pure(a, b, priors[1])?, Some(a.inner(b)?))
            }
            [Some(ConditionalState::Mixed(a)), Some(ConditionalState::Mixed(b))] => {
                (helstrom_mixed(a, b, priors[1])?, None)
            }
            _ => (0.0, None),
        };
        branches.push(BranchResult {
            label: rb.label,
            p_k,
            p_k_given: rb.p_given,
            priors,
            conditional: rb.conditional,
            p_me_branch,
            overlap,
            joint_overlap: rb.joint_overlap,
        });
    }
    Ok(BranchDecomposition { branches, dropped, tail })
}

/// `(Σ_k P(k)·P_me^{(k)}, Σ_k P(k))` over the kept branches, unnormalized.
pub fn average_min_error(branches: &[BranchResult]) -> (f64, f64) {
    branches
        .iter()
        .fold((0.0, 0.0), |(err, mass), b| (err + b.p_k * b.p_me_branch, mass + b.p_k))
}

fn flatten(w: &nalgebra::DMatrix<C64>) -> nalgebra::DVector<C64> {
    // row-major: system index slow, environment index fast
    nalgebra::DVector::from_fn(w.nrows() * w.ncols(), |i, _| w[(i / w.ncols(), i % w.ncols())])
}
