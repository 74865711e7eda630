use nalgebra::DMatrix;

use super::{eigh, FockSpace, Operator, PureState};
use crate::{Result, C64};

/// Reshapes a joint `S⊗E` vector into the `dim(S) × dim(E)` matrix `M[s, e]`.
pub(crate) fn amplitude_matrix(joint: &PureState, env: &FockSpace) -> Result<(FockSpace, DMatrix<C64>)> {
    let sys = joint.space().split_suffix(env)?;
    let de = env.dim();
    let amps = joint.amplitudes();
    Ok((sys.clone(), DMatrix::from_fn(sys.dim(), de, |s, e| amps[s * de + e])))
}

/// `(I ⊗ B)` in amplitude-matrix form: `M Bᵀ`.
pub(crate) fn apply_env(amps: &DMatrix<C64>, env_op: &DMatrix<C64>) -> DMatrix<C64> {
    amps * env_op.transpose()
}

/// `(I ⊗ ⟨φ|)|Ψ⟩` as an unnormalized system vector. Its squared norm is the
/// probability of projecting the environment onto `|φ⟩`.
pub fn env_contract(joint: &PureState, env_bra: &PureState) -> Result<PureState> {
    let (sys, m) = amplitude_matrix(joint, env_bra.space())?;
    let bra = env_bra.amplitudes().map(|z| z.conj());
    PureState::unnormalized(sys, m * bra, 0.0)
}

/// `Tr_E |Ψ⟩⟨Ψ|`, unnormalized.
pub fn reduced_system(joint: &PureState, env: &FockSpace) -> Result<Operator> {
    let (sys, m) = amplitude_matrix(joint, env)?;
    Operator::new(sys, &m * m.adjoint())
}

/// Schmidt weights (squared Schmidt coefficients) of a joint state,
/// descending and normalized to sum to one.
pub fn schmidt_weights(joint: &PureState, env: &FockSpace) -> Result<Vec<f64>> {
    let rho = reduced_system(joint, env)?;
    let eig = eigh(rho.matrix())?;
    let total: f64 = eig.values.iter().sum();
    Ok(eig.values.iter().map(|l| l / total).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{beam_splitter, fock_state};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn contract_product_states() {
        let s = FockSpace::new(4);
        let joint = fock_state(0, &s).unwrap().tensor(&fock_state(2, &s).unwrap());
        let on2 = env_contract(&joint, &fock_state(2, &s).unwrap()).unwrap();
        assert_eq!(on2.amplitudes(), fock_state(0, &s).unwrap().amplitudes());
        assert!(!on2.is_normalized());
        let on1 = env_contract(&joint, &fock_state(1, &s).unwrap()).unwrap();
        assert_eq!(on1.norm_sqr(), 0.0);
    }

    #[test]
    fn contract_after_beam_splitter() {
        let s = FockSpace::new(4);
        let eta = 0.3;
        let u = beam_splitter(eta, &s, &s).unwrap();
        let joint = u
            .apply(&fock_state(0, &s).unwrap().tensor(&fock_state(2, &s).unwrap()))
            .unwrap();
        let cond = env_contract(&joint, &fock_state(1, &s).unwrap()).unwrap();
        assert_abs_diff_eq!(cond.amplitude(1).re, (2.0 * eta * (1.0 - eta)).sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(cond.norm_sqr(), 2.0 * eta * (1.0 - eta), epsilon = 1e-15);
    }

    #[test]
    fn contract_rejects_foreign_environment() {
        let s = FockSpace::new(3);
        let joint = fock_state(0, &s).unwrap().tensor(&fock_state(1, &s).unwrap());
        assert!(env_contract(&joint, &fock_state(0, &FockSpace::new(4)).unwrap()).is_err());
    }

    #[test]
    fn product_state_has_one_schmidt_weight() {
        let s = FockSpace::new(3);
        let a = PureState::from_real(s.clone(), &[0.6, 0.8, 0.0]).unwrap();
        let b = PureState::from_real(s.clone(), &[0.0, 0.6, 0.8]).unwrap();
        let w = schmidt_weights(&a.tensor(&b), &s).unwrap();
        assert_abs_diff_eq!(w[0], 1.0, epsilon = 1e-14);
        assert!(w[1].abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn contraction_preserves_probability(
            ds in 1usize..5,
            de in 1usize..5,
            vals in prop::collection::vec(-1.0f64..1.0, 2 * 16),
        ) {
            let sys = FockSpace::new(ds);
            let env = FockSpace::new(de);
            let joint_space = sys.tensor(&env);
            let amps = nalgebra::DVector::from_fn(joint_space.dim(), |i, _| C64::new(vals[2 * i], vals[2 * i + 1]));
            let joint = PureState::unnormalized(joint_space, amps, 0.0).unwrap();
            let total: f64 = (0..de)
                .map(|k| env_contract(&joint, &fock_state(k, &env).unwrap()).unwrap().norm_sqr())
                .sum();
            prop_assert!((total - joint.norm_sqr()).abs() <= 1e-10);
        }
    }
}
