//! The worked examples evaluated through the general Fock engine.

use crate::discrimination::{branch_decompose, certify, DiscriminationInstance, NoGoCertificate};
use crate::fock::{beam_splitter, coherent_cutoff, coherent_state, fock_state, FockSpace, PureState};
use crate::measurement::{pnr_povm, pure_loss_kraus, Label, Measurement};
use crate::{Result, C64};

use super::types::{BranchSummary, Evaluation};

/// An engine evaluation together with the objects it came from.
#[derive(Clone, Debug)]
pub struct EngineRun {
    pub eval: Evaluation,
    pub certificate: NoGoCertificate,
    pub instance: DiscriminationInstance,
}

fn inputs(theta: f64, space: &FockSpace) -> Result<(PureState, PureState)> {
    let (s, c) = theta.sin_cos();
    let psi1 = fock_state(0, space)?;
    let mut amps = vec![0.0; space.dim()];
    amps[0] = c;
    amps[1] = s;
    let psi2 = PureState::from_real(space.clone(), &amps)?;
    Ok((psi1, psi2))
}

pub(crate) fn env_engine(
    env: PureState,
    sys_cutoff: usize,
    eta: f64,
    q: f64,
    theta: f64,
    measurement: Measurement,
    k_max: usize,
) -> Result<EngineRun> {
    let sys = FockSpace::new(sys_cutoff);
    let (psi1, psi2) = inputs(theta, &sys)?;
    let unitary = beam_splitter(eta, &sys, env.space())?;
    let instance = DiscriminationInstance::new(psi1, psi2, q, env, unitary, measurement)?;
    let decomposition = branch_decompose(&instance)?;

    let branches = (0..=k_max)
        .map(|k| {
            let label = Label::single(k);
            if let Some(b) = decomposition.branch(&label) {
                BranchSummary {
                    p_k: b.p_k,
                    p_k_given: b.p_k_given,
                    priors: Some(b.priors),
                    p_err: Some(b.p_me_branch),
                    overlap_sq: b.overlap.map(|z| z.norm_sqr()),
                }
            } else if let Some(d) = decomposition.dropped.iter().find(|d| d.label == label) {
                BranchSummary::suppressed(d.p_k, d.p_k_given)
            } else {
                BranchSummary::suppressed(0.0, [0.0, 0.0])
            }
        })
        .collect();

    let certificate = certify(&instance, decomposition)?;
    let eval = Evaluation {
        p_me: certificate.p_me,
        p_aveme: certificate.p_aveme,
        margin: certificate.margin,
        captured_mass: certificate.captured_mass,
        branches,
    };
    Ok(EngineRun {
        eval,
        certificate,
        instance,
    })
}

/// Environment `|n_env⟩`, perfect counting, both modes truncated at `cutoff`.
pub fn fock_env_engine(n_env: usize, eta: f64, q: f64, theta: f64, cutoff: usize, k_max: usize) -> Result<EngineRun> {
    let env_space = FockSpace::new(cutoff);
    let env = fock_state(n_env, &env_space)?;
    env_engine(env, cutoff, eta, q, theta, Measurement::Povm(pnr_povm(&env_space)), k_max)
}

/// Environment `|2⟩`, perfect counting. Cutoff 4 holds every reachable state exactly.
pub fn example1_engine(eta: f64, q: f64, theta: f64) -> Result<EngineRun> {
    fock_env_engine(2, eta, q, theta, 4, 3)
}

/// Environment `|α⟩`, perfect counting. `cutoff` defaults to the coherent-state policy.
pub fn example2_engine(alpha: f64, eta: f64, q: f64, theta: f64, k_max: usize, cutoff: Option<usize>) -> Result<EngineRun> {
    let a = C64::new(alpha, 0.0);
    let cutoff = cutoff.unwrap_or_else(|| coherent_cutoff(a));
    let env_space = FockSpace::new(cutoff);
    let env = coherent_state(a, &env_space)?;
    env_engine(env, cutoff, eta, q, theta, Measurement::Povm(pnr_povm(&env_space)), k_max)
}

/// Environment `|2⟩`, pure loss `τ` then perfect counting.
pub fn lossy_engine(eta: f64, q: f64, theta: f64, tau: f64) -> Result<EngineRun> {
    let env_space = FockSpace::new(4);
    let env = fock_state(2, &env_space)?;
    let stack = pure_loss_kraus(tau, &env_space, None)?;
    env_engine(env, 4, eta, q, theta, Measurement::Kraus(stack), 3)
}
