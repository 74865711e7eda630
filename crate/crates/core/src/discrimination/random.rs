use std::ops::RangeInclusive;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::DiscriminationInstance;
use crate::fock::{eigh, FockSpace, Operator, PureState};
use crate::measurement::{validate_povm, Label, Measurement, Povm};
use crate::{Error, Result, C64};

const MAX_RETRIES: usize = 8;

fn gaussian(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn random_state(rng: &mut ChaCha8Rng, space: &FockSpace) -> Result<PureState> {
    let v = DVector::from_fn(space.dim(), |_, _| gaussian(rng));
    let norm = v.norm();
    PureState::new(space.clone(), v.unscale(norm), 0.0)
}

fn random_unitary(rng: &mut ChaCha8Rng, space: &FockSpace) -> Operator {
    let d = space.dim();
    let g = DMatrix::from_fn(d, d, |_, _| gaussian(rng));
    Operator::new(space.clone(), g.qr().q()).expect("square matrix of the right size")
}

fn random_povm(rng: &mut ChaCha8Rng, space: &FockSpace, n: usize) -> Result<Povm> {
    if n <= 1 {
        return Ok(Povm::trivial(space));
    }
    let d = space.dim();
    let raw: Vec<DMatrix<C64>> = (0..n - 1)
        .map(|_| {
            let g = DMatrix::from_fn(d, d, |_, _| gaussian(rng));
            &g * g.adjoint()
        })
        .collect();
    let sum = raw.iter().fold(DMatrix::<C64>::zeros(d, d), |acc, m| acc + m);
    let largest = eigh(&sum)?.values[0];
    let mut headroom = 0.9;
    for _ in 0..MAX_RETRIES {
        let scale = headroom / largest;
        let mut elements: Vec<(Label, Operator)> = raw
            .iter()
            .enumerate()
            .map(|(k, m)| Ok((Label::single(k), Operator::new(space.clone(), m.scale(scale))?)))
            .collect::<Result<_>>()?;
        let last = DMatrix::<C64>::identity(d, d) - sum.scale(scale);
        elements.push((Label::single(n - 1), Operator::new(space.clone(), last)?));
        let povm = Povm::new(space.clone(), elements)?;
        if validate_povm(&povm).passed {
            return Ok(povm);
        }
        headroom *= 0.5;
    }
    Err(Error::InstanceGeneration(format!("no valid {n}-outcome POVM after {MAX_RETRIES} rescalings")))
}

/// Deterministic random instance: Gaussian pure states, a unitary from the QR
/// factor of a complex Gaussian matrix, and a POVM whose first `n_povm − 1`
/// elements are rescaled Wishart matrices completed to the identity.
pub fn random_instance(seed: u64, dim_s: usize, dim_e: usize, n_povm: usize) -> Result<DiscriminationInstance> {
    if dim_s < 2 || dim_e < 2 || n_povm < 1 {
        return Err(Error::InstanceGeneration(format!(
            "need dims >= 2 and n_povm >= 1, got dim_s={dim_s}, dim_e={dim_e}, n_povm={n_povm}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sys = FockSpace::new(dim_s);
    let env_space = FockSpace::new(dim_e);
    let psi1 = random_state(&mut rng, &sys)?;
    let psi2 = random_state(&mut rng, &sys)?;
    let env = random_state(&mut rng, &env_space)?;
    let unitary = random_unitary(&mut rng, &sys.tensor(&env_space));
    let povm = random_povm(&mut rng, &env_space, n_povm)?;
    let q = rng.random_range(0.01..0.99);
    DiscriminationInstance::new(psi1, psi2, q, env, unitary, Measurement::Povm(povm))
}

/// Deterministic random pair of pure states on a `dim`-level space and a prior.
pub fn random_pure_pair(seed: u64, dim: usize) -> Result<(PureState, PureState, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let space = FockSpace::new(dim);
    let a = random_state(&mut rng, &space)?;
    let b = random_state(&mut rng, &space)?;
    Ok((a, b, rng.random_range(0.01..0.99)))
}

/// Shape and seed of one random trial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrialParams {
    pub seed: u64,
    pub dim_s: usize,
    pub dim_e: usize,
    pub n_povm: usize,
}

impl TrialParams {
    pub fn instance(&self) -> Result<DiscriminationInstance> {
        random_instance(self.seed, self.dim_s, self.dim_e, self.n_povm)
    }
}

/// `trials` deterministic trial shapes drawn from a master seed.
pub fn random_trials(seed: u64, trials: usize, dims: RangeInclusive<usize>, n_povm: RangeInclusive<usize>) -> Vec<TrialParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials)
        .map(|_| TrialParams {
            seed: rng.random(),
            dim_s: rng.random_range(dims.clone()),
            dim_e: rng.random_range(dims.clone()),
            n_povm: rng.random_range(n_povm.clone()),
        })
        .collect()
}
