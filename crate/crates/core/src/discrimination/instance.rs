use crate::error::check_unit_interval;
use crate::fock::{Operator, PureState};
use crate::measurement::Measurement;
use crate::{tol, Error, Result};

/// Complete input of the heralded pipeline: two system states with priors
/// `1−q`, `q`, an environment state, a joint unitary on `S⊗E` and a
/// measurement on `E`.
#[derive(Clone, Debug)]
pub struct DiscriminationInstance {
    psi1: PureState,
    psi2: PureState,
    q: f64,
    env: PureState,
    unitary: Operator,
    measurement: Measurement,
    outputs: [PureState; 2],
}

impl DiscriminationInstance {
    /// Validates priors, normalization, spaces and the measurement.
    ///
    /// The unitary is checked as an isometry on the span of the two inputs
    /// `|ψᵢ, e⟩`: squared norms and their overlap must be preserved to
    /// `tol::STRUCTURE`. Truncated operators such as beam splitters only need
    /// to be unitary where the inputs live.
    pub fn new(
        psi1: PureState,
        psi2: PureState,
        q: f64,
        env: PureState,
        unitary: Operator,
        measurement: Measurement,
    ) -> Result<Self> {
        check_unit_interval("q", q)?;
        psi1.check_normalized()?;
        psi2.check_normalized()?;
        env.check_normalized()?;
        psi1.space().ensure_same(psi2.space())?;
        env.space().ensure_same(measurement.space())?;
        psi1.space().tensor(env.space()).ensure_same(unitary.space())?;
        measurement.validate()?;

        let in1 = psi1.tensor(&env);
        let in2 = psi2.tensor(&env);
        let out1 = unitary.apply(&in1)?;
        let out2 = unitary.apply(&in2)?;
        let residual = [
            (out1.norm_sqr() - in1.norm_sqr()).abs(),
            (out2.norm_sqr() - in2.norm_sqr()).abs(),
            (out1.inner(&out2)? - in1.inner(&in2)?).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        if residual > tol::STRUCTURE {
            return Err(Error::NotUnitary { residual });
        }
        Ok(Self {
            psi1,
            psi2,
            q,
            env,
            unitary,
            measurement,
            outputs: [out1, out2],
        })
    }

    pub fn psi1(&self) -> &PureState {
        &self.psi1
    }

    pub fn psi2(&self) -> &PureState {
        &self.psi2
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn env(&self) -> &PureState {
        &self.env
    }

    pub fn unitary(&self) -> &Operator {
        &self.unitary
    }

    pub fn measurement(&self) -> &Measurement {
        &self.measurement
    }

    /// `Û|ψᵢ, e⟩` for `i = 1, 2`.
    pub fn outputs(&self) -> &[PureState; 2] {
        &self.outputs
    }

    /// Same states and unitary, different measurement.
    pub fn with_measurement(&self, measurement: Measurement) -> Result<Self> {
        Self::new(
            self.psi1.clone(),
            self.psi2.clone(),
            self.q,
            self.env.clone(),
            self.unitary.clone(),
            measurement,
        )
    }
}
