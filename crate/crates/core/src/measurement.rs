//! Measurements on the environment factor.
//!
//! Two backends: a [`Povm`] read out through `M_k^{1/2}` keeps conditional
//! states pure, while a [`KrausStack`] (a channel followed by a readout POVM)
//! produces mixed conditional states on the system.

use std::fmt;

use nalgebra::DMatrix;

use crate::error::check_unit_interval;
use crate::fock::{amplitude_matrix, apply_env, eigh, max_abs, psd_sqrt, DensityMatrix, FockSpace, Operator, PureState};
use crate::{tol, Error, Result, C64};

/// Readout label: a photon count, or a tuple of counts on a multimode environment.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label(Vec<usize>);

impl Label {
    pub fn single(k: usize) -> Self {
        Label(vec![k])
    }

    pub fn tuple(counts: &[usize]) -> Self {
        Label(counts.to_vec())
    }

    pub fn counts(&self) -> &[usize] {
        &self.0
    }

    /// The photon count of a single-mode label.
    pub fn as_single(&self) -> Option<usize> {
        match self.0.as_slice() {
            [k] => Some(*k),
            _ => None,
        }
    }
}

impl From<usize> for Label {
    fn from(k: usize) -> Self {
        Label::single(k)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0.as_slice() {
            [k] => write!(f, "{k}"),
            counts => {
                f.write_str("(")?;
                for (i, k) in counts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{k}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct PovmElement {
    pub label: Label,
    pub effect: Operator,
    /// `M_k^{1/2}`; absent when the effect is not positive semidefinite.
    pub root: Option<Operator>,
}

#[derive(Clone, Debug)]
pub struct Povm {
    space: FockSpace,
    elements: Vec<PovmElement>,
}

impl Povm {
    /// Builds a POVM without enforcing completeness; see [`validate_povm`].
    pub fn new(space: FockSpace, elements: Vec<(Label, Operator)>) -> Result<Self> {
        let elements = elements
            .into_iter()
            .map(|(label, effect)| {
                space.ensure_same(effect.space())?;
                let root = psd_sqrt(&effect).ok();
                Ok(PovmElement { label, effect, root })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { space, elements })
    }

    /// The single-outcome measurement `{I}`.
    pub fn trivial(space: &FockSpace) -> Self {
        let id = Operator::identity(space);
        Self {
            space: space.clone(),
            elements: vec![PovmElement {
                label: Label::single(0),
                effect: id.clone(),
                root: Some(id),
            }],
        }
    }

    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    pub fn elements(&self) -> &[PovmElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element(&self, label: &Label) -> Result<&PovmElement> {
        self.elements
            .iter()
            .find(|e| &e.label == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }
}

/// Projective photon counting `{|n⟩⟨n|}` on every basis state of `space`.
/// Multimode spaces get tuple labels.
pub fn pnr_povm(space: &FockSpace) -> Povm {
    let d = space.dim();
    let elements = (0..d)
        .map(|i| {
            let mut m = DMatrix::zeros(d, d);
            m[(i, i)] = C64::new(1.0, 0.0);
            let effect = Operator::new(space.clone(), m).expect("dimension matches");
            PovmElement {
                label: Label(space.occupation(i)),
                root: Some(effect.clone()),
                effect,
            }
        })
        .collect();
    Povm {
        space: space.clone(),
        elements,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PovmDiagnostics {
    /// `‖Σ_k M_k − I‖_max`.
    pub completeness_residual: f64,
    /// Most negative eigenvalue over all elements.
    pub min_eigenvalue: f64,
    pub passed: bool,
}

/// Completeness and positivity report. Never fails.
pub fn validate_povm(povm: &Povm) -> PovmDiagnostics {
    let d = povm.space.dim();
    let mut sum = DMatrix::<C64>::zeros(d, d);
    let mut min_eigenvalue = f64::INFINITY;
    for e in &povm.elements {
        sum += e.effect.matrix();
        let lowest = match eigh(e.effect.matrix()) {
            Ok(eig) => eig.values.last().copied().unwrap_or(0.0),
            Err(_) => f64::NEG_INFINITY,
        };
        min_eigenvalue = min_eigenvalue.min(lowest);
    }
    if povm.elements.is_empty() {
        min_eigenvalue = 0.0;
    }
    let completeness_residual = max_abs(&(sum - DMatrix::<C64>::identity(d, d)));
    PovmDiagnostics {
        completeness_residual,
        min_eigenvalue,
        passed: completeness_residual <= tol::COMPLETENESS && min_eigenvalue >= -tol::PSD,
    }
}

/// A channel `{A_ℓ}` on the environment followed by a readout POVM.
#[derive(Clone, Debug)]
pub struct KrausStack {
    space: FockSpace,
    kraus: Vec<Operator>,
    readout: Povm,
}

impl KrausStack {
    pub fn new(space: FockSpace, kraus: Vec<Operator>, readout: Povm) -> Result<Self> {
        for a in &kraus {
            space.ensure_same(a.space())?;
        }
        space.ensure_same(readout.space())?;
        Ok(Self { space, kraus, readout })
    }

    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    pub fn kraus(&self) -> &[Operator] {
        &self.kraus
    }

    pub fn readout(&self) -> &Povm {
        &self.readout
    }

    /// `‖Σ_ℓ A_ℓ†A_ℓ − I‖_max`.
    pub fn completeness_residual(&self) -> f64 {
        let d = self.space.dim();
        let mut sum = DMatrix::<C64>::zeros(d, d);
        for a in &self.kraus {
            sum += a.matrix().adjoint() * a.matrix();
        }
        max_abs(&(sum - DMatrix::<C64>::identity(d, d)))
    }

    /// The equivalent POVM `M_k^eff = Σ_ℓ A_ℓ† M_k A_ℓ`.
    pub fn effective_povm(&self) -> Result<Povm> {
        let elements = self
            .readout
            .elements
            .iter()
            .map(|e| {
                let mut m = DMatrix::<C64>::zeros(self.space.dim(), self.space.dim());
                for a in &self.kraus {
                    m += a.matrix().adjoint() * e.effect.matrix() * a.matrix();
                }
                Ok((e.label.clone(), Operator::new(self.space.clone(), m)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Povm::new(self.space.clone(), elements)
    }

    /// `M_k^{1/2} A_ℓ` for every `ℓ`.
    pub(crate) fn branch_operators(&self, label: &Label) -> Result<Vec<DMatrix<C64>>> {
        let element = self.readout.element(label)?;
        let root = element.root.as_ref().ok_or(Error::NotPsd {
            min_eigenvalue: f64::NAN,
        })?;
        Ok(self.kraus.iter().map(|a| root.matrix() * a.matrix()).collect())
    }
}

/// Pure-loss channel `A_ℓ = √((1−τ)^ℓ/ℓ!) τ^{N̂/2} â^ℓ` read out by photon counting.
///
/// `max_loss` defaults to `cutoff − 1`, beyond which `â^ℓ` vanishes on the
/// truncated space and the set is exactly trace preserving.
pub fn pure_loss_kraus(tau: f64, space: &FockSpace, max_loss: Option<usize>) -> Result<KrausStack> {
    check_unit_interval("tau", tau)?;
    let c = space.cutoff()?;
    let max_loss = max_loss.unwrap_or(c - 1);
    if max_loss > c - 1 {
        return Err(Error::ParameterOutOfRange {
            name: "max_loss",
            value: max_loss as f64,
            min: 0.0,
            max: (c - 1) as f64,
        });
    }
    let kraus = (0..=max_loss)
        .map(|l| {
            let mut m = DMatrix::zeros(c, c);
            for n in l..c {
                let amp = (binomial(n, l) * tau.powi((n - l) as i32) * (1.0 - tau).powi(l as i32)).sqrt();
                m[(n - l, n)] = C64::new(amp, 0.0);
            }
            Operator::new(space.clone(), m)
        })
        .collect::<Result<Vec<_>>>()?;
    KrausStack::new(space.clone(), kraus, pnr_povm(space))
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Unnormalized branch data `(P(k), Σ_ℓ W_ℓ W_ℓ†)` on the system factor.
pub(crate) fn kraus_branch(joint: &PureState, stack: &KrausStack, label: &Label) -> Result<(f64, FockSpace, DMatrix<C64>)> {
    let (sys, amps) = amplitude_matrix(joint, &stack.space)?;
    let ds = sys.dim();
    let mut rho = DMatrix::<C64>::zeros(ds, ds);
    for b in stack.branch_operators(label)? {
        let w = apply_env(&amps, &b);
        rho += &w * w.adjoint();
    }
    let prob: f64 = rho.diagonal().iter().map(|z| z.re).sum();
    Ok((prob, sys, rho))
}

/// Outcome probability and normalized conditional system state after the
/// channel and readout outcome `label`.
///
/// Fails with [`Error::BranchSuppressed`] when the probability is below the floor.
pub fn lossy_conditional(joint: &PureState, stack: &KrausStack, label: &Label) -> Result<(f64, DensityMatrix)> {
    let (prob, sys, rho) = kraus_branch(joint, stack, label)?;
    if prob < tol::PROBABILITY_FLOOR {
        return Err(Error::BranchSuppressed { prob });
    }
    let rho = DensityMatrix::new(sys, rho.unscale(prob))?;
    Ok((prob, rho))
}

/// Which backend a discrimination instance drives.
#[derive(Clone, Debug)]
pub enum Measurement {
    Povm(Povm),
    Kraus(KrausStack),
}

impl Measurement {
    pub fn space(&self) -> &FockSpace {
        match self {
            Measurement::Povm(p) => p.space(),
            Measurement::Kraus(k) => k.space(),
        }
    }

    pub fn labels(&self) -> Vec<Label> {
        let povm = match self {
            Measurement::Povm(p) => p,
            Measurement::Kraus(k) => k.readout(),
        };
        povm.elements().iter().map(|e| e.label.clone()).collect()
    }

    /// Completeness of the POVM, or of both channel and readout.
    pub fn validate(&self) -> Result<()> {
        let povm = match self {
            Measurement::Povm(p) => p,
            Measurement::Kraus(k) => {
                let residual = k.completeness_residual();
                if residual > tol::COMPLETENESS {
                    return Err(Error::IncompleteKraus { residual });
                }
                k.readout()
            }
        };
        let diag = validate_povm(povm);
        if diag.passed {
            Ok(())
        } else {
            Err(Error::InvalidPovm {
                completeness_residual: diag.completeness_residual,
                min_eigenvalue: diag.min_eigenvalue,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{annihilation, beam_splitter, env_contract, fock_state, number_op};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn example_joint(eta: f64, psi: &[f64]) -> PureState {
        let s = FockSpace::new(4);
        let u = beam_splitter(eta, &s, &s).unwrap();
        let input = PureState::from_real(s.clone(), psi).unwrap().tensor(&fock_state(2, &s).unwrap());
        u.apply(&input).unwrap()
    }

    #[test]
    fn pnr_elements_are_projectors() {
        let s = FockSpace::new(4);
        let p = pnr_povm(&s);
        assert_eq!(p.len(), 4);
        let diag = validate_povm(&p);
        assert_eq!(diag.completeness_residual, 0.0);
        assert!(diag.passed);
        for e in p.elements() {
            let m = e.effect.matrix();
            assert_eq!(m * m, *m);
            assert_eq!(e.root.as_ref().unwrap(), &e.effect);
        }
        assert_eq!(p.elements()[2].label, Label::single(2));
    }

    #[test]
    fn multimode_pnr_uses_tuple_labels() {
        let s = FockSpace::modes(&[2, 3]);
        let p = pnr_povm(&s);
        assert_eq!(p.len(), 6);
        assert_eq!(p.elements()[5].label, Label::tuple(&[1, 2]));
        assert_eq!(p.elements()[5].label.to_string(), "(1,2)");
        assert!(validate_povm(&p).passed);
    }

    #[test]
    fn diagnostics_on_trivial_and_broken_povms() {
        let s = FockSpace::new(3);
        let t = validate_povm(&Povm::trivial(&s));
        assert_eq!(t.completeness_residual, 0.0);
        assert!(t.passed);

        let id = Operator::identity(&s);
        let broken = Povm::new(s.clone(), vec![(0.into(), id.scale(0.5)), (1.into(), id.scale(0.6))]).unwrap();
        let d = validate_povm(&broken);
        assert_abs_diff_eq!(d.completeness_residual, 0.1, epsilon = 1e-15);
        assert!(!d.passed);

        let negative = Povm::new(s.clone(), vec![(0.into(), id.scale(2.0)), (1.into(), id.scale(-1.0))]).unwrap();
        let d = validate_povm(&negative);
        assert_eq!(d.completeness_residual, 0.0);
        assert_abs_diff_eq!(d.min_eigenvalue, -1.0, epsilon = 1e-15);
        assert!(!d.passed);
        assert!(negative.elements()[1].root.is_none());
    }

    #[test]
    fn lossless_channel_is_identity() {
        let s = FockSpace::new(5);
        let k = pure_loss_kraus(1.0, &s, None).unwrap();
        assert_eq!(k.kraus()[0], Operator::identity(&s));
        assert!(k.kraus()[1..].iter().all(|a| max_abs(a.matrix()) == 0.0));
    }

    #[test]
    fn kraus_matches_operator_form() {
        // √((1−τ)^ℓ/ℓ!) τ^{N̂/2} â^ℓ assembled from ladder operators
        let s = FockSpace::new(6);
        let tau = 0.37;
        let stack = pure_loss_kraus(tau, &s, None).unwrap();
        let a = annihilation(&s).unwrap();
        let n = number_op(&s).unwrap();
        let tau_half = DMatrix::from_fn(6, 6, |i, j| {
            if i == j {
                C64::new(tau.powf(n.entry(i, i).re / 2.0), 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let mut a_pow = DMatrix::<C64>::identity(6, 6);
        let mut fact = 1.0;
        for (l, kraus) in stack.kraus().iter().enumerate() {
            if l > 0 {
                a_pow = &a_pow * a.matrix();
                fact *= l as f64;
            }
            let expected = (&tau_half * &a_pow).scale(((1.0 - tau).powi(l as i32) / fact).sqrt());
            assert!(max_abs(&(expected - kraus.matrix())) < 1e-14);
        }
        // A₀ = τ^{N̂/2}
        assert!(max_abs(&(stack.kraus()[0].matrix() - tau_half)) < 1e-15);
    }

    #[test]
    fn two_photon_loss_amplitude() {
        let s = FockSpace::new(4);
        let tau = 0.3;
        let stack = pure_loss_kraus(tau, &s, None).unwrap();
        assert_abs_diff_eq!(stack.kraus()[2].entry(0, 2).re, 1.0 - tau, epsilon = 1e-15);
        let total: f64 = stack
            .kraus()
            .iter()
            .map(|a| (a.matrix().adjoint() * a.matrix())[(2, 2)].re)
            .sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn rejects_bad_loss_parameters() {
        let s = FockSpace::new(4);
        assert!(pure_loss_kraus(1.1, &s, None).is_err());
        assert!(pure_loss_kraus(0.5, &s, Some(4)).is_err());
        assert!(pure_loss_kraus(0.5, &s, Some(3)).is_ok());
    }

    #[test]
    fn lossless_conditional_equals_projected_branch() {
        let s = FockSpace::new(4);
        let stack = pure_loss_kraus(1.0, &s, None).unwrap();
        let c = std::f64::consts::FRAC_1_SQRT_2;
        let joint = example_joint(0.4, &[c, c, 0.0, 0.0]);
        for k in 0..4 {
            let proj = env_contract(&joint, &fock_state(k, &s).unwrap()).unwrap();
            let (p, rho) = lossy_conditional(&joint, &stack, &Label::single(k)).unwrap();
            assert!((p - proj.norm_sqr()).abs() <= 1e-12);
            let pure = proj.normalize().unwrap();
            assert!(rho.fidelity_with_pure(&pure).unwrap() >= 1.0 - 1e-12);
        }
    }

    #[test]
    fn vacuum_input_branches() {
        let s = FockSpace::new(4);
        let (eta, tau) = (0.6, 0.45);
        let stack = pure_loss_kraus(tau, &s, None).unwrap();
        let joint = example_joint(eta, &[1.0, 0.0, 0.0, 0.0]);

        let (p2, rho2) = lossy_conditional(&joint, &stack, &Label::single(2)).unwrap();
        assert_abs_diff_eq!(p2, eta * eta * tau * tau, epsilon = 1e-15);
        assert!(rho2.fidelity_with_pure(&fock_state(0, &s).unwrap()).unwrap() >= 1.0 - 1e-14);

        // k = 0: mixture of |2⟩, |1⟩, |0⟩ with weights (1−η)², 2η(1−η)(1−τ), η²(1−τ)²
        let (p0, rho0) = lossy_conditional(&joint, &stack, &Label::single(0)).unwrap();
        let w = [
            eta * eta * (1.0 - tau).powi(2),
            2.0 * eta * (1.0 - eta) * (1.0 - tau),
            (1.0 - eta).powi(2),
        ];
        assert_abs_diff_eq!(p0, w.iter().sum::<f64>(), epsilon = 1e-15);
        for (n, wn) in w.iter().enumerate() {
            assert_abs_diff_eq!(rho0.matrix()[(n, n)].re, wn / p0, epsilon = 1e-14);
        }
        for i in 0..4 {
            for j in (0..4).filter(|&j| j != i) {
                assert!(rho0.matrix()[(i, j)].norm() < 1e-15);
            }
        }
        assert_eq!(rho0.matrix()[(3, 3)].re, 0.0);
        assert!(matches!(
            lossy_conditional(&joint, &stack, &Label::single(3)),
            Err(Error::BranchSuppressed { .. })
        ));
    }

    proptest! {
        #[test]
        fn loss_channel_is_complete(tau in 0.0f64..=1.0, cutoff in 1usize..12) {
            let stack = pure_loss_kraus(tau, &FockSpace::new(cutoff), None).unwrap();
            prop_assert!(stack.completeness_residual() <= 1e-10);
        }

        #[test]
        fn branch_probability_matches_effective_povm(tau in 0.0f64..=1.0, eta in 0.0f64..=1.0) {
            let s = FockSpace::new(4);
            let stack = pure_loss_kraus(tau, &s, None).unwrap();
            let eff = stack.effective_povm().unwrap();
            prop_assert!(validate_povm(&eff).passed);
            let c = std::f64::consts::FRAC_1_SQRT_2;
            let joint = example_joint(eta, &[c, c, 0.0, 0.0]);
            let mut total = 0.0;
            for e in eff.elements() {
                let (p, _, _) = kraus_branch(&joint, &stack, &e.label).unwrap();
                let lifted = Operator::identity(&s).tensor(&e.effect);
                let direct = lifted.matrix_element(&joint, &joint).unwrap().re;
                prop_assert!((p - direct).abs() <= 1e-10);
                total += p;
            }
            prop_assert!((total - 1.0).abs() <= 1e-10);
        }
    }
}
