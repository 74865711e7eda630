use nalgebra::DVector;

use super::FockSpace;
use crate::{tol, Error, Result, C64};

/// Amplitude vector over a truncated Fock basis.
///
/// `tail_bound` is the probability mass known to be missing because of
/// truncation. States are never renormalized implicitly; unnormalized
/// intermediates carry `normalized == false`.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    space: FockSpace,
    amplitudes: DVector<C64>,
    tail_bound: f64,
    normalized: bool,
}

impl PureState {
    /// A normalized state; fails if `‖amplitudes‖²` is not within `tail_bound` of one.
    pub fn new(space: FockSpace, amplitudes: DVector<C64>, tail_bound: f64) -> Result<Self> {
        let state = Self::unnormalized(space, amplitudes, tail_bound)?;
        state.check_normalized()?;
        Ok(Self {
            normalized: true,
            ..state
        })
    }

    pub fn from_amplitudes(space: FockSpace, amplitudes: &[C64]) -> Result<Self> {
        Self::new(space, DVector::from_column_slice(amplitudes), 0.0)
    }

    pub fn from_real(space: FockSpace, amplitudes: &[f64]) -> Result<Self> {
        let amps: Vec<C64> = amplitudes.iter().map(|&a| C64::new(a, 0.0)).collect();
        Self::from_amplitudes(space, &amps)
    }

    /// A vector flagged as unnormalized.
    pub fn unnormalized(space: FockSpace, amplitudes: DVector<C64>, tail_bound: f64) -> Result<Self> {
        if amplitudes.len() != space.dim() {
            return Err(Error::SpaceMismatch {
                left: space.to_string(),
                right: format!("vector of length {}", amplitudes.len()),
            });
        }
        Ok(Self {
            space,
            amplitudes,
            tail_bound: tail_bound.max(0.0),
            normalized: false,
        })
    }

    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amplitudes[index]
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `|‖ψ‖² − 1| ≤ tail_bound + tol::NORM`.
    pub fn check_normalized(&self) -> Result<()> {
        let norm_sqr = self.norm_sqr();
        if (norm_sqr - 1.0).abs() <= self.tail_bound + tol::NORM {
            Ok(())
        } else {
            Err(Error::NotNormalized {
                norm_sqr,
                tail_bound: self.tail_bound,
            })
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Result<C64> {
        self.space.ensure_same(&other.space)?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// `|⟨self|other⟩|² / (‖self‖²‖other‖²)`.
    pub fn fidelity(&self, other: &PureState) -> Result<f64> {
        let ov = self.inner(other)?;
        Ok(ov.norm_sqr() / (self.norm_sqr() * other.norm_sqr()))
    }

    /// Kronecker product, `self` first. Tail bounds add.
    pub fn tensor(&self, other: &PureState) -> PureState {
        PureState {
            space: self.space.tensor(&other.space),
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
            tail_bound: self.tail_bound + other.tail_bound,
            normalized: self.normalized && other.normalized,
        }
    }

    /// Explicit rescaling to unit norm. Returns `None` for the zero vector.
    pub fn normalize(&self) -> Option<PureState> {
        let n = self.norm_sqr().sqrt();
        if n == 0.0 {
            return None;
        }
        Some(PureState {
            space: self.space.clone(),
            amplitudes: self.amplitudes.unscale(n),
            tail_bound: 0.0,
            normalized: true,
        })
    }

    pub(crate) fn with_parts(space: FockSpace, amplitudes: DVector<C64>, tail_bound: f64, normalized: bool) -> Self {
        Self {
            space,
            amplitudes,
            tail_bound,
            normalized,
        }
    }
}

/// `|n⟩` on a single-mode space.
pub fn fock_state(n: usize, space: &FockSpace) -> Result<PureState> {
    let cutoff = space.cutoff()?;
    if n >= cutoff {
        return Err(Error::IndexOutOfRange { index: n, cutoff });
    }
    let mut amps = DVector::zeros(cutoff);
    amps[n] = C64::new(1.0, 0.0);
    Ok(PureState::with_parts(space.clone(), amps, 0.0, true))
}

/// Default cutoff for a coherent amplitude: `⌈|α|² + 10|α| + 20⌉`.
pub fn coherent_cutoff(alpha: C64) -> usize {
    let a = alpha.norm();
    (a * a + 10.0 * a + 20.0).ceil() as usize
}

/// Truncated coherent state with the default tail target.
pub fn coherent_state(alpha: C64, space: &FockSpace) -> Result<PureState> {
    coherent_state_with_target(alpha, space, tol::TAIL_TARGET)
}

/// Truncated coherent state `c_n = e^{−|α|²/2} αⁿ/√n!`.
///
/// Fails with [`Error::CutoffTooSmall`] when the Poisson mass beyond the cutoff
/// exceeds `tail_target`; the state is never renormalized.
pub fn coherent_state_with_target(alpha: C64, space: &FockSpace, tail_target: f64) -> Result<PureState> {
    let cutoff = space.cutoff()?;
    let mean = alpha.norm_sqr();
    let tail = poisson_tail(mean, cutoff);
    if tail > tail_target {
        let mut suggested = cutoff + 1;
        while poisson_tail(mean, suggested) > tail_target {
            suggested += 1;
        }
        return Err(Error::CutoffTooSmall {
            tail,
            target: tail_target,
            suggested,
        });
    }
    let mut amps = DVector::zeros(cutoff);
    let mut c = C64::new((-mean / 2.0).exp(), 0.0);
    for n in 0..cutoff {
        amps[n] = c;
        c = c * alpha / ((n + 1) as f64).sqrt();
    }
    Ok(PureState::with_parts(space.clone(), amps, tail, true))
}

/// Poisson probability mass at `n ≥ cutoff`, summed term by term.
fn poisson_tail(mean: f64, cutoff: usize) -> f64 {
    if mean == 0.0 {
        return 0.0;
    }
    // log p_n = −mean + n ln mean − ln n!
    let mut log_p = -mean;
    for n in 1..=cutoff {
        log_p += mean.ln() - (n as f64).ln();
    }
    let mut tail = 0.0;
    let mut n = cutoff;
    loop {
        let p = log_p.exp();
        tail += p;
        n += 1;
        log_p += mean.ln() - (n as f64).ln();
        if (n as f64) > mean + 1.0 && p <= tail * 1e-18 {
            break;
        }
    }
    tail
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn real(state: &PureState) -> Vec<f64> {
        state.amplitudes().iter().map(|a| a.re).collect()
    }

    #[test]
    fn fock_basis_vectors() {
        let s = FockSpace::new(4);
        assert_eq!(real(&fock_state(0, &s).unwrap()), vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(real(&fock_state(2, &s).unwrap()), vec![0.0, 0.0, 1.0, 0.0]);
        assert_eq!(
            fock_state(4, &s).unwrap_err(),
            Error::IndexOutOfRange { index: 4, cutoff: 4 }
        );
        assert_eq!(fock_state(2, &s).unwrap().tail_bound(), 0.0);
    }

    #[test]
    fn coherent_zero_is_vacuum() {
        let v = coherent_state(C64::new(0.0, 0.0), &FockSpace::new(8)).unwrap();
        assert_eq!(v.amplitude(0), C64::new(1.0, 0.0));
        assert!(v.amplitudes().iter().skip(1).all(|a| *a == C64::new(0.0, 0.0)));
        assert_eq!(v.tail_bound(), 0.0);
    }

    #[test]
    fn coherent_amplitudes_follow_direct_series() {
        let alpha = 0.3;
        let v = coherent_state(C64::new(alpha, 0.0), &FockSpace::new(16)).unwrap();
        assert_abs_diff_eq!((v.amplitude(1) / v.amplitude(0)).re, 0.3, epsilon = 1e-15);
        // direct e^{−α²/2} αⁿ/√n! with a factorial loop
        let mut fact = 1.0_f64;
        for n in 0..16 {
            if n > 0 {
                fact *= n as f64;
            }
            let direct = (-alpha * alpha / 2.0).exp() * alpha.powi(n as i32) / fact.sqrt();
            assert_abs_diff_eq!(v.amplitude(n).re, direct, epsilon = 1e-16);
        }
    }

    #[test]
    fn coherent_tail_matches_high_precision_series() {
        // Poisson(1.44) mass beyond n = 15 and n = 16, from a 40-digit series evaluation.
        let err = coherent_state(C64::new(1.2, 0.0), &FockSpace::new(16)).unwrap_err();
        match err {
            Error::CutoffTooSmall { tail, suggested, .. } => {
                assert_abs_diff_eq!(tail, 4.227007649337383e-12, epsilon = 1e-20);
                assert_eq!(suggested, 17);
            }
            other => panic!("unexpected {other:?}"),
        }
        let relaxed =
            coherent_state_with_target(C64::new(1.2, 0.0), &FockSpace::new(16), 1e-11).unwrap();
        assert!(relaxed.norm_sqr() >= 1.0 - 5e-12);
        let v = coherent_state(C64::new(1.2, 0.0), &FockSpace::new(17)).unwrap();
        assert_abs_diff_eq!(v.tail_bound(), 3.562478155311834e-13, epsilon = 1e-20);
        assert_abs_diff_eq!(v.norm_sqr() + v.tail_bound(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn default_policy_cutoffs_pass() {
        for a in [0.3, 0.6, 0.9, 1.2, 3.0] {
            let alpha = C64::new(a, 0.0);
            let v = coherent_state(alpha, &FockSpace::new(coherent_cutoff(alpha))).unwrap();
            assert!(v.tail_bound() <= 1e-12);
            assert!((v.norm_sqr() - 1.0).abs() <= v.tail_bound() + 1e-12);
        }
        assert_eq!(coherent_cutoff(C64::new(1.2, 0.0)), 34);
    }

    #[test]
    fn tensor_norms_multiply() {
        let s = FockSpace::new(3);
        let a = PureState::from_real(s.clone(), &[0.6, 0.8, 0.0]).unwrap();
        let b = PureState::from_real(s.clone(), &[0.0, 0.0, 1.0]).unwrap();
        let ab = a.tensor(&b);
        assert_eq!(ab.space().dim(), 9);
        assert_abs_diff_eq!(ab.norm_sqr(), a.norm_sqr() * b.norm_sqr(), epsilon = 1e-15);
        let e = fock_state(0, &s).unwrap().tensor(&fock_state(2, &s).unwrap());
        assert_eq!(e.amplitude(2), C64::new(1.0, 0.0));
    }

    #[test]
    fn rejects_unnormalized_input() {
        let s = FockSpace::new(2);
        assert!(matches!(
            PureState::from_real(s, &[1.0, 1.0]),
            Err(Error::NotNormalized { .. })
        ));
    }
}
