use std::fmt;

use crate::{Error, Result};

/// A truncated Fock space, possibly a tensor product of several modes.
///
/// Each mode keeps the basis `|0⟩, …, |cutoff−1⟩`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FockSpace {
    cutoffs: Vec<usize>,
}

impl FockSpace {
    /// Single mode with the given cutoff.
    ///
    /// # Panics
    ///
    /// If `cutoff` is zero.
    pub fn new(cutoff: usize) -> Self {
        assert!(cutoff >= 1, "Fock cutoff must be at least 1");
        Self {
            cutoffs: vec![cutoff],
        }
    }

    /// Product of single modes, first entry slowest.
    pub fn modes(cutoffs: &[usize]) -> Self {
        assert!(!cutoffs.is_empty(), "a Fock space needs at least one mode");
        assert!(cutoffs.iter().all(|&c| c >= 1), "Fock cutoff must be at least 1");
        Self {
            cutoffs: cutoffs.to_vec(),
        }
    }

    pub fn cutoffs(&self) -> &[usize] {
        &self.cutoffs
    }

    pub fn num_modes(&self) -> usize {
        self.cutoffs.len()
    }

    pub fn dim(&self) -> usize {
        self.cutoffs.iter().product()
    }

    pub fn is_single_mode(&self) -> bool {
        self.cutoffs.len() == 1
    }

    /// Cutoff of a single-mode space.
    pub fn cutoff(&self) -> Result<usize> {
        match self.cutoffs.as_slice() {
            [c] => Ok(*c),
            _ => Err(Error::NotSingleMode(self.to_string())),
        }
    }

    pub fn tensor(&self, other: &FockSpace) -> FockSpace {
        let mut cutoffs = self.cutoffs.clone();
        cutoffs.extend_from_slice(&other.cutoffs);
        FockSpace { cutoffs }
    }

    /// Removes `env` from the tail of `self`, returning the leading factor.
    pub fn split_suffix(&self, env: &FockSpace) -> Result<FockSpace> {
        let n = self.cutoffs.len();
        let m = env.cutoffs.len();
        if m >= n || self.cutoffs[n - m..] != env.cutoffs[..] {
            return Err(self.mismatch(env));
        }
        Ok(FockSpace {
            cutoffs: self.cutoffs[..n - m].to_vec(),
        })
    }

    /// Joint index of an occupation pattern.
    pub fn index_of(&self, occupation: &[usize]) -> Result<usize> {
        if occupation.len() != self.cutoffs.len() {
            return Err(Error::SpaceMismatch {
                left: self.to_string(),
                right: format!("{} occupation numbers", occupation.len()),
            });
        }
        let mut index = 0;
        for (&n, &c) in occupation.iter().zip(&self.cutoffs) {
            if n >= c {
                return Err(Error::IndexOutOfRange { index: n, cutoff: c });
            }
            index = index * c + n;
        }
        Ok(index)
    }

    /// Occupation pattern of a joint index.
    pub fn occupation(&self, mut index: usize) -> Vec<usize> {
        let mut occ = vec![0; self.cutoffs.len()];
        for (slot, &c) in occ.iter_mut().zip(&self.cutoffs).rev() {
            *slot = index % c;
            index /= c;
        }
        occ
    }

    pub fn total_photons(&self, index: usize) -> usize {
        self.occupation(index).iter().sum()
    }

    pub(crate) fn ensure_same(&self, other: &FockSpace) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(self.mismatch(other))
        }
    }

    fn mismatch(&self, other: &FockSpace) -> Error {
        Error::SpaceMismatch {
            left: self.to_string(),
            right: other.to_string(),
        }
    }
}

impl fmt::Display for FockSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.cutoffs.iter().enumerate() {
            if i > 0 {
                f.write_str("⊗")?;
            }
            write!(f, "F({c})")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexing_is_row_major() {
        let s = FockSpace::modes(&[3, 4]);
        assert_eq!(s.dim(), 12);
        assert_eq!(s.index_of(&[0, 2]).unwrap(), 2);
        assert_eq!(s.index_of(&[2, 1]).unwrap(), 9);
        assert_eq!(s.occupation(9), vec![2, 1]);
        assert_eq!(s.total_photons(9), 3);
        assert!(s.index_of(&[3, 0]).is_err());
    }

    #[test]
    fn split_suffix_recovers_system() {
        let sys = FockSpace::new(2);
        let env = FockSpace::modes(&[3, 5]);
        let joint = sys.tensor(&env);
        assert_eq!(joint.split_suffix(&env).unwrap(), sys);
        assert!(joint.split_suffix(&FockSpace::new(4)).is_err());
        assert!(env.split_suffix(&env).is_err());
    }
}
