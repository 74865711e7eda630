use nalgebra::DMatrix;

use super::{FockSpace, Operator};
use crate::error::check_unit_interval;
use crate::{Result, C64};

/// Beam splitter of transmissivity `eta` on `space_a ⊗ space_b`.
///
/// Heisenberg convention: `â† → √η â† − √(1−η) b̂†`, `b̂† → √(1−η) â† + √η b̂†`,
/// so `U|0,2⟩ = (1−η)|2,0⟩ + √(2η(1−η))|1,1⟩ + η|0,2⟩`.
///
/// Columns are built sector by sector: `U|p,q⟩` is obtained from `U|p−1,q⟩` or
/// `U|0,q−1⟩` by one transformed creation operator. Output amplitudes outside
/// the truncated space are dropped, so the matrix is unitary on total photon
/// number `< min(cutoffs)`.
pub fn beam_splitter(eta: f64, space_a: &FockSpace, space_b: &FockSpace) -> Result<Operator> {
    check_unit_interval("eta", eta)?;
    let ca = space_a.cutoff()?;
    let cb = space_b.cutoff()?;
    let t = eta.sqrt();
    let r = (1.0 - eta).sqrt();

    // sector vectors indexed by the photon count m in mode a; mode b holds N − m
    let raise_a = |v: &[f64], p: usize| -> Vec<f64> {
        let n_tot = v.len() - 1;
        let mut out = vec![0.0; v.len() + 1];
        for (m, &c) in v.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let n = n_tot - m;
            out[m + 1] += t * ((m + 1) as f64).sqrt() * c;
            out[m] -= r * ((n + 1) as f64).sqrt() * c;
        }
        let norm = (p as f64).sqrt();
        out.iter_mut().for_each(|x| *x /= norm);
        out
    };
    let raise_b = |v: &[f64], q: usize| -> Vec<f64> {
        let n_tot = v.len() - 1;
        let mut out = vec![0.0; v.len() + 1];
        for (m, &c) in v.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let n = n_tot - m;
            out[m + 1] += r * ((m + 1) as f64).sqrt() * c;
            out[m] += t * ((n + 1) as f64).sqrt() * c;
        }
        let norm = (q as f64).sqrt();
        out.iter_mut().for_each(|x| *x /= norm);
        out
    };

    let joint = space_a.tensor(space_b);
    let d = joint.dim();
    let mut u = DMatrix::<C64>::zeros(d, d);
    let mut column_q = vec![1.0]; // U|0,q⟩
    for q in 0..cb {
        if q > 0 {
            column_q = raise_b(&column_q, q);
        }
        let mut column = column_q.clone();
        for p in 0..ca {
            if p > 0 {
                column = raise_a(&column, p);
            }
            let total = p + q;
            let col = p * cb + q;
            for (m, &c) in column.iter().enumerate() {
                let n = total - m;
                if m < ca && n < cb && c != 0.0 {
                    u[(m * cb + n, col)] = C64::new(c, 0.0);
                }
            }
        }
    }
    Ok(Operator::from_parts(joint, u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{coherent_state, fock_state, PureState};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn column(u: &Operator, cb: usize, p: usize, q: usize) -> impl Fn(usize, usize) -> f64 + '_ {
        move |m, n| u.entry(m * cb + n, p * cb + q).re
    }

    #[test]
    fn transparent_splitter_is_identity() {
        let s = FockSpace::new(5);
        let u = beam_splitter(1.0, &s, &s).unwrap();
        assert_eq!(u, Operator::identity(&s.tensor(&s)));
    }

    #[test]
    fn two_photon_environment_output() {
        let s = FockSpace::new(4);
        for eta in [0.1, 0.37, 0.5, 0.9] {
            let u = beam_splitter(eta, &s, &s).unwrap();
            let a = column(&u, 4, 0, 2);
            assert_abs_diff_eq!(a(2, 0), 1.0 - eta, epsilon = 1e-14);
            assert_abs_diff_eq!(a(1, 1), (2.0 * eta * (1.0 - eta)).sqrt(), epsilon = 1e-14);
            assert_abs_diff_eq!(a(0, 2), eta, epsilon = 1e-14);
        }
    }

    #[test]
    fn one_plus_two_photon_output_signs() {
        let s = FockSpace::new(4);
        for eta in [0.2, 0.5, 0.8] {
            let u = beam_splitter(eta, &s, &s).unwrap();
            let a = column(&u, 4, 1, 2);
            let r = 1.0 - eta;
            assert_abs_diff_eq!(a(3, 0), (3.0 * eta).sqrt() * r, epsilon = 1e-14);
            assert_abs_diff_eq!(a(2, 1), 2.0 * eta * r.sqrt() - r.powf(1.5), epsilon = 1e-14);
            assert_abs_diff_eq!(a(1, 2), eta.powf(1.5) - 2.0 * r * eta.sqrt(), epsilon = 1e-14);
            assert_abs_diff_eq!(a(0, 3), -eta * (3.0 * r).sqrt(), epsilon = 1e-14);
        }
    }

    #[test]
    fn vacuum_and_coherent_split_into_coherent_pair() {
        let alpha = 0.9;
        let eta = 0.35;
        let s = FockSpace::new(30);
        let u = beam_splitter(eta, &s, &s).unwrap();
        let input = fock_state(0, &s).unwrap().tensor(&coherent_state(C64::new(alpha, 0.0), &s).unwrap());
        let out = u.apply(&input).unwrap();
        let a = coherent_state(C64::new((1.0 - eta).sqrt() * alpha, 0.0), &s).unwrap();
        let b = coherent_state(C64::new(eta.sqrt() * alpha, 0.0), &s).unwrap();
        let expected: PureState = a.tensor(&b);
        assert!(out.fidelity(&expected).unwrap() >= 1.0 - 1e-12);
    }

    #[test]
    fn rejects_bad_transmissivity() {
        let s = FockSpace::new(2);
        assert!(beam_splitter(1.5, &s, &s).is_err());
        assert!(beam_splitter(-0.1, &s, &s).is_err());
    }

    proptest! {
        #[test]
        fn unitary_below_cutoff_and_conserves_photons(eta in 0.0f64..=1.0, ca in 1usize..7, cb in 1usize..7) {
            let a = FockSpace::new(ca);
            let b = FockSpace::new(cb);
            let u = beam_splitter(eta, &a, &b).unwrap();
            prop_assert!(u.unitarity_residual_below(ca.min(cb) - 1) <= 1e-10);
            let joint = a.tensor(&b);
            for row in 0..joint.dim() {
                for col in 0..joint.dim() {
                    if joint.total_photons(row) != joint.total_photons(col) {
                        prop_assert_eq!(u.entry(row, col), C64::new(0.0, 0.0));
                    }
                }
            }
        }
    }
}
