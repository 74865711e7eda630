//! Closed-form evaluations of the worked examples.
//!
//! Plain `f64` arithmetic only. Nothing here calls into the Fock engine, so these
//! serve as an independent check on it.

use crate::tol::PROBABILITY_FLOOR;
use crate::{Error, Result};

use super::types::{BranchSummary, Evaluation};

fn check_unit(name: &'static str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange {
            name,
            value: v,
            min: 0.0,
            max: 1.0,
        })
    }
}

fn pure_error(q: f64, overlap_sq: f64) -> f64 {
    let disc = (1.0 - 4.0 * (1.0 - q) * q * overlap_sq).max(0.0);
    (0.5 - 0.5 * disc.sqrt()).clamp(0.0, q.min(1.0 - q))
}

/// Assembles an evaluation from per-outcome likelihoods and a branch error rule.
fn assemble<F>(q: f64, p_me: f64, given: &[[f64; 2]], mut branch_error: F) -> Evaluation
where
    F: FnMut(usize, [f64; 2]) -> (f64, Option<f64>),
{
    let mut branches = Vec::with_capacity(given.len());
    let mut p_aveme = 0.0;
    let mut captured = 0.0;
    for (k, &pg) in given.iter().enumerate() {
        let p_k = (1.0 - q) * pg[0] + q * pg[1];
        if p_k < PROBABILITY_FLOOR {
            branches.push(BranchSummary::suppressed(p_k, pg));
            continue;
        }
        let priors = [(1.0 - q) * pg[0] / p_k, q * pg[1] / p_k];
        let (p_err, overlap_sq) = if pg[0] < PROBABILITY_FLOOR || pg[1] < PROBABILITY_FLOOR {
            (0.0, None)
        } else {
            branch_error(k, priors)
        };
        p_aveme += p_k * p_err;
        captured += p_k;
        branches.push(BranchSummary {
            p_k,
            p_k_given: pg,
            priors: Some(priors),
            p_err: Some(p_err),
            overlap_sq,
        });
    }
    Evaluation {
        p_me,
        p_aveme,
        margin: p_aveme - p_me,
        captured_mass: captured,
        branches,
    }
}

/// Environment `|2⟩`, perfect counting. Reports `k = 0..=3`.
pub fn example1_closed_form(eta: f64, q: f64, theta: f64) -> Result<Evaluation> {
    check_unit("eta", eta)?;
    check_unit("q", q)?;
    let (s, c) = theta.sin_cos();
    let r = 1.0 - eta;
    let x1 = 2.0 * eta * r.sqrt() - r.powf(1.5);
    let x2 = eta.powf(1.5) - 2.0 * r * eta.sqrt();
    let given = [
        [r * r, r * r * c * c + 3.0 * eta * r * r * s * s],
        [2.0 * eta * r, 2.0 * eta * r * c * c + x1 * x1 * s * s],
        [eta * eta, eta * eta * c * c + x2 * x2 * s * s],
        [0.0, 3.0 * eta * eta * r * s * s],
    ];
    let p_me = pure_error(q, c * c);
    Ok(assemble(q, p_me, &given, |k, priors| {
        // unnormalised overlap is P(k|1)·cosθ
        let ov = given[k][0] * c * c / given[k][1];
        let ov = ov.clamp(0.0, 1.0);
        (pure_error(priors[1], ov), Some(ov))
    }))
}

/// Smallest `k ≥ 3` with Poisson(`α²`) mass above `k` below `1e-15`.
pub fn example2_k_max(alpha: f64) -> usize {
    let mean = alpha * alpha;
    let mut term = (-mean).exp();
    let mut cumulative = term;
    let mut k = 0usize;
    loop {
        if k >= 3 && 1.0 - cumulative < 1e-15 {
            return k;
        }
        k += 1;
        term *= mean / k as f64;
        cumulative += term;
        if k > 10_000 {
            return k;
        }
    }
}

/// Environment `|α⟩` with real `α`, perfect counting. Reports `k = 0..=k_max`.
pub fn example2_closed_form(alpha: f64, eta: f64, q: f64, theta: f64, k_max: usize) -> Result<Evaluation> {
    check_unit("eta", eta)?;
    check_unit("q", q)?;
    if !alpha.is_finite() {
        return Err(Error::InvalidSweep(format!("alpha = {alpha} must be a finite real")));
    }
    let (s, c) = theta.sin_cos();
    let beta = (1.0 - eta).sqrt() * alpha;
    let gamma = eta.sqrt() * alpha;
    let weight = (-gamma * gamma).exp();

    // g[k] = γ^k / √k!
    let mut g = vec![1.0; k_max + 1];
    for k in 1..=k_max {
        g[k] = g[k - 1] * gamma / (k as f64).sqrt();
    }
    let mut given = Vec::with_capacity(k_max + 1);
    let mut ov = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let a = if k == 0 {
            c
        } else {
            c * g[k] - s * (1.0 - eta).sqrt() * (k as f64).sqrt() * g[k - 1]
        };
        let b = s * eta.sqrt() * g[k];
        let p1 = weight * g[k] * g[k];
        let p2 = weight * (a * a + b * b * (beta * beta + 1.0) + 2.0 * a * b * beta);
        let num = (a + b * beta).powi(2);
        let den = num + b * b;
        given.push([p1, p2]);
        ov.push(if den > 0.0 { (num / den).clamp(0.0, 1.0) } else { 0.0 });
    }
    let p_me = pure_error(q, c * c);
    Ok(assemble(q, p_me, &given, |k, priors| (pure_error(priors[1], ov[k]), Some(ov[k]))))
}

type Vec4 = [f64; 4];

/// The loss-resolved system vectors `y_i^{(k)}(ℓ)`, indexed `[i][k]`.
fn lossy_vectors(eta: f64, tau: f64, theta: f64) -> [[Vec<Vec4>; 4]; 2] {
    let (s, c) = theta.sin_cos();
    let r = 1.0 - eta;
    let t = tau;
    let u = 1.0 - tau;
    let x1 = 2.0 * eta * r.sqrt() - r.powf(1.5);
    let x2 = eta.powf(1.5) - 2.0 * r * eta.sqrt();
    let first = [
        vec![
            [0.0, 0.0, r, 0.0],
            [0.0, (2.0 * eta * r * u).sqrt(), 0.0, 0.0],
            [eta * u, 0.0, 0.0, 0.0],
        ],
        vec![
            [0.0, (2.0 * eta * t * r).sqrt(), 0.0, 0.0],
            [eta * (2.0 * t * u).sqrt(), 0.0, 0.0, 0.0],
        ],
        vec![[eta * t, 0.0, 0.0, 0.0]],
        vec![],
    ];
    let second = [
        vec![
            [0.0, 0.0, r * c, (3.0 * eta).sqrt() * r * s],
            [0.0, (2.0 * eta * r * u).sqrt() * c, u.sqrt() * x1 * s, 0.0],
            [eta * u * c, u * x2 * s, 0.0, 0.0],
            [-eta * (3.0 * u.powi(3) * r).sqrt() * s, 0.0, 0.0, 0.0],
        ],
        vec![
            [0.0, (2.0 * eta * t * r).sqrt() * c, t.sqrt() * x1 * s, 0.0],
            [eta * (2.0 * t * u).sqrt() * c, (2.0 * t * u).sqrt() * x2 * s, 0.0, 0.0],
            [-3.0 * eta * u * (t * r).sqrt() * s, 0.0, 0.0, 0.0],
        ],
        vec![
            [eta * t * c, t * x2 * s, 0.0, 0.0],
            [-3.0 * eta * t * (r * u).sqrt() * s, 0.0, 0.0, 0.0],
        ],
        vec![[-eta * (3.0 * t.powi(3) * r).sqrt() * s, 0.0, 0.0, 0.0]],
    ];
    [first, second]
}

fn outer_sum(ys: &[Vec4]) -> [[f64; 4]; 4] {
    let mut m = [[0.0; 4]; 4];
    for y in ys {
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] += y[i] * y[j];
            }
        }
    }
    m
}

/// Eigenvalues of a real symmetric 4×4 matrix by cyclic Jacobi rotations.
fn jacobi_eigenvalues(mut a: [[f64; 4]; 4]) -> Vec4 {
    for _ in 0..100 {
        let off: f64 = (0..4)
            .flat_map(|i| (0..4).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-32 {
            break;
        }
        for p in 0..3 {
            for q in p + 1..4 {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (xp, xq) = (row[p], row[q]);
                    row[p] = c * xp - s * xq;
                    row[q] = s * xp + c * xq;
                }
                let (rp, rq) = (a[p], a[q]);
                for k in 0..4 {
                    a[p][k] = c * rp[k] - s * rq[k];
                    a[q][k] = s * rp[k] + c * rq[k];
                }
            }
        }
    }
    [a[0][0], a[1][1], a[2][2], a[3][3]]
}

/// Environment `|2⟩`, pure loss `τ` before perfect counting. Reports `k = 0..=3`.
pub fn lossy_closed_form(eta: f64, q: f64, theta: f64, tau: f64) -> Result<Evaluation> {
    check_unit("eta", eta)?;
    check_unit("q", q)?;
    check_unit("tau", tau)?;
    let ys = lossy_vectors(eta, tau, theta);
    let mut rho = [[[[0.0; 4]; 4]; 4]; 2];
    let mut given = [[0.0; 2]; 4];
    for i in 0..2 {
        for k in 0..4 {
            let m = outer_sum(&ys[i][k]);
            given[k][i] = (0..4).map(|d| m[d][d]).sum();
            rho[i][k] = m;
        }
    }
    let c = theta.cos();
    let p_me = pure_error(q, c * c);
    Ok(assemble(q, p_me, &given, |k, priors| {
        let mut gamma = [[0.0; 4]; 4];
        for a in 0..4 {
            for b in 0..4 {
                gamma[a][b] = priors[0] * rho[0][k][a][b] / given[k][0] - priors[1] * rho[1][k][a][b] / given[k][1];
            }
        }
        let norm: f64 = jacobi_eigenvalues(gamma).iter().map(|v| v.abs()).sum();
        ((0.5 - 0.5 * norm).clamp(0.0, priors[0].min(priors[1])), None)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn example1_reference_point() {
        // η = 0.5, q = 0.3, θ = π/4, values worked out by hand
        let e = example1_closed_form(0.5, 0.3, FRAC_PI_4).unwrap();
        assert_abs_diff_eq!(e.p_me, 0.5 - 0.5 * (1.0f64 - 0.42).sqrt(), epsilon = 1e-15);
        let b = &e.branches;
        assert_abs_diff_eq!(b[0].p_k_given[1], 0.3125, epsilon = 1e-15);
        assert_abs_diff_eq!(b[1].p_k_given[1], 0.25 + (0.5f64.sqrt() - 0.5f64.powf(1.5)).powi(2) / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b[3].p_k_given[1], 3.0 / 16.0, epsilon = 1e-15);
        assert_eq!(b[3].p_err, Some(0.0));
        let total: f64 = b.iter().map(|x| x.p_k).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-14);
        assert!(e.margin >= 0.0);
    }

    #[test]
    fn example1_endpoints() {
        let one = example1_closed_form(1.0, 0.3, FRAC_PI_4).unwrap();
        assert_abs_diff_eq!(one.margin, 0.0, epsilon = 1e-15);
        let zero = example1_closed_form(0.0, 0.3, FRAC_PI_4).unwrap();
        assert_abs_diff_eq!(zero.p_aveme, 0.15, epsilon = 1e-15);
        assert_abs_diff_eq!(zero.margin, 0.15 - zero.p_me, epsilon = 1e-15);
    }

    #[test]
    fn example2_conditional_first_state_is_eta_independent() {
        let k_max = example2_k_max(0.9);
        for eta in [0.1, 0.5, 0.9] {
            let e = example2_closed_form(0.9, eta, 0.3, FRAC_PI_4, k_max).unwrap();
            let sum1: f64 = e.branches.iter().map(|b| b.p_k_given[0]).sum();
            let sum2: f64 = e.branches.iter().map(|b| b.p_k_given[1]).sum();
            assert_abs_diff_eq!(sum1, 1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(sum2, 1.0, epsilon = 1e-13);
            assert!(e.margin >= -1e-12);
        }
    }

    #[test]
    fn example2_k_max_rule() {
        assert_eq!(example2_k_max(0.0), 3);
        let k = example2_k_max(1.2);
        assert!(k > 10 && k < 30);
    }

    #[test]
    fn lossy_with_unit_tau_matches_example1() {
        for eta in [0.1, 0.37, 0.5, 0.9] {
            let a = lossy_closed_form(eta, 0.3, FRAC_PI_4, 1.0).unwrap();
            let b = example1_closed_form(eta, 0.3, FRAC_PI_4).unwrap();
            assert_abs_diff_eq!(a.p_aveme, b.p_aveme, epsilon = 1e-13);
            for (x, y) in a.branches.iter().zip(&b.branches) {
                assert_abs_diff_eq!(x.p_k, y.p_k, epsilon = 1e-14);
                assert_abs_diff_eq!(x.p_err.unwrap_or(0.0), y.p_err.unwrap_or(0.0), epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn lossy_likelihoods_sum_to_one() {
        for tau in [0.1, 0.3, 0.5, 0.7] {
            let e = lossy_closed_form(0.4, 0.3, FRAC_PI_4, tau).unwrap();
            for i in 0..2 {
                let total: f64 = e.branches.iter().map(|b| b.p_k_given[i]).sum();
                assert_abs_diff_eq!(total, 1.0, epsilon = 1e-14);
            }
            assert_eq!(e.branches[3].p_err, Some(0.0));
        }
    }

    #[test]
    fn jacobi_matches_known_spectrum() {
        let a = [[2.0, 1.0, 0.0, 0.0], [1.0, 2.0, 0.0, 0.0], [0.0, 0.0, -1.0, 0.0], [0.0, 0.0, 0.0, 0.0]];
        let mut ev = jacobi_eigenvalues(a).to_vec();
        ev.sort_by(f64::total_cmp);
        for (x, y) in ev.iter().zip([-1.0, 0.0, 1.0, 3.0]) {
            assert_abs_diff_eq!(*x, y, epsilon = 1e-14);
        }
    }
}
