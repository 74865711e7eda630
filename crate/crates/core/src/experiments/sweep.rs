use rayon::prelude::*;

use crate::fock::{env_contract, fock_state, FockSpace, PureState};
use crate::measurement::{pnr_povm, Measurement};
use crate::tol::{PROBABILITY_FLOOR, TAIL_TARGET};
use crate::{Error, Result, C64};

use super::closed_form::{example1_closed_form, example2_closed_form, example2_k_max, lossy_closed_form};
use super::engine::{env_engine, example1_engine, example2_engine, lossy_engine};
use super::types::{Backend, Evaluation, ExampleKind, SweepRow, SweepSpec, SweptParam};

pub const CROSS_CHECK_TOL_PURE: f64 = 1e-10;
pub const CROSS_CHECK_TOL_LOSSY: f64 = 1e-9;

/// Smallest cutoff whose two-mode squeezed vacuum tail `tanh^{2c} r` is below the tail target.
pub fn tmsv_cutoff(squeezing: f64) -> usize {
    let t = squeezing.tanh();
    if t == 0.0 {
        return 1;
    }
    let c = (TAIL_TARGET.ln() / (2.0 * t.ln())).ceil().max(1.0) as usize;
    // guard against rounding right at the boundary
    if t.powi(2 * c as i32) > TAIL_TARGET {
        c + 1
    } else {
        c
    }
}

/// Heralds the signal mode of `Σ_n c_n|n,n⟩`, `c_n = tanhⁿ r / cosh r`, on
/// idler count `k`. Returns the herald probability and the signal state.
pub fn tmsv_herald(squeezing: f64, k: usize, cutoff: usize) -> Result<(f64, PureState)> {
    if !squeezing.is_finite() || squeezing < 0.0 {
        return Err(Error::ParameterOutOfRange {
            name: "squeezing",
            value: squeezing,
            min: 0.0,
            max: f64::INFINITY,
        });
    }
    let t = squeezing.tanh();
    let tail = t.powi(2 * cutoff as i32);
    if tail > TAIL_TARGET {
        return Err(Error::CutoffTooSmall {
            tail,
            target: TAIL_TARGET,
            suggested: tmsv_cutoff(squeezing),
        });
    }
    let mode = FockSpace::new(cutoff);
    let joint_space = mode.tensor(&mode);
    let mut amps = vec![C64::new(0.0, 0.0); joint_space.dim()];
    let mut c_n = 1.0 / squeezing.cosh();
    for n in 0..cutoff {
        amps[joint_space.index_of(&[n, n])?] = C64::new(c_n, 0.0);
        c_n *= t;
    }
    let joint = PureState::new(joint_space, amps.into(), tail)?;
    let signal = env_contract(&joint, &fock_state(k, &mode)?)?;
    let prob = signal.norm_sqr();
    let state = signal.normalize().ok_or(Error::BranchSuppressed { prob })?;
    Ok((prob, state))
}

fn compare(field: String, closed: f64, engine: f64, tol: f64, swept: SweptParam, value: f64) -> Result<()> {
    if (closed - engine).abs() <= tol {
        Ok(())
    } else {
        Err(Error::CrossCheck {
            swept: swept.name(),
            value,
            field,
            closed,
            engine,
            tol,
        })
    }
}

/// Field-by-field agreement of two evaluations. Reports the first field out of tolerance.
pub fn cross_check(closed: &Evaluation, engine: &Evaluation, tol: f64, swept: SweptParam, value: f64) -> Result<()> {
    let cmp = |field: &str, a: f64, b: f64| compare(field.to_string(), a, b, tol, swept, value);
    cmp("p_me", closed.p_me, engine.p_me)?;
    cmp("p_aveme", closed.p_aveme, engine.p_aveme)?;
    cmp("margin", closed.margin, engine.margin)?;
    cmp("captured_mass", closed.captured_mass, engine.captured_mass)?;
    for (k, (c, e)) in closed.branches.iter().zip(&engine.branches).enumerate() {
        cmp(&format!("p_k{k}"), c.p_k, e.p_k)?;
        cmp(&format!("p_k{k}_given_1"), c.p_k_given[0], e.p_k_given[0])?;
        cmp(&format!("p_k{k}_given_2"), c.p_k_given[1], e.p_k_given[1])?;
        match (c.p_err, e.p_err) {
            (Some(a), Some(b)) => cmp(&format!("p_err_k{k}"), a, b)?,
            (None, None) => {}
            // both sides agree the outcome sits at the floor
            _ if c.p_k.max(e.p_k) <= 2.0 * PROBABILITY_FLOOR => {}
            (a, b) => cmp(&format!("p_err_k{k}"), a.unwrap_or(f64::NAN), b.unwrap_or(f64::NAN))?,
        }
        if let (Some(a), Some(b)) = (c.priors, e.priors) {
            cmp(&format!("prior_1_k{k}"), a[0], b[0])?;
            cmp(&format!("prior_2_k{k}"), a[1], b[1])?;
        }
        if let (Some(a), Some(b)) = (c.overlap_sq, e.overlap_sq) {
            cmp(&format!("overlap_sq_k{k}"), a, b)?;
        }
    }
    Ok(())
}

fn evaluate_point(spec: &SweepSpec, value: f64) -> Result<Vec<SweepRow>> {
    let mut p = spec.fixed;
    match spec.swept {
        SweptParam::Eta => p.eta = value,
        SweptParam::Q => p.q = value,
    }
    let (closed, engine, tol) = match spec.example {
        ExampleKind::Example1 => (
            Some(example1_closed_form(p.eta, p.q, p.theta)?),
            example1_engine(p.eta, p.q, p.theta)?.eval,
            CROSS_CHECK_TOL_PURE,
        ),
        ExampleKind::Example2 { alpha } => {
            let k_max = spec.k_max.unwrap_or_else(|| example2_k_max(alpha));
            (
                Some(example2_closed_form(alpha, p.eta, p.q, p.theta, k_max)?),
                example2_engine(alpha, p.eta, p.q, p.theta, k_max, spec.cutoff)?.eval,
                CROSS_CHECK_TOL_PURE,
            )
        }
        ExampleKind::Lossy { tau } => (
            Some(lossy_closed_form(p.eta, p.q, p.theta, tau)?),
            lossy_engine(p.eta, p.q, p.theta, tau)?.eval,
            CROSS_CHECK_TOL_LOSSY,
        ),
        ExampleKind::Tmsv { squeezing, herald } => {
            let cutoff = spec.cutoff.unwrap_or_else(|| tmsv_cutoff(squeezing).max(herald + 2));
            let (_, env) = tmsv_herald(squeezing, herald, cutoff)?;
            let measurement = Measurement::Povm(pnr_povm(env.space()));
            let k_max = spec.k_max.unwrap_or(herald + 1);
            let engine = env_engine(env, cutoff, p.eta, p.q, p.theta, measurement, k_max)?.eval;
            let closed = if herald == 2 && k_max == 3 {
                Some(example1_closed_form(p.eta, p.q, p.theta)?)
            } else {
                None
            };
            (closed, engine, CROSS_CHECK_TOL_PURE)
        }
    };
    if let Some(c) = &closed {
        cross_check(c, &engine, tol, spec.swept, value)?;
    }
    let mut rows = Vec::with_capacity(2);
    if spec.backend.includes(Backend::ClosedForm) {
        match closed {
            Some(eval) => rows.push(SweepRow {
                swept: spec.swept,
                value,
                backend: Backend::ClosedForm,
                eval,
            }),
            None => {
                return Err(Error::InvalidSweep(format!(
                    "no closed form for {} with these parameters",
                    spec.example.name()
                )))
            }
        }
    }
    if spec.backend.includes(Backend::Engine) {
        rows.push(SweepRow {
            swept: spec.swept,
            value,
            backend: Backend::Engine,
            eval: engine,
        });
    }
    Ok(rows)
}

/// Evaluates every grid point in parallel, cross-checks the backends and
/// returns rows in grid order (closed form before engine at each point).
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let per_point: Vec<Vec<SweepRow>> = spec
        .grid
        .values()
        .into_par_iter()
        .map(|v| evaluate_point(spec, v))
        .collect::<Result<_>>()?;
    Ok(per_point.into_iter().flatten().collect())
}

/// One sweep per loss transmissivity, sharing everything else in `base`.
pub fn lossy_sweep(base: &SweepSpec, taus: &[f64]) -> Result<Vec<(f64, Vec<SweepRow>)>> {
    taus.iter()
        .map(|&tau| {
            let mut spec = base.clone();
            spec.example = ExampleKind::Lossy { tau };
            run_sweep(&spec).map(|rows| (tau, rows))
        })
        .collect()
}
