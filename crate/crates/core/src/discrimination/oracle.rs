use crate::error::check_unit_interval;
use crate::fock::PureState;
use crate::{Result, C64};

/// Grid search for the minimum error over projective measurements on the
/// two-dimensional span of `ψ₁`, `ψ₂`.
///
/// The span basis is `{ψ₁, ψ₂⊥}` after rotating the global phase of `ψ₂` so
/// that the overlap is real. Measurement vectors are
/// `cos t|e₀⟩ + e^{iφ} sin t|e₁⟩` with `t ∈ [0, π/2]` and `φ ∈ [0, 2π)`, each
/// on `resolution` points; both assignments of outcomes to hypotheses are tried.
pub fn brute_force_min_error(psi1: &PureState, psi2: &PureState, q: f64, resolution: usize) -> Result<f64> {
    check_unit_interval("q", q)?;
    psi1.check_normalized()?;
    psi2.check_normalized()?;
    let resolution = resolution.max(2);
    let overlap = psi1.inner(psi2)?;
    if overlap.norm() >= 1.0 - 1e-12 {
        return Ok(q.min(1.0 - q));
    }

    let phase = if overlap.norm() > 0.0 { overlap.conj() / overlap.norm() } else { C64::new(1.0, 0.0) };
    let e0 = psi1.amplitudes();
    let psi2 = psi2.amplitudes() * phase;
    let perp = &psi2 - e0 * e0.dotc(&psi2);
    let e1 = perp.unscale(perp.norm());
    let coords = |v: &nalgebra::DVector<C64>| [e0.dotc(v), e1.dotc(v)];
    let c1 = coords(e0);
    let c2 = coords(&psi2);

    let mut best = f64::INFINITY;
    for i in 0..resolution {
        let t = std::f64::consts::FRAC_PI_2 * i as f64 / (resolution - 1) as f64;
        for j in 0..resolution {
            let phi = 2.0 * std::f64::consts::PI * j as f64 / resolution as f64;
            let m = [C64::new(t.cos(), 0.0), C64::from_polar(t.sin(), phi)];
            let hit = |c: &[C64; 2]| (m[0].conj() * c[0] + m[1].conj() * c[1]).norm_sqr();
            let (h1, h2) = (hit(&c1), hit(&c2));
            // outcome m ↦ guess ψ₁, or outcome m ↦ guess ψ₂
            let guess_first = (1.0 - q) * (1.0 - h1) + q * h2;
            let guess_second = (1.0 - q) * h1 + q * (1.0 - h2);
            best = best.min(guess_first).min(guess_second);
        }
    }
    Ok(best)
}
