use std::f64::consts::FRAC_PI_4;
use std::fmt;

use crate::{Error, Result};

/// Per-outcome data of one evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchSummary {
    pub p_k: f64,
    pub p_k_given: [f64; 2],
    /// `None` when the branch is suppressed.
    pub priors: Option<[f64; 2]>,
    /// Branch Helstrom error; `None` when suppressed.
    pub p_err: Option<f64>,
    /// `|⟨Ψ₁^{(k)}|Ψ₂^{(k)}⟩|²` when both conditional states are pure and present.
    pub overlap_sq: Option<f64>,
}

impl BranchSummary {
    pub fn suppressed(p_k: f64, p_k_given: [f64; 2]) -> Self {
        Self {
            p_k,
            p_k_given,
            priors: None,
            p_err: None,
            overlap_sq: None,
        }
    }

    pub fn is_suppressed(&self) -> bool {
        self.p_err.is_none()
    }
}

/// Result of one example at one parameter point, from either backend.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub p_me: f64,
    pub p_aveme: f64,
    pub margin: f64,
    pub captured_mass: f64,
    /// Indexed by photon count `k = 0..=k_max`.
    pub branches: Vec<BranchSummary>,
}

impl Evaluation {
    /// Largest `p_me − p_err_k` over reported branches.
    pub fn best_advantage(&self) -> Option<f64> {
        self.branches
            .iter()
            .filter_map(|b| b.p_err.map(|e| self.p_me - e))
            .reduce(f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    ClosedForm,
    Engine,
}

impl Backend {
    pub fn as_str(self) -> &'static str {
        match self {
            Backend::ClosedForm => "closed_form",
            Backend::Engine => "engine",
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BackendSelection {
    ClosedForm,
    Engine,
    Both,
}

impl BackendSelection {
    pub fn includes(self, backend: Backend) -> bool {
        matches!(
            (self, backend),
            (BackendSelection::Both, _)
                | (BackendSelection::ClosedForm, Backend::ClosedForm)
                | (BackendSelection::Engine, Backend::Engine)
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweptParam {
    Eta,
    Q,
}

impl SweptParam {
    pub fn name(self) -> &'static str {
        match self {
            SweptParam::Eta => "eta",
            SweptParam::Q => "q",
        }
    }
}

/// One emitted row.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub swept: SweptParam,
    pub value: f64,
    pub backend: Backend,
    pub eval: Evaluation,
}

/// `start, start + step, …` up to `stop` inclusive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Grid {
    pub fn new(start: f64, stop: f64, step: f64) -> Result<Self> {
        if step.is_nan() || step <= 0.0 || !start.is_finite() || !stop.is_finite() {
            return Err(Error::InvalidSweep(format!("bad grid {start}:{stop}:{step}")));
        }
        Ok(Self { start, stop, step })
    }

    /// The default `0.02:0.98:0.02` grid.
    pub fn default_unit() -> Self {
        Self {
            start: 0.02,
            stop: 0.98,
            step: 0.02,
        }
    }

    /// Grid points computed as `start + i·step`, rounded to 12 decimals.
    pub fn values(&self) -> Vec<f64> {
        if self.start > self.stop {
            return Vec::new();
        }
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n)
            .map(|i| ((self.start + i as f64 * self.step) * 1e12).round() / 1e12)
            .collect()
    }
}

/// Parameters held fixed during a sweep; the swept one is overridden per point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FixedParams {
    pub q: f64,
    pub eta: f64,
    pub theta: f64,
}

impl Default for FixedParams {
    fn default() -> Self {
        Self {
            q: 0.3,
            eta: 0.5,
            theta: FRAC_PI_4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExampleKind {
    /// Environment `|2⟩`, perfect photon counting.
    Example1,
    /// Environment `|α⟩`, perfect photon counting.
    Example2 { alpha: f64 },
    /// Environment `|2⟩`, pure loss `τ` before counting.
    Lossy { tau: f64 },
    /// Environment `|herald⟩` heralded from a squeezed vacuum with squeezing `r`.
    Tmsv { squeezing: f64, herald: usize },
}

impl ExampleKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExampleKind::Example1 => "example1",
            ExampleKind::Example2 { .. } => "example2",
            ExampleKind::Lossy { .. } => "lossy",
            ExampleKind::Tmsv { .. } => "tmsv",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub example: ExampleKind,
    pub fixed: FixedParams,
    pub swept: SweptParam,
    pub grid: Grid,
    /// Fock cutoff per mode for the engine; `None` picks the example default.
    pub cutoff: Option<usize>,
    /// Largest photon count reported; `None` picks the example default.
    pub k_max: Option<usize>,
    pub backend: BackendSelection,
}

impl SweepSpec {
    pub fn new(example: ExampleKind, swept: SweptParam) -> Self {
        Self {
            example,
            fixed: FixedParams::default(),
            swept,
            grid: Grid::default_unit(),
            cutoff: None,
            k_max: None,
            backend: BackendSelection::Both,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::InvalidSweep(format!("{name} = {v} outside [0, 1]")))
            }
        };
        unit("q", self.fixed.q)?;
        unit("eta", self.fixed.eta)?;
        if !self.fixed.theta.is_finite() {
            return Err(Error::InvalidSweep("theta must be finite".into()));
        }
        if self.grid.step.is_nan() || self.grid.step <= 0.0 {
            return Err(Error::InvalidSweep("grid step must be positive".into()));
        }
        for v in self.grid.values() {
            unit(self.swept.name(), v)?;
        }
        match self.example {
            ExampleKind::Example1 => {}
            ExampleKind::Example2 { alpha } => {
                if !alpha.is_finite() {
                    return Err(Error::InvalidSweep("alpha must be finite".into()));
                }
            }
            ExampleKind::Lossy { tau } => unit("tau", tau)?,
            ExampleKind::Tmsv { squeezing, .. } => {
                if !squeezing.is_finite() || squeezing < 0.0 {
                    return Err(Error::InvalidSweep(format!("squeezing r = {squeezing} must be >= 0")));
                }
            }
        }
        Ok(())
    }
}
