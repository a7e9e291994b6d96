//! Bound-state solvers.
//!
//! Short-range wells use the transfer matrix between the plane-wave bases on
//! both sides of the interaction zone; confining potentials use two-sided
//! shooting to a matching point. Both integrate with RK4 from [`crate::ode`].

pub mod shooting;
pub mod transfer;
pub mod wavefunction;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::{integrate_nodes, integrate_with, State};
use crate::potentials::PotentialSpec;

pub use shooting::{find_bound_states_confining, ConfiningOptions};
pub use transfer::{find_bound_states_shortrange, k_plane_scan, transfer_matrix, KRegion, ShortRangeOptions, TransferMatrix};
pub use wavefunction::{fix_phase, normalize, PhaseRule, WaveFunction};

pub const DEFAULT_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Transfer,
    Shooting,
    Analytic,
}

/// How far from the real axis an eigenvalue may sit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealityTolerance {
    /// Below this `|Im E|` a root is accepted silently.
    pub accept: f64,
    /// Between `accept` and `warn` a root is kept with a warning; above it
    /// the root is rejected.
    pub warn: f64,
}

impl Default for RealityTolerance {
    fn default() -> Self {
        RealityTolerance { accept: 1e-6, warn: 1e-3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Reality {
    Real,
    Marginal,
    Complex,
}

impl RealityTolerance {
    pub(crate) fn judge(&self, im: f64) -> Reality {
        if im.abs() < self.accept {
            Reality::Real
        } else if im.abs() < self.warn {
            Reality::Marginal
        } else {
            Reality::Complex
        }
    }
}

/// A root that was located but not kept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rejected {
    pub energy: C64,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// `Im E` of each accepted root, aligned with the energies.
    pub imag_energies: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub k_roots: Vec<C64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_trunc: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rejected: Vec<Rejected>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundStateResult {
    pub method: Method,
    pub energies: Vec<f64>,
    /// `sup|−ψ'' + (V − E)ψ| / max|ψ|` per state.
    pub residuals: Vec<f64>,
    pub states: Vec<WaveFunction>,
    pub diagnostics: Diagnostics,
}

impl BoundStateResult {
    pub fn empty(method: Method) -> Self {
        BoundStateResult { method, energies: vec![], residuals: vec![], states: vec![], diagnostics: Diagnostics::default() }
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// Applies a phase rule to every state.
    pub fn with_phase(mut self, rule: PhaseRule) -> Result<Self> {
        self.states = self.states.into_iter().map(|s| fix_phase(s, rule)).collect::<Result<_>>()?;
        Ok(self)
    }
}

/// Everything [`solve`] needs beyond the potential. `None` fields fall back
/// to per-family defaults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub method: Option<Method>,
    /// Real energy window for shooting.
    pub window: Option<(f64, f64)>,
    /// k-plane rectangle for the transfer matrix.
    pub region: Option<KRegion>,
    pub x_trunc: Option<f64>,
    pub h: f64,
    pub reality: RealityTolerance,
    pub residual_tol: f64,
    pub phase: PhaseRule,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            method: None,
            window: None,
            region: None,
            x_trunc: None,
            h: DEFAULT_STEP,
            reality: RealityTolerance::default(),
            residual_tol: 1e-4,
            phase: PhaseRule::default(),
        }
    }
}

/// Transfer matrix for short-range wells, shooting for everything else.
pub fn default_method(spec: &PotentialSpec) -> Method {
    if spec.is_short_range() {
        Method::Transfer
    } else {
        Method::Shooting
    }
}

/// Energy window searched by shooting when none is given.
pub fn default_window(spec: &PotentialSpec) -> (f64, f64) {
    match spec {
        PotentialSpec::PoschlTeller { kappa } => (-kappa * kappa, -0.01 * kappa * kappa),
        PotentialSpec::CubicOscillator => (0.0, 12.0),
        PotentialSpec::Levai { .. } => (-25.0, -0.05),
        PotentialSpec::DarbouxOscillator(_) => (-2.0, 8.0),
        _ => {
            let g = crate::grid::Grid::symmetric(10.0, 1e-2).expect("fixed grid");
            let lo = g.points().map(|x| spec.value(x).re).fold(f64::INFINITY, f64::min);
            (lo, lo + 20.0)
        }
    }
}

/// Default k-plane rectangle: real energies between the bottom of the well
/// and the exterior level.
pub fn default_region(spec: &PotentialSpec) -> Option<KRegion> {
    let (xl, xr) = spec.interaction_zone()?;
    let ext = spec.exterior_value()?;
    let n = 2000;
    let lo = (0..=n).map(|i| spec.value(xl + (xr - xl) * i as f64 / n as f64).re).fold(f64::INFINITY, f64::min);
    Some(KRegion::below_threshold((ext - lo).max(1e-3)))
}

/// Finds the bound states of `spec` and applies the phase rule.
pub fn solve(spec: &PotentialSpec, opts: &SolveOptions) -> Result<BoundStateResult> {
    if !(opts.h > 0.0 && opts.residual_tol > 0.0 && opts.reality.accept > 0.0 && opts.reality.warn >= opts.reality.accept) {
        return Err(Error::param("step and tolerances must be positive"));
    }
    let result = match opts.method.unwrap_or_else(|| default_method(spec)) {
        Method::Transfer => {
            if !spec.is_short_range() {
                return Err(Error::MethodMismatch(format!(
                    "the transfer-matrix method needs a short-range potential; {} is not",
                    spec.family_name()
                )));
            }
            let region = opts.region.or_else(|| default_region(spec)).expect("short-range specs have a region");
            let o = ShortRangeOptions { h: opts.h, reality: opts.reality, residual_tol: opts.residual_tol, ..ShortRangeOptions::default() };
            find_bound_states_shortrange(spec, region, &o)?
        }
        Method::Shooting => {
            let mut o = ConfiningOptions { h: opts.h, reality: opts.reality, residual_tol: opts.residual_tol, ..ConfiningOptions::default() };
            if let Some(x) = opts.x_trunc {
                o.x_trunc = x;
            } else if matches!(spec, PotentialSpec::Levai { .. } | PotentialSpec::PoschlTeller { .. }) {
                // slow exponential decay near threshold
                o.x_trunc = 20.0;
            }
            find_bound_states_confining(spec, opts.window.unwrap_or_else(|| default_window(spec)), &o)?
        }
        Method::Analytic => return Err(Error::param("the analytic method is only produced by the Darboux construction")),
    };
    result.with_phase(opts.phase)
}

/// RK4 from `from_x` to `to_x` with steps no longer than `h`, splitting at
/// the potential's breakpoints. Returns `(ψ, ψ')` at `to_x`.
pub fn integrate(spec: &PotentialSpec, e: C64, from_x: f64, to_x: f64, psi0: C64, dpsi0: C64, h: f64) -> Result<(C64, C64)> {
    let v = |x: f64| spec.value(x);
    let s = integrate_with(&v, e, from_x, to_x, State::new(psi0, dpsi0), h, &spec.breakpoints())?;
    Ok((s.psi, s.dpsi))
}

/// Like [`integrate`] but returns `(x, ψ, ψ')` at every node of `nodes`.
pub fn integrate_trajectory(spec: &PotentialSpec, e: C64, nodes: &[f64], psi0: C64, dpsi0: C64, h: f64) -> Result<Vec<(f64, C64, C64)>> {
    let v = |x: f64| spec.value(x);
    let states = integrate_nodes(&v, e, nodes, State::new(psi0, dpsi0), h, &spec.breakpoints())?;
    Ok(nodes.iter().zip(states).map(|(&x, s)| (x, s.psi, s.dpsi)).collect())
}

pub(crate) fn dedupe_sorted(mut roots: Vec<C64>, tol: f64) -> Vec<C64> {
    roots.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
    let mut out: Vec<C64> = Vec::new();
    for r in roots {
        if out.iter().all(|q| (q - r).norm() > tol) {
            out.push(r);
        }
    }
    out
}
