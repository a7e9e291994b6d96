use serde::{Deserialize, Serialize};

use crate::grid::Grid;
use crate::potentials::{ClassLabel, PotentialSpec};
use crate::solver::wavefunction::WaveFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignSummary {
    Positive,
    Negative,
    Mixed,
    /// `W ≡ 0` (e.g. a real state of a real potential).
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WronskianDiagnostics {
    /// `W = ψ_R ψ_I' − ψ_R' ψ_I` at every grid point.
    pub w: Vec<f64>,
    /// Location of the extremum of `W`.
    pub extremum_x: f64,
    /// Sign change point of `V_I` from the class label, when there is one.
    pub class_x0: Option<f64>,
    /// Sign of `W` where the density is significant (inside the interaction
    /// zone for short-range potentials).
    pub sign: SignSummary,
    /// `min |W| / max |W|` over that region.
    pub min_ratio: f64,
    /// `max |W' − |ψ|² V_I|` with `W'` by five-point differences.
    pub identity_residual: f64,
    /// `W'` changes sign once in the core, so `W` is monotone on each side.
    pub monotone_split: bool,
}

impl WronskianDiagnostics {
    /// `W` keeps one strict sign across the core. `W` decays roughly like
    /// `ρ²` in the tails, hence the loose floor on `min_ratio`.
    pub fn nonvanishing(&self) -> bool {
        matches!(self.sign, SignSummary::Positive | SignSummary::Negative) && self.min_ratio > 1e-14
    }
}

/// Indices where `ρ ≥ rel · max ρ`, as one contiguous span.
pub(crate) fn core_span(rho: &[f64], rel: f64) -> (usize, usize) {
    let max = rho.iter().cloned().fold(0.0, f64::max);
    let lo = rho.iter().position(|&r| r >= rel * max).unwrap_or(0);
    let hi = rho.iter().rposition(|&r| r >= rel * max).unwrap_or(rho.len() - 1);
    (lo, hi)
}

pub fn wronskian_diagnostics(wf: &WaveFunction, spec: &PotentialSpec) -> WronskianDiagnostics {
    let g: &Grid = &wf.grid;
    let n = wf.psi.len();
    let h = g.h();
    let w: Vec<f64> = (0..n).map(|i| wf.psi[i].re * wf.dpsi[i].im - wf.dpsi[i].re * wf.psi[i].im).collect();
    let rho = wf.density();
    let breaks = spec.breakpoints();

    let mut identity_residual = 0.0f64;
    let mut dw = vec![0.0; n];
    for i in 2..n.saturating_sub(2) {
        let (a, b) = (g.x(i - 2), g.x(i + 2));
        if breaks.iter().any(|&x| x >= a && x <= b) {
            continue;
        }
        dw[i] = (-w[i + 2] + 8.0 * w[i + 1] - 8.0 * w[i - 1] + w[i - 2]) / (12.0 * h);
        let r = (dw[i] - rho[i] * spec.value(g.x(i)).im).abs();
        identity_residual = identity_residual.max(r);
    }

    let (mut lo, mut hi) = core_span(&rho, 1e-6);
    // V_I vanishes outside a compact zone, and so does W for a bound state:
    // only the open zone can carry a sign.
    if let Some((xl, xr)) = spec.interaction_zone() {
        lo = lo.max(g.nearest_index(xl) + 2);
        hi = hi.min(g.nearest_index(xr).saturating_sub(2));
        if lo > hi {
            (lo, hi) = (hi, lo);
        }
    }
    let core = &w[lo..=hi];
    let wmax = core.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = (0..n).map(|i| wf.psi[i].norm() * wf.dpsi[i].norm()).fold(0.0, f64::max);
    let (sign, min_ratio) = if wmax <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
        (SignSummary::Degenerate, 0.0)
    } else {
        let pos = core.iter().all(|&v| v > 0.0);
        let neg = core.iter().all(|&v| v < 0.0);
        let min = core.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
        let s = if pos {
            SignSummary::Positive
        } else if neg {
            SignSummary::Negative
        } else {
            SignSummary::Mixed
        };
        (s, min / wmax)
    };
    let (ext_i, _) = w.iter().enumerate().fold((0, 0.0f64), |acc, (i, v)| if v.abs() > acc.1 { (i, v.abs()) } else { acc });

    // sign changes of W' in the core, ignoring round-off-sized values
    let dmax = dw[lo..=hi].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut changes = 0;
    let mut last = 0.0f64;
    for &d in &dw[lo..=hi] {
        if d.abs() <= 1e-6 * dmax {
            continue;
        }
        if last != 0.0 && d.signum() != last.signum() {
            changes += 1;
        }
        last = d;
    }

    WronskianDiagnostics {
        extremum_x: g.x(ext_i),
        class_x0: match spec.classify(g, 1e-10) {
            ClassLabel::Neither => None,
            c => c.sign_change_point(),
        },
        w,
        sign,
        min_ratio,
        identity_residual,
        monotone_split: changes == 1,
    }
}
