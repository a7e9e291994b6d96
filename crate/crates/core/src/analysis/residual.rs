use serde::{Deserialize, Serialize};

use crate::potentials::PotentialSpec;
use crate::solver::wavefunction::WaveFunction;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    /// `sup |−ψ'' + (V − E)ψ| / max|ψ|` over interior points.
    pub value: f64,
    /// The samples are identically zero.
    pub degenerate: bool,
}

/// Five-point second differences; stencils that straddle a breakpoint of the
/// potential are skipped since `ψ''` jumps there.
pub fn residual_oracle(spec: &PotentialSpec, wf: &WaveFunction, energy: f64) -> ResidualReport {
    let max = wf.max_abs();
    if max == 0.0 {
        return ResidualReport { value: 0.0, degenerate: true };
    }
    let g = &wf.grid;
    let h = g.h();
    let breaks = spec.breakpoints();
    let p = &wf.psi;
    let mut worst = 0.0f64;
    for i in 2..p.len().saturating_sub(2) {
        let (a, b) = (g.x(i - 2), g.x(i + 2));
        if breaks.iter().any(|&x| x >= a && x <= b) {
            continue;
        }
        let d2 = (-p[i + 2] + 16.0 * p[i + 1] - 30.0 * p[i] + 16.0 * p[i - 1] - p[i - 2]) / (12.0 * h * h);
        let r = -d2 + (spec.value(g.x(i)) - energy) * p[i];
        worst = worst.max(r.norm());
    }
    ResidualReport { value: worst / max, degenerate: false }
}
