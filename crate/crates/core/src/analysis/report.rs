use serde::{Deserialize, Serialize};

use super::{density_profile, residual_oracle, wronskian_diagnostics, zero_report, SignSummary, ZeroReport};
use crate::potentials::PotentialSpec;
use crate::solver::WaveFunction;

/// Interlacing and count law under `n` uniformly spaced phases in `[0, π)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSweep {
    pub phases: usize,
    pub interlaced: usize,
    pub count_law: usize,
    /// `(θ, n_R, n_I)` for every phase that failed either check.
    pub failures: Vec<(f64, usize, usize)>,
}

impl PhaseSweep {
    pub fn all_pass(&self) -> bool {
        self.interlaced == self.phases && self.count_law == self.phases
    }
}

pub fn phase_sweep(wf: &WaveFunction, n: usize) -> PhaseSweep {
    let mut out = PhaseSweep { phases: n, interlaced: 0, count_law: 0, failures: vec![] };
    for j in 0..n {
        let theta = std::f64::consts::PI * j as f64 / n as f64;
        let z = zero_report(&wf.rotated(theta));
        out.interlaced += usize::from(z.interlaced);
        out.count_law += usize::from(z.count_law);
        if !(z.interlaced && z.count_law) {
            out.failures.push((theta, z.n_r, z.n_i));
        }
    }
    out
}

/// Per-state entry of an `analyze` report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateAnalysis {
    pub index: usize,
    pub energy: f64,
    pub zeros: ZeroReport,
    pub nodeless: bool,
    pub min_rho: f64,
    pub density_maxima: Vec<(f64, f64)>,
    pub density_minima: Vec<(f64, f64)>,
    pub wronskian_sign: SignSummary,
    pub wronskian_nonvanishing: bool,
    pub wronskian_extremum_x: f64,
    pub class_x0: Option<f64>,
    pub identity_residual: f64,
    pub residual: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<PhaseSweep>,
}

/// Runs every check on one state. `sweep` phases are tried when non-zero.
pub fn analyze_state(spec: &PotentialSpec, wf: &WaveFunction, index: usize, sweep: usize) -> StateAnalysis {
    let d = density_profile(wf);
    let w = wronskian_diagnostics(wf, spec);
    StateAnalysis {
        index,
        energy: wf.energy,
        zeros: zero_report(wf),
        nodeless: d.nodeless(),
        min_rho: d.min_rho,
        density_maxima: d.maxima,
        density_minima: d.minima,
        wronskian_sign: w.sign,
        wronskian_nonvanishing: w.nonvanishing(),
        wronskian_extremum_x: w.extremum_x,
        class_x0: w.class_x0,
        identity_residual: w.identity_residual,
        residual: residual_oracle(spec, wf, wf.energy).value,
        sweep: (sweep > 0).then(|| phase_sweep(wf, sweep)),
    }
}
