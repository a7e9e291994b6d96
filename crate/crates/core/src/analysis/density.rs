use serde::{Deserialize, Serialize};

use super::wronskian::core_span;
use crate::solver::wavefunction::WaveFunction;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityProfile {
    pub rho: Vec<f64>,
    /// `(x, ρ)` of each local maximum.
    pub maxima: Vec<(f64, f64)>,
    pub minima: Vec<(f64, f64)>,
    pub max_rho: f64,
    /// Smallest `|ψ|²` along the piecewise-linear interpolant of `ψ` over
    /// the span where `ρ ≥ 1e-12 max ρ`; a node would drive it to zero.
    pub min_rho: f64,
}

impl DensityProfile {
    pub fn nodeless(&self) -> bool {
        self.min_rho > 1e-12 * self.max_rho
    }
}

/// Extrema from sign changes of `ρ' = 2 Re(conj ψ ψ')`; each is placed by
/// linear interpolation of `ρ'` and valued by a parabola through three
/// neighbouring samples. Tail extrema below `1e-10 max ρ` are ignored.
pub fn density_profile(wf: &WaveFunction) -> DensityProfile {
    let rho = wf.density();
    let n = rho.len();
    let g = &wf.grid;
    let h = g.h();
    let max_rho = rho.iter().cloned().fold(0.0, f64::max);
    let drho: Vec<f64> = (0..n).map(|i| 2.0 * (wf.psi[i].conj() * wf.dpsi[i]).re).collect();
    let mut maxima = Vec::new();
    let mut minima = Vec::new();
    for i in 0..n - 1 {
        let (a, b) = (drho[i], drho[i + 1]);
        if !(a != 0.0 && b != 0.0 && (a > 0.0) != (b > 0.0)) && !(a == 0.0 && i > 0 && (drho[i - 1] > 0.0) != (b > 0.0)) {
            continue;
        }
        let t = if a == b { 0.0 } else { a / (a - b) };
        let x = g.x(i) + t * h;
        let j = (i + usize::from(t > 0.5)).clamp(1, n - 2);
        let u = (x - g.x(j)) / h;
        let value = rho[j] + 0.5 * u * (rho[j + 1] - rho[j - 1]) + 0.5 * u * u * (rho[j + 1] - 2.0 * rho[j] + rho[j - 1]);
        if value < 1e-10 * max_rho {
            continue;
        }
        if a > 0.0 || (a == 0.0 && b < 0.0) {
            maxima.push((x, value));
        } else {
            minima.push((x, value));
        }
    }
    let (lo, hi) = core_span(&rho, 1e-12);
    let mut min_rho = f64::INFINITY;
    for i in lo..hi.max(lo + 1).min(n - 1) {
        let p = wf.psi[i];
        let d = wf.psi[i + 1] - p;
        let t = if d.norm_sqr() > 0.0 { (-(p.conj() * d).re / d.norm_sqr()).clamp(0.0, 1.0) } else { 0.0 };
        min_rho = min_rho.min((p + d * t).norm_sqr());
    }
    DensityProfile { rho, maxima, minima, max_rho, min_rho }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use num_complex::Complex64 as C64;
    use std::f64::consts::PI;

    #[test]
    fn poschl_teller_density() {
        let k: f64 = 2.0;
        let wf = WaveFunction::from_fn(Grid::symmetric(10.0, 1e-3).unwrap(), -1.0, |x| {
            let psi = C64::from_polar((k / PI).sqrt() / (k * x).cosh().sqrt(), (k * x / 2.0).tanh().atan());
            (psi, psi * C64::new(-0.5 * k * (k * x).tanh(), 0.5 * k / (k * x).cosh()))
        });
        let d = density_profile(&wf);
        assert_eq!(d.maxima.len(), 1);
        assert!(d.maxima[0].0.abs() < 1e-9);
        assert!((d.maxima[0].1 - 2.0 / PI).abs() < 1e-9);
        assert!(d.minima.is_empty());
        assert!(d.nodeless());
    }

    #[test]
    fn a_node_is_detected() {
        let g = Grid::symmetric(5.0, 1e-2).unwrap();
        // real odd function: ψ(0.003) = 0 between samples
        let wf = WaveFunction::from_fn(g, 0.0, |x| {
            let p = (x - 0.003) * (-x * x / 2.0f64).exp();
            (C64::new(p, 0.0), C64::new(0.0, 0.0))
        });
        let d = density_profile(&wf);
        assert!(!d.nodeless(), "{}", d.min_rho);
    }
}
