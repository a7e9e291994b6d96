use std::f64::consts::PI;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::quad::simpson;

/// How the free global phase of an eigenfunction is fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseRule {
    /// `ψ` real and positive where `|ψ|` peaks.
    PeakPositive,
    /// Closest to `ψ(x) = conj ψ(−x)` (even real part, odd imaginary part).
    SymmetryAdapted,
    /// Multiply by `e^{iθ}`.
    Raw(f64),
}

impl Default for PhaseRule {
    fn default() -> Self {
        PhaseRule::Raw(0.0)
    }
}

impl FromStr for PhaseRule {
    type Err = Error;

    /// `peak`, `symmetry` or `raw:θ`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "peak" => Ok(PhaseRule::PeakPositive),
            "symmetry" => Ok(PhaseRule::SymmetryAdapted),
            _ => match s.strip_prefix("raw:") {
                Some(t) => t
                    .parse::<f64>()
                    .map(PhaseRule::Raw)
                    .map_err(|_| Error::param(format!("bad phase angle in `{s}`"))),
                None => Err(Error::param(format!("unknown phase rule `{s}` (expected peak, symmetry or raw:THETA)"))),
            },
        }
    }
}

/// Complex samples of an eigenfunction and its derivative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WaveDoc", into = "WaveDoc")]
pub struct WaveFunction {
    pub grid: Grid,
    pub psi: Vec<C64>,
    pub dpsi: Vec<C64>,
    pub energy: f64,
    pub normalized: bool,
    pub phase_rule: PhaseRule,
}

#[derive(Serialize, Deserialize)]
struct WaveDoc {
    energy: f64,
    normalized: bool,
    phase_rule: PhaseRule,
    grid: Grid,
    psi_re: Vec<f64>,
    psi_im: Vec<f64>,
    dpsi_re: Vec<f64>,
    dpsi_im: Vec<f64>,
}

impl From<WaveFunction> for WaveDoc {
    fn from(w: WaveFunction) -> Self {
        WaveDoc {
            energy: w.energy,
            normalized: w.normalized,
            phase_rule: w.phase_rule,
            grid: w.grid,
            psi_re: w.psi.iter().map(|z| z.re).collect(),
            psi_im: w.psi.iter().map(|z| z.im).collect(),
            dpsi_re: w.dpsi.iter().map(|z| z.re).collect(),
            dpsi_im: w.dpsi.iter().map(|z| z.im).collect(),
        }
    }
}

impl TryFrom<WaveDoc> for WaveFunction {
    type Error = Error;

    fn try_from(d: WaveDoc) -> Result<Self> {
        let n = d.grid.len();
        if [d.psi_re.len(), d.psi_im.len(), d.dpsi_re.len(), d.dpsi_im.len()].iter().any(|&l| l != n) {
            return Err(Error::Schema(format!("state sample arrays must all have {n} entries")));
        }
        let zip = |re: Vec<f64>, im: Vec<f64>| re.into_iter().zip(im).map(|(r, i)| C64::new(r, i)).collect();
        Ok(WaveFunction {
            grid: d.grid,
            psi: zip(d.psi_re, d.psi_im),
            dpsi: zip(d.dpsi_re, d.dpsi_im),
            energy: d.energy,
            normalized: d.normalized,
            phase_rule: d.phase_rule,
        })
    }
}

impl WaveFunction {
    pub fn new(grid: Grid, psi: Vec<C64>, dpsi: Vec<C64>, energy: f64) -> Result<Self> {
        if psi.len() != grid.len() || dpsi.len() != grid.len() {
            return Err(Error::param("wave function samples must match the grid length"));
        }
        Ok(WaveFunction { grid, psi, dpsi, energy, normalized: false, phase_rule: PhaseRule::Raw(0.0) })
    }

    /// Samples `f(x) -> (ψ, ψ')` on `grid`.
    pub fn from_fn(grid: Grid, energy: f64, f: impl Fn(f64) -> (C64, C64)) -> Self {
        let (psi, dpsi) = grid.points().map(f).unzip();
        WaveFunction { grid, psi, dpsi, energy, normalized: false, phase_rule: PhaseRule::Raw(0.0) }
    }

    pub fn norm_sq(&self) -> f64 {
        let rho: Vec<f64> = self.psi.iter().map(|z| z.norm_sqr()).collect();
        simpson(self.grid.h(), &rho)
    }

    pub fn max_abs(&self) -> f64 {
        self.psi.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// `max(|ψ(x_min)|, |ψ(x_max)|) / max |ψ|`.
    pub fn tail_ratio(&self) -> f64 {
        let ends = self.psi[0].norm().max(self.psi[self.psi.len() - 1].norm());
        ends / self.max_abs()
    }

    pub fn real_part(&self) -> Vec<f64> {
        self.psi.iter().map(|z| z.re).collect()
    }

    pub fn imag_part(&self) -> Vec<f64> {
        self.psi.iter().map(|z| z.im).collect()
    }

    pub fn density(&self) -> Vec<f64> {
        self.psi.iter().map(|z| z.norm_sqr()).collect()
    }

    /// `e^{iθ} ψ`; the phase rule becomes `Raw` relative to the current one.
    pub fn rotated(&self, theta: f64) -> Self {
        let r = C64::from_polar(1.0, theta);
        WaveFunction {
            psi: self.psi.iter().map(|z| z * r).collect(),
            dpsi: self.dpsi.iter().map(|z| z * r).collect(),
            phase_rule: PhaseRule::Raw(theta),
            ..self.clone()
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        WaveFunction {
            psi: self.psi.iter().map(|z| z * c).collect(),
            dpsi: self.dpsi.iter().map(|z| z * c).collect(),
            ..self.clone()
        }
    }
}

/// Rescales so that `∫|ψ|² = 1`.
pub fn normalize(wf: WaveFunction) -> Result<WaveFunction> {
    let n2 = wf.norm_sq();
    if !(n2 > 0.0) || !n2.is_finite() {
        return Err(Error::ZeroNorm);
    }
    let mut out = wf.scaled(1.0 / n2.sqrt());
    out.normalized = true;
    Ok(out)
}

/// Phase that the rule would apply to `wf`.
pub fn phase_angle(wf: &WaveFunction, rule: PhaseRule) -> Result<f64> {
    match rule {
        PhaseRule::Raw(theta) => Ok(theta),
        PhaseRule::PeakPositive => {
            let (mut best, mut idx) = (-1.0, 0);
            for (i, z) in wf.psi.iter().enumerate() {
                if z.norm() > best {
                    best = z.norm();
                    idx = i;
                }
            }
            Ok(-wf.psi[idx].arg())
        }
        PhaseRule::SymmetryAdapted => {
            if !wf.grid.is_symmetric() {
                return Err(Error::NonSymmetricGrid { x_min: wf.grid.x_min(), x_max: wf.grid.x_max() });
            }
            // ∫|e^{iθ}ψ(x) − e^{−iθ}conj ψ(−x)|² = const − 2 Re(e^{2iθ} S),
            // S = ∫ψ(x)ψ(−x): minimized at 2θ = −arg S.
            let n = wf.psi.len();
            let prod: Vec<C64> = (0..n).map(|i| wf.psi[i] * wf.psi[n - 1 - i]).collect();
            let s = crate::quad::simpson_complex(wf.grid.h(), &prod);
            if s.norm() <= 1e-14 * wf.norm_sq() {
                return Ok(0.0);
            }
            let mut theta = -0.5 * s.arg();
            // θ and θ + π fit equally well: keep the real part positive at the peak.
            let peak = wf.psi.iter().enumerate().fold((0, -1.0), |acc, (i, z)| if z.norm() > acc.1 { (i, z.norm()) } else { acc }).0;
            if (wf.psi[peak] * C64::from_polar(1.0, theta)).re < 0.0 {
                theta += PI;
            }
            Ok(theta)
        }
    }
}

/// Multiplies by the phase the rule selects and records the rule.
pub fn fix_phase(wf: WaveFunction, rule: PhaseRule) -> Result<WaveFunction> {
    let theta = phase_angle(&wf, rule)?;
    let mut out = wf.rotated(theta);
    out.phase_rule = rule;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(shift: f64, phase: f64) -> WaveFunction {
        let g = Grid::symmetric(8.0, 1e-2).unwrap();
        WaveFunction::from_fn(g, 0.0, |x| {
            let v = C64::from_polar((-(x - shift) * (x - shift)).exp(), phase + 0.3 * x);
            (v, v * C64::new(-2.0 * (x - shift), 0.3))
        })
    }

    #[test]
    fn normalize_divides_out_scale() {
        let phi = normalize(gaussian(0.0, 0.0)).unwrap();
        assert!((phi.norm_sq() - 1.0).abs() < 1e-12);
        let twice = normalize(phi.scaled(2.0)).unwrap();
        for (a, b) in twice.psi.iter().zip(&phi.psi) {
            assert!((a - b).norm() < 1e-14);
        }
        let zero = WaveFunction::from_fn(Grid::new(0.0, 1.0, 11).unwrap(), 0.0, |_| (C64::new(0.0, 0.0), C64::new(0.0, 0.0)));
        assert!(matches!(normalize(zero), Err(Error::ZeroNorm)));
    }

    #[test]
    fn raw_zero_is_identity() {
        let w = gaussian(0.4, 1.0);
        assert_eq!(fix_phase(w.clone(), PhaseRule::Raw(0.0)).unwrap().psi, w.psi);
    }

    #[test]
    fn rules_are_idempotent() {
        for rule in [PhaseRule::PeakPositive, PhaseRule::SymmetryAdapted] {
            for phase in [0.0, 1.0, 2.5, -2.0] {
                let once = fix_phase(gaussian(0.3, phase), rule).unwrap();
                let twice = fix_phase(once.clone(), rule).unwrap();
                for (a, b) in once.psi.iter().zip(&twice.psi) {
                    assert!((a - b).norm() < 1e-12, "{rule:?} {phase}");
                }
            }
        }
    }

    #[test]
    fn symmetry_rule_recovers_pt_structure() {
        // ψ(x) = e^{-x²}(1 + i x) e^{iφ}: PT-symmetric up to the phase φ.
        let g = Grid::symmetric(6.0, 1e-2).unwrap();
        let w = WaveFunction::from_fn(g, 0.0, |x| {
            let v = C64::new(1.0, x) * (-x * x).exp() * C64::from_polar(1.0, 0.9);
            (v, v)
        });
        let fixed = fix_phase(w, PhaseRule::SymmetryAdapted).unwrap();
        let n = fixed.psi.len();
        for i in 0..n {
            assert!((fixed.psi[i] - fixed.psi[n - 1 - i].conj()).norm() < 1e-12);
        }
        assert!(fixed.psi[n / 2].re > 0.0);
    }

    #[test]
    fn symmetry_rule_needs_symmetric_grid() {
        let g = Grid::new(-1.0, 2.0, 31).unwrap();
        let w = WaveFunction::from_fn(g, 0.0, |x| (C64::new(x, 0.0), C64::new(1.0, 0.0)));
        assert!(matches!(fix_phase(w, PhaseRule::SymmetryAdapted), Err(Error::NonSymmetricGrid { .. })));
    }

    #[test]
    fn peak_rule_makes_peak_real_positive() {
        let w = fix_phase(gaussian(0.5, 2.0), PhaseRule::PeakPositive).unwrap();
        let peak = w.psi.iter().max_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap()).unwrap();
        assert!(peak.im.abs() < 1e-15 && peak.re > 0.0);
    }

    #[test]
    fn phase_rule_parsing() {
        assert_eq!("peak".parse::<PhaseRule>().unwrap(), PhaseRule::PeakPositive);
        assert_eq!("symmetry".parse::<PhaseRule>().unwrap(), PhaseRule::SymmetryAdapted);
        assert_eq!("raw:0.5".parse::<PhaseRule>().unwrap(), PhaseRule::Raw(0.5));
        assert!("raw:x".parse::<PhaseRule>().is_err());
        assert!("north".parse::<PhaseRule>().is_err());
    }

    #[test]
    fn json_round_trip() {
        let w = normalize(gaussian(0.0, 0.2)).unwrap();
        let back: WaveFunction = serde_json::from_str(&serde_json::to_string(&w).unwrap()).unwrap();
        assert_eq!(back, w);
    }
}
