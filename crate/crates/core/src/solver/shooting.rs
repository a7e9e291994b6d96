//! Two-sided shooting for potentials that confine at the energies of
//! interest.
//!
//! Both branches start at `±x_trunc` with WKB-decaying data and meet at the
//! matching point `x_m = argmin Re V`. The mismatch is the Wronskian of the
//! branches there, divided by the norms of the two state vectors so that it
//! is independent of the (arbitrary) branch scales; it vanishes exactly at
//! eigenvalues and stays analytic in `E` up to a smooth positive factor.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::wavefunction::{normalize, WaveFunction};
use super::{dedupe_sorted, BoundStateResult, Diagnostics, Method, Reality, RealityTolerance, Rejected, DEFAULT_STEP};
use crate::analysis::residual::residual_oracle;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::ode::{State, Tabulated};
use crate::potentials::PotentialSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfiningOptions {
    pub x_trunc: f64,
    pub h: f64,
    pub scan_points: usize,
    /// Times `x_trunc` may be doubled to satisfy the tail criterion.
    pub max_doublings: usize,
    /// Required `|ψ(±x_trunc)| / max|ψ|`.
    pub tail_tol: f64,
    pub reality: RealityTolerance,
    pub residual_tol: f64,
}

impl Default for ConfiningOptions {
    fn default() -> Self {
        ConfiningOptions {
            x_trunc: 10.0,
            h: DEFAULT_STEP,
            scan_points: 400,
            max_doublings: 3,
            tail_tol: 1e-6,
            reality: RealityTolerance::default(),
            residual_tol: 1e-4,
        }
    }
}

struct Shooter {
    tab: Tabulated,
    n: usize,
    m: usize,
}

impl Shooter {
    fn new(spec: &PotentialSpec, x_trunc: f64, h: f64) -> Result<Self> {
        let grid = Grid::symmetric(x_trunc, h)?;
        let n = grid.len();
        let v = |x: f64| spec.value(x);
        let tab = Tabulated::new(&v, -x_trunc, grid.h(), n);
        // Matching point: first global minimum of Re V, kept off the ends.
        let mut m = 1;
        for i in 1..n - 1 {
            if tab.node_value(i).re < tab.node_value(m).re {
                m = i;
            }
        }
        Ok(Shooter { tab, n, m })
    }

    fn grid(&self) -> Grid {
        Grid::new(self.tab.x0, self.tab.x(self.n - 1), self.n).expect("valid grid")
    }

    /// WKB data at node `i` decaying away from the interior; `outward` is +1
    /// on the right end and −1 on the left.
    fn boundary(&self, e: C64, i: usize, outward: f64) -> State {
        let s = (self.tab.node_value(i) - e).sqrt();
        let s = if s.re < 0.0 { -s } else { s };
        State::new(C64::new(1.0, 0.0), -outward * s)
    }

    fn branches(&self, e: C64) -> (State, State) {
        let left = self.tab.propagate(e, 0, self.m, self.boundary(e, 0, -1.0), true);
        let right = self.tab.propagate(e, self.n - 1, self.m, self.boundary(e, self.n - 1, 1.0), true);
        (left, right)
    }

    /// Scale-free Wronskian of the two branches at `x_m`.
    fn mismatch(&self, e: C64) -> C64 {
        let (l, r) = self.branches(e);
        (l.psi * r.dpsi - l.dpsi * r.psi) / (l.norm() * r.norm())
    }

    fn newton(&self, mut e: C64) -> Option<C64> {
        let d = 1e-6;
        for _ in 0..50 {
            let f = self.mismatch(e);
            let df = (self.mismatch(e + d) - self.mismatch(e - d)) / (2.0 * d);
            if df.norm() == 0.0 || !df.is_finite() {
                return None;
            }
            let step = f / df;
            e -= step;
            if !e.is_finite() {
                return None;
            }
            if step.norm() < 1e-12 * e.norm().max(1.0) {
                return Some(e);
            }
        }
        None
    }

    fn assemble(&self, e: C64) -> Result<WaveFunction> {
        let left = self.tab.trajectory(e, 0, self.m, self.boundary(e, 0, -1.0));
        let right = self.tab.trajectory(e, self.n - 1, self.m, self.boundary(e, self.n - 1, 1.0));
        let (lm, rm) = (left[left.len() - 1], right[right.len() - 1]);
        // least-squares scale matching (ψ, ψ') at x_m
        let c = (lm.psi * rm.psi.conj() + lm.dpsi * rm.dpsi.conj()) / (rm.psi.norm_sqr() + rm.dpsi.norm_sqr());
        let mut psi = Vec::with_capacity(self.n);
        let mut dpsi = Vec::with_capacity(self.n);
        for s in &left {
            psi.push(s.psi);
            dpsi.push(s.dpsi);
        }
        for s in right.iter().rev().skip(1) {
            psi.push(c * s.psi);
            dpsi.push(c * s.dpsi);
        }
        normalize(WaveFunction::new(self.grid(), psi, dpsi, e.re)?)
    }
}

fn scan_roots(sh: &Shooter, window: (f64, f64), points: usize) -> Vec<C64> {
    let points = points.max(3);
    let es: Vec<f64> = (0..points).map(|i| window.0 + (window.1 - window.0) * i as f64 / (points - 1) as f64).collect();
    let vals: Vec<f64> = es.par_iter().map(|&e| sh.mismatch(C64::new(e, 0.0)).norm()).collect();
    let seeds: Vec<f64> = (1..points - 1).filter(|&i| vals[i] <= vals[i - 1] && vals[i] <= vals[i + 1]).map(|i| es[i]).collect();
    let span = window.1 - window.0;
    let roots: Vec<C64> = seeds
        .par_iter()
        .filter_map(|&e0| sh.newton(C64::new(e0, 0.0)))
        .filter(|e| e.re > window.0 - 1e-3 * span && e.re < window.1 + 1e-3 * span)
        .collect();
    dedupe_sorted(roots, 1e-6)
}

/// Bound states with `Re E` in `window`, doubling `x_trunc` until every state
/// has decayed to `tail_tol` at the ends.
pub fn find_bound_states_confining(spec: &PotentialSpec, window: (f64, f64), opts: &ConfiningOptions) -> Result<BoundStateResult> {
    if spec.is_short_range() {
        return Err(Error::MethodMismatch(format!("{} is short-range; use the transfer-matrix method", spec.family_name())));
    }
    if !(window.0 < window.1) {
        return Err(Error::param("energy window must satisfy lo < hi"));
    }
    let mut x_trunc = opts.x_trunc;
    let mut doublings = 0;
    loop {
        let sh = Shooter::new(spec, x_trunc, opts.h)?;
        let roots = scan_roots(&sh, window, opts.scan_points);
        let mut diag = Diagnostics { x_trunc: Some(x_trunc), ..Diagnostics::default() };
        let mut kept = Vec::new();
        for e in roots {
            match opts.reality.judge(e.im) {
                Reality::Real => kept.push(e),
                Reality::Marginal => {
                    diag.warnings.push(format!("E = {:.9} has |Im E| = {:.3e}, inside the warning band", e.re, e.im.abs()));
                    kept.push(e);
                }
                Reality::Complex => diag.rejected.push(Rejected { energy: e, reason: "complex energy".into() }),
            }
        }
        let states: Vec<Result<WaveFunction>> = kept.par_iter().map(|&e| sh.assemble(e)).collect();
        let states: Vec<WaveFunction> = states.into_iter().collect::<Result<_>>()?;
        let worst = states.iter().map(|s| s.tail_ratio()).fold(0.0, f64::max);
        if worst > opts.tail_tol {
            if doublings >= opts.max_doublings {
                return Err(Error::TruncationTooSmall { x_trunc, ratio: worst, doublings });
            }
            x_trunc *= 2.0;
            doublings += 1;
            continue;
        }
        let mut out = BoundStateResult::empty(Method::Shooting);
        for (e, st) in kept.into_iter().zip(states) {
            let r = residual_oracle(spec, &st, e.re).value;
            if r > opts.residual_tol {
                diag.rejected.push(Rejected { energy: e, reason: format!("residual {r:.3e} above tolerance") });
                continue;
            }
            out.energies.push(e.re);
            out.residuals.push(r);
            out.states.push(st);
            diag.imag_energies.push(e.im);
        }
        out.diagnostics = diag;
        return Ok(out);
    }
}
