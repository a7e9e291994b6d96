//! Transfer matrices and bound states of short-range potentials.
//!
//! Outside `[x_L, x_R]` the solution is `A e^{ikx} + B e^{−ikx}` with
//! `k² = E − V_ext`. `M` maps the right coefficients `(A₁, B₁)` to the left
//! ones `(A₃, B₃)`. A state decaying on both sides has `B₁ = 0` and
//! `A₃ = 0`, so bound states (`Im k > 0`) are the zeros of `M₁₁`.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::wavefunction::{normalize, WaveFunction};
use super::{dedupe_sorted, BoundStateResult, Diagnostics, Method, Reality, RealityTolerance, Rejected, DEFAULT_STEP};
use crate::analysis::residual::residual_oracle;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::ode::{integrate_nodes, rk4_step, State};
use crate::potentials::PotentialSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransferMatrix {
    pub m11: C64,
    pub m12: C64,
    pub m21: C64,
    pub m22: C64,
    pub k: C64,
    pub energy: C64,
}

impl TransferMatrix {
    pub fn det(&self) -> C64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }
}

/// Potential inside the zone, pre-sampled per smooth segment.
struct Zone {
    x_left: f64,
    x_right: f64,
    v_ext: f64,
    /// Segments from right to left: `(x_start, h, V samples at half steps)`.
    segments: Vec<(f64, f64, Vec<C64>)>,
}

impl Zone {
    fn new(spec: &PotentialSpec, h_max: f64) -> Result<Self> {
        let (x_left, x_right) = spec
            .interaction_zone()
            .ok_or_else(|| Error::MethodMismatch(format!("{} is not short-range; use the shooting method", spec.family_name())))?;
        let v_ext = spec.exterior_value().expect("short-range specs have an exterior value");
        let mut cuts: Vec<f64> = spec.breakpoints().into_iter().filter(|&b| b > x_left && b < x_right).collect();
        cuts.push(x_left);
        cuts.push(x_right);
        cuts.sort_by(|a, b| b.partial_cmp(a).unwrap());
        cuts.dedup();
        let mut segments = Vec::new();
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let n = (((a - b) / h_max) - 1e-9).ceil().max(1.0) as usize;
            let h = (b - a) / n as f64;
            let inside = 1e-12 * a.abs().max(b.abs()).max(1.0);
            let v: Vec<C64> = (0..=2 * n)
                .map(|j| {
                    let x = match j {
                        0 => a - inside,
                        _ if j == 2 * n => b + inside,
                        _ => a + 0.5 * h * j as f64,
                    };
                    spec.value(x)
                })
                .collect();
            segments.push((a, h, v));
        }
        Ok(Zone { x_left, x_right, v_ext, segments })
    }

    fn energy(&self, k: C64) -> C64 {
        k * k + self.v_ext
    }

    /// Carries `s` from `x_R` to `x_L`.
    fn sweep(&self, e: C64, mut s: State) -> State {
        for (_, h, v) in &self.segments {
            for i in 0..(v.len() - 1) / 2 {
                s = rk4_step(s, *h, e, v[2 * i], v[2 * i + 1], v[2 * i + 2]);
            }
        }
        s
    }

    fn matrix(&self, k: C64) -> Result<TransferMatrix> {
        if k.norm() < 1e-12 {
            return Err(Error::SingularConversion(k));
        }
        let e = self.energy(k);
        let ik = C64::i() * k;
        let (xl, xr) = (self.x_left, self.x_right);
        // Columns of P_R: e^{±ikx} and their derivatives at x_R.
        let ep = (ik * xr).exp();
        let em = (-ik * xr).exp();
        let u1 = self.sweep(e, State::new(ep, ik * ep));
        let u2 = self.sweep(e, State::new(em, -ik * em));
        // P_L⁻¹ = 1/(−2ik) [[−ik e^{−ikx}, −e^{−ikx}], [−ik e^{ikx}, e^{ikx}]] at x_L.
        let lp = (ik * xl).exp();
        let lm = (-ik * xl).exp();
        let inv = C64::new(1.0, 0.0) / (-2.0 * ik);
        let a = |s: State| inv * (-ik * lm * s.psi - lm * s.dpsi);
        let b = |s: State| inv * (-ik * lp * s.psi + lp * s.dpsi);
        Ok(TransferMatrix { m11: a(u1), m12: a(u2), m21: b(u1), m22: b(u2), k, energy: e })
    }
}

/// Transfer matrix at wavenumber `k` with the default RK4 step.
pub fn transfer_matrix(spec: &PotentialSpec, k: C64) -> Result<TransferMatrix> {
    Zone::new(spec, DEFAULT_STEP)?.matrix(k)
}

/// Rectangle in the complex k-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KRegion {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl KRegion {
    pub fn contains(&self, k: C64) -> bool {
        let slack = 1e-9;
        k.re >= self.re_min - slack && k.re <= self.re_max + slack && k.im >= self.im_min - slack && k.im <= self.im_max + slack
    }

    /// Region covering real energies in `(V_ext − depth, V_ext)`, i.e.
    /// `k = iq` with `0 < q < √depth`, widened slightly off the axis.
    pub fn below_threshold(depth: f64) -> Self {
        KRegion { re_min: -0.25, re_max: 0.25, im_min: 0.02, im_max: depth.sqrt() + 0.1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShortRangeOptions {
    pub h: f64,
    pub mesh_re: usize,
    pub mesh_im: usize,
    pub reality: RealityTolerance,
    /// Sample points per unit length of the reconstructed states.
    pub grid_density: f64,
    pub residual_tol: f64,
}

impl Default for ShortRangeOptions {
    fn default() -> Self {
        ShortRangeOptions {
            h: DEFAULT_STEP,
            mesh_re: 41,
            mesh_im: 121,
            reality: RealityTolerance::default(),
            grid_density: 1000.0,
            residual_tol: 1e-4,
        }
    }
}

/// `|M₁₁|` sampled on a mesh; rows run over `Im k`, columns over `Re k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KPlaneScan {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    pub abs_m11: Vec<Vec<f64>>,
}

fn mesh_axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (lo + hi)];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn scan(zone: &Zone, region: KRegion, nre: usize, nim: usize) -> KPlaneScan {
    let re = mesh_axis(region.re_min, region.re_max, nre.max(1));
    let im = mesh_axis(region.im_min, region.im_max, nim.max(1));
    let abs_m11 = im
        .par_iter()
        .map(|&y| {
            re.iter()
                .map(|&x| zone.matrix(C64::new(x, y)).map(|m| m.m11.norm()).unwrap_or(f64::INFINITY))
                .collect()
        })
        .collect();
    KPlaneScan { re, im, abs_m11 }
}

/// `|M₁₁(k)|` over `region`; the Fig.-5-style k-plane picture.
pub fn k_plane_scan(spec: &PotentialSpec, region: KRegion, nre: usize, nim: usize, h: f64) -> Result<KPlaneScan> {
    Ok(scan(&Zone::new(spec, h)?, region, nre, nim))
}

fn local_minima(s: &KPlaneScan) -> Vec<C64> {
    let (ny, nx) = (s.im.len(), s.re.len());
    let mut out = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let v = s.abs_m11[j][i];
            if !v.is_finite() {
                continue;
            }
            let mut is_min = true;
            for dj in -1i64..=1 {
                for di in -1i64..=1 {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let (jj, ii) = (j as i64 + dj, i as i64 + di);
                    if jj < 0 || ii < 0 || jj >= ny as i64 || ii >= nx as i64 {
                        continue;
                    }
                    if s.abs_m11[jj as usize][ii as usize] < v {
                        is_min = false;
                    }
                }
            }
            if is_min {
                out.push(C64::new(s.re[i], s.im[j]));
            }
        }
    }
    out
}

/// Newton on `M₁₁(k)` with a central-difference derivative.
fn newton(zone: &Zone, mut k: C64) -> Option<C64> {
    let d = 1e-6;
    for _ in 0..50 {
        let f = zone.matrix(k).ok()?.m11;
        if f.norm() < 1e-14 {
            return Some(k);
        }
        let fp = zone.matrix(k + d).ok()?.m11;
        let fm = zone.matrix(k - d).ok()?.m11;
        let df = (fp - fm) / (2.0 * d);
        if df.norm() == 0.0 || !df.is_finite() {
            return None;
        }
        let step = f / df;
        k -= step;
        if !k.is_finite() {
            return None;
        }
        if step.norm() < 1e-13 * k.norm().max(1.0) || zone.matrix(k).ok()?.m11.norm() < 1e-10 && step.norm() < 1e-9 {
            return Some(k);
        }
    }
    None
}

/// Reconstructs the decaying state for root `k` on `grid`.
fn reconstruct(spec: &PotentialSpec, zone: &Zone, k: C64, grid: &Grid, h: f64) -> Result<WaveFunction> {
    let e = zone.energy(k);
    let ik = C64::i() * k;
    let n = grid.len();
    let mut psi = vec![C64::new(0.0, 0.0); n];
    let mut dpsi = vec![C64::new(0.0, 0.0); n];
    let (xl, xr) = (zone.x_left, zone.x_right);
    // Right exterior: e^{ikx} exactly.
    let mut inside = Vec::new();
    for (i, x) in grid.points().enumerate() {
        if x >= xr {
            let p = (ik * x).exp();
            psi[i] = p;
            dpsi[i] = ik * p;
        } else if x > xl {
            inside.push(i);
        }
    }
    let mut nodes = vec![xr];
    nodes.extend(inside.iter().rev().map(|&i| grid.x(i)));
    nodes.push(xl);
    let v = |x: f64| spec.value(x);
    let start = State::new((ik * xr).exp(), ik * (ik * xr).exp());
    let states = integrate_nodes(&v, e, &nodes, start, h, &spec.breakpoints())?;
    for (s, &i) in states[1..].iter().zip(inside.iter().rev()) {
        psi[i] = s.psi;
        dpsi[i] = s.dpsi;
    }
    // Left exterior: the decaying e^{−ikx} branch continued from x_L.
    let at_left = states[states.len() - 1];
    for (i, x) in grid.points().enumerate() {
        if x <= xl {
            let p = at_left.psi * (-ik * (x - xl)).exp();
            psi[i] = p;
            dpsi[i] = -ik * p;
        }
    }
    normalize(WaveFunction::new(*grid, psi, dpsi, e.re)?)
}

/// Mesh scan of `|M₁₁|`, Newton from every local minimum, reality filter,
/// then reconstruction and residual check of each state.
pub fn find_bound_states_shortrange(spec: &PotentialSpec, region: KRegion, opts: &ShortRangeOptions) -> Result<BoundStateResult> {
    if region.im_min < 0.0 {
        return Err(Error::param("k region must lie in the upper half-plane"));
    }
    let zone = Zone::new(spec, opts.h)?;
    let mesh = scan(&zone, region, opts.mesh_re, opts.mesh_im);
    let seeds = local_minima(&mesh);
    let roots: Vec<C64> = seeds.par_iter().filter_map(|&k0| newton(&zone, k0)).collect();
    let roots = dedupe_sorted(roots.into_iter().filter(|&k| region.contains(k) && k.im > 0.0).collect(), 1e-6);

    let mut diag = Diagnostics::default();
    let mut kept = Vec::new();
    for k in roots {
        let e = zone.energy(k);
        match opts.reality.judge(e.im) {
            Reality::Real => kept.push(k),
            Reality::Marginal => {
                diag.warnings.push(format!("E = {:.9} has |Im E| = {:.3e}, inside the warning band", e.re, e.im.abs()));
                kept.push(k);
            }
            Reality::Complex => diag.rejected.push(Rejected { energy: e, reason: "complex energy".into() }),
        }
    }
    kept.sort_by(|a, b| zone.energy(*a).re.partial_cmp(&zone.energy(*b).re).unwrap());

    let mut out = BoundStateResult::empty(Method::Transfer);
    if kept.is_empty() {
        out.diagnostics = diag;
        return Ok(out);
    }
    // One grid for all states, wide enough for the slowest decay.
    let q_min = kept.iter().map(|k| k.im).fold(f64::INFINITY, f64::min);
    let ext = (25.0 / q_min).clamp(2.0, 80.0);
    let grid = Grid::with_spacing(zone.x_left - ext, zone.x_right + ext, 1.0 / opts.grid_density)?;
    let states: Vec<Result<WaveFunction>> = kept.par_iter().map(|&k| reconstruct(spec, &zone, k, &grid, opts.h)).collect();
    for (k, st) in kept.into_iter().zip(states) {
        let st = st?;
        let e = zone.energy(k);
        let r = residual_oracle(spec, &st, e.re).value;
        if r > opts.residual_tol {
            diag.rejected.push(Rejected { energy: e, reason: format!("residual {r:.3e} above tolerance") });
            continue;
        }
        out.energies.push(e.re);
        out.residuals.push(r);
        out.states.push(st);
        diag.imag_energies.push(e.im);
        diag.k_roots.push(k);
    }
    out.diagnostics = diag;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::preset;

    #[test]
    fn free_space_is_identity() {
        for k in [0.5, 1.0, 3.7] {
            let m = transfer_matrix(&PotentialSpec::free(), C64::new(k, 0.0)).unwrap();
            assert!((m.m11 - 1.0).norm() < 1e-9 && m.m12.norm() < 1e-9 && m.m21.norm() < 1e-9 && (m.m22 - 1.0).norm() < 1e-9);
        }
        // a zone of zero depth but finite width
        let flat = PotentialSpec::square_well(1.0, 2.0, 0.0, 0.0, 0.0).unwrap();
        let m = transfer_matrix(&flat, C64::new(1.3, 0.0)).unwrap();
        assert!((m.m11 - 1.0).norm() < 1e-9 && m.m12.norm() < 1e-9);
    }

    #[test]
    fn zero_k_is_singular() {
        assert!(matches!(transfer_matrix(&PotentialSpec::free(), C64::new(0.0, 0.0)), Err(Error::SingularConversion(_))));
    }

    #[test]
    fn unimodular() {
        let real = PotentialSpec::square_well(1.0, 2.0, -3.0, 0.0, 0.0).unwrap();
        assert!((transfer_matrix(&real, C64::new(0.8, 0.0)).unwrap().det() - 1.0).norm() < 1e-8);
        let cplx = preset("fig5-lower").unwrap().spec;
        assert!((transfer_matrix(&cplx, C64::new(0.3, 0.4)).unwrap().det() - 1.0).norm() < 1e-8);
    }

    #[test]
    fn square_well_upper_root() {
        let spec = preset("fig5-upper").unwrap().spec;
        let m = transfer_matrix(&spec, C64::new(0.0, 0.917425)).unwrap();
        assert!(m.m11.norm() < 1e-5, "{}", m.m11.norm());
    }

    #[test]
    fn transfer_rejects_confining_potentials() {
        assert!(matches!(transfer_matrix(&PotentialSpec::CubicOscillator, C64::new(1.0, 0.0)), Err(Error::MethodMismatch(_))));
    }

    #[test]
    fn free_particle_has_no_bound_states() {
        let r = find_bound_states_shortrange(&PotentialSpec::free(), KRegion::below_threshold(4.0), &ShortRangeOptions::default()).unwrap();
        assert!(r.is_empty());
    }

    #[test]
    fn finite_real_well_matches_even_state_condition() {
        // V = −V0 on [−1, 1): even ground state satisfies p tan p = q with
        // p = √(V0 − |E|)·1, q = √|E|·1.
        let v0 = 4.0;
        let spec = PotentialSpec::square_well(1.0, 1.0, -v0, 0.0, 0.0).unwrap();
        let r = find_bound_states_shortrange(&spec, KRegion::below_threshold(v0), &ShortRangeOptions::default()).unwrap();
        assert_eq!(r.len(), 2);
        let e0 = r.energies[0];
        let (p, q) = ((v0 + e0).sqrt(), (-e0).sqrt());
        assert!((p * p.tan() - q).abs() < 1e-6, "{e0}");
        assert!(r.residuals.iter().all(|&x| x < 1e-4));
    }
}
