use serde::{Deserialize, Serialize};

use crate::grid::Grid;
use crate::solver::wavefunction::{PhaseRule, WaveFunction};

/// Crossings of a sampled real function.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ZeroSearch {
    /// Interior crossings, increasing.
    pub zeros: Vec<f64>,
    /// Crossings within `2h` of either end; excluded from `zeros`.
    pub boundary: Vec<f64>,
}

/// Sign changes between adjacent samples, refined by bisection on a cubic
/// interpolant (Hermite when derivatives are given, otherwise four-point
/// Lagrange). Touching zeros without a sign change are ignored.
pub fn find_zeros(grid: &Grid, f: &[f64], df: Option<&[f64]>, refine_tol: f64) -> ZeroSearch {
    let h = grid.h();
    let n = f.len();
    let mut out = ZeroSearch::default();
    let mut last: Option<usize> = None;
    for i in 0..n {
        if f[i] == 0.0 {
            continue;
        }
        if let Some(j) = last {
            if f[j].signum() != f[i].signum() {
                let x = if i == j + 1 {
                    refine(grid, f, df, j, refine_tol)
                } else {
                    // exact zeros on the nodes in between
                    0.5 * (grid.x(j + 1) + grid.x(i - 1))
                };
                if x - grid.x_min() < 2.0 * h || grid.x_max() - x < 2.0 * h {
                    out.boundary.push(x);
                } else {
                    out.zeros.push(x);
                }
            }
        }
        last = Some(i);
    }
    out
}

fn refine(grid: &Grid, f: &[f64], df: Option<&[f64]>, j: usize, tol: f64) -> f64 {
    let h = grid.h();
    let (xa, xb) = (grid.x(j), grid.x(j + 1));
    let interp: Box<dyn Fn(f64) -> f64> = match df {
        Some(d) => {
            let (f0, f1, d0, d1) = (f[j], f[j + 1], d[j] * h, d[j + 1] * h);
            Box::new(move |t: f64| {
                let t2 = t * t;
                let t3 = t2 * t;
                (2.0 * t3 - 3.0 * t2 + 1.0) * f0 + (t3 - 2.0 * t2 + t) * d0 + (-2.0 * t3 + 3.0 * t2) * f1 + (t3 - t2) * d1
            })
        }
        None => {
            let n = f.len();
            let s = if n < 4 { 0 } else { j.saturating_sub(1).min(n - 4) };
            let pts: Vec<(f64, f64)> = (s..(s + 4).min(n)).map(|k| ((k as f64) - j as f64, f[k])).collect();
            Box::new(move |t: f64| {
                pts.iter()
                    .enumerate()
                    .map(|(a, &(ta, fa))| {
                        pts.iter().enumerate().filter(|&(b, _)| b != a).fold(fa, |acc, (_, &(tb, _))| acc * (t - tb) / (ta - tb))
                    })
                    .sum()
            })
        }
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    let flo = interp(0.0).signum();
    let tol_t = (tol / h).max(1e-15);
    while hi - lo > tol_t {
        let mid = 0.5 * (lo + hi);
        let fm = interp(mid);
        if fm == 0.0 {
            return xa + mid * (xb - xa);
        }
        if fm.signum() == flo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    xa + 0.5 * (lo + hi) * (xb - xa)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FirstKind {
    LambdaFirst,
    MuFirst,
}

/// Adjacent zeros that break interlacing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// Two zeros of the same part with none of the other part in between.
    Adjacent { part: String, left: f64, right: f64 },
    /// A zero of `ψ_R` and one of `ψ_I` closer than the merge tolerance.
    Coincident { lambda: f64, mu: f64 },
}

/// Zeros of `ψ_R` (λ) and `ψ_I` (μ) alternate and never coincide.
pub fn interlacing_check(lambdas: &[f64], mus: &[f64], merge_tol: f64) -> (bool, Vec<Violation>) {
    let mut merged: Vec<(f64, bool)> = lambdas.iter().map(|&x| (x, true)).chain(mus.iter().map(|&x| (x, false))).collect();
    merged.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut violations = Vec::new();
    for w in merged.windows(2) {
        let ((xa, la), (xb, lb)) = (w[0], w[1]);
        if la == lb {
            violations.push(Violation::Adjacent { part: if la { "re".into() } else { "im".into() }, left: xa, right: xb });
        } else if (xb - xa).abs() <= merge_tol {
            let (lambda, mu) = if la { (xa, xb) } else { (xb, xa) };
            violations.push(Violation::Coincident { lambda, mu });
        }
    }
    (violations.is_empty(), violations)
}

/// `|n_R − n_I| ≤ 1`.
pub fn count_law_check(n_r: usize, n_i: usize) -> bool {
    n_r.abs_diff(n_i) <= 1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroReport {
    pub lambdas: Vec<f64>,
    pub mus: Vec<f64>,
    pub n_r: usize,
    pub n_i: usize,
    pub interlaced: bool,
    pub count_law: bool,
    pub first_kind: Option<FirstKind>,
    pub violations: Vec<Violation>,
    /// Crossings dropped for sitting at the truncation edge.
    pub boundary_zeros: Vec<f64>,
    pub phase: PhaseRule,
}

/// Zeros of both parts of `wf` with the interlacing and count verdicts.
/// The merge tolerance is `1e-8 ×` the domain width.
pub fn zero_report(wf: &WaveFunction) -> ZeroReport {
    let re: Vec<f64> = wf.psi.iter().map(|z| z.re).collect();
    let im: Vec<f64> = wf.psi.iter().map(|z| z.im).collect();
    let dre: Vec<f64> = wf.dpsi.iter().map(|z| z.re).collect();
    let dim: Vec<f64> = wf.dpsi.iter().map(|z| z.im).collect();
    let scale = wf.max_abs();
    // samples at round-off level carry no sign information
    let clean = |v: Vec<f64>| -> Vec<f64> { v.into_iter().map(|x| if x.abs() <= 1e-14 * scale { 0.0 } else { x }).collect() };
    let (re, im) = (clean(re), clean(im));
    let zr = find_zeros(&wf.grid, &re, Some(&dre), 1e-10);
    let zi = find_zeros(&wf.grid, &im, Some(&dim), 1e-10);
    let (interlaced, violations) = interlacing_check(&zr.zeros, &zi.zeros, 1e-8 * wf.grid.width());
    let first_kind = match (zr.zeros.first(), zi.zeros.first()) {
        (Some(a), Some(b)) => Some(if a < b { FirstKind::LambdaFirst } else { FirstKind::MuFirst }),
        (Some(_), None) => Some(FirstKind::LambdaFirst),
        (None, Some(_)) => Some(FirstKind::MuFirst),
        (None, None) => None,
    };
    let mut boundary_zeros = zr.boundary;
    boundary_zeros.extend(zi.boundary);
    boundary_zeros.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ZeroReport {
        n_r: zr.zeros.len(),
        n_i: zi.zeros.len(),
        count_law: count_law_check(zr.zeros.len(), zi.zeros.len()),
        lambdas: zr.zeros,
        mus: zi.zeros,
        interlaced,
        first_kind,
        violations,
        boundary_zeros,
        phase: wf.phase_rule,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sine_zeros() {
        let g = Grid::new(-4.0, 4.0, 801).unwrap();
        let f: Vec<f64> = g.points().map(f64::sin).collect();
        let d: Vec<f64> = g.points().map(f64::cos).collect();
        for df in [None, Some(&d[..])] {
            let z = find_zeros(&g, &f, df, 1e-12).zeros;
            assert_eq!(z.len(), 3);
            for (a, b) in z.iter().zip([-PI, 0.0, PI]) {
                assert!((a - b).abs() < 1e-9, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn tangential_zero_ignored_and_edges_flagged() {
        let g = Grid::new(-2.0, 2.0, 401).unwrap();
        let f: Vec<f64> = g.points().map(|x| x * x).collect();
        assert!(find_zeros(&g, &f, None, 1e-10).zeros.is_empty());
        let edge: Vec<f64> = g.points().map(|x| x - 1.995).collect();
        let z = find_zeros(&g, &edge, None, 1e-10);
        assert!(z.zeros.is_empty() && z.boundary.len() == 1);
    }

    #[test]
    fn interlacing_examples() {
        assert!(interlacing_check(&[1.570], &[1.050, 2.091], 1e-8).0);
        let (ok, v) = interlacing_check(&[1.0, 2.0], &[3.0, 4.0], 1e-8);
        assert!(!ok);
        assert_eq!(v.len(), 2);
        assert!(interlacing_check(&[], &[0.0], 1e-8).0);
        assert!(!interlacing_check(&[1.0], &[1.0 + 1e-12], 1e-8).0);
    }

    #[test]
    fn count_law_examples() {
        assert!(count_law_check(4, 3));
        assert!(count_law_check(2, 1));
        assert!(!count_law_check(3, 1));
    }
}
