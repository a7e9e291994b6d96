//! Classical RK4 for `(ψ, ψ')' = (ψ', (V − E) ψ)` with complex state.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub const OVERFLOW_LIMIT: f64 = 1e250;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State {
    pub psi: C64,
    pub dpsi: C64,
}

impl State {
    pub fn new(psi: C64, dpsi: C64) -> Self {
        State { psi, dpsi }
    }

    pub fn scale(self, c: C64) -> Self {
        State { psi: self.psi * c, dpsi: self.dpsi * c }
    }

    pub fn norm(&self) -> f64 {
        (self.psi.norm_sqr() + self.dpsi.norm_sqr()).sqrt()
    }
}

/// One RK4 step of size `h` (signed) given V at the start, midpoint and end.
#[inline]
pub fn rk4_step(s: State, h: f64, e: C64, v0: C64, vm: C64, v1: C64) -> State {
    let a0 = v0 - e;
    let am = vm - e;
    let a1 = v1 - e;
    let k1p = s.dpsi;
    let k1d = a0 * s.psi;
    let p2 = s.psi + 0.5 * h * k1p;
    let d2 = s.dpsi + 0.5 * h * k1d;
    let k2p = d2;
    let k2d = am * p2;
    let p3 = s.psi + 0.5 * h * k2p;
    let d3 = s.dpsi + 0.5 * h * k2d;
    let k3p = d3;
    let k3d = am * p3;
    let p4 = s.psi + h * k3p;
    let d4 = s.dpsi + h * k3d;
    let k4p = d4;
    let k4d = a1 * p4;
    State {
        psi: s.psi + h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p),
        dpsi: s.dpsi + h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d),
    }
}

/// Integrates from `from` to `to` with steps no longer than `h_max`.
///
/// Points listed in `breaks` (where V jumps or kinks) are always step
/// boundaries, and V is sampled a hair inside each segment so a jump is
/// never straddled.
pub fn integrate_with<F>(v: &F, e: C64, from: f64, to: f64, start: State, h_max: f64, breaks: &[f64]) -> Result<State>
where
    F: Fn(f64) -> C64 + ?Sized,
{
    if !(h_max > 0.0) {
        return Err(Error::param("step size must be positive"));
    }
    let mut s = start;
    if from == to {
        return Ok(s);
    }
    let dir = (to - from).signum();
    let mut cuts: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|&b| (b - from) * dir > 0.0 && (to - b) * dir > 0.0)
        .collect();
    cuts.sort_by(|a, b| ((a - b) * dir).partial_cmp(&0.0).unwrap());
    let mut a = from;
    for b in cuts.into_iter().chain(std::iter::once(to)) {
        s = segment(v, e, a, b, s, h_max)?;
        a = b;
    }
    Ok(s)
}

fn segment<F>(v: &F, e: C64, a: f64, b: f64, mut s: State, h_max: f64) -> Result<State>
where
    F: Fn(f64) -> C64 + ?Sized,
{
    let len = b - a;
    let n = ((len.abs() / h_max) - 1e-9).ceil().max(1.0) as usize;
    let h = len / n as f64;
    let nudge = |x: f64| 1e-12 * x.abs().max(1.0) * len.signum();
    let mut v0 = v(a + nudge(a));
    for i in 0..n {
        let x0 = a + i as f64 * h;
        let x1 = if i + 1 == n { b } else { a + (i + 1) as f64 * h };
        let vm = v(x0 + 0.5 * h);
        let v1 = if i + 1 == n { v(b - nudge(b)) } else { v(x1) };
        s = rk4_step(s, h, e, v0, vm, v1);
        if !(s.psi.norm() <= OVERFLOW_LIMIT) {
            return Err(Error::MagnitudeOverflow { x: x1, limit: OVERFLOW_LIMIT });
        }
        v0 = v1;
    }
    Ok(s)
}

/// Integrates through an increasing or decreasing list of nodes, returning
/// the state at every node (the first entry is `start`).
pub fn integrate_nodes<F>(v: &F, e: C64, nodes: &[f64], start: State, h_max: f64, breaks: &[f64]) -> Result<Vec<State>>
where
    F: Fn(f64) -> C64 + ?Sized,
{
    let mut out = Vec::with_capacity(nodes.len());
    if nodes.is_empty() {
        return Ok(out);
    }
    out.push(start);
    let mut s = start;
    for w in nodes.windows(2) {
        s = integrate_with(v, e, w[0], w[1], s, h_max, breaks)?;
        out.push(s);
    }
    Ok(out)
}

/// V tabulated on a uniform node set and its midpoints, for repeated
/// integrations at many energies. Node `i` sits at `x0 + i h`.
#[derive(Debug, Clone)]
pub struct Tabulated {
    pub x0: f64,
    pub h: f64,
    /// `v[2i]` = V(node i), `v[2i+1]` = V(midpoint i, i+1).
    v: Vec<C64>,
}

impl Tabulated {
    pub fn new<F: Fn(f64) -> C64 + ?Sized>(v: &F, x0: f64, h: f64, n_nodes: usize) -> Self {
        let vals = (0..2 * n_nodes - 1).map(|j| v(x0 + 0.5 * h * j as f64)).collect();
        Tabulated { x0, h, v: vals }
    }

    pub fn n_nodes(&self) -> usize {
        self.v.len().div_ceil(2)
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + self.h * i as f64
    }

    pub fn node_value(&self, i: usize) -> C64 {
        self.v[2 * i]
    }

    /// Steps node `from` to node `to`; when `renorm` is set the state is kept
    /// below 1e100 by dividing out its norm, which leaves every ratio of the
    /// final state unchanged.
    pub fn propagate(&self, e: C64, from: usize, to: usize, mut s: State, renorm: bool) -> State {
        if to >= from {
            for i in from..to {
                s = rk4_step(s, self.h, e, self.v[2 * i], self.v[2 * i + 1], self.v[2 * i + 2]);
                if renorm {
                    s = keep_bounded(s);
                }
            }
        } else {
            for i in (to + 1..=from).rev() {
                s = rk4_step(s, -self.h, e, self.v[2 * i], self.v[2 * i - 1], self.v[2 * i - 2]);
                if renorm {
                    s = keep_bounded(s);
                }
            }
        }
        s
    }

    /// Like [`Tabulated::propagate`] but records every node. Earlier samples
    /// are rescaled together with the state so the trajectory stays one
    /// consistent solution.
    pub fn trajectory(&self, e: C64, from: usize, to: usize, start: State) -> Vec<State> {
        let n = from.abs_diff(to) + 1;
        let mut out = Vec::with_capacity(n);
        out.push(start);
        let mut s = start;
        let step: isize = if to >= from { 1 } else { -1 };
        let mut i = from as isize;
        while i != to as isize {
            let j = i + step;
            let (iu, ju) = (i as usize, j as usize);
            let mid = if step > 0 { 2 * iu + 1 } else { 2 * iu - 1 };
            s = rk4_step(s, self.h * step as f64, e, self.v[2 * iu], self.v[mid], self.v[2 * ju]);
            let nrm = s.norm();
            if nrm > 1e100 {
                let c = C64::new(1.0 / nrm, 0.0);
                s = s.scale(c);
                for p in out.iter_mut() {
                    *p = p.scale(c);
                }
            }
            out.push(s);
            i = j;
        }
        out
    }
}

#[inline]
fn keep_bounded(s: State) -> State {
    let n = s.norm();
    if n > 1e100 {
        s.scale(C64::new(1.0 / n, 0.0))
    } else {
        s
    }
}
