//! Error function and normalized Hermite functions.

use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const MAX_HERMITE_LEVEL: usize = 30;

#[inline]
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// `φ_0..=φ_n` at `x`, where `φ_k = (2^k k! √π)^{-1/2} H_k(x) e^{-x²/2}`.
pub fn hermite_functions(n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 2);
    out.push(PI.powf(-0.25) * (-0.5 * x * x).exp());
    if n >= 1 {
        out.push(2f64.sqrt() * x * out[0]);
    }
    for k in 1..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
    out.truncate(n + 1);
    out
}

/// `(φ_n(x), φ_n'(x))` via `φ_n' = √(n/2) φ_{n-1} − √((n+1)/2) φ_{n+1}`.
pub fn hermite_function(n: usize, x: f64) -> Result<(f64, f64)> {
    if n > MAX_HERMITE_LEVEL {
        return Err(Error::LevelOutOfRange(n));
    }
    let phi = hermite_functions(n + 1, x);
    let nf = n as f64;
    let lower = if n == 0 { 0.0 } else { (nf / 2.0).sqrt() * phi[n - 1] };
    Ok((phi[n], lower - ((nf + 1.0) / 2.0).sqrt() * phi[n + 1]))
}
