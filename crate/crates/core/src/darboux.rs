//! Complex Darboux partners `V = ϑ + 2β'` of real seed potentials.
//!
//! The superpotential is `β = −α'/α + iγ/α²` where `α` is the positive
//! solution of the Ermakov equation `α'' = (ϑ − E₀)α + K/α³` and `γ = √K`.
//! For the oscillator seed `ϑ = x²`, `E₀ = −1`, `α` has the closed form
//!
//! ```text
//! α(x) = e^{x²/2} [ π c₀ Erf²(x)/4 + √π c₁ Erf(x) + C ]^{1/2}
//! ```
//!
//! with `C = (c₁ + λ)/c₀` ([`CoefficientForm::Oscillator`]) or
//! `C = (c₁² + λ)/c₀` ([`CoefficientForm::General`]). The invariant is
//! `K = c₀C − c₁²`; it equals `λ` in the general form and whenever
//! `c₁ ∈ {0, 1}` in the oscillator form.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::analysis::zeros::find_zeros;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::ode::{integrate_nodes, State};
use crate::potentials::PotentialSpec;
use crate::quad::{cumulative, simpson};
use crate::solver::wavefunction::{normalize, WaveFunction};
use crate::special::{erf, hermite_function, MAX_HERMITE_LEVEL};

const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Which constant term the radicand of `α²` carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientForm {
    /// `(c₁ + λ)/c₀`, as printed for the oscillator family.
    #[default]
    Oscillator,
    /// `(c₁² + λ)/c₀`, the general-seed expression.
    General,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DarbouxParams {
    pub c0: f64,
    pub c1: f64,
    pub lambda: f64,
    #[serde(default)]
    pub form: CoefficientForm,
}

impl DarbouxParams {
    pub fn new(c0: f64, c1: f64, lambda: f64) -> Self {
        DarbouxParams { c0, c1, lambda, form: CoefficientForm::Oscillator }
    }

    pub fn with_form(self, form: CoefficientForm) -> Self {
        DarbouxParams { form, ..self }
    }

    /// Constant term `C` of the radicand.
    pub fn constant_term(&self) -> f64 {
        match self.form {
            CoefficientForm::Oscillator => (self.c1 + self.lambda) / self.c0,
            CoefficientForm::General => (self.c1 * self.c1 + self.lambda) / self.c0,
        }
    }

    /// Ermakov invariant `K = c₀C − c₁²`.
    pub fn invariant(&self) -> f64 {
        self.c0 * self.constant_term() - self.c1 * self.c1
    }

    /// Imaginary strength `γ = √K` of the superpotential.
    pub fn strength(&self) -> f64 {
        self.invariant().max(0.0).sqrt()
    }

    /// Parameters of the general `(z, v)` construction (Wronskian −1) that
    /// reproduce this oscillator `α` exactly.
    pub fn general_equivalent(&self) -> DarbouxParams {
        DarbouxParams { c0: self.constant_term(), c1: -self.c1, lambda: self.invariant(), form: CoefficientForm::General }
    }

    fn validate(&self) -> Result<()> {
        if ![self.c0, self.c1, self.lambda].iter().all(|v| v.is_finite()) {
            return Err(Error::param("Darboux parameters must be finite"));
        }
        if self.c0 == 0.0 {
            return Err(Error::param("c0 must be non-zero"));
        }
        let k = self.invariant();
        if k < 0.0 {
            return Err(Error::param(format!(
                "Ermakov invariant c0*C - c1^2 = {k} is negative; the superpotential would not be complex"
            )));
        }
        Ok(())
    }
}

/// Closed-form `α` for the oscillator seed, with analytic derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct OscillatorAlpha {
    params: DarbouxParams,
    qa: f64,
    qb: f64,
    qc: f64,
    gamma: f64,
}

/// `ln α` and its first two derivatives, plus `1/α²`, at one point.
#[derive(Debug, Clone, Copy)]
pub struct AlphaJet {
    pub ln_alpha: f64,
    pub d1: f64,
    pub d2: f64,
    pub inv_alpha_sq: f64,
}

impl OscillatorAlpha {
    pub const FACTORIZATION_ENERGY: f64 = -1.0;

    /// Validates `c₀ ≠ 0`, `K ≥ 0`, a radicand positive on the whole line and
    /// a single sign change of `α'`.
    pub fn new(params: DarbouxParams) -> Result<Self> {
        params.validate()?;
        let alpha = OscillatorAlpha {
            params,
            qa: PI * params.c0 / 4.0,
            qb: SQRT_PI * params.c1,
            qc: params.constant_term(),
            gamma: params.strength(),
        };
        alpha.check_radicand()?;
        let changes = alpha.slope_sign_changes(&Grid::symmetric(12.0, 1e-3)?);
        if changes.len() != 1 {
            return Err(Error::SlopeSignChanges(changes));
        }
        Ok(alpha)
    }

    pub fn params(&self) -> DarbouxParams {
        self.params
    }

    pub fn strength(&self) -> f64 {
        self.gamma
    }

    fn q_of_u(&self, u: f64) -> f64 {
        (self.qa * u + self.qb) * u + self.qc
    }

    /// Radicand `Q(Erf x)` so that `α² = e^{x²} Q`.
    pub fn radicand(&self, x: f64) -> f64 {
        self.q_of_u(erf(x))
    }

    fn check_radicand(&self) -> Result<()> {
        // Erf maps the line onto (−1, 1); test the quadratic there.
        let mut candidates = vec![-1.0, 1.0];
        if self.qa != 0.0 {
            let u = -self.qb / (2.0 * self.qa);
            if u.abs() < 1.0 {
                candidates.push(u);
            }
        }
        let (u_min, q_min) = candidates
            .into_iter()
            .map(|u| (u, self.q_of_u(u)))
            .fold((0.0, f64::INFINITY), |acc, p| if p.1 < acc.1 { p } else { acc });
        if q_min > 0.0 {
            return Ok(());
        }
        Err(Error::RadicandNonPositive { x: erf_inverse(u_min), value: q_min })
    }

    pub fn alpha(&self, x: f64) -> f64 {
        (0.5 * x * x).exp() * self.radicand(x).sqrt()
    }

    pub fn jet(&self, x: f64) -> AlphaJet {
        let u = erf(x);
        let du = 2.0 / SQRT_PI * (-x * x).exp();
        let ddu = -2.0 * x * du;
        let q = self.q_of_u(u);
        let lin = 2.0 * self.qa * u + self.qb;
        let dq = lin * du;
        let ddq = 2.0 * self.qa * du * du + lin * ddu;
        AlphaJet {
            ln_alpha: 0.5 * x * x + 0.5 * q.ln(),
            d1: x + dq / (2.0 * q),
            d2: 1.0 + ddq / (2.0 * q) - dq * dq / (2.0 * q * q),
            inv_alpha_sq: (-x * x).exp() / q,
        }
    }

    pub fn beta(&self, x: f64) -> C64 {
        let j = self.jet(x);
        C64::new(-j.d1, self.gamma * j.inv_alpha_sq)
    }

    pub fn beta_prime(&self, x: f64) -> C64 {
        let j = self.jet(x);
        C64::new(-j.d2, -2.0 * self.gamma * j.d1 * j.inv_alpha_sq)
    }

    /// `x² + 2β'(x)`.
    pub fn potential(&self, x: f64) -> C64 {
        let j = self.jet(x);
        C64::new(x * x - 2.0 * j.d2, -4.0 * self.gamma * j.d1 * j.inv_alpha_sq)
    }

    /// Points where `α'` (equivalently `(ln α)'`) changes sign on `grid`.
    pub fn slope_sign_changes(&self, grid: &Grid) -> Vec<f64> {
        let d1: Vec<f64> = grid.points().map(|x| self.jet(x).d1).collect();
        find_zeros(grid, &d1, None, 1e-12).zeros
    }
}

fn erf_inverse(u: f64) -> f64 {
    if u <= -1.0 {
        return f64::NEG_INFINITY;
    }
    if u >= 1.0 {
        return f64::INFINITY;
    }
    let (mut lo, mut hi) = (-7.0, 7.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if erf(mid) < u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// One real seed eigenpair `(ℰ_n, φ_n, φ_n')` sampled on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedState {
    pub energy: f64,
    pub phi: Vec<f64>,
    pub dphi: Vec<f64>,
}

/// A user-supplied real seed potential with known eigenpairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledSeed {
    pub grid: Grid,
    pub potential: Vec<f64>,
    pub factorization_energy: f64,
    pub states: Vec<SeedState>,
}

impl SampledSeed {
    pub fn new(grid: Grid, potential: Vec<f64>, factorization_energy: f64, states: Vec<SeedState>) -> Result<Self> {
        let n = grid.len();
        if potential.len() != n || states.iter().any(|s| s.phi.len() != n || s.dphi.len() != n) {
            return Err(Error::param("seed samples must match the grid length"));
        }
        if let Some(first) = states.first() {
            if factorization_energy >= first.energy {
                return Err(Error::param("factorization energy must lie below the seed ground energy"));
            }
        }
        if states.windows(2).any(|w| w[1].energy <= w[0].energy) {
            return Err(Error::param("seed energies must be strictly increasing"));
        }
        for (k, s) in states.iter().enumerate() {
            let sq: Vec<f64> = s.phi.iter().map(|p| p * p).collect();
            let norm = simpson(grid.h(), &sq);
            if (norm - 1.0).abs() > 1e-6 {
                return Err(Error::param(format!("seed state {k} has norm {norm}, expected 1")));
            }
            let zeros = find_zeros(&grid, &s.phi, Some(&s.dphi), 1e-10);
            if zeros.zeros.len() != k {
                return Err(Error::param(format!("seed state {k} has {} zeros", zeros.zeros.len())));
            }
        }
        Ok(SampledSeed { grid, potential, factorization_energy, states })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SeedSpec {
    /// `ϑ = x²`, `ℰ_n = 2n + 1`, factorization energy −1.
    HarmonicOscillator,
    Sampled(SampledSeed),
}

impl SeedSpec {
    pub fn factorization_energy(&self) -> f64 {
        match self {
            SeedSpec::HarmonicOscillator => OscillatorAlpha::FACTORIZATION_ENERGY,
            SeedSpec::Sampled(s) => s.factorization_energy,
        }
    }

    pub fn potential_samples(&self, grid: &Grid) -> Result<Vec<f64>> {
        match self {
            SeedSpec::HarmonicOscillator => Ok(grid.points().map(|x| x * x).collect()),
            SeedSpec::Sampled(s) => {
                same_grid(&s.grid, grid)?;
                Ok(s.potential.clone())
            }
        }
    }

    pub fn levels(&self) -> usize {
        match self {
            SeedSpec::HarmonicOscillator => MAX_HERMITE_LEVEL + 1,
            SeedSpec::Sampled(s) => s.states.len(),
        }
    }

    pub fn state(&self, n: usize, grid: &Grid) -> Result<SeedState> {
        match self {
            SeedSpec::HarmonicOscillator => seed_oscillator_state(n, grid),
            SeedSpec::Sampled(s) => {
                same_grid(&s.grid, grid)?;
                s.states.get(n).cloned().ok_or(Error::LevelOutOfRange(n))
            }
        }
    }
}

fn same_grid(a: &Grid, b: &Grid) -> Result<()> {
    if a != b {
        return Err(Error::param("seed grid differs from the requested grid"));
    }
    Ok(())
}

/// Hermite-function eigenstate `φ_n` of `−d²/dx² + x²` with `ℰ_n = 2n + 1`.
pub fn seed_oscillator_state(n: usize, grid: &Grid) -> Result<SeedState> {
    if n > MAX_HERMITE_LEVEL {
        return Err(Error::LevelOutOfRange(n));
    }
    let (phi, dphi) = grid.points().map(|x| hermite_function(n, x).expect("level checked")).unzip();
    Ok(SeedState { energy: 2.0 * n as f64 + 1.0, phi, dphi })
}

/// Sampled Ermakov solution together with the seed solutions it was built
/// from.
#[derive(Debug, Clone)]
pub struct ErmakovAlpha {
    pub grid: Grid,
    pub alpha: Vec<f64>,
    pub dalpha: Vec<f64>,
    pub params: DarbouxParams,
    pub factorization_energy: f64,
    /// Real solutions at `E₀`: `z(x_m) = 0, z'(x_m) = 1`, `v(x_m) = 1, v'(x_m) = 0`.
    pub z: Vec<f64>,
    pub v: Vec<f64>,
    /// `w₀ = z v' − z' v`.
    pub w0: f64,
    ln_alpha: Vec<f64>,
    log_d1: Vec<f64>,
    log_d2: Vec<f64>,
    inv_alpha_sq: Vec<f64>,
    closed_form: Option<OscillatorAlpha>,
}

impl ErmakovAlpha {
    pub fn closed_form(&self) -> Option<&OscillatorAlpha> {
        self.closed_form.as_ref()
    }

    pub fn strength(&self) -> f64 {
        self.params.strength()
    }

    /// Points where `α'` changes sign.
    pub fn slope_sign_changes(&self) -> Vec<f64> {
        find_zeros(&self.grid, &self.log_d1, None, 1e-12).zeros
    }

    /// Largest `|α'' − (ϑ − E₀)α − K/α³|` relative to the size of the
    /// terms, with `α''` by five-point differences of the sampled `α'`.
    pub fn ermakov_residual(&self, seed: &SeedSpec) -> Result<f64> {
        let theta = seed.potential_samples(&self.grid)?;
        let k = self.params.invariant();
        let h = self.grid.h();
        let n = self.grid.len();
        let da = &self.dalpha;
        let mut worst = 0.0f64;
        for i in 2..n - 2 {
            let dd = (-da[i + 2] + 8.0 * da[i + 1] - 8.0 * da[i - 1] + da[i - 2]) / (12.0 * h);
            let a = self.alpha[i];
            let lin = (theta[i] - self.factorization_energy) * a;
            let cube = k / (a * a * a);
            let r = dd - lin - cube;
            worst = worst.max(r.abs() / (dd.abs() + lin.abs() + cube.abs()).max(1.0));
        }
        Ok(worst)
    }
}

/// `α` for `seed` on `grid`. The oscillator seed uses the closed form; other
/// seeds go through [`ermakov_alpha_general`].
pub fn ermakov_alpha(seed: &SeedSpec, params: DarbouxParams, grid: &Grid) -> Result<ErmakovAlpha> {
    match seed {
        SeedSpec::HarmonicOscillator => {
            let closed = OscillatorAlpha::new(params)?;
            let n = grid.len();
            let mut out = ErmakovAlpha {
                grid: *grid,
                alpha: Vec::with_capacity(n),
                dalpha: Vec::with_capacity(n),
                params,
                factorization_energy: OscillatorAlpha::FACTORIZATION_ENERGY,
                z: Vec::with_capacity(n),
                v: Vec::with_capacity(n),
                w0: -1.0,
                ln_alpha: Vec::with_capacity(n),
                log_d1: Vec::with_capacity(n),
                log_d2: Vec::with_capacity(n),
                inv_alpha_sq: Vec::with_capacity(n),
                closed_form: None,
            };
            for x in grid.points() {
                let q = closed.radicand(x);
                if !(q > 0.0) {
                    return Err(Error::RadicandNonPositive { x, value: q });
                }
                let j = closed.jet(x);
                let a = j.ln_alpha.exp();
                out.alpha.push(a);
                out.dalpha.push(a * j.d1);
                out.ln_alpha.push(j.ln_alpha);
                out.log_d1.push(j.d1);
                out.log_d2.push(j.d2);
                out.inv_alpha_sq.push(j.inv_alpha_sq);
                let g = (0.5 * x * x).exp();
                out.v.push(g);
                out.z.push(g * 0.5 * SQRT_PI * erf(x));
            }
            out.closed_form = Some(closed);
            Ok(out)
        }
        SeedSpec::Sampled(_) => ermakov_alpha_general(seed, params, grid),
    }
}

/// `α² = a v² + b v z + c z²` with `a = c₀/w₀²`, `b = 2c₁/w₀`, `c = C`,
/// where `(z, v)` are integrated numerically from the grid midpoint.
pub fn ermakov_alpha_general(seed: &SeedSpec, params: DarbouxParams, grid: &Grid) -> Result<ErmakovAlpha> {
    params.validate()?;
    let theta = seed.potential_samples(grid)?;
    let e0 = seed.factorization_energy();
    let n = grid.len();
    let mid = n / 2;
    let h_max = grid.h().min(1e-3);
    let seed_v = |x: f64| -> C64 {
        match seed {
            SeedSpec::HarmonicOscillator => C64::new(x * x, 0.0),
            SeedSpec::Sampled(s) => {
                let t = ((x - s.grid.x_min()) / s.grid.h()).clamp(0.0, (n - 1) as f64);
                let i = (t.floor() as usize).min(n - 2);
                let f = t - i as f64;
                C64::new(s.potential[i] * (1.0 - f) + s.potential[i + 1] * f, 0.0)
            }
        }
    };
    let e = C64::new(e0, 0.0);
    let sweep = |start: State| -> Result<(Vec<f64>, Vec<f64>)> {
        let right: Vec<f64> = (mid..n).map(|i| grid.x(i)).collect();
        let left: Vec<f64> = (0..=mid).rev().map(|i| grid.x(i)).collect();
        let r = integrate_nodes(&seed_v, e, &right, start, h_max, &[])?;
        let l = integrate_nodes(&seed_v, e, &left, start, h_max, &[])?;
        let mut f = vec![0.0; n];
        let mut df = vec![0.0; n];
        for (k, s) in r.iter().enumerate() {
            f[mid + k] = s.psi.re;
            df[mid + k] = s.dpsi.re;
        }
        for (k, s) in l.iter().enumerate() {
            f[mid - k] = s.psi.re;
            df[mid - k] = s.dpsi.re;
        }
        Ok((f, df))
    };
    let (z, dz) = sweep(State::new(0.0.into(), 1.0.into()))?;
    let (v, dv) = sweep(State::new(1.0.into(), 0.0.into()))?;
    let w0 = -1.0;
    let a = params.c0 / (w0 * w0);
    let b = 2.0 * params.c1 / w0;
    let c = params.constant_term();
    let k = params.invariant();
    let mut out = ErmakovAlpha {
        grid: *grid,
        alpha: Vec::with_capacity(n),
        dalpha: Vec::with_capacity(n),
        params,
        factorization_energy: e0,
        z: z.clone(),
        v: v.clone(),
        w0,
        ln_alpha: Vec::with_capacity(n),
        log_d1: Vec::with_capacity(n),
        log_d2: Vec::with_capacity(n),
        inv_alpha_sq: Vec::with_capacity(n),
        closed_form: None,
    };
    for i in 0..n {
        let a2 = a * v[i] * v[i] + b * v[i] * z[i] + c * z[i] * z[i];
        if !(a2 > 0.0) {
            return Err(Error::RadicandNonPositive { x: grid.x(i), value: a2 });
        }
        let da2 = 2.0 * a * v[i] * dv[i] + b * (dv[i] * z[i] + v[i] * dz[i]) + 2.0 * c * z[i] * dz[i];
        let alpha = a2.sqrt();
        let d1 = da2 / (2.0 * a2);
        // α''/α from the Ermakov equation itself
        let dd_over = theta[i] - e0 + k / (a2 * a2);
        out.alpha.push(alpha);
        out.dalpha.push(alpha * d1);
        out.ln_alpha.push(0.5 * a2.ln());
        out.log_d1.push(d1);
        out.log_d2.push(dd_over - d1 * d1);
        out.inv_alpha_sq.push(1.0 / a2);
    }
    Ok(out)
}

/// Sampled `β` and `β'` plus what the partner states need.
#[derive(Debug, Clone)]
pub struct Superpotential {
    pub grid: Grid,
    pub beta: Vec<C64>,
    pub dbeta: Vec<C64>,
    pub lambda: f64,
    /// `γ = √K`, the coefficient of `i/α²`.
    pub strength: f64,
    pub factorization_energy: f64,
    theta: Vec<f64>,
    ln_alpha: Vec<f64>,
    inv_alpha_sq: Vec<f64>,
}

pub fn superpotential(seed: &SeedSpec, alpha: &ErmakovAlpha) -> Result<Superpotential> {
    let gamma = alpha.strength();
    let beta = (0..alpha.grid.len())
        .map(|i| C64::new(-alpha.log_d1[i], gamma * alpha.inv_alpha_sq[i]))
        .collect();
    let dbeta = (0..alpha.grid.len())
        .map(|i| C64::new(-alpha.log_d2[i], -2.0 * gamma * alpha.log_d1[i] * alpha.inv_alpha_sq[i]))
        .collect();
    Ok(Superpotential {
        grid: alpha.grid,
        beta,
        dbeta,
        lambda: alpha.params.lambda,
        strength: gamma,
        factorization_energy: alpha.factorization_energy,
        theta: seed.potential_samples(&alpha.grid)?,
        ln_alpha: alpha.ln_alpha.clone(),
        inv_alpha_sq: alpha.inv_alpha_sq.clone(),
    })
}

impl Superpotential {
    /// `max |−β' + β² − (ϑ − E₀)|` over the grid.
    pub fn riccati_residual(&self) -> f64 {
        (0..self.grid.len())
            .map(|i| {
                let b = self.beta[i];
                (-self.dbeta[i] + b * b - (self.theta[i] - self.factorization_energy)).norm()
            })
            .fold(0.0, f64::max)
    }

    /// `ϑ + 2β'` on the grid.
    pub fn potential_samples(&self) -> Vec<C64> {
        (0..self.grid.len()).map(|i| self.theta[i] + 2.0 * self.dbeta[i]).collect()
    }
}

/// The partner potential: the closed form for the oscillator seed, a
/// sampled potential otherwise.
pub fn darboux_potential(alpha: &ErmakovAlpha, sp: &Superpotential) -> Result<PotentialSpec> {
    match alpha.closed_form() {
        Some(c) => Ok(PotentialSpec::DarbouxOscillator(c.clone())),
        None => PotentialSpec::sampled(sp.grid, sp.potential_samples()),
    }
}

/// `ψ_{n+1} ∝ φ_n' + βφ_n` at energy `ℰ_n`.
pub fn partner_state(seed_state: &SeedState, sp: &Superpotential) -> Result<WaveFunction> {
    let n = sp.grid.len();
    if seed_state.phi.len() != n {
        return Err(Error::param("seed state does not live on the superpotential grid"));
    }
    let mut psi = Vec::with_capacity(n);
    let mut dpsi = Vec::with_capacity(n);
    for i in 0..n {
        let (p, dp) = (seed_state.phi[i], seed_state.dphi[i]);
        let ddp = (sp.theta[i] - seed_state.energy) * p;
        psi.push(dp + sp.beta[i] * p);
        dpsi.push(ddp + sp.dbeta[i] * p + sp.beta[i] * dp);
    }
    normalize(WaveFunction::new(sp.grid, psi, dpsi, seed_state.energy)?)
}

/// `ψ₀ ∝ exp(∫β)` from the grid midpoint, at the factorization energy.
/// This is the sign that solves `Hψ₀ = E₀ψ₀` for `V = ϑ + 2β'`; the other
/// sign grows like `α`. The real part of the exponent is `−ln α` exactly;
/// only the phase `γ∫α⁻²` is integrated numerically.
pub fn missing_state(sp: &Superpotential) -> Result<WaveFunction> {
    let n = sp.grid.len();
    let mid = n / 2;
    let inv: Vec<C64> = sp.inv_alpha_sq.iter().map(|&v| C64::new(v, 0.0)).collect();
    let phase = cumulative(sp.grid.h(), &inv, mid);
    let psi: Vec<C64> = (0..n)
        .map(|i| C64::from_polar((sp.ln_alpha[mid] - sp.ln_alpha[i]).exp(), sp.strength * phase[i].re))
        .collect();
    let max = psi.iter().fold(0.0f64, |m, p| m.max(p.norm()));
    let tail = psi[0].norm().max(psi[n - 1].norm()) / max;
    if !(tail <= 1e-6) {
        return Err(Error::NonNormalizable(tail));
    }
    let dpsi = (0..n).map(|i| sp.beta[i] * psi[i]).collect();
    normalize(WaveFunction::new(sp.grid, psi, dpsi, sp.factorization_energy)?)
}

/// Everything generated from one seed and parameter set.
#[derive(Debug, Clone)]
pub struct DarbouxFamily {
    pub params: DarbouxParams,
    pub alpha: ErmakovAlpha,
    pub superpotential: Superpotential,
    pub potential: PotentialSpec,
    /// `ψ₀` (missing state) followed by `ψ₁..=ψ_levels`.
    pub states: Vec<WaveFunction>,
    pub energies: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub c0: f64,
    pub c1: f64,
    pub lambda: f64,
    pub factorization_energy: f64,
    pub coefficient_form: CoefficientForm,
    pub invariant: f64,
    pub strength: f64,
    pub seed: String,
    pub levels: usize,
}

impl DarbouxFamily {
    pub fn manifest(&self, seed: &SeedSpec) -> Manifest {
        Manifest {
            c0: self.params.c0,
            c1: self.params.c1,
            lambda: self.params.lambda,
            factorization_energy: self.alpha.factorization_energy,
            coefficient_form: self.params.form,
            invariant: self.params.invariant(),
            strength: self.params.strength(),
            seed: match seed {
                SeedSpec::HarmonicOscillator => "harmonic_oscillator".into(),
                SeedSpec::Sampled(_) => "sampled".into(),
            },
            levels: self.states.len() - 1,
        }
    }
}

/// Builds `α`, `β`, `V` and the states `ψ₀..=ψ_levels`.
pub fn build_family(seed: &SeedSpec, params: DarbouxParams, grid: &Grid, levels: usize) -> Result<DarbouxFamily> {
    if levels > seed.levels() {
        return Err(Error::LevelOutOfRange(levels));
    }
    let alpha = ermakov_alpha(seed, params, grid)?;
    let changes = alpha.slope_sign_changes();
    if changes.len() != 1 {
        return Err(Error::SlopeSignChanges(changes));
    }
    let sp = superpotential(seed, &alpha)?;
    let potential = darboux_potential(&alpha, &sp)?;
    let mut states = vec![missing_state(&sp)?];
    for n in 0..levels {
        states.push(partner_state(&seed.state(n, grid)?, &sp)?);
    }
    let energies = states.iter().map(|s| s.energy).collect();
    Ok(DarbouxFamily { params, alpha, superpotential: sp, potential, states, energies })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::residual::residual_oracle;

    fn grid() -> Grid {
        Grid::symmetric(10.0, 1e-3).unwrap()
    }

    #[test]
    fn radicand_at_origin() {
        let a = OscillatorAlpha::new(DarbouxParams::new(2.0, 0.0, 1.7)).unwrap();
        assert!((a.alpha(0.0) - 0.85f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn beta_at_origin_uses_invariant_strength() {
        let a = OscillatorAlpha::new(DarbouxParams::new(2.0, 0.0, 1.7)).unwrap();
        let b = a.beta(0.0);
        assert_eq!(b.re, 0.0);
        assert!((b.im - 1.7f64.sqrt() / 0.85).abs() < 1e-12);
    }

    #[test]
    fn analytic_derivatives_match_differences() {
        let a = OscillatorAlpha::new(DarbouxParams::new(1.2, 1.0, 0.02)).unwrap();
        let d = 1e-5;
        for x in [-2.0, -1.077, 0.0, 0.8, 3.0] {
            let fd = (a.beta(x + d) - a.beta(x - d)) / (2.0 * d);
            assert!((fd - a.beta_prime(x)).norm() < 1e-6, "x = {x}");
            let fd_ln = (a.alpha(x + d).ln() - a.alpha(x - d).ln()) / (2.0 * d);
            assert!((fd_ln - a.jet(x).d1).abs() < 1e-8);
        }
    }

    #[test]
    fn riccati_and_ermakov_hold() {
        for p in [DarbouxParams::new(2.0, 0.0, 1.7), DarbouxParams::new(1.2, 1.0, 0.02)] {
            for form in [CoefficientForm::Oscillator, CoefficientForm::General] {
                let p = p.with_form(form);
                let al = ermakov_alpha(&SeedSpec::HarmonicOscillator, p, &grid()).unwrap();
                let sp = superpotential(&SeedSpec::HarmonicOscillator, &al).unwrap();
                assert!(sp.riccati_residual() <= 1e-6, "{p:?}: {}", sp.riccati_residual());
                assert!(al.ermakov_residual(&SeedSpec::HarmonicOscillator).unwrap() < 1e-5);
            }
        }
    }

    #[test]
    fn single_slope_change_for_reference_parameters() {
        let a = ermakov_alpha(&SeedSpec::HarmonicOscillator, DarbouxParams::new(1.2, 1.0, 0.02), &grid()).unwrap();
        assert!(a.alpha.iter().all(|&v| v > 0.0));
        let ch = a.slope_sign_changes();
        assert_eq!(ch.len(), 1);
        assert!((ch[0] + 1.077).abs() < 1e-3, "{ch:?}");
    }

    #[test]
    fn vanishing_radicand_is_rejected_with_location() {
        // C = (c1 + λ)/c0 = 0 puts the radicand's zero at x = 0.
        let e = OscillatorAlpha::new(DarbouxParams::new(1.0, 0.0, 0.0)).unwrap_err();
        match e {
            Error::RadicandNonPositive { x, .. } => assert!(x.abs() < 1e-9),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn zero_invariant_gives_real_partner() {
        // c0 = c1 = 1, λ = 0: C = 1, K = 0 and the radicand's double root
        // sits at Erf x = −2/√π, off the real line.
        let g = grid();
        let fam = build_family(&SeedSpec::HarmonicOscillator, DarbouxParams::new(1.0, 1.0, 0.0), &g, 2).unwrap();
        assert_eq!(fam.superpotential.strength, 0.0);
        assert!(fam.superpotential.beta.iter().all(|b| b.im == 0.0));
        assert!(g.points().all(|x| fam.potential.eval(x).unwrap().im == 0.0));
        let psi0 = &fam.states[0];
        let peak = psi0.psi.iter().fold(0.0f64, |m, p| m.max(p.norm()));
        assert!(psi0.psi.iter().all(|p| p.im == 0.0 && p.re > 0.0 || p.norm() < 1e-12 * peak));
        // ψ₀ ∝ 1/α
        let ratio = |i: usize| psi0.psi[i].re * fam.alpha.alpha[i];
        assert!((ratio(100) / ratio(g.len() / 2) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn general_path_agrees_with_closed_form() {
        for p in [DarbouxParams::new(2.0, 0.0, 1.7), DarbouxParams::new(1.2, 1.0, 0.02)] {
            let closed = ermakov_alpha(&SeedSpec::HarmonicOscillator, p, &grid()).unwrap();
            let general = ermakov_alpha_general(&SeedSpec::HarmonicOscillator, p.general_equivalent(), &grid()).unwrap();
            for i in (0..grid().len()).step_by(97) {
                let rel = (closed.alpha[i] - general.alpha[i]).abs() / closed.alpha[i];
                assert!(rel < 1e-6, "{p:?} at x = {}: {rel}", grid().x(i));
            }
        }
    }

    #[test]
    fn oscillator_seed_states() {
        let g = Grid::symmetric(8.0, 1e-3).unwrap();
        let s0 = seed_oscillator_state(0, &g).unwrap();
        assert_eq!(s0.energy, 1.0);
        let s3 = seed_oscillator_state(3, &g).unwrap();
        let z = find_zeros(&g, &s3.phi, Some(&s3.dphi), 1e-12).zeros;
        let r = 1.5f64.sqrt();
        assert_eq!(z.len(), 3);
        for (a, b) in z.iter().zip([-r, 0.0, r]) {
            assert!((a - b).abs() < 1e-9);
        }
        let sq: Vec<f64> = s3.phi.iter().map(|p| p * p).collect();
        assert!((simpson(g.h(), &sq) - 1.0).abs() < 1e-10);
        assert!(seed_oscillator_state(31, &g).is_err());
    }

    #[test]
    fn family_spectrum_and_intertwining() {
        let g = grid();
        let fam = build_family(&SeedSpec::HarmonicOscillator, DarbouxParams::new(1.2, 1.0, 0.02), &g, 4).unwrap();
        assert_eq!(fam.energies, vec![-1.0, 1.0, 3.0, 5.0, 7.0]);
        for s in &fam.states {
            let r = residual_oracle(&fam.potential, s, s.energy);
            assert!(r.value <= 1e-5, "E = {}: {}", s.energy, r.value);
        }
    }

    #[test]
    fn zeros_of_alpha_slope_are_zeros_of_vi() {
        let a = OscillatorAlpha::new(DarbouxParams::new(1.2, 1.0, 0.02)).unwrap();
        let x0 = a.slope_sign_changes(&grid())[0];
        assert!(a.potential(x0).im.abs() < 1e-9);
    }

    #[test]
    fn sampled_seed_reproduces_oscillator_family() {
        let g = Grid::symmetric(8.0, 1e-3).unwrap();
        let states = (0..3).map(|n| seed_oscillator_state(n, &g).unwrap()).collect();
        let seed = SeedSpec::Sampled(SampledSeed::new(g, g.points().map(|x| x * x).collect(), -1.0, states).unwrap());
        let p = DarbouxParams::new(2.0, 0.0, 1.7);
        let fam = build_family(&seed, p.general_equivalent(), &g, 2).unwrap();
        let reference = build_family(&SeedSpec::HarmonicOscillator, p, &g, 2).unwrap();
        assert!(matches!(fam.potential, PotentialSpec::Sampled(_)));
        for x in [-1.0, 0.0, 0.5, 2.0] {
            let d = (fam.potential.eval(x).unwrap() - reference.potential.eval(x).unwrap()).norm();
            assert!(d < 1e-5, "x = {x}: {d}");
        }
    }
}
